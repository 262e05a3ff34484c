#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sdfl {

/// Shortest decimal rendering that parses back to the identical double.
std::string format_number(double v);

inline std::string format_number(std::int64_t v) { return std::to_string(v); }
inline std::string format_number(std::uint64_t v) { return std::to_string(v); }
inline std::string format_number(int v) { return std::to_string(v); }

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

/// Strict parsers; `context` names the offending field in the error message.
double parse_double(std::string_view s, std::string_view context);
std::int64_t parse_int(std::string_view s, std::string_view context);
std::uint64_t parse_uint(std::string_view s, std::string_view context);
bool parse_bool(std::string_view s, std::string_view context);

} // namespace sdfl
