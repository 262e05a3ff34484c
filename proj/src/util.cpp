#include "sdfl/util.hpp"

#include <charconv>
#include <cstdlib>

#include "sdfl/errors.hpp"

namespace sdfl {

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
    size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
    size_t e = s.size();
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == delim) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

namespace {

[[noreturn]] void bad_value(std::string_view s, std::string_view context, const char* what) {
    throw ConfigError(std::string(context) + ": expected " + what + ", got '" + std::string(s) + "'");
}

} // namespace

double parse_double(std::string_view s, std::string_view context) {
    s = trim(s);
    if (s.empty()) bad_value(s, context, "a number");
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad_value(s, context, "a number");
    return v;
}

std::int64_t parse_int(std::string_view s, std::string_view context) {
    s = trim(s);
    std::int64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
        bad_value(s, context, "an integer");
    return v;
}

std::uint64_t parse_uint(std::string_view s, std::string_view context) {
    s = trim(s);
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
        bad_value(s, context, "an unsigned integer");
    return v;
}

bool parse_bool(std::string_view s, std::string_view context) {
    s = trim(s);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad_value(s, context, "a boolean");
}

} // namespace sdfl
