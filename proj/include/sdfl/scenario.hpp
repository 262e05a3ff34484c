#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sdfl/network.hpp"
#include "sdfl/rng.hpp"

namespace sdfl {

enum class SdMode { linear, exponential };

/// Parameters of the crowd-score function S.
struct SdParams {
    double a = 10.0;
    double b = 0.5;
    int gamma = 4;                                   // default queue strength
    std::map<std::pair<int, int>, int> gamma_overrides; // (type, zone) -> gamma
    SdMode mode = SdMode::linear;
    bool clamp = false; // floor S at zero (sensitivity studies only)

    int gamma_for(int type, int zone) const {
        auto it = gamma_overrides.find({type, zone});
        return it == gamma_overrides.end() ? gamma : it->second;
    }
};

struct QueueParams {
    double mean_interarrival = 1.0; // minutes
    double mean_service = 0.7;      // minutes
    bool fixed_horizon = false;     // false: run until all customers are served
    double horizon_minutes = 0.0;   // only meaningful when fixed_horizon
};

/// Flat sectioned key-value configuration ("[section]" headers, "key = value"
/// lines, '#' comments). Unknown sections or keys are errors.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(std::string_view text, std::string_view origin = "<config>");

    /// Applies a "section.key=value" override (CLI flags land here).
    void apply_override(std::string_view assignment);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

private:
    void set_checked(const std::string& section, const std::string& key, std::string value,
                     const std::string& where);
    std::map<std::string, std::map<std::string, std::string>> values_;
};

/// Full problem instance: network with populations, facility types and
/// budgets, per (type, zone) demand, score and queue parameters, time
/// discretization, and the master seed all randomness derives from.
/// Immutable once built.
struct Scenario {
    RoadNetwork network;
    std::vector<std::string> facility_types;
    std::vector<int> budgets;                        // per type
    std::vector<std::vector<std::int64_t>> demands;  // [type][zone]
    SdParams sd;
    QueueParams queue;
    double time_slot = 1.0; // minutes per discrete slot
    int demand_multiplicity = 1;
    std::uint64_t master_seed = 0;

    int type_count() const { return static_cast<int>(facility_types.size()); }
    int zone_count() const { return network.zone_count(); }
    std::int64_t total_demand(int type) const;

    /// Deterministic child stream keyed by (master_seed, label, index).
    RngStream derive_stream(std::string_view label, std::uint64_t index = 0) const {
        return RngStream(RngStream::derive_key(master_seed, label, index));
    }
};

/// Builds a scenario from configuration: generates or loads the network,
/// samples populations uniformly from the configured integer interval,
/// derives uniform demand (demand = population for every type), and
/// validates all invariants. Non-fatal findings go to `warnings`.
Scenario build_scenario(const Config& config, std::vector<std::string>* warnings = nullptr);

/// Exact round-trip serialization.
void save_scenario(const Scenario& sc, std::ostream& out);
void save_scenario(const Scenario& sc, const std::string& path);
Scenario load_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

} // namespace sdfl
