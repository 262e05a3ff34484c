#include "sdfl/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sdfl/errors.hpp"
#include "sdfl/util.hpp"

namespace sdfl {

namespace {

// Section -> allowed keys. Anything else in a config file is an error.
const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"network",
         {"kind", "n", "rows", "cols", "neighborhood", "weights", "weight_min", "weight_max",
          "path"}},
        {"facilities", {"types", "budgets"}},
        {"population", {"min", "max"}},
        {"demand", {"multiplicity"}},
        {"sd", {"mode", "a", "b", "gamma", "clamp", "gamma_overrides"}},
        {"queue", {"mean_interarrival", "mean_service", "horizon", "horizon_minutes"}},
        {"sim", {"time_slot"}},
        {"seed", {"master"}},
    };
    return schema;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

} // namespace

void Config::set_checked(const std::string& section, const std::string& key, std::string value,
                         const std::string& where) {
    const auto& schema = config_schema();
    auto sit = schema.find(section);
    if (sit == schema.end())
        throw ConfigError(where + ": unknown section [" + section + "]");
    if (!sit->second.count(key))
        throw ConfigError(where + ": unknown key '" + key + "' in section [" + section + "]");
    values_[section][key] = std::move(value);
}

Config Config::parse_string(std::string_view text, std::string_view origin) {
    Config cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = std::string(origin) + ":" + std::to_string(lineno);
        std::string body(trim(strip_comment(line)));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError(where + ": malformed section header '" + body + "'");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            if (!config_schema().count(section))
                throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + body + "'");
        std::string key(trim(body.substr(0, eq)));
        std::string value(trim(body.substr(eq + 1)));
        if (section.empty())
            throw ConfigError(where + ": key '" + key + "' appears before any section header");
        if (key.empty()) throw ConfigError(where + ": empty key");
        cfg.set_checked(section, key, value, where);
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

void Config::apply_override(std::string_view assignment) {
    std::string s(assignment);
    auto eq = s.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like section.key=value, got '" + s + "'");
    std::string path(trim(s.substr(0, eq)));
    std::string value(trim(s.substr(eq + 1)));
    auto dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
        throw ConfigError("override must look like section.key=value, got '" + s + "'");
    set_checked(path.substr(0, dot), path.substr(dot + 1), value, "<override>");
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto sit = values_.find(section);
    return sit != values_.end() && sit->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    auto sit = values_.find(section);
    if (sit == values_.end()) return fallback;
    auto kit = sit->second.find(key);
    return kit == sit->second.end() ? fallback : kit->second;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
    if (!has(section, key)) return fallback;
    return parse_int(get_string(section, key, ""), section + "." + key);
}

std::uint64_t Config::get_uint(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    return parse_uint(get_string(section, key, ""), section + "." + key);
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    if (!has(section, key)) return fallback;
    return parse_double(get_string(section, key, ""), section + "." + key);
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    return parse_bool(get_string(section, key, ""), section + "." + key);
}

std::int64_t Scenario::total_demand(int type) const {
    if (type < 0 || type >= type_count())
        throw DomainError("total_demand: type index out of range");
    std::int64_t sum = 0;
    for (auto d : demands[static_cast<std::size_t>(type)]) sum += d;
    return sum;
}

namespace {

void validate_scenario(const Scenario& sc, std::vector<std::string>* warnings) {
    const int n = sc.zone_count();
    const int k = sc.type_count();
    if (k < 1) throw ConfigError("scenario needs at least one facility type");
    if (!sc.network.has_populations())
        throw ConfigError("scenario network has no populations");
    for (int i = 0; i < k; ++i) {
        if (sc.facility_types[static_cast<std::size_t>(i)].empty())
            throw ConfigError("facility type name must be non-empty");
        for (char c : sc.facility_types[static_cast<std::size_t>(i)])
            if (std::isspace(static_cast<unsigned char>(c)))
                throw ConfigError("facility type name must not contain whitespace: '" +
                                  sc.facility_types[static_cast<std::size_t>(i)] + "'");
    }
    if (static_cast<int>(sc.budgets.size()) != k)
        throw ConfigError("budget count does not match facility type count");
    for (int i = 0; i < k; ++i) {
        int l = sc.budgets[static_cast<std::size_t>(i)];
        if (l < 1)
            throw ConfigError("budget for type '" + sc.facility_types[static_cast<std::size_t>(i)] +
                              "' must be at least 1");
        if (l > n)
            throw ConfigError("budget " + std::to_string(l) + " for type '" +
                              sc.facility_types[static_cast<std::size_t>(i)] +
                              "' exceeds zone count " + std::to_string(n));
        if (warnings && 2 * l > n)
            warnings->push_back("budget " + std::to_string(l) + " for type '" +
                                sc.facility_types[static_cast<std::size_t>(i)] +
                                "' exceeds half the zone count (" + std::to_string(n) +
                                "); placements are intended to be sparse");
    }
    if (static_cast<int>(sc.demands.size()) != k)
        throw ConfigError("demand table does not match facility type count");
    if (sc.demand_multiplicity < 1)
        throw ConfigError("demand multiplicity must be at least 1");
    for (int i = 0; i < k; ++i) {
        const auto& row = sc.demands[static_cast<std::size_t>(i)];
        if (static_cast<int>(row.size()) != n)
            throw ConfigError("demand table for type '" +
                              sc.facility_types[static_cast<std::size_t>(i)] +
                              "' does not cover every zone");
        for (int j = 0; j < n; ++j) {
            std::int64_t d = row[static_cast<std::size_t>(j)];
            if (d < 0) throw ConfigError("demand must be nonnegative");
            std::int64_t cap =
                sc.network.population(j) * static_cast<std::int64_t>(sc.demand_multiplicity);
            if (d > cap)
                throw ConfigError("demand " + std::to_string(d) + " at zone " + std::to_string(j) +
                                  " exceeds population times multiplicity (" + std::to_string(cap) +
                                  ")");
        }
    }
    if (!(sc.sd.a > 0.0)) throw ConfigError("sd.a must be positive");
    if (!(sc.sd.b > 0.0)) throw ConfigError("sd.b must be positive");
    if (sc.sd.gamma < 1) throw ConfigError("sd.gamma must be a positive integer");
    if (sc.sd.mode == SdMode::exponential && !(sc.sd.a > 1.0))
        throw ConfigError("sd.a must exceed 1 in exponential mode");
    for (const auto& [key, g] : sc.sd.gamma_overrides) {
        if (key.first < 0 || key.first >= k || key.second < 0 || key.second >= n)
            throw ConfigError("sd gamma override targets a type or zone that does not exist");
        if (g < 1) throw ConfigError("sd gamma override must be a positive integer");
    }
    if (!(sc.queue.mean_interarrival > 0.0))
        throw ConfigError("queue.mean_interarrival must be positive");
    if (!(sc.queue.mean_service > 0.0)) throw ConfigError("queue.mean_service must be positive");
    if (sc.queue.fixed_horizon && !(sc.queue.horizon_minutes > 0.0))
        throw ConfigError("queue.horizon_minutes must be positive when the horizon is fixed");
    if (!(sc.time_slot > 0.0)) throw ConfigError("sim.time_slot must be positive");
}

WeightSpec parse_weight_spec(const Config& cfg) {
    std::string kind = cfg.get_string("network", "weights", "unit");
    if (kind == "unit") return WeightSpec::unit();
    if (kind == "uniform") {
        double lo = cfg.get_double("network", "weight_min", 0.5);
        double hi = cfg.get_double("network", "weight_max", 1.5);
        if (!(lo > 0.0) || !(hi > 0.0) || lo > hi)
            throw ConfigError("network.weight_min/weight_max must satisfy 0 < min <= max");
        return WeightSpec::uniform(lo, hi);
    }
    throw ConfigError("network.weights must be 'unit' or 'uniform', got '" + kind + "'");
}

std::vector<std::string> parse_csv_list(const std::string& text, const std::string& what) {
    std::vector<std::string> out;
    for (auto& piece : split(text, ',')) {
        std::string item(trim(piece));
        if (item.empty()) throw ConfigError(what + ": empty list entry in '" + text + "'");
        out.push_back(item);
    }
    if (out.empty()) throw ConfigError(what + ": list is empty");
    return out;
}

} // namespace

Scenario build_scenario(const Config& cfg, std::vector<std::string>* warnings) {
    Scenario sc;
    sc.master_seed = cfg.get_uint("seed", "master", 12345);
    sc.time_slot = cfg.get_double("sim", "time_slot", 1.0);
    sc.demand_multiplicity = static_cast<int>(cfg.get_int("demand", "multiplicity", 1));

    // network
    std::string kind = cfg.get_string("network", "kind", "complete");
    if (kind == "complete") {
        int n = static_cast<int>(cfg.get_int("network", "n", 0));
        auto stream = sc.derive_stream("netweights");
        sc.network = generate_complete(n, parse_weight_spec(cfg), stream);
    } else if (kind == "grid") {
        int rows = static_cast<int>(cfg.get_int("network", "rows", 0));
        int cols = static_cast<int>(cfg.get_int("network", "cols", 0));
        std::string hood = cfg.get_string("network", "neighborhood", "moore");
        GridNeighborhood nb;
        if (hood == "moore")
            nb = GridNeighborhood::moore;
        else if (hood == "von_neumann")
            nb = GridNeighborhood::von_neumann;
        else
            throw ConfigError("network.neighborhood must be 'moore' or 'von_neumann', got '" +
                              hood + "'");
        auto stream = sc.derive_stream("netweights");
        sc.network = generate_grid(rows, cols, parse_weight_spec(cfg), stream, nb);
    } else if (kind == "file") {
        std::string path = cfg.get_string("network", "path", "");
        if (path.empty()) throw ConfigError("network.kind=file requires network.path");
        sc.network = load_network(path);
    } else {
        throw ConfigError("network.kind must be 'complete', 'grid' or 'file', got '" + kind + "'");
    }

    // populations: keep the ones shipped with a network file unless the config
    // asks for a specific interval; otherwise sample uniformly.
    bool explicit_interval = cfg.has("population", "min") || cfg.has("population", "max");
    if (!sc.network.has_populations() || explicit_interval) {
        std::int64_t lo = cfg.get_int("population", "min", 1000);
        std::int64_t hi = cfg.get_int("population", "max", 2000);
        if (lo < 1 || hi < lo)
            throw ConfigError("population interval must satisfy 1 <= min <= max");
        auto stream = sc.derive_stream("population");
        std::vector<std::int64_t> pops(static_cast<std::size_t>(sc.network.zone_count()));
        for (auto& p : pops) p = stream.uniform_int(lo, hi);
        sc.network.set_populations(std::move(pops));
    }

    // facility types and budgets
    sc.facility_types = parse_csv_list(cfg.get_string("facilities", "types", "facility"),
                                       "facilities.types");
    {
        std::set<std::string> seen;
        for (const auto& t : sc.facility_types)
            if (!seen.insert(t).second)
                throw ConfigError("facilities.types: duplicate type name '" + t + "'");
    }
    auto budget_items = parse_csv_list(cfg.get_string("facilities", "budgets", "1"),
                                       "facilities.budgets");
    if (budget_items.size() == 1 && sc.facility_types.size() > 1)
        budget_items.assign(sc.facility_types.size(), budget_items.front());
    if (budget_items.size() != sc.facility_types.size())
        throw ConfigError("facilities.budgets must list one budget per type (or one for all)");
    for (const auto& item : budget_items)
        sc.budgets.push_back(static_cast<int>(parse_int(item, "facilities.budgets")));

    // uniform demand: every resident visits each facility type once
    const int n = sc.zone_count();
    sc.demands.assign(sc.facility_types.size(), std::vector<std::int64_t>());
    for (auto& row : sc.demands) {
        row.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = sc.network.population(j);
    }

    // score function
    std::string mode = cfg.get_string("sd", "mode", "linear");
    if (mode == "linear")
        sc.sd.mode = SdMode::linear;
    else if (mode == "exponential")
        sc.sd.mode = SdMode::exponential;
    else
        throw ConfigError("sd.mode must be 'linear' or 'exponential', got '" + mode + "'");
    sc.sd.a = cfg.get_double("sd", "a", 10.0);
    sc.sd.b = cfg.get_double("sd", "b", 0.5);
    sc.sd.gamma = static_cast<int>(cfg.get_int("sd", "gamma", 4));
    sc.sd.clamp = cfg.get_bool("sd", "clamp", false);
    if (cfg.has("sd", "gamma_overrides")) {
        // comma-separated triples type:zone:gamma
        for (const auto& item :
             parse_csv_list(cfg.get_string("sd", "gamma_overrides", ""), "sd.gamma_overrides")) {
            auto parts = split(item, ':');
            if (parts.size() != 3)
                throw ConfigError("sd.gamma_overrides entries must be type:zone:gamma, got '" +
                                  item + "'");
            int ti = static_cast<int>(parse_int(trim(parts[0]), "sd.gamma_overrides type"));
            int zj = static_cast<int>(parse_int(trim(parts[1]), "sd.gamma_overrides zone"));
            int g = static_cast<int>(parse_int(trim(parts[2]), "sd.gamma_overrides gamma"));
            sc.sd.gamma_overrides[{ti, zj}] = g;
        }
    }

    // queue parameters
    sc.queue.mean_interarrival = cfg.get_double("queue", "mean_interarrival", 1.0);
    sc.queue.mean_service = cfg.get_double("queue", "mean_service", 0.7);
    std::string horizon = cfg.get_string("queue", "horizon", "until_all_served");
    if (horizon == "until_all_served") {
        sc.queue.fixed_horizon = false;
    } else if (horizon == "fixed") {
        sc.queue.fixed_horizon = true;
        sc.queue.horizon_minutes = cfg.get_double("queue", "horizon_minutes", 0.0);
    } else {
        throw ConfigError("queue.horizon must be 'until_all_served' or 'fixed', got '" + horizon +
                          "'");
    }

    validate_scenario(sc, warnings);
    return sc;
}

void save_scenario(const Scenario& sc, std::ostream& out) {
    out << "sdfl-scenario 1\n";
    out << "master_seed " << sc.master_seed << "\n";
    out << "time_slot " << format_number(sc.time_slot) << "\n";
    out << "demand_multiplicity " << sc.demand_multiplicity << "\n";
    out << "sd " << (sc.sd.mode == SdMode::linear ? "linear" : "exponential") << " "
        << format_number(sc.sd.a) << " " << format_number(sc.sd.b) << " " << sc.sd.gamma << " "
        << (sc.sd.clamp ? 1 : 0) << "\n";
    for (const auto& [key, g] : sc.sd.gamma_overrides)
        out << "sd_override " << key.first << " " << key.second << " " << g << "\n";
    out << "queue " << format_number(sc.queue.mean_interarrival) << " "
        << format_number(sc.queue.mean_service) << " " << (sc.queue.fixed_horizon ? 1 : 0) << " "
        << format_number(sc.queue.horizon_minutes) << "\n";
    out << "types " << sc.type_count() << "\n";
    for (int i = 0; i < sc.type_count(); ++i)
        out << "type " << sc.facility_types[static_cast<std::size_t>(i)] << " "
            << sc.budgets[static_cast<std::size_t>(i)] << "\n";
    out << "network\n";
    save_network(sc.network, out);
    out << "demands\n";
    for (int i = 0; i < sc.type_count(); ++i) {
        out << "demand " << i;
        for (auto d : sc.demands[static_cast<std::size_t>(i)]) out << " " << d;
        out << "\n";
    }
    out << "end\n";
}

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open scenario file for writing: " + path);
    save_scenario(sc, out);
    if (!out) throw IoError("failed writing scenario file: " + path);
}

namespace {

std::istream& expect_word(std::istream& in, const char* want, const char* context) {
    std::string got;
    if (!(in >> got) || got != want)
        throw IoError(std::string("scenario parse error: expected '") + want + "' " + context +
                      (got.empty() ? "" : ", got '" + got + "'"));
    return in;
}

} // namespace

Scenario load_scenario(std::istream& in) {
    Scenario sc;
    expect_word(in, "sdfl-scenario", "as the file signature");
    int version = 0;
    if (!(in >> version) || version != 1)
        throw IoError("scenario parse error: unsupported version");
    expect_word(in, "master_seed", "after the signature");
    if (!(in >> sc.master_seed)) throw IoError("scenario parse error: bad master_seed");
    expect_word(in, "time_slot", "after master_seed");
    {
        std::string tok;
        in >> tok;
        sc.time_slot = parse_double(tok, "time_slot");
    }
    expect_word(in, "demand_multiplicity", "after time_slot");
    if (!(in >> sc.demand_multiplicity))
        throw IoError("scenario parse error: bad demand_multiplicity");
    expect_word(in, "sd", "after demand_multiplicity");
    {
        std::string mode, a, b;
        int gamma = 0, clamp = 0;
        if (!(in >> mode >> a >> b >> gamma >> clamp))
            throw IoError("scenario parse error: bad sd line");
        if (mode == "linear")
            sc.sd.mode = SdMode::linear;
        else if (mode == "exponential")
            sc.sd.mode = SdMode::exponential;
        else
            throw IoError("scenario parse error: unknown sd mode '" + mode + "'");
        sc.sd.a = parse_double(a, "sd a");
        sc.sd.b = parse_double(b, "sd b");
        sc.sd.gamma = gamma;
        sc.sd.clamp = clamp != 0;
    }
    std::string word;
    if (!(in >> word)) throw IoError("scenario parse error: truncated after sd line");
    while (word == "sd_override") {
        int ti = 0, zj = 0, g = 0;
        if (!(in >> ti >> zj >> g)) throw IoError("scenario parse error: bad sd_override line");
        sc.sd.gamma_overrides[{ti, zj}] = g;
        if (!(in >> word)) throw IoError("scenario parse error: truncated after sd_override");
    }
    if (word != "queue")
        throw IoError("scenario parse error: expected 'queue', got '" + word + "'");
    {
        std::string ia, s, hm;
        int fixed = 0;
        if (!(in >> ia >> s >> fixed >> hm)) throw IoError("scenario parse error: bad queue line");
        sc.queue.mean_interarrival = parse_double(ia, "queue mean_interarrival");
        sc.queue.mean_service = parse_double(s, "queue mean_service");
        sc.queue.fixed_horizon = fixed != 0;
        sc.queue.horizon_minutes = parse_double(hm, "queue horizon_minutes");
    }
    expect_word(in, "types", "after the queue line");
    int k = 0;
    if (!(in >> k) || k < 1) throw IoError("scenario parse error: bad type count");
    for (int i = 0; i < k; ++i) {
        expect_word(in, "type", "in the type list");
        std::string name;
        int budget = 0;
        if (!(in >> name >> budget)) throw IoError("scenario parse error: bad type line");
        sc.facility_types.push_back(name);
        sc.budgets.push_back(budget);
    }
    expect_word(in, "network", "after the type list");
    sc.network = load_network(in);
    expect_word(in, "demands", "after the network block");
    sc.demands.assign(static_cast<std::size_t>(k), std::vector<std::int64_t>());
    for (int i = 0; i < k; ++i) {
        expect_word(in, "demand", "in the demand table");
        int idx = 0;
        if (!(in >> idx) || idx != i)
            throw IoError("scenario parse error: demand rows must appear in type order");
        auto& row = sc.demands[static_cast<std::size_t>(i)];
        row.resize(static_cast<std::size_t>(sc.network.zone_count()));
        for (auto& d : row)
            if (!(in >> d)) throw IoError("scenario parse error: truncated demand row");
    }
    expect_word(in, "end", "at the end of the scenario");
    validate_scenario(sc, nullptr);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file: " + path);
    return load_scenario(in);
}

} // namespace sdfl
