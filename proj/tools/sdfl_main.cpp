// Command-line front end: scenario generation, placement evaluation,
// search/heuristic runs, facility-count sweeps, and feasibility validation.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdfl/errors.hpp"
#include "sdfl/ilpmodel.hpp"
#include "sdfl/network.hpp"
#include "sdfl/oracle.hpp"
#include "sdfl/placement.hpp"
#include "sdfl/queuesim.hpp"
#include "sdfl/scenario.hpp"
#include "sdfl/util.hpp"

namespace {

using namespace sdfl;

constexpr std::uint64_t kDefaultSeed = 12345;
constexpr const char* kSeedEnvVar = "SDFL_SEED";

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv(kSeedEnvVar);
    if (!raw || !*raw) return std::nullopt;
    return parse_uint(raw, kSeedEnvVar);
}

struct CommonOpts {
    std::string config_path;
    std::string scenario_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    auto* cfg = cmd->add_option("--config", o.config_path, "configuration file");
    auto* scn = cmd->add_option("--scenario", o.scenario_path, "saved scenario file");
    cfg->excludes(scn);
    cmd->add_option("--set", o.sets, "override a config value (section.key=value)")
        ->take_all()
        ->needs(cfg);
    cmd->add_option("--seed", o.seed, "master seed (overrides config and " +
                                          std::string(kSeedEnvVar) + ")");
}

// seed precedence: --seed flag, then config value, then env var, then default
Config load_config(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.config_path);
    for (const auto& s : o.sets) cfg.apply_override(s);
    if (o.seed) {
        cfg.apply_override("seed.master=" + std::to_string(*o.seed));
    } else if (!cfg.has("seed", "master")) {
        if (auto e = env_seed())
            cfg.apply_override("seed.master=" + std::to_string(*e));
        else
            cfg.apply_override("seed.master=" + std::to_string(kDefaultSeed));
    }
    return cfg;
}

Scenario make_scenario(const CommonOpts& o) {
    if (!o.scenario_path.empty()) {
        Scenario sc = load_scenario(o.scenario_path);
        if (o.seed) sc.master_seed = *o.seed;
        return sc;
    }
    if (o.config_path.empty())
        throw ConfigError("either --config or --scenario is required");
    std::vector<std::string> warnings;
    Scenario sc = build_scenario(load_config(o), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return sc;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

void print_outcome(const SimOutcome& o) {
    std::cout << "F " << format_number(o.total_sd) << "\n"
              << "avg_queue_len " << format_number(o.avg_queue_len) << "\n"
              << "makespan " << format_number(o.makespan) << "\n";
}

void print_placement(const Placement& p) {
    for (std::size_t i = 0; i < p.open_zones.size(); ++i) {
        std::cout << "placement " << i;
        for (int z : p.open_zones[i]) std::cout << " " << z;
        std::cout << "\n";
    }
}

std::string placement_compact(const Placement& p) {
    std::string s;
    for (std::size_t i = 0; i < p.open_zones.size(); ++i) {
        if (i) s += ";";
        s += std::to_string(i) + ":";
        for (std::size_t z = 0; z < p.open_zones[i].size(); ++z) {
            if (z) s += "+";
            s += std::to_string(p.open_zones[i][z]);
        }
    }
    return s;
}

struct SaveOpts {
    std::string trace_path;
    std::string tensor_path;
};

void add_save(CLI::App* cmd, SaveOpts& o) {
    cmd->add_option("--save-trace", o.trace_path, "write the queue event log CSV here");
    cmd->add_option("--save-tensor", o.tensor_path, "write the run as a decision tensor here");
}

void write_saves(const SaveOpts& o, const Scenario& sc, const SimOutcome& outcome, int run) {
    if (!o.trace_path.empty()) {
        auto out = open_out(o.trace_path);
        write_trace_csv(outcome.traces, run, out);
    }
    if (!o.tensor_path.empty()) {
        AssignmentTensor t = trace_to_tensor(outcome, sc);
        save_tensor(t, sc, o.tensor_path);
        if (t.dropped_events > 0)
            std::cerr << "warning: " << t.dropped_events
                      << " visits fell past the final slot and were dropped\n";
    }
}

// ---- subcommands ----

struct GenNetOpts {
    std::string kind;
    int n = 0, rows = 0, cols = 0;
    std::string neighborhood = "moore";
    std::string weights = "unit";
    double wmin = 0.5, wmax = 1.5;
    std::optional<std::uint64_t> seed;
    std::string out_path;
};

int run_gen_net(const GenNetOpts& o) {
    WeightSpec spec = WeightSpec::unit();
    if (o.weights == "uniform") {
        if (!(o.wmin > 0.0) || o.wmin > o.wmax)
            throw ConfigError("--weight-min/--weight-max must satisfy 0 < min <= max");
        spec = WeightSpec::uniform(o.wmin, o.wmax);
    } else if (o.weights != "unit") {
        throw ConfigError("--weights must be 'unit' or 'uniform'");
    }
    std::uint64_t seed = o.seed ? *o.seed : env_seed().value_or(kDefaultSeed);
    RngStream stream(RngStream::derive_key(seed, "netweights", 0));
    RoadNetwork net;
    if (o.kind == "complete") {
        net = generate_complete(o.n, spec, stream);
    } else if (o.kind == "grid") {
        GridNeighborhood nb = GridNeighborhood::moore;
        if (o.neighborhood == "von_neumann")
            nb = GridNeighborhood::von_neumann;
        else if (o.neighborhood != "moore")
            throw ConfigError("--neighborhood must be 'moore' or 'von_neumann'");
        net = generate_grid(o.rows, o.cols, spec, stream, nb);
    } else {
        throw ConfigError("--kind must be 'complete' or 'grid'");
    }
    save_network(net, o.out_path);
    std::cout << "wrote " << o.out_path << " (" << net.zone_count() << " zones, "
              << net.edges().size() << " edges)\n";
    return 0;
}

int run_build_scenario(const CommonOpts& common, const std::string& out_path) {
    Scenario sc = make_scenario(common);
    save_scenario(sc, out_path);
    std::cout << "wrote " << out_path << " (" << sc.zone_count() << " zones, "
              << sc.type_count() << " facility types, master_seed " << sc.master_seed << ")\n";
    return 0;
}

int run_eval(const CommonOpts& common, const std::string& placement_path, const SaveOpts& save) {
    Scenario sc = make_scenario(common);
    std::ifstream in(placement_path);
    if (!in) throw IoError("cannot open placement file: " + placement_path);
    Placement p = read_placement_csv(in, sc);
    SimOutcome outcome =
        evaluate_placement(sc.network, sc, p, NearestPolicy{}, sc.derive_stream("eval"));
    print_outcome(outcome);
    print_placement(p);
    write_saves(save, sc, outcome, 0);
    return 0;
}

struct Alg1Opts {
    int runs = 100;
    int threads = 1;
    bool crn = false;
    std::string placement_path;
    std::string log_path;
};

int run_alg1(const CommonOpts& common, const Alg1Opts& o, const SaveOpts& save) {
    Scenario sc = make_scenario(common);
    SearchResult res = simulation_search(sc.network, sc, o.runs, o.threads, o.crn);
    std::cout << "best_run " << res.best_run << "\n";
    print_outcome(res.outcome);
    print_placement(res.placement);
    if (!o.placement_path.empty()) {
        auto out = open_out(o.placement_path);
        write_placement_csv(res.placement, out);
    }
    if (!o.log_path.empty()) {
        auto out = open_out(o.log_path);
        out << "run,F,avg_queue_len\n";
        for (const auto& row : res.log)
            out << row.run << "," << format_number(row.total_sd) << ","
                << format_number(row.avg_queue_len) << "\n";
    }
    write_saves(save, sc, res.outcome, res.best_run);
    return 0;
}

struct Alg2Opts {
    std::string placement_path;
    std::string assignment_path;
};

int run_alg2(const CommonOpts& common, const Alg2Opts& o, const SaveOpts& save) {
    Scenario sc = make_scenario(common);
    HeuristicResult h = heuristic_placement(sc.network, sc);
    SimOutcome outcome =
        evaluate_placement(sc.network, sc, h.placement, h.assignment, sc.derive_stream("alg2"));
    print_outcome(outcome);
    print_placement(h.placement);
    if (!o.placement_path.empty()) {
        auto out = open_out(o.placement_path);
        write_placement_csv(h.placement, out);
    }
    if (!o.assignment_path.empty()) {
        auto out = open_out(o.assignment_path);
        write_assignment_csv(h.assignment, out);
    }
    write_saves(save, sc, outcome, 0);
    return 0;
}

int run_oracle(const CommonOpts& common, std::uint64_t cap, const std::string& csv_path,
               const SaveOpts& save) {
    Scenario sc = make_scenario(common);
    std::ofstream csv;
    std::function<void(const Placement&, const SimOutcome&)> on_candidate;
    if (!csv_path.empty()) {
        csv = open_out(csv_path);
        csv << "placement,F\n";
        on_candidate = [&csv](const Placement& p, const SimOutcome& o) {
            csv << placement_compact(p) << "," << format_number(o.total_sd) << "\n";
        };
    }
    OracleResult res = brute_force_best(sc.network, sc, cap, on_candidate);
    std::cout << "candidates " << res.candidates << "\n";
    print_outcome(res.outcome);
    print_placement(res.placement);
    write_saves(save, sc, res.outcome, 0);
    return 0;
}

struct SweepOpts {
    std::vector<int> counts;
    std::vector<std::string> algorithms{"alg1", "alg2"};
    int runs = 100;
    int threads = 1;
    std::uint64_t cap = 1'000'000;
    std::string timing = "zero";
    std::string out_path;
};

int run_sweep(const CommonOpts& common, const SweepOpts& o) {
    Scenario sc = make_scenario(common);

    std::set<int> counts(o.counts.begin(), o.counts.end());
    for (int l : counts)
        if (l < 1 || l > sc.zone_count())
            throw ConfigError("facility count " + std::to_string(l) +
                              " is out of range for " + std::to_string(sc.zone_count()) +
                              " zones");
    std::set<std::string> algorithms(o.algorithms.begin(), o.algorithms.end());
    for (const auto& a : algorithms)
        if (a != "alg1" && a != "alg2" && a != "oracle")
            throw ConfigError("unknown algorithm '" + a + "' (expected alg1, alg2, or oracle)");

    struct Row {
        int l;
        std::string algorithm;
        double f;
        double avgq;
        std::int64_t ms;
    };
    std::vector<Row> rows;
    for (int l : counts) {
        Scenario cell = sc;
        cell.budgets.assign(static_cast<std::size_t>(cell.type_count()), l);
        for (const auto& alg : algorithms) {
            auto started = std::chrono::steady_clock::now();
            SimOutcome outcome;
            if (alg == "alg1") {
                outcome = simulation_search(cell.network, cell, o.runs, o.threads).outcome;
            } else if (alg == "alg2") {
                HeuristicResult h = heuristic_placement(cell.network, cell);
                outcome = evaluate_placement(cell.network, cell, h.placement, h.assignment,
                                             cell.derive_stream("alg2"));
            } else {
                outcome = brute_force_best(cell.network, cell, o.cap).outcome;
            }
            std::int64_t ms = 0;
            if (o.timing == "wall")
                ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
            rows.push_back({l, alg, outcome.total_sd, outcome.avg_queue_len, ms});
        }
    }

    auto out = open_out(o.out_path);
    out << "l,algorithm,F,avg_queue_len,runtime_ms,seed\n";
    for (const auto& r : rows)
        out << r.l << "," << r.algorithm << "," << format_number(r.f) << ","
            << format_number(r.avgq) << "," << r.ms << "," << sc.master_seed << "\n";
    if (!out) throw IoError("failed writing sweep file: " + o.out_path);
    std::cerr << "wrote " << o.out_path << " (" << rows.size() << " rows)\n";
    return 0;
}

int run_validate(const CommonOpts& common, const std::vector<std::string>& tensor_paths,
                 std::optional<double> d_opt) {
    Scenario sc = make_scenario(common);
    double d = d_opt ? *d_opt : sc.network.diameter() + 1.0;
    bool all_pass = true;
    for (const auto& path : tensor_paths) {
        AssignmentTensor t = load_tensor(path, sc);
        FeasibilityReport report = check_feasibility(t, sc.network, sc, d);
        if (report.pass) {
            std::cout << path << ": pass\n";
        } else {
            all_pass = false;
            std::cout << path << ": FAIL (" << report.violations.size() << " violations)\n";
            for (const auto& v : report.violations)
                std::cout << "  " << v.constraint << ": " << v.detail << "\n";
        }
    }
    return all_pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"facility placement by crowd-aware queueing simulation"};
    app.require_subcommand(1);

    int exit_code = 0;

    auto* gen_net = app.add_subcommand("gen-net", "generate a road network file");
    auto gn = std::make_shared<GenNetOpts>();
    gen_net->add_option("--kind", gn->kind, "complete or grid")->required();
    gen_net->add_option("--n", gn->n, "zone count (complete)");
    gen_net->add_option("--rows", gn->rows, "grid rows");
    gen_net->add_option("--cols", gn->cols, "grid columns");
    gen_net->add_option("--neighborhood", gn->neighborhood, "moore or von_neumann");
    gen_net->add_option("--weights", gn->weights, "unit or uniform");
    gen_net->add_option("--weight-min", gn->wmin, "uniform weight lower bound");
    gen_net->add_option("--weight-max", gn->wmax, "uniform weight upper bound");
    gen_net->add_option("--seed", gn->seed, "seed for weight sampling");
    gen_net->add_option("--out", gn->out_path, "output path")->required();
    gen_net->callback([&, gn] { exit_code = run_gen_net(*gn); });

    auto* build = app.add_subcommand("build-scenario", "build and save a scenario");
    auto bs_common = std::make_shared<CommonOpts>();
    auto bs_out = std::make_shared<std::string>();
    add_common(build, *bs_common);
    build->add_option("--out", *bs_out, "output path")->required();
    build->callback([&, bs_common, bs_out] { exit_code = run_build_scenario(*bs_common, *bs_out); });

    auto* eval = app.add_subcommand("eval", "evaluate a placement from a file");
    auto ev_common = std::make_shared<CommonOpts>();
    auto ev_placement = std::make_shared<std::string>();
    auto ev_save = std::make_shared<SaveOpts>();
    add_common(eval, *ev_common);
    eval->add_option("--placement", *ev_placement, "placement CSV (type,zone)")->required();
    add_save(eval, *ev_save);
    eval->callback([&, ev_common, ev_placement, ev_save] {
        exit_code = run_eval(*ev_common, *ev_placement, *ev_save);
    });

    auto* alg1 = app.add_subcommand("alg1", "random placement search by simulation");
    auto a1_common = std::make_shared<CommonOpts>();
    auto a1 = std::make_shared<Alg1Opts>();
    auto a1_save = std::make_shared<SaveOpts>();
    add_common(alg1, *a1_common);
    alg1->add_option("--runs", a1->runs, "number of search iterations")
        ->check(CLI::PositiveNumber);
    alg1->add_option("--threads", a1->threads, "worker threads")->check(CLI::PositiveNumber);
    alg1->add_flag("--crn", a1->crn, "score every iteration under shared random numbers");
    alg1->add_option("--save-placement", a1->placement_path, "write the best placement CSV here");
    alg1->add_option("--save-log", a1->log_path, "write the per-run log CSV here");
    add_save(alg1, *a1_save);
    alg1->callback([&, a1_common, a1, a1_save] { exit_code = run_alg1(*a1_common, *a1, *a1_save); });

    auto* alg2 = app.add_subcommand("alg2", "demand-sorted heuristic placement");
    auto a2_common = std::make_shared<CommonOpts>();
    auto a2 = std::make_shared<Alg2Opts>();
    auto a2_save = std::make_shared<SaveOpts>();
    add_common(alg2, *a2_common);
    alg2->add_option("--save-placement", a2->placement_path, "write the placement CSV here");
    alg2->add_option("--save-assignment", a2->assignment_path,
                     "write the zone-to-facility assignment CSV here");
    add_save(alg2, *a2_save);
    alg2->callback([&, a2_common, a2, a2_save] { exit_code = run_alg2(*a2_common, *a2, *a2_save); });

    auto* oracle = app.add_subcommand("oracle", "exhaustive best placement (small instances)");
    auto or_common = std::make_shared<CommonOpts>();
    auto or_cap = std::make_shared<std::uint64_t>(1'000'000);
    auto or_csv = std::make_shared<std::string>();
    auto or_save = std::make_shared<SaveOpts>();
    add_common(oracle, *or_common);
    oracle->add_option("--cap", *or_cap, "refuse enumerations larger than this");
    oracle->add_option("--save-csv", *or_csv, "write every (placement, F) pair here");
    add_save(oracle, *or_save);
    oracle->callback([&, or_common, or_cap, or_csv, or_save] {
        exit_code = run_oracle(*or_common, *or_cap, *or_csv, *or_save);
    });

    auto* sweep = app.add_subcommand("sweep", "run algorithms across facility counts");
    auto sw_common = std::make_shared<CommonOpts>();
    auto sw = std::make_shared<SweepOpts>();
    add_common(sweep, *sw_common);
    sweep->add_option("--counts", sw->counts, "facility counts to sweep")
        ->required()
        ->delimiter(',');
    sweep->add_option("--algorithms", sw->algorithms, "subset of alg1,alg2,oracle")
        ->delimiter(',');
    sweep->add_option("--runs", sw->runs, "search iterations per alg1 cell")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--threads", sw->threads, "worker threads for alg1 cells")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--cap", sw->cap, "enumeration cap for oracle cells");
    sweep->add_option("--timing", sw->timing, "runtime_ms column: zero (reproducible) or wall")
        ->check(CLI::IsMember({"zero", "wall"}));
    sweep->add_option("--out", sw->out_path, "output CSV path")->required();
    sweep->callback([&, sw_common, sw] { exit_code = run_sweep(*sw_common, *sw); });

    auto* validate = app.add_subcommand("validate", "check run artifacts against the model");
    auto va_common = std::make_shared<CommonOpts>();
    auto va_tensors = std::make_shared<std::vector<std::string>>();
    auto va_d = std::make_shared<std::optional<double>>();
    add_common(validate, *va_common);
    validate->add_option("--tensor", *va_tensors, "tensor file to check (repeatable)")
        ->required()
        ->take_all();
    validate->add_option("--d", *va_d, "service distance bound (default: diameter + 1)");
    validate->callback([&, va_common, va_tensors, va_d] {
        exit_code = run_validate(*va_common, *va_tensors, *va_d);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
