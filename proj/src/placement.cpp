#include "sdfl/placement.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "sdfl/errors.hpp"
#include "sdfl/util.hpp"

namespace sdfl {

void validate_placement(const Placement& p, const Scenario& sc) {
    const int k = sc.type_count();
    const int n = sc.zone_count();
    if (static_cast<int>(p.open_zones.size()) != k)
        throw DomainError("placement does not cover every facility type");
    for (int i = 0; i < k; ++i) {
        const auto& open = p.open_zones[static_cast<std::size_t>(i)];
        if (static_cast<int>(open.size()) > sc.budgets[static_cast<std::size_t>(i)])
            throw DomainError("placement opens more facilities than the budget for type '" +
                              sc.facility_types[static_cast<std::size_t>(i)] + "'");
        for (std::size_t z = 0; z < open.size(); ++z) {
            if (open[z] < 0 || open[z] >= n)
                throw DomainError("placement names a zone that does not exist");
            if (z > 0 && open[z] <= open[z - 1])
                throw DomainError("placement zones must be sorted and distinct per type");
        }
    }
}

Placement random_placement(const Scenario& sc, RngStream& rng) {
    const int n = sc.zone_count();
    Placement p;
    for (int budget : sc.budgets) {
        if (budget > n) throw DomainError("budget exceeds zone count");
        // partial Fisher-Yates: the first `budget` slots end up a uniform subset
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
        for (int s = 0; s < budget; ++s) {
            auto pick = static_cast<std::size_t>(rng.uniform_int(s, n - 1));
            std::swap(pool[static_cast<std::size_t>(s)], pool[pick]);
        }
        std::vector<int> open(pool.begin(), pool.begin() + budget);
        std::sort(open.begin(), open.end());
        p.open_zones.push_back(std::move(open));
    }
    return p;
}

namespace {

struct RunOutput {
    Placement placement;
    double total_sd = 0.0;
    double avg_queue_len = 0.0;
};

RunOutput execute_run(const RoadNetwork& net, const Scenario& sc, int r, bool crn) {
    RngStream base = sc.derive_stream("run", static_cast<std::uint64_t>(r));
    RngStream pstream = base.split("placement");
    RunOutput out;
    out.placement = random_placement(sc, pstream);
    RngStream eval = crn ? sc.derive_stream("crn") : base.split("sim");
    SimOutcome sim = evaluate_placement(net, sc, out.placement, NearestPolicy{}, eval);
    out.total_sd = sim.total_sd;
    out.avg_queue_len = sim.avg_queue_len;
    return out;
}

} // namespace

SearchResult simulation_search(const RoadNetwork& net, const Scenario& sc, int runs, int threads,
                               bool crn) {
    if (runs < 1) throw DomainError("simulation_search needs at least one run");
    threads = std::clamp(threads, 1, runs);

    std::vector<RunOutput> results(static_cast<std::size_t>(runs));
    if (threads == 1) {
        for (int r = 0; r < runs; ++r) results[static_cast<std::size_t>(r)] =
            execute_run(net, sc, r, crn);
    } else {
        // workers fill per-run slots; everything order-dependent happens
        // afterwards, serially, so scheduling cannot change the result
        std::atomic<int> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        auto worker = [&] {
            for (;;) {
                int r = next.fetch_add(1);
                if (r >= runs) return;
                try {
                    results[static_cast<std::size_t>(r)] = execute_run(net, sc, r, crn);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    SearchResult res;
    res.log.reserve(static_cast<std::size_t>(runs));
    int best = 0;
    for (int r = 0; r < runs; ++r) {
        const auto& out = results[static_cast<std::size_t>(r)];
        res.log.push_back({r, out.total_sd, out.avg_queue_len});
        if (out.total_sd > results[static_cast<std::size_t>(best)].total_sd) best = r;
    }
    res.best_run = best;
    res.placement = results[static_cast<std::size_t>(best)].placement;
    // regenerate the winner's full trace (identical streams, identical result)
    RngStream base = sc.derive_stream("run", static_cast<std::uint64_t>(best));
    RngStream eval = crn ? sc.derive_stream("crn") : base.split("sim");
    res.outcome = evaluate_placement(net, sc, res.placement, NearestPolicy{}, eval);
    return res;
}

std::vector<std::pair<int, int>> snake_assignment(std::span<const int> order, int l) {
    const int n = static_cast<int>(order.size());
    if (l < 1 || l > n)
        throw DomainError("snake_assignment: need 1 <= open count <= ranked zone count");
    if (std::set<int>(order.begin(), order.end()).size() != order.size())
        throw DomainError("snake_assignment: ranked zones must be distinct");
    std::vector<std::pair<int, int>> out;
    out.reserve(order.size());
    for (int p = 1; p <= n; ++p) {
        int rank;
        if (p <= l) {
            rank = p;
        } else {
            int q = p - l - 1;
            int block = q / l;
            int offset = q % l;
            if (block % 2 == 0)
                rank = l - offset;                            // sweep down l..1
            else
                rank = offset + 2 <= l ? offset + 2 : 1;       // sweep up 2..l, then wrap
        }
        out.emplace_back(order[static_cast<std::size_t>(p - 1)],
                         order[static_cast<std::size_t>(rank - 1)]);
    }
    return out;
}

HeuristicResult heuristic_placement(const RoadNetwork& net, const Scenario& sc) {
    (void)net; // routing here is by demand rank, not by distance
    const int k = sc.type_count();
    const int n = sc.zone_count();
    HeuristicResult res;
    res.placement.open_zones.resize(static_cast<std::size_t>(k));
    res.assignment.facility_of.assign(static_cast<std::size_t>(k),
                                      std::vector<int>(static_cast<std::size_t>(n), -1));
    for (int i = 0; i < k; ++i) {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        const auto& dem = sc.demands[static_cast<std::size_t>(i)];
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (dem[static_cast<std::size_t>(a)] != dem[static_cast<std::size_t>(b)])
                return dem[static_cast<std::size_t>(a)] > dem[static_cast<std::size_t>(b)];
            return a < b;
        });
        const int l = sc.budgets[static_cast<std::size_t>(i)];
        auto& open = res.placement.open_zones[static_cast<std::size_t>(i)];
        open.assign(order.begin(), order.begin() + l);
        std::sort(open.begin(), open.end());
        for (const auto& [zone, facility] : snake_assignment(order, l))
            res.assignment.facility_of[static_cast<std::size_t>(i)]
                                      [static_cast<std::size_t>(zone)] = facility;
    }
    return res;
}

void write_placement_csv(const Placement& p, std::ostream& out) {
    out << "type,zone\n";
    for (std::size_t i = 0; i < p.open_zones.size(); ++i)
        for (int z : p.open_zones[i]) out << i << "," << z << "\n";
}

Placement read_placement_csv(std::istream& in, const Scenario& sc) {
    Placement p;
    p.open_zones.resize(static_cast<std::size_t>(sc.type_count()));
    std::string line;
    if (!std::getline(in, line) || trim(line) != "type,zone")
        throw IoError("placement file must start with the header 'type,zone'");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body(trim(line));
        if (body.empty()) continue;
        auto parts = split(body, ',');
        if (parts.size() != 2)
            throw IoError("placement file line " + std::to_string(lineno) +
                          ": expected 'type,zone'");
        int type = static_cast<int>(parse_int(trim(parts[0]), "placement type"));
        int zone = static_cast<int>(parse_int(trim(parts[1]), "placement zone"));
        if (type < 0 || type >= sc.type_count())
            throw IoError("placement file line " + std::to_string(lineno) +
                          ": type out of range");
        p.open_zones[static_cast<std::size_t>(type)].push_back(zone);
    }
    for (auto& open : p.open_zones) std::sort(open.begin(), open.end());
    validate_placement(p, sc);
    return p;
}

void write_assignment_csv(const CustomerAssignment& a, std::ostream& out) {
    out << "type,customer_zone,facility_zone\n";
    for (std::size_t i = 0; i < a.facility_of.size(); ++i)
        for (std::size_t j = 0; j < a.facility_of[i].size(); ++j)
            out << i << "," << j << "," << a.facility_of[i][j] << "\n";
}

} // namespace sdfl
