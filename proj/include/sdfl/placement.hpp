#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sdfl/queuesim.hpp"
#include "sdfl/rng.hpp"
#include "sdfl/scenario.hpp"

namespace sdfl {

/// Zones where each facility type is opened. open_zones[type] is sorted
/// ascending, duplicate-free, and no longer than that type's budget.
struct Placement {
    std::vector<std::vector<int>> open_zones;
};

/// Throws unless `p` respects the scenario's budgets and zone range.
void validate_placement(const Placement& p, const Scenario& sc);

/// For each type, a uniformly random budget-sized subset of zones,
/// independent across types.
Placement random_placement(const Scenario& sc, RngStream& rng);

struct RunLogRow {
    int run = 0;
    double total_sd = 0.0;
    double avg_queue_len = 0.0;
};

struct SearchResult {
    Placement placement;     // best placement found
    SimOutcome outcome;      // its full evaluation
    int best_run = 0;        // index of the winning iteration
    std::vector<RunLogRow> log; // one row per iteration, in run order
};

/// Random placement search: `runs` iterations, each opening facilities at
/// random and scoring the placement by simulation; returns the iteration
/// with the highest total score (ties: smallest run index). Iteration r
/// derives all of its randomness from the master seed and r, so results
/// are identical for any `threads` count. With `crn` set, every iteration
/// scores its placement under the same shared random numbers used by
/// brute_force_best, making scores directly comparable.
SearchResult simulation_search(const RoadNetwork& net, const Scenario& sc, int runs,
                               int threads = 1, bool crn = false);

/// Boustrophedon allocation of ranked zones to the top-l of them.
/// Position p (1-based) of `order` maps to itself for p <= l; later
/// positions sweep the open ranks back and forth (l..1, then 2..l,1,
/// repeating) so every facility receives the same load when l divides
/// the zone count. Returns (zone, serving zone) pairs in `order` order.
std::vector<std::pair<int, int>> snake_assignment(std::span<const int> order, int l);

struct HeuristicResult {
    Placement placement;
    CustomerAssignment assignment;
};

/// Demand-sorted heuristic: per type, rank zones by demand (descending,
/// ties by smaller id), open facilities at the top budget-many zones, and
/// route customers by snake_assignment. Fully deterministic.
HeuristicResult heuristic_placement(const RoadNetwork& net, const Scenario& sc);

/// CSV helpers: placement rows "type,zone"; assignment rows
/// "type,customer_zone,facility_zone".
void write_placement_csv(const Placement& p, std::ostream& out);
Placement read_placement_csv(std::istream& in, const Scenario& sc);
void write_assignment_csv(const CustomerAssignment& a, std::ostream& out);

} // namespace sdfl
