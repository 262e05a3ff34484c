#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sdfl/placement.hpp"
#include "sdfl/queuesim.hpp"
#include "sdfl/scenario.hpp"

namespace sdfl {

/// Walks every placement with exactly budget-many open zones per type, in
/// lexicographic order (type 0 most significant). Construction refuses
/// instances whose placement count exceeds `cap`, reporting the count.
class PlacementEnumerator {
public:
    PlacementEnumerator(int zone_count, std::vector<int> budgets,
                        std::uint64_t cap = 1'000'000);

    std::uint64_t count() const { return count_; }

    /// Writes the next placement into `out`; false once exhausted.
    bool next(Placement& out);

private:
    int n_;
    std::vector<int> budgets_;
    std::vector<std::vector<int>> current_;
    bool started_ = false;
    bool done_ = false;
    std::uint64_t count_ = 0;
};

struct OracleResult {
    Placement placement;
    SimOutcome outcome;
    std::uint64_t candidates = 0; // placements evaluated
};

/// Exhaustive ground truth at desk scale: scores every placement under one
/// shared set of random numbers — each customer keeps the same arrival time
/// and service requirement in every candidate, so scores differ only through
/// routing — and returns the maximizer (ties: first in lexicographic order).
/// `on_candidate`, when given, observes every evaluation in order.
OracleResult brute_force_best(
    const RoadNetwork& net, const Scenario& sc, std::uint64_t cap = 1'000'000,
    const std::function<void(const Placement&, const SimOutcome&)>& on_candidate = nullptr);

/// Steady-state mean number in an M/M/1 system, rho / (1 - rho).
double mm1_mean_number(double lambda, double mu);

} // namespace sdfl
