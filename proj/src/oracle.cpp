#include "sdfl/oracle.hpp"

#include <limits>
#include <string>

#include "sdfl/errors.hpp"

namespace sdfl {

namespace {

// C(n, k) capped at "infinite"; avoids overflow by saturating
std::uint64_t choose_saturating(int n, int k) {
    const std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // result *= (n - k + i) / i, kept exact by multiplying first
        std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        if (result > inf / num) return inf;
        result = result * num / static_cast<std::uint64_t>(i);
    }
    return result;
}

bool advance_combination(std::vector<int>& c, int n) {
    const int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[static_cast<std::size_t>(i)] < n - k + i) {
            ++c[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

void first_combination(std::vector<int>& c, int k) {
    c.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i;
}

} // namespace

PlacementEnumerator::PlacementEnumerator(int zone_count, std::vector<int> budgets,
                                         std::uint64_t cap)
    : n_(zone_count), budgets_(std::move(budgets)) {
    if (n_ < 1) throw DomainError("placement enumeration needs at least one zone");
    if (budgets_.empty()) throw DomainError("placement enumeration needs at least one type");
    const std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
    count_ = 1;
    for (int l : budgets_) {
        if (l < 1 || l > n_)
            throw DomainError("placement enumeration budgets must lie in [1, zone count]");
        std::uint64_t c = choose_saturating(n_, l);
        count_ = (c != 0 && count_ > inf / c) ? inf : count_ * c;
    }
    if (count_ > cap)
        throw DomainError("placement enumeration refused: " +
                          (count_ == inf ? std::string("more than ") + std::to_string(cap)
                                         : std::to_string(count_)) +
                          " placements exceed the cap of " + std::to_string(cap));
    current_.resize(budgets_.size());
}

bool PlacementEnumerator::next(Placement& out) {
    if (done_) return false;
    if (!started_) {
        for (std::size_t i = 0; i < budgets_.size(); ++i)
            first_combination(current_[i], budgets_[i]);
        started_ = true;
    } else {
        int t = static_cast<int>(budgets_.size()) - 1;
        for (; t >= 0; --t) {
            if (advance_combination(current_[static_cast<std::size_t>(t)], n_)) break;
            first_combination(current_[static_cast<std::size_t>(t)],
                              budgets_[static_cast<std::size_t>(t)]);
        }
        if (t < 0) {
            done_ = true;
            return false;
        }
    }
    out.open_zones = current_;
    return true;
}

OracleResult brute_force_best(
    const RoadNetwork& net, const Scenario& sc, std::uint64_t cap,
    const std::function<void(const Placement&, const SimOutcome&)>& on_candidate) {
    PlacementEnumerator en(sc.zone_count(), sc.budgets, cap);
    RngStream crn = sc.derive_stream("crn");

    OracleResult best;
    bool have_best = false;
    Placement candidate;
    while (en.next(candidate)) {
        SimOutcome outcome = evaluate_placement(net, sc, candidate, NearestPolicy{}, crn);
        if (on_candidate) on_candidate(candidate, outcome);
        ++best.candidates;
        if (!have_best || outcome.total_sd > best.outcome.total_sd) {
            best.placement = candidate;
            best.outcome = std::move(outcome);
            have_best = true;
        }
    }
    return best;
}

double mm1_mean_number(double lambda, double mu) {
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw DomainError("mm1_mean_number: rates must be positive");
    if (lambda >= mu)
        throw DomainError("mm1_mean_number: unstable queue (arrival rate >= service rate)");
    const double rho = lambda / mu;
    return rho / (1.0 - rho);
}

} // namespace sdfl
