#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sdfl/errors.hpp"
#include "sdfl/oracle.hpp"

using namespace sdfl;

namespace {

Scenario complete_scenario(int n, int budget, std::int64_t demand_per_zone,
                           std::uint64_t seed = 42) {
    Scenario sc;
    sc.master_seed = seed;
    auto stream = sc.derive_stream("netweights");
    sc.network = generate_complete(n, WeightSpec::unit(), stream);
    sc.network.set_populations(
        std::vector<std::int64_t>(static_cast<std::size_t>(n), demand_per_zone));
    sc.facility_types = {"store"};
    sc.budgets = {budget};
    sc.demands = {std::vector<std::int64_t>(static_cast<std::size_t>(n), demand_per_zone)};
    return sc;
}

std::vector<std::vector<std::vector<int>>> collect_all(PlacementEnumerator& en) {
    std::vector<std::vector<std::vector<int>>> seen;
    Placement p;
    while (en.next(p)) seen.push_back(p.open_zones);
    return seen;
}

// (home zone, person) -> arrival time, pooled over every facility trace
std::map<std::pair<int, std::int64_t>, double> arrival_times(const SimOutcome& out) {
    std::map<std::pair<int, std::int64_t>, double> times;
    for (const auto& trace : out.traces)
        for (const auto& e : trace.events)
            if (e.kind == EventKind::arrival) times[{e.home_zone, e.person}] = e.time;
    return times;
}

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("enumeration counts multiply the per-type subset counts") {
    CHECK(PlacementEnumerator(5, {2}).count() == 10);
    CHECK(PlacementEnumerator(3, {2, 1}).count() == 9);
    CHECK(PlacementEnumerator(3, {3}).count() == 1);
    CHECK(PlacementEnumerator(2, {1, 1, 1}).count() == 8);
}

TEST_CASE("oversized instances are refused with the exact count") {
    try {
        PlacementEnumerator en(30, {15});
        FAIL("expected the enumerator to refuse 30 choose 15");
    } catch (const DomainError& e) {
        std::string msg = e.what();
        CHECK(msg.find("155117520") != std::string::npos);
        CHECK(msg.find("1000000") != std::string::npos);
    }
    CHECK_NOTHROW(PlacementEnumerator(30, {15}, 200'000'000));
}

TEST_CASE("malformed enumeration inputs are rejected") {
    CHECK_THROWS_AS(PlacementEnumerator(0, {1}), DomainError);
    CHECK_THROWS_AS(PlacementEnumerator(3, {}), DomainError);
    CHECK_THROWS_AS(PlacementEnumerator(3, {0}), DomainError);
    CHECK_THROWS_AS(PlacementEnumerator(3, {4}), DomainError);
}

TEST_CASE("single-type enumeration is lexicographic and complete") {
    PlacementEnumerator en(4, {2});
    auto seen = collect_all(en);
    std::vector<std::vector<std::vector<int>>> want{
        {{0, 1}}, {{0, 2}}, {{0, 3}}, {{1, 2}}, {{1, 3}}, {{2, 3}}};
    CHECK(seen == want);

    Placement p;
    CHECK_FALSE(en.next(p)); // stays exhausted
}

TEST_CASE("multi-type enumeration rolls the last type fastest") {
    PlacementEnumerator en(2, {1, 1});
    auto seen = collect_all(en);
    std::vector<std::vector<std::vector<int>>> want{
        {{0}, {0}}, {{0}, {1}}, {{1}, {0}}, {{1}, {1}}};
    CHECK(seen == want);
}

TEST_CASE("a full budget leaves exactly one candidate") {
    PlacementEnumerator en(3, {3});
    auto seen = collect_all(en);
    REQUIRE(seen.size() == 1);
    CHECK(seen[0] == std::vector<std::vector<int>>{{0, 1, 2}});
}

TEST_CASE("the exhaustive search visits every candidate in order") {
    auto sc = complete_scenario(5, 2, 4, 11);
    std::vector<std::vector<std::vector<int>>> visited;
    auto res = brute_force_best(sc.network, sc, 1'000'000,
                                [&](const Placement& p, const SimOutcome& out) {
                                    visited.push_back(p.open_zones);
                                    CHECK(out.total_sd > 0.0);
                                });
    CHECK(res.candidates == 10);
    REQUIRE(visited.size() == 10);
    CHECK(visited.front() == std::vector<std::vector<int>>{{0, 1}});
    CHECK(visited.back() == std::vector<std::vector<int>>{{3, 4}});
    CHECK(std::is_sorted(visited.begin(), visited.end()));

    // the cap flows through
    CHECK_THROWS_AS(brute_force_best(sc.network, sc, 5), DomainError);
}

TEST_CASE("no random placement beats the exhaustive maximum") {
    auto sc = complete_scenario(5, 2, 4, 17);
    auto oracle = brute_force_best(sc.network, sc);
    CHECK(oracle.outcome.total_sd > 0.0);
    auto rng = sc.derive_stream("contender");
    for (int r = 0; r < 20; ++r) {
        auto p = random_placement(sc, rng);
        auto out = evaluate_placement(sc.network, sc, p, NearestPolicy{},
                                      sc.derive_stream("crn"));
        CHECK(out.total_sd <= oracle.outcome.total_sd);
    }
}

TEST_CASE("the maximum matches a replay over all four single-open candidates") {
    RoadNetwork net(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
    auto sc = complete_scenario(4, 1, 3, 23);
    sc.network = net;
    sc.network.set_populations({3, 3, 3, 3});

    std::vector<double> scores;
    auto res = brute_force_best(sc.network, sc, 100,
                                [&](const Placement&, const SimOutcome& out) {
                                    scores.push_back(out.total_sd);
                                });
    REQUIRE(scores.size() == 4);
    CHECK(res.outcome.total_sd == *std::max_element(scores.begin(), scores.end()));

    // replaying any single candidate under the shared stream reproduces its score
    auto replay = evaluate_placement(sc.network, sc, Placement{{{2}}}, NearestPolicy{},
                                     sc.derive_stream("crn"));
    CHECK(replay.total_sd == scores[2]);
}

TEST_CASE("shared random numbers pin each customer's arrival time") {
    auto sc = complete_scenario(5, 2, 6, 31);
    auto crn = sc.derive_stream("crn");
    auto a = evaluate_placement(sc.network, sc, Placement{{{0, 1}}}, NearestPolicy{}, crn);
    auto b = evaluate_placement(sc.network, sc, Placement{{{3, 4}}}, NearestPolicy{}, crn);
    auto ta = arrival_times(a);
    auto tb = arrival_times(b);
    REQUIRE(ta.size() == 30);
    CHECK(ta == tb); // same people, same instants, different queues
    CHECK(a.total_sd != b.total_sd);
}

TEST_CASE("the closed-form queue mean matches hand values") {
    CHECK(mm1_mean_number(0.5, 1.0) == 1.0);
    CHECK(mm1_mean_number(1.0, 1.0 / 0.7) == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(mm1_mean_number(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(mm1_mean_number(2.0, 1.0), DomainError);
    CHECK_THROWS_AS(mm1_mean_number(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(mm1_mean_number(1.0, -1.0), DomainError);
}

} // TEST_SUITE
