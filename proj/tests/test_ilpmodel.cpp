#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "sdfl/errors.hpp"
#include "sdfl/ilpmodel.hpp"
#include "sdfl/placement.hpp"
#include "sdfl/queuesim.hpp"

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

AssignmentTensor make_tensor(const Scenario& sc, const std::vector<std::vector<int>>& open,
                             std::vector<YEvent> events, std::int64_t slot_count = 10) {
    AssignmentTensor t;
    t.type_count = sc.type_count();
    t.zone_count = sc.zone_count();
    t.x.assign(static_cast<std::size_t>(t.type_count),
               std::vector<char>(static_cast<std::size_t>(t.zone_count), 0));
    for (std::size_t i = 0; i < open.size(); ++i)
        for (int j : open[i]) t.x[i][static_cast<std::size_t>(j)] = 1;
    t.y = std::move(events);
    t.slot_count = slot_count;
    return t;
}

bool has_constraint(const FeasibilityReport& report, const std::string& name) {
    return std::any_of(report.violations.begin(), report.violations.end(),
                       [&](const Violation& v) { return v.constraint == name; });
}

} // namespace

TEST_SUITE("ilpmodel") {

TEST_CASE("the objective counts scores only at open facilities") {
    auto sc = complete_scenario(4, 2, 5);
    auto empty = make_tensor(sc, {{0}}, {});
    CHECK(objective_from_tensor(empty, sc.sd) == 0.0);

    auto solo = make_tensor(sc, {{0}}, {{0, 0, 1, 0, 2}});
    CHECK(objective_from_tensor(solo, sc.sd) == 10.0); // one visitor, below gamma

    // two visitors share a slot: both score S(2)
    auto pair = make_tensor(sc, {{0}}, {{0, 0, 1, 0, 2}, {0, 0, 2, 0, 2}});
    CHECK(objective_from_tensor(pair, sc.sd) == 20.0);

    // five visitors in one slot push the count past gamma
    std::vector<YEvent> crowd;
    for (int p = 0; p < 5; ++p) crowd.push_back({0, 0, 1, p, 2});
    auto crowded = make_tensor(sc, {{0}}, crowd);
    CHECK(objective_from_tensor(crowded, sc.sd) == doctest::Approx(5 * 9.5).epsilon(1e-12));

    // the same events at a closed facility contribute nothing
    auto closed = make_tensor(sc, {{3}}, {{0, 0, 1, 0, 2}});
    CHECK(objective_from_tensor(closed, sc.sd) == 0.0);
}

TEST_CASE("a carried-over crowd count overrides the per-slot tally") {
    auto sc = complete_scenario(4, 2, 5);
    auto t = make_tensor(sc, {{0}}, {{0, 0, 1, 0, 2}});
    t.k_closure = KClosure::trace;
    t.k[{0, 0, 2}] = 6; // queue of six at that instant
    CHECK(objective_from_tensor(t, sc.sd) == 9.0); // 10 - 0.5*(6-4)
}

TEST_CASE("scores below gamma ignore the slope parameter") {
    auto sc = complete_scenario(4, 2, 5);
    auto t = make_tensor(sc, {{0}}, {{0, 0, 1, 0, 2}, {0, 0, 2, 0, 3}});
    auto steep = sc.sd;
    steep.b = 5.0;
    CHECK(objective_from_tensor(t, sc.sd) == objective_from_tensor(t, steep));
}

TEST_CASE("simulation traces convert to visits slot by slot") {
    auto sc = complete_scenario(3, 1, 3);
    sc.time_slot = 1.0;
    std::vector<MergedArrival> arr{{0.4, 1, 0}, {1.0, 2, 0}, {2.5, 1, 1}};
    std::vector<double> svc{5.0, 5.0, 5.0};
    SimOutcome out;
    out.traces.push_back(simulate_queue(arr, svc, sc.sd, 0, 2));
    out.makespan = out.traces[0].last_departure(); // 15.4

    auto t = trace_to_tensor(out, sc);
    CHECK(t.slot_count == 16);
    CHECK(t.k_closure == KClosure::trace);
    CHECK(t.dropped_events == 0);
    REQUIRE(t.y.size() == 3);
    CHECK(t.y[0].slot == 0); // floor(0.4)
    CHECK(t.y[1].slot == 1);
    CHECK(t.y[2].slot == 2);
    CHECK(t.y[0].home_zone == 1);
    CHECK(t.y[2].person == 1);
    for (const auto& e : t.y) CHECK(e.facility_zone == 2);
    CHECK(t.x[0] == std::vector<char>{0, 0, 1});
    // each slot holds one arrival; the stored counts are the queue lengths
    CHECK(t.k.at({0, 2, 0}) == 1);
    CHECK(t.k.at({0, 2, 1}) == 2);
    CHECK(t.k.at({0, 2, 2}) == 3);
    // collision-free slots make the tensor objective match the simulation
    CHECK(objective_from_tensor(t, sc.sd) ==
          doctest::Approx(out.traces[0].sum_contrib()).epsilon(1e-12));
}

TEST_CASE("an empty outcome converts to an empty tensor") {
    auto sc = complete_scenario(3, 1, 3);
    auto t = trace_to_tensor(SimOutcome{}, sc);
    CHECK(t.slot_count == 1);
    CHECK(t.y.empty());
    CHECK(objective_from_tensor(t, sc.sd) == 0.0);
}

TEST_CASE("arrivals beyond the final slot are dropped and counted") {
    auto sc = complete_scenario(3, 1, 3);
    sc.queue.fixed_horizon = true;
    sc.queue.horizon_minutes = 2.0; // slots 0,1,2
    std::vector<MergedArrival> arr{{0.5, 0, 0}, {1.5, 0, 1}};
    std::vector<double> svc{1.0, 1.0};
    SimOutcome out;
    out.traces.push_back(simulate_queue(arr, svc, sc.sd, 0, 0));
    out.makespan = 10.0; // long drain; the horizon still caps the slots
    auto t = trace_to_tensor(out, sc);
    CHECK(t.slot_count == 3);
    CHECK(t.y.size() == 2);
    CHECK(t.dropped_events == 0);

    // shrink the horizon so the second arrival falls off the grid
    sc.queue.horizon_minutes = 0.9;
    auto cut = trace_to_tensor(out, sc);
    CHECK(cut.slot_count == 1);
    CHECK(cut.y.size() == 1);
    CHECK(cut.dropped_events == 1);
}

TEST_CASE("simulated placements check out feasible") {
    auto sc = complete_scenario(4, 2, 3, 5);
    auto out = evaluate_placement(sc.network, sc, Placement{{{0, 2}}}, NearestPolicy{},
                                  sc.derive_stream("eval"));
    auto t = trace_to_tensor(out, sc);
    auto report = check_feasibility(t, sc.network, sc, sc.network.diameter() + 1.0);
    CHECK(report.pass);
    CHECK(report.violations.empty());
}

TEST_CASE("each mutation trips its own constraint") {
    auto sc = complete_scenario(4, 2, 3, 5);
    auto out = evaluate_placement(sc.network, sc, Placement{{{0, 2}}}, NearestPolicy{},
                                  sc.derive_stream("eval"));
    auto base = trace_to_tensor(out, sc);
    const double d = sc.network.diameter() + 1.0;
    REQUIRE(check_feasibility(base, sc.network, sc, d).pass);

    SUBCASE("a second visit for one person") {
        auto t = base;
        auto dup = t.y[0];
        dup.slot = (dup.slot + 1) % t.slot_count;
        t.y.push_back(dup);
        auto report = check_feasibility(t, sc.network, sc, d);
        CHECK_FALSE(report.pass);
        CHECK(has_constraint(report, "C5"));
    }
    SUBCASE("two places at once") {
        auto t = base;
        auto dup = t.y[0];
        dup.facility_zone = dup.facility_zone == 0 ? 2 : 0;
        t.y.push_back(dup);
        auto report = check_feasibility(t, sc.network, sc, d);
        CHECK_FALSE(report.pass);
        CHECK(has_constraint(report, "C5"));
    }
    SUBCASE("the identical row twice") {
        auto t = base;
        t.y.push_back(t.y[0]);
        auto report = check_feasibility(t, sc.network, sc, d);
        CHECK_FALSE(report.pass);
        CHECK(has_constraint(report, "C9"));
    }
    SUBCASE("more openings than the budget") {
        auto t = base;
        for (int j = 0; j < 4; ++j) t.x[0][static_cast<std::size_t>(j)] = 1;
        // keep the visits legal: they all point at facilities that are open
        auto report = check_feasibility(t, sc.network, sc, d);
        CHECK_FALSE(report.pass);
        CHECK(has_constraint(report, "C4"));
    }
    SUBCASE("a person left unserved") {
        auto t = base;
        auto victim = t.y[0];
        std::erase_if(t.y, [&](const YEvent& e) {
            return e.type == victim.type && e.home_zone == victim.home_zone &&
                   e.person == victim.person;
        });
        auto report = check_feasibility(t, sc.network, sc, d);
        CHECK_FALSE(report.pass);
        CHECK(has_constraint(report, "C6"));
    }
    SUBCASE("a non-binary opening flag") {
        auto t = base;
        t.x[0][0] = 2;
        auto report = check_feasibility(t, sc.network, sc, d);
        CHECK_FALSE(report.pass);
        CHECK(has_constraint(report, "C8"));
    }
}

TEST_CASE("home-zone visits must come before visits along adjacent roads") {
    auto sc = complete_scenario(4, 2, 3);
    // person 0 of zone 0 visits home at slot 5 after zone 2 at slot 2
    auto late = make_tensor(sc, {{0, 2}}, {{0, 0, 0, 0, 5}, {0, 2, 0, 0, 2}});
    auto r1 = check_feasibility(late, sc.network, sc, 2.0);
    CHECK(has_constraint(r1, "C7"));

    // home first is fine (the double visit still trips C5, not C7)
    auto early = make_tensor(sc, {{0, 2}}, {{0, 0, 0, 0, 2}, {0, 2, 0, 0, 5}});
    auto r2 = check_feasibility(early, sc.network, sc, 2.0);
    CHECK_FALSE(has_constraint(r2, "C7"));
    CHECK(has_constraint(r2, "C5"));

    // without a home-zone visit the rule is vacuous
    auto away = make_tensor(sc, {{0, 2}}, {{0, 2, 0, 0, 5}});
    auto r3 = check_feasibility(away, sc.network, sc, 2.0);
    CHECK_FALSE(has_constraint(r3, "C7"));
}

TEST_CASE("widening the service radius cures distance violations") {
    RoadNetwork net(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
    auto sc = complete_scenario(4, 1, 1);
    sc.network = net;
    sc.network.set_populations({1, 1, 1, 1});
    // everyone is served at zone 3; zone 0 sits three hops away
    std::vector<YEvent> events;
    for (int j = 0; j < 4; ++j) events.push_back({0, 3, j, 0, static_cast<std::int64_t>(j)});
    auto t = make_tensor(sc, {{3}}, std::move(events));

    auto narrow = check_feasibility(t, sc.network, sc, 0.5);
    CHECK(has_constraint(narrow, "C6"));
    auto wide = check_feasibility(t, sc.network, sc, 3.5);
    CHECK(wide.pass);
}

TEST_CASE("structural problems are reported before constraint checks") {
    auto sc = complete_scenario(4, 2, 3);

    auto closed = make_tensor(sc, {{0}}, {{0, 2, 1, 0, 0}});
    auto r1 = check_feasibility(closed, sc.network, sc, 2.0);
    CHECK(has_constraint(r1, "structure")); // visit at a closed facility

    auto ghost = make_tensor(sc, {{0}}, {{0, 0, 1, 7, 0}});
    auto r2 = check_feasibility(ghost, sc.network, sc, 2.0);
    CHECK(has_constraint(r2, "structure")); // person 7 exceeds demand 3

    auto off_grid = make_tensor(sc, {{0}}, {{0, 0, 1, 0, 99}});
    auto r3 = check_feasibility(off_grid, sc.network, sc, 2.0);
    CHECK(has_constraint(r3, "structure")); // slot past the horizon

    AssignmentTensor misshapen;
    misshapen.type_count = 2; // scenario has one type
    misshapen.zone_count = 4;
    auto r4 = check_feasibility(misshapen, sc.network, sc, 2.0);
    CHECK(has_constraint(r4, "structure"));

    CHECK_THROWS_AS(check_feasibility(make_tensor(sc, {{0}}, {}), sc.network, sc, 0.0),
                    DomainError);
}

TEST_CASE("tensor files round-trip through the global person numbering") {
    auto sc = complete_scenario(4, 2, 3, 5);
    auto out = evaluate_placement(sc.network, sc, Placement{{{0, 2}}}, NearestPolicy{},
                                  sc.derive_stream("eval"));
    auto t = trace_to_tensor(out, sc);

    std::ostringstream os;
    save_tensor(t, sc, os);
    std::istringstream in(os.str());
    auto loaded = load_tensor(in, sc);

    CHECK(loaded.slot_count == t.slot_count);
    CHECK(loaded.x == t.x);
    CHECK(loaded.k_closure == KClosure::slot_count);
    REQUIRE(loaded.y.size() == t.y.size());
    for (std::size_t i = 0; i < t.y.size(); ++i) {
        CHECK(loaded.y[i].type == t.y[i].type);
        CHECK(loaded.y[i].facility_zone == t.y[i].facility_zone);
        CHECK(loaded.y[i].home_zone == t.y[i].home_zone);
        CHECK(loaded.y[i].person == t.y[i].person);
        CHECK(loaded.y[i].slot == t.y[i].slot);
    }
}

TEST_CASE("tensor files use compact global ids") {
    auto sc = complete_scenario(3, 1, 2); // populations of 2: bases 0,2,4
    auto t = make_tensor(sc, {{1}}, {{0, 1, 2, 1, 3}}, 5);
    std::ostringstream os;
    save_tensor(t, sc, os);
    CHECK(os.str() == "# slot_count=5\n"
                      "kind,type,zone,person,slot\n"
                      "x,0,1,,\n"
                      "y,0,1,5,3\n"); // person 1 of zone 2 -> global id 4+1
}

TEST_CASE("corrupt tensor files are rejected") {
    auto sc = complete_scenario(3, 1, 2);
    auto from = [&](const std::string& text) {
        std::istringstream in(text);
        return load_tensor(in, sc);
    };
    CHECK_THROWS_AS(from(""), IoError);                                   // no header
    CHECK_THROWS_AS(from("kind,type,zone\n"), IoError);                   // wrong header
    CHECK_THROWS_AS(from("kind,type,zone,person,slot\nz,0,0,0,0\n"), IoError);
    CHECK_THROWS_AS(from("kind,type,zone,person,slot\ny,0,0,99,0\n"), IoError); // person
    CHECK_THROWS_AS(from("kind,type,zone,person,slot\ny,5,0,0,0\n"), IoError);  // type
    CHECK_THROWS_AS(from("kind,type,zone,person,slot\nx,0,9,,\n"), IoError);    // zone
    CHECK_THROWS_AS(from("kind,type,zone,person,slot\nx,0,0\n"), IoError);      // fields
    CHECK_THROWS_AS(from("# slot_count=0\nkind,type,zone,person,slot\n"), IoError);
    CHECK_THROWS_AS(load_tensor(std::string("/nonexistent/t.csv"), sc), IoError);
}

} // TEST_SUITE
