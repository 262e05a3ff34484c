#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "sdfl/network.hpp"
#include "sdfl/queuesim.hpp"
#include "sdfl/scenario.hpp"

namespace sdfl {

/// One visit: person `person` of `home_zone` attends the `type`-facility at
/// `facility_zone` during discrete slot `slot`.
struct YEvent {
    int type = 0;
    int facility_zone = 0;
    int home_zone = 0;
    std::int64_t person = 0; // index within the home zone
    std::int64_t slot = 0;
};

/// How the per-(facility, slot) crowd count is derived.
enum class KClosure {
    slot_count, // number of visit events in the slot
    trace       // simulated queue length carried over from a run
};

/// Explicit decision variables of the optimization model: binary facility
/// openings x, sparse visit events y, and the crowd-count tensor k.
struct AssignmentTensor {
    int type_count = 0;
    int zone_count = 0;
    std::vector<std::vector<char>> x; // [type][zone] in {0,1}
    std::vector<YEvent> y;
    std::int64_t slot_count = 1;
    KClosure k_closure = KClosure::slot_count;
    // only populated for trace-backed tensors: (type, facility, slot) -> count
    std::map<std::tuple<int, int, std::int64_t>, std::int64_t> k;
    std::int64_t dropped_events = 0; // visits beyond the horizon, discarded
};

/// Objective value: sum over visit events of S(crowd count at the event's
/// facility and slot), restricted to events at open facilities.
double objective_from_tensor(const AssignmentTensor& tensor, const SdParams& sd);

struct Violation {
    std::string constraint; // "C4".."C9", or "structure"
    std::string detail;
};

struct FeasibilityReport {
    bool pass = true;
    std::vector<Violation> violations;
};

/// Validates a tensor against the model: per-type budget caps (C4), one
/// visit per person and never two places at once (C5), service at the home
/// zone or within distance d of it (C6), home-zone visit first along every
/// road (C7), binary variables (C8, C9), plus structural sanity (indices in
/// range, visits only at open facilities). Violations are reported, not
/// thrown.
FeasibilityReport check_feasibility(const AssignmentTensor& tensor, const RoadNetwork& net,
                                    const Scenario& sc, double d);

/// Converts a simulation into tensor form: x from the traced facilities,
/// one y event per arrival at slot floor(time / time_slot), and k as the
/// largest traced queue length in each (facility, slot). Arrivals falling
/// past the final slot are counted in dropped_events.
AssignmentTensor trace_to_tensor(const SimOutcome& outcome, const Scenario& sc);

/// CSV interchange: "kind,type,zone,person,slot" rows ("x" rows open a
/// facility; "y" rows are visits with a globally numbered person), preceded
/// by a "# slot_count=N" comment. Loading needs the scenario to recover each
/// person's home zone; loaded tensors use the slot_count crowd closure.
void save_tensor(const AssignmentTensor& tensor, const Scenario& sc, std::ostream& out);
void save_tensor(const AssignmentTensor& tensor, const Scenario& sc, const std::string& path);
AssignmentTensor load_tensor(std::istream& in, const Scenario& sc);
AssignmentTensor load_tensor(const std::string& path, const Scenario& sc);

} // namespace sdfl
