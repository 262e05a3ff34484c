#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "sdfl/network.hpp"
#include "sdfl/rng.hpp"
#include "sdfl/scenario.hpp"

namespace sdfl {

struct Placement; // defined in placement.hpp

/// Arrival times (minutes, nondecreasing) for the customers of one
/// (facility type, zone) pair; one entry per unit of demand.
struct ArrivalSchedule {
    std::vector<double> times;
};

/// Which open facility zone each zone's customers attend, per type.
/// -1 marks zones without an assignment (only legal at zero demand).
struct CustomerAssignment {
    std::vector<std::vector<int>> facility_of; // [type][zone] -> facility zone
};

/// Route customers to the open facility at the smallest shortest-path
/// distance, ties broken by the smaller facility zone id.
struct NearestPolicy {};

/// NearestPolicy, or an explicit precomputed assignment (used by the
/// demand-sorted heuristic).
using AssignmentPolicy = std::variant<NearestPolicy, CustomerAssignment>;

enum class EventKind { arrival, departure };

struct QueueEvent {
    double time = 0.0;
    EventKind kind = EventKind::arrival;
    std::int64_t queue_len = 0; // number in system right after the event
    int home_zone = -1;         // customer's residence zone
    std::int64_t person = -1;   // customer index within the home zone
    double s_contrib = 0.0;     // crowd score; nonzero only for arrivals
};

/// Event log of one single-server FCFS facility queue.
struct FacilityQueueTrace {
    int type = 0;
    int facility_zone = 0;
    std::vector<QueueEvent> events; // chronological

    std::int64_t arrival_count() const;
    double sum_contrib() const;   // total crowd score earned at this queue
    double last_departure() const; // 0 when the queue never held anyone
    double area() const;          // integral of queue length over time
};

/// One full simulation: total crowd score F, time-averaged queue length
/// (averaged across open facilities over [0, makespan]), the time the last
/// customer departs, and one trace per open facility (empty ones included).
struct SimOutcome {
    double total_sd = 0.0;
    double avg_queue_len = 0.0;
    double makespan = 0.0;
    std::vector<FacilityQueueTrace> traces;
};

/// One customer in a facility's merged arrival list.
struct MergedArrival {
    double time = 0.0;
    int home_zone = -1;
    std::int64_t person = -1;
};

/// Arrival times for every customer of (type, zone): cumulative sums of
/// exponential gaps with the configured mean inter-arrival time.
ArrivalSchedule generate_arrivals(const Scenario& sc, int type, int zone, RngStream& rng);

/// Resolve a routing policy into a concrete per-zone assignment.
/// Every type must have at least one open facility; explicit assignments
/// must point every zone with positive demand at an open facility.
CustomerAssignment assign_customers(const RoadNetwork& net, const Scenario& sc,
                                    const Placement& placement, const AssignmentPolicy& policy);

/// Core single-server FCFS queue: service of customer c starts at
/// max(arrival_c, previous departure) and lasts services[c] (aligned with
/// the arrival order). Queue length after an arrival includes the arriver;
/// each arrival contributes sd_value(length) once, at that instant.
/// Simultaneous events process departures first.
FacilityQueueTrace simulate_queue(std::span<const MergedArrival> arrivals,
                                  std::span<const double> services, const SdParams& sd, int type,
                                  int facility_zone);

/// Convenience overload drawing exponential service times from `rng` in
/// arrival order.
FacilityQueueTrace simulate_queue(std::span<const MergedArrival> arrivals, const Scenario& sc,
                                  RngStream& rng, int type = 0, int facility_zone = 0);

/// Full evaluation of a placement: per type, generates arrivals and service
/// requirements per zone from child streams of `base` ("arrivals"/"service"
/// keyed by type and zone — service randomness rides with the customer, not
/// the facility, so competing placements can share random numbers), routes
/// customers per `policy`, simulates every open facility queue, and sums
/// the crowd score. Under a fixed horizon, arrivals after the cutoff are
/// dropped before simulation.
SimOutcome evaluate_placement(const RoadNetwork& net, const Scenario& sc,
                              const Placement& placement, const AssignmentPolicy& policy,
                              const RngStream& base);

/// CSV dump: run,type,facility_zone,event_time,event_kind,queue_len,s_contrib
/// (s_contrib left empty on departure rows). Pass write_header=false to
/// append further runs to the same file.
void write_trace_csv(const std::vector<FacilityQueueTrace>& traces, int run, std::ostream& out,
                     bool write_header = true);

} // namespace sdfl
