#include "sdfl/queuesim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <set>
#include <tuple>

#include "sdfl/errors.hpp"
#include "sdfl/placement.hpp"
#include "sdfl/socdist.hpp"
#include "sdfl/util.hpp"

namespace sdfl {

namespace {

// One stream id per (type, zone) pair.
std::uint64_t stream_key(int type, int zone) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(type)) << 32) |
           static_cast<std::uint32_t>(zone);
}

void check_placement(const Placement& placement, const Scenario& sc) {
    validate_placement(placement, sc);
    for (int i = 0; i < sc.type_count(); ++i)
        if (placement.open_zones[static_cast<std::size_t>(i)].empty())
            throw DomainError("no open facility for type '" +
                              sc.facility_types[static_cast<std::size_t>(i)] + "'");
}

} // namespace

std::int64_t FacilityQueueTrace::arrival_count() const {
    std::int64_t c = 0;
    for (const auto& e : events)
        if (e.kind == EventKind::arrival) ++c;
    return c;
}

double FacilityQueueTrace::sum_contrib() const {
    double s = 0.0;
    for (const auto& e : events)
        if (e.kind == EventKind::arrival) s += e.s_contrib;
    return s;
}

double FacilityQueueTrace::last_departure() const {
    for (auto it = events.rbegin(); it != events.rend(); ++it)
        if (it->kind == EventKind::departure) return it->time;
    return 0.0;
}

double FacilityQueueTrace::area() const {
    double area = 0.0;
    double prev_time = 0.0;
    std::int64_t len = 0;
    for (const auto& e : events) {
        area += static_cast<double>(len) * (e.time - prev_time);
        len = e.queue_len;
        prev_time = e.time;
    }
    return area;
}

ArrivalSchedule generate_arrivals(const Scenario& sc, int type, int zone, RngStream& rng) {
    if (type < 0 || type >= sc.type_count()) throw DomainError("generate_arrivals: bad type");
    if (zone < 0 || zone >= sc.zone_count()) throw DomainError("generate_arrivals: bad zone");
    std::int64_t demand = sc.demands[static_cast<std::size_t>(type)][static_cast<std::size_t>(zone)];
    ArrivalSchedule sched;
    sched.times.reserve(static_cast<std::size_t>(demand));
    double t = 0.0;
    for (std::int64_t p = 0; p < demand; ++p) {
        t += rng.exponential(sc.queue.mean_interarrival);
        sched.times.push_back(t);
    }
    return sched;
}

CustomerAssignment assign_customers(const RoadNetwork& net, const Scenario& sc,
                                    const Placement& placement, const AssignmentPolicy& policy) {
    check_placement(placement, sc);
    const int k = sc.type_count();
    const int n = sc.zone_count();

    if (const auto* given = std::get_if<CustomerAssignment>(&policy)) {
        if (static_cast<int>(given->facility_of.size()) != k)
            throw DomainError("explicit assignment does not cover every facility type");
        for (int i = 0; i < k; ++i) {
            const auto& row = given->facility_of[static_cast<std::size_t>(i)];
            if (static_cast<int>(row.size()) != n)
                throw DomainError("explicit assignment does not cover every zone");
            const auto& open = placement.open_zones[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) {
                int f = row[static_cast<std::size_t>(j)];
                bool is_open = f >= 0 && std::binary_search(open.begin(), open.end(), f);
                if (is_open) continue;
                if (f == -1 &&
                    sc.demands[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 0)
                    continue;
                throw DomainError("explicit assignment sends zone " + std::to_string(j) +
                                  " to a facility that is not open for type '" +
                                  sc.facility_types[static_cast<std::size_t>(i)] + "'");
            }
        }
        return *given;
    }

    // nearest policy: one multi-source run per type, tracking
    // (distance, facility id) so distance ties resolve to the smaller id
    CustomerAssignment out;
    out.facility_of.assign(static_cast<std::size_t>(k), std::vector<int>());
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        std::vector<std::pair<double, int>> best(static_cast<std::size_t>(n), {inf, -1});
        using Item = std::tuple<double, int, int>; // (dist, facility, node)
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (int f : placement.open_zones[static_cast<std::size_t>(i)]) {
            best[static_cast<std::size_t>(f)] = {0.0, f};
            heap.emplace(0.0, f, f);
        }
        while (!heap.empty()) {
            auto [d, f, v] = heap.top();
            heap.pop();
            if (std::make_pair(d, f) != best[static_cast<std::size_t>(v)]) continue;
            for (const auto& [u, w] : net.adjacency()[static_cast<std::size_t>(v)]) {
                std::pair<double, int> cand{d + w, f};
                if (cand < best[static_cast<std::size_t>(u)]) {
                    best[static_cast<std::size_t>(u)] = cand;
                    heap.emplace(cand.first, f, u);
                }
            }
        }
        auto& row = out.facility_of[static_cast<std::size_t>(i)];
        row.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            if (best[static_cast<std::size_t>(j)].second < 0)
                throw DomainError("zone " + std::to_string(j) +
                                  " cannot reach any open facility (disconnected network?)");
            row[static_cast<std::size_t>(j)] = best[static_cast<std::size_t>(j)].second;
        }
    }
    return out;
}

FacilityQueueTrace simulate_queue(std::span<const MergedArrival> arrivals,
                                  std::span<const double> services, const SdParams& sd, int type,
                                  int facility_zone) {
    const std::size_t c = arrivals.size();
    if (services.size() != c)
        throw DomainError("simulate_queue: one service time per arrival required");
    for (std::size_t i = 1; i < c; ++i)
        if (arrivals[i].time < arrivals[i - 1].time)
            throw DomainError("simulate_queue: arrivals must be sorted by time");
    for (double s : services)
        if (!(s >= 0.0)) throw DomainError("simulate_queue: service times must be nonnegative");

    std::vector<double> departure(c);
    double prev_done = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
        double start = std::max(arrivals[i].time, prev_done);
        prev_done = start + services[i];
        departure[i] = prev_done;
    }

    FacilityQueueTrace trace;
    trace.type = type;
    trace.facility_zone = facility_zone;
    trace.events.reserve(2 * c);
    std::size_t a = 0, d = 0;
    std::int64_t len = 0;
    while (d < c) {
        // at equal times the departing customer leaves before the arriver
        // joins — except that nobody departs before their own arrival
        if (a < c && (a <= d || arrivals[a].time < departure[d])) {
            ++len;
            QueueEvent e;
            e.time = arrivals[a].time;
            e.kind = EventKind::arrival;
            e.queue_len = len;
            e.home_zone = arrivals[a].home_zone;
            e.person = arrivals[a].person;
            e.s_contrib = sd_value(len, sd, type, facility_zone);
            trace.events.push_back(e);
            ++a;
        } else {
            --len;
            QueueEvent e;
            e.time = departure[d];
            e.kind = EventKind::departure;
            e.queue_len = len;
            e.home_zone = arrivals[d].home_zone;
            e.person = arrivals[d].person;
            trace.events.push_back(e);
            ++d;
        }
    }
    return trace;
}

FacilityQueueTrace simulate_queue(std::span<const MergedArrival> arrivals, const Scenario& sc,
                                  RngStream& rng, int type, int facility_zone) {
    std::vector<double> services(arrivals.size());
    for (auto& s : services) s = rng.exponential(sc.queue.mean_service);
    return simulate_queue(arrivals, services, sc.sd, type, facility_zone);
}

SimOutcome evaluate_placement(const RoadNetwork& net, const Scenario& sc,
                              const Placement& placement, const AssignmentPolicy& policy,
                              const RngStream& base) {
    CustomerAssignment assignment = assign_customers(net, sc, placement, policy);
    const int k = sc.type_count();
    const int n = sc.zone_count();

    SimOutcome out;
    std::int64_t open_total = 0;
    for (int i = 0; i < k; ++i) {
        const auto& open = placement.open_zones[static_cast<std::size_t>(i)];
        open_total += static_cast<std::int64_t>(open.size());

        // customer randomness is keyed by (type, home zone), independent of
        // where the customer is routed
        std::vector<ArrivalSchedule> arrivals(static_cast<std::size_t>(n));
        std::vector<std::vector<double>> services(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            std::int64_t demand =
                sc.demands[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (demand == 0) continue;
            auto astream = base.split("arrivals", stream_key(i, j));
            arrivals[static_cast<std::size_t>(j)] = generate_arrivals(sc, i, j, astream);
            auto sstream = base.split("service", stream_key(i, j));
            auto& svc = services[static_cast<std::size_t>(j)];
            svc.resize(static_cast<std::size_t>(demand));
            for (auto& s : svc) s = sstream.exponential(sc.queue.mean_service);
        }

        std::vector<std::vector<MergedArrival>> queue_arrivals(open.size());
        std::vector<std::size_t> facility_index(static_cast<std::size_t>(n),
                                                std::numeric_limits<std::size_t>::max());
        for (std::size_t fi = 0; fi < open.size(); ++fi)
            facility_index[static_cast<std::size_t>(open[fi])] = fi;
        for (int j = 0; j < n; ++j) {
            const auto& times = arrivals[static_cast<std::size_t>(j)].times;
            if (times.empty()) continue;
            int f = assignment.facility_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            auto& bucket = queue_arrivals[facility_index[static_cast<std::size_t>(f)]];
            for (std::size_t p = 0; p < times.size(); ++p)
                bucket.push_back({times[p], j, static_cast<std::int64_t>(p)});
        }

        for (std::size_t fi = 0; fi < open.size(); ++fi) {
            auto& bucket = queue_arrivals[fi];
            std::sort(bucket.begin(), bucket.end(), [](const MergedArrival& x,
                                                       const MergedArrival& y) {
                return std::tie(x.time, x.home_zone, x.person) <
                       std::tie(y.time, y.home_zone, y.person);
            });
            if (sc.queue.fixed_horizon) {
                auto cut = std::partition_point(
                    bucket.begin(), bucket.end(), [&](const MergedArrival& m) {
                        return m.time <= sc.queue.horizon_minutes;
                    });
                bucket.erase(cut, bucket.end());
            }
            std::vector<double> svc(bucket.size());
            for (std::size_t c = 0; c < bucket.size(); ++c)
                svc[c] = services[static_cast<std::size_t>(bucket[c].home_zone)]
                                 [static_cast<std::size_t>(bucket[c].person)];
            out.traces.push_back(simulate_queue(bucket, svc, sc.sd, i, open[fi]));
        }
    }

    double sum_area = 0.0;
    for (const auto& trace : out.traces) {
        out.total_sd += trace.sum_contrib();
        out.makespan = std::max(out.makespan, trace.last_departure());
        sum_area += trace.area();
    }
    if (open_total > 0 && out.makespan > 0.0)
        out.avg_queue_len = sum_area / (static_cast<double>(open_total) * out.makespan);
    return out;
}

void write_trace_csv(const std::vector<FacilityQueueTrace>& traces, int run, std::ostream& out,
                     bool write_header) {
    if (write_header)
        out << "run,type,facility_zone,event_time,event_kind,queue_len,s_contrib\n";
    for (const auto& trace : traces) {
        for (const auto& e : trace.events) {
            out << run << "," << trace.type << "," << trace.facility_zone << ","
                << format_number(e.time) << ","
                << (e.kind == EventKind::arrival ? "arrival" : "departure") << "," << e.queue_len
                << ",";
            if (e.kind == EventKind::arrival) out << format_number(e.s_contrib);
            out << "\n";
        }
    }
}

} // namespace sdfl
