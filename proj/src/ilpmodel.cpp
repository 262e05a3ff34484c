#include "sdfl/ilpmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "sdfl/errors.hpp"
#include "sdfl/socdist.hpp"
#include "sdfl/util.hpp"

namespace sdfl {

namespace {

using KKey = std::tuple<int, int, std::int64_t>; // (type, facility zone, slot)

std::map<KKey, std::int64_t> slot_visit_counts(const AssignmentTensor& t) {
    std::map<KKey, std::int64_t> counts;
    for (const auto& e : t.y) ++counts[{e.type, e.facility_zone, e.slot}];
    return counts;
}

// global person numbering: zone j's people occupy [base[j], base[j+1])
std::vector<std::int64_t> person_bases(const Scenario& sc) {
    std::vector<std::int64_t> base;
    base.reserve(static_cast<std::size_t>(sc.zone_count()) + 1);
    base.push_back(0);
    for (int j = 0; j < sc.zone_count(); ++j)
        base.push_back(base.back() +
                       sc.network.population(j) *
                           static_cast<std::int64_t>(sc.demand_multiplicity));
    return base;
}

std::string event_str(const YEvent& e) {
    std::ostringstream os;
    os << "type " << e.type << ", facility zone " << e.facility_zone << ", person " << e.person
       << " of zone " << e.home_zone << ", slot " << e.slot;
    return os.str();
}

} // namespace

double objective_from_tensor(const AssignmentTensor& tensor, const SdParams& sd) {
    auto counts = slot_visit_counts(tensor);
    double total = 0.0;
    for (const auto& e : tensor.y) {
        if (e.type < 0 || e.type >= tensor.type_count || e.facility_zone < 0 ||
            e.facility_zone >= tensor.zone_count)
            throw DomainError("objective_from_tensor: event indices out of range");
        if (!tensor.x[static_cast<std::size_t>(e.type)][static_cast<std::size_t>(e.facility_zone)])
            continue; // the x factor zeroes contributions at closed facilities
        std::int64_t kk;
        KKey key{e.type, e.facility_zone, e.slot};
        if (tensor.k_closure == KClosure::trace) {
            auto it = tensor.k.find(key);
            kk = it != tensor.k.end() ? it->second : counts.at(key);
        } else {
            kk = counts.at(key);
        }
        total += sd_value(kk, sd, e.type, e.facility_zone);
    }
    return total;
}

FeasibilityReport check_feasibility(const AssignmentTensor& tensor, const RoadNetwork& net,
                                    const Scenario& sc, double d) {
    if (!(d > 0.0)) throw DomainError("check_feasibility: d must be positive");
    const int k = sc.type_count();
    const int n = sc.zone_count();
    FeasibilityReport report;
    auto violate = [&](std::string constraint, std::string detail) {
        report.pass = false;
        report.violations.push_back({std::move(constraint), std::move(detail)});
    };

    // structural sanity before touching the constraints proper
    if (tensor.type_count != k || tensor.zone_count != n ||
        static_cast<int>(tensor.x.size()) != k) {
        violate("structure", "tensor shape does not match the scenario");
        return report;
    }
    for (int i = 0; i < k; ++i)
        if (static_cast<int>(tensor.x[static_cast<std::size_t>(i)].size()) != n) {
            violate("structure", "tensor x matrix shape does not match the scenario");
            return report;
        }
    bool indices_ok = true;
    for (const auto& e : tensor.y) {
        if (e.type < 0 || e.type >= k || e.facility_zone < 0 || e.facility_zone >= n ||
            e.home_zone < 0 || e.home_zone >= n || e.person < 0 || e.slot < 0 ||
            e.slot >= tensor.slot_count) {
            violate("structure", "visit indices out of range: " + event_str(e));
            indices_ok = false;
            continue;
        }
        if (e.person >=
            sc.demands[static_cast<std::size_t>(e.type)][static_cast<std::size_t>(e.home_zone)])
            violate("structure", "visit by a person beyond the zone's demand: " + event_str(e));
        if (!tensor.x[static_cast<std::size_t>(e.type)][static_cast<std::size_t>(e.facility_zone)])
            violate("structure", "visit at a facility that is not open: " + event_str(e));
    }
    if (!indices_ok) return report;

    // C8: x binary
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) {
            char v = tensor.x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (v != 0 && v != 1)
                violate("C8", "x at type " + std::to_string(i) + ", zone " + std::to_string(j) +
                                  " is not binary");
        }

    // C9: y binary — the same visit recorded twice would mean y = 2
    {
        std::set<std::tuple<int, int, int, std::int64_t, std::int64_t>> seen;
        for (const auto& e : tensor.y)
            if (!seen.insert({e.type, e.facility_zone, e.home_zone, e.person, e.slot}).second)
                violate("C9", "duplicate visit entry: " + event_str(e));
    }

    // C4: per-type budget
    for (int i = 0; i < k; ++i) {
        std::int64_t open = 0;
        for (int j = 0; j < n; ++j)
            if (tensor.x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) ++open;
        if (open > sc.budgets[static_cast<std::size_t>(i)])
            violate("C4", "type " + std::to_string(i) + " opens " + std::to_string(open) +
                              " facilities against a budget of " +
                              std::to_string(sc.budgets[static_cast<std::size_t>(i)]));
    }

    // visits grouped per (type, home zone, person)
    std::map<std::tuple<int, int, std::int64_t>, std::vector<const YEvent*>> visits;
    for (const auto& e : tensor.y) visits[{e.type, e.home_zone, e.person}].push_back(&e);

    // C5: one visit per person per type; never two places at once
    for (const auto& [key, events] : visits) {
        if (events.size() <= 1) continue;
        bool simultaneous = false;
        for (std::size_t a = 0; a < events.size() && !simultaneous; ++a)
            for (std::size_t b = a + 1; b < events.size() && !simultaneous; ++b)
                if (events[a]->slot == events[b]->slot &&
                    events[a]->facility_zone != events[b]->facility_zone)
                    simultaneous = true;
        violate("C5", std::string(simultaneous ? "two facility locations at the same time: "
                                               : "more than one visit for the whole horizon: ") +
                          event_str(*events.front()) + " and " + std::to_string(events.size() - 1) +
                          " more");
    }

    // C6: served at the home zone or a facility within distance d of it
    std::vector<std::vector<char>> allowed(static_cast<std::size_t>(n),
                                           std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int j = 0; j < n; ++j) {
        allowed[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = 1;
        for (int u : net.neighbors_within(j, d))
            allowed[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)] = 1;
    }
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) {
            std::int64_t demand =
                sc.demands[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            for (std::int64_t p = 0; p < demand; ++p) {
                auto it = visits.find({i, j, p});
                bool served = false;
                if (it != visits.end())
                    for (const YEvent* e : it->second)
                        if (allowed[static_cast<std::size_t>(j)]
                                   [static_cast<std::size_t>(e->facility_zone)])
                            served = true;
                if (!served)
                    violate("C6", "person " + std::to_string(p) + " of zone " + std::to_string(j) +
                                      " is never served within distance " + format_number(d) +
                                      " for type " + std::to_string(i));
            }
        }
    }

    // C7: along every road (j,u), a person of zone j visiting both ends must
    // visit home first; checked as the literal product expression
    for (const auto& [key, events] : visits) {
        const int home = std::get<1>(key);
        for (const YEvent* e : events) {
            if (e->facility_zone != home) continue;
            for (const auto& [u, w] : net.adjacency()[static_cast<std::size_t>(home)]) {
                (void)w;
                std::int64_t visit_count = 0;
                std::int64_t slot_sum = 0;
                for (const YEvent* o : events)
                    if (o->facility_zone == u) {
                        ++visit_count;
                        slot_sum += o->slot;
                    }
                if (visit_count == 0) continue;
                std::int64_t expr = visit_count * (e->slot - slot_sum);
                if (expr > 0)
                    violate("C7", "home visit at slot " + std::to_string(e->slot) +
                                      " comes after the visit to neighboring zone " +
                                      std::to_string(u) + " (" + event_str(*e) + ")");
            }
        }
    }

    return report;
}

AssignmentTensor trace_to_tensor(const SimOutcome& outcome, const Scenario& sc) {
    AssignmentTensor t;
    t.type_count = sc.type_count();
    t.zone_count = sc.zone_count();
    t.x.assign(static_cast<std::size_t>(t.type_count),
               std::vector<char>(static_cast<std::size_t>(t.zone_count), 0));
    t.k_closure = KClosure::trace;

    const double ts = sc.time_slot;
    const double span = sc.queue.fixed_horizon ? sc.queue.horizon_minutes : outcome.makespan;
    t.slot_count = static_cast<std::int64_t>(std::floor(span / ts)) + 1;

    for (const auto& trace : outcome.traces) {
        if (trace.type < 0 || trace.type >= t.type_count || trace.facility_zone < 0 ||
            trace.facility_zone >= t.zone_count)
            throw DomainError("trace_to_tensor: trace facility out of range");
        t.x[static_cast<std::size_t>(trace.type)][static_cast<std::size_t>(trace.facility_zone)] =
            1;
        for (const auto& e : trace.events) {
            if (e.kind != EventKind::arrival) continue;
            auto slot = static_cast<std::int64_t>(std::floor(e.time / ts));
            if (slot >= t.slot_count) {
                ++t.dropped_events;
                continue;
            }
            t.y.push_back({trace.type, trace.facility_zone, e.home_zone, e.person, slot});
            auto& kk = t.k[{trace.type, trace.facility_zone, slot}];
            kk = std::max(kk, e.queue_len);
        }
    }
    return t;
}

void save_tensor(const AssignmentTensor& tensor, const Scenario& sc, std::ostream& out) {
    auto base = person_bases(sc);
    out << "# slot_count=" << tensor.slot_count << "\n";
    out << "kind,type,zone,person,slot\n";
    for (int i = 0; i < tensor.type_count; ++i)
        for (int j = 0; j < tensor.zone_count; ++j)
            if (tensor.x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                out << "x," << i << "," << j << ",,\n";
    for (const auto& e : tensor.y) {
        if (e.home_zone < 0 || e.home_zone >= sc.zone_count())
            throw DomainError("save_tensor: event home zone out of range");
        std::int64_t pid = base[static_cast<std::size_t>(e.home_zone)] + e.person;
        out << "y," << e.type << "," << e.facility_zone << "," << pid << "," << e.slot << "\n";
    }
}

void save_tensor(const AssignmentTensor& tensor, const Scenario& sc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open tensor file for writing: " + path);
    save_tensor(tensor, sc, out);
    if (!out) throw IoError("failed writing tensor file: " + path);
}

AssignmentTensor load_tensor(std::istream& in, const Scenario& sc) {
    auto base = person_bases(sc);
    AssignmentTensor t;
    t.type_count = sc.type_count();
    t.zone_count = sc.zone_count();
    t.x.assign(static_cast<std::size_t>(t.type_count),
               std::vector<char>(static_cast<std::size_t>(t.zone_count), 0));
    t.k_closure = KClosure::slot_count;

    std::string line;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = "tensor file line " + std::to_string(lineno);
        std::string body(trim(line));
        if (body.empty()) continue;
        if (body.rfind("#", 0) == 0) {
            auto pos = body.find("slot_count=");
            if (pos != std::string::npos)
                t.slot_count = parse_int(trim(body.substr(pos + 11)), "slot_count");
            continue;
        }
        if (!saw_header) {
            if (body != "kind,type,zone,person,slot")
                throw IoError(where + ": expected header 'kind,type,zone,person,slot'");
            saw_header = true;
            continue;
        }
        auto parts = split(body, ',');
        if (parts.size() != 5) throw IoError(where + ": expected 5 fields");
        std::string kind(trim(parts[0]));
        int type = static_cast<int>(parse_int(trim(parts[1]), "tensor type"));
        int zone = static_cast<int>(parse_int(trim(parts[2]), "tensor zone"));
        if (type < 0 || type >= t.type_count) throw IoError(where + ": type out of range");
        if (zone < 0 || zone >= t.zone_count) throw IoError(where + ": zone out of range");
        if (kind == "x") {
            t.x[static_cast<std::size_t>(type)][static_cast<std::size_t>(zone)] = 1;
        } else if (kind == "y") {
            std::int64_t pid = parse_int(trim(parts[3]), "tensor person");
            std::int64_t slot = parse_int(trim(parts[4]), "tensor slot");
            if (pid < 0 || pid >= base.back()) throw IoError(where + ": person out of range");
            auto it = std::upper_bound(base.begin(), base.end(), pid);
            int home = static_cast<int>(it - base.begin()) - 1;
            t.y.push_back({type, zone, home, pid - base[static_cast<std::size_t>(home)], slot});
        } else {
            throw IoError(where + ": row kind must be 'x' or 'y'");
        }
    }
    if (!saw_header) throw IoError("tensor file has no header row");
    if (t.slot_count < 1) throw IoError("tensor file slot_count must be at least 1");
    return t;
}

AssignmentTensor load_tensor(const std::string& path, const Scenario& sc) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tensor file: " + path);
    return load_tensor(in, sc);
}

} // namespace sdfl
