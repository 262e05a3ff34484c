#include "sdfl/network.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "sdfl/errors.hpp"
#include "sdfl/util.hpp"

namespace sdfl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double draw_weight(const WeightSpec& spec, RngStream& rng) {
    switch (spec.kind) {
    case WeightSpec::Kind::unit: return 1.0;
    case WeightSpec::Kind::uniform: return rng.uniform_real(spec.lo, spec.hi);
    }
    throw DomainError("unknown weight spec");
}

} // namespace

WeightSpec WeightSpec::uniform(double lo, double hi) {
    if (!(lo > 0.0) || !(hi > 0.0) || lo > hi)
        throw DomainError("uniform weights need 0 < lo <= hi");
    WeightSpec s;
    s.kind = Kind::uniform;
    s.lo = lo;
    s.hi = hi;
    return s;
}

RoadNetwork::RoadNetwork(int zone_count, std::vector<Edge> edges)
    : zone_count_(zone_count), edges_(std::move(edges)) {
    if (zone_count_ < 1) throw DomainError("network needs at least one zone");

    adj_.assign(zone_count_, {});
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges_.size() * 2);
    for (const Edge& e : edges_) {
        if (e.u < 0 || e.u >= zone_count_ || e.v < 0 || e.v >= zone_count_)
            throw DomainError("edge endpoint out of range");
        if (e.u == e.v) throw DomainError("self-loop edges are not allowed");
        if (!(e.w > 0.0)) throw DomainError("edge weights must be strictly positive");
        int a = std::min(e.u, e.v), b = std::max(e.u, e.v);
        std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
        if (!seen.insert(key).second) throw DomainError("parallel edges are not allowed");
        adj_[e.u].emplace_back(e.v, e.w);
        adj_[e.v].emplace_back(e.u, e.w);
    }

    // connectivity
    std::vector<char> visited(zone_count_, 0);
    std::queue<int> bfs;
    bfs.push(0);
    visited[0] = 1;
    int reached = 1;
    while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (auto [v, w] : adj_[u]) {
            if (!visited[v]) {
                visited[v] = 1;
                ++reached;
                bfs.push(v);
            }
        }
    }
    if (reached != zone_count_) throw DomainError("network must be connected");
}

std::int64_t RoadNetwork::population(int zone) const {
    if (zone < 0 || zone >= zone_count_) throw DomainError("zone does not exist");
    if (populations_.empty()) throw DomainError("network has no populations");
    return populations_[static_cast<std::size_t>(zone)];
}

void RoadNetwork::set_populations(std::vector<std::int64_t> populations) {
    if (static_cast<int>(populations.size()) != zone_count_)
        throw DomainError("populations must have exactly one entry per zone");
    for (std::int64_t p : populations)
        if (p < 1) throw DomainError("every zone population must be >= 1");
    populations_ = std::move(populations);
}

std::vector<double> RoadNetwork::shortest_distances(int source) const {
    if (source < 0 || source >= zone_count_) throw DomainError("source zone does not exist");
    std::vector<double> dist(zone_count_, kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (auto [v, w] : adj_[u]) {
            double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    for (double d : dist)
        if (d == kInf) throw DomainError("unreachable zone; network invariant violated");
    return dist;
}

std::vector<int> RoadNetwork::neighbors_within(int v, double d) const {
    if (v < 0 || v >= zone_count_) throw DomainError("zone does not exist");
    if (!(d > 0.0)) throw DomainError("neighborhood radius must be positive");
    std::vector<double> dist = shortest_distances(v);
    std::vector<int> out;
    for (int u = 0; u < zone_count_; ++u)
        if (u != v && dist[u] < d) out.push_back(u);
    return out;
}

int RoadNetwork::degree(int v) const {
    if (v < 0 || v >= zone_count_) throw DomainError("zone does not exist");
    return static_cast<int>(adj_[v].size());
}

double RoadNetwork::diameter() const {
    double best = 0.0;
    for (int s = 0; s < zone_count_; ++s) {
        std::vector<double> dist = shortest_distances(s);
        for (double d : dist) best = std::max(best, d);
    }
    return best;
}

RoadNetwork generate_complete(int n, const WeightSpec& weights, RngStream& rng) {
    if (n < 2) throw DomainError("complete network needs n >= 2");
    std::vector<Edge> edges;
    edges.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.push_back({u, v, draw_weight(weights, rng)});
    return RoadNetwork(n, std::move(edges));
}

RoadNetwork generate_grid(int rows, int cols, const WeightSpec& weights, RngStream& rng,
                          GridNeighborhood neighborhood) {
    if (rows < 2 || cols < 2) throw DomainError("grid network needs rows, cols >= 2");
    auto id = [cols](int r, int c) { return r * cols + c; };
    std::vector<Edge> edges;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), draw_weight(weights, rng)});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), draw_weight(weights, rng)});
            if (neighborhood == GridNeighborhood::moore && r + 1 < rows) {
                if (c + 1 < cols)
                    edges.push_back({id(r, c), id(r + 1, c + 1), draw_weight(weights, rng)});
                if (c > 0) edges.push_back({id(r, c), id(r + 1, c - 1), draw_weight(weights, rng)});
            }
        }
    }
    return RoadNetwork(rows * cols, std::move(edges));
}

void save_network(const RoadNetwork& net, std::ostream& out) {
    out << net.zone_count() << ' ' << net.edges().size() << '\n';
    for (const Edge& e : net.edges())
        out << e.u << ' ' << e.v << ' ' << format_number(e.w) << '\n';
    if (net.has_populations())
        for (int z = 0; z < net.zone_count(); ++z)
            out << z << ' ' << net.populations()[z] << '\n';
}

void save_network(const RoadNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    save_network(net, out);
    if (!out) throw IoError("write failed: " + path);
}

RoadNetwork load_network(std::istream& in) {
    int n = 0;
    std::size_t m = 0;
    if (!(in >> n >> m)) throw ConfigError("network file: malformed header, expected 'n m'");
    std::vector<Edge> edges(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(in >> edges[i].u >> edges[i].v >> edges[i].w))
            throw ConfigError("network file: malformed edge line " + std::to_string(i + 1));
    }
    RoadNetwork net(n, std::move(edges));

    // optional population block: exactly one "zone population" line per zone
    in >> std::ws;
    int next = in.peek();
    if (next != std::char_traits<char>::eof() && next >= '0' && next <= '9') {
        std::vector<std::int64_t> pops(n, 0);
        std::vector<char> seen(n, 0);
        for (int i = 0; i < n; ++i) {
            int zone = 0;
            std::int64_t pop = 0;
            if (!(in >> zone >> pop))
                throw ConfigError("network file: malformed population line");
            if (zone < 0 || zone >= n || seen[zone])
                throw ConfigError("network file: bad or duplicate population zone id");
            seen[zone] = 1;
            pops[zone] = pop;
        }
        net.set_populations(std::move(pops));
    }
    return net;
}

RoadNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    return load_network(in);
}

} // namespace sdfl
