#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sdfl/rng.hpp"

namespace sdfl {

/// Edge weight distribution for synthetic networks. Unit weights by default.
struct WeightSpec {
    enum class Kind { unit, uniform };
    Kind kind = Kind::unit;
    double lo = 1.0;
    double hi = 1.0;

    static WeightSpec unit() { return {}; }
    static WeightSpec uniform(double lo, double hi);
};

enum class GridNeighborhood { moore, von_neumann };

struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;
};

/// Weighted undirected road network over zones 0..n-1.
///
/// Immutable once populated: the graph structure is fixed at construction
/// (simple, connected, strictly positive weights enforced), and per-zone
/// populations are attached once by the scenario builder. Safe for
/// concurrent reads afterwards.
class RoadNetwork {
public:
    RoadNetwork() = default;
    RoadNetwork(int zone_count, std::vector<Edge> edges);

    int zone_count() const { return zone_count_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::vector<std::pair<int, double>>>& adjacency() const { return adj_; }

    bool has_populations() const { return !populations_.empty(); }
    const std::vector<std::int64_t>& populations() const { return populations_; }
    std::int64_t population(int zone) const;
    void set_populations(std::vector<std::int64_t> populations);

    /// Exact single-source shortest-path distances (Dijkstra).
    std::vector<double> shortest_distances(int source) const;

    /// Zones u != v with shortest_distance(v, u) < d, ascending. Requires d > 0.
    std::vector<int> neighbors_within(int v, double d) const;

    int degree(int v) const;

    /// Longest shortest-path distance over all zone pairs.
    double diameter() const;

private:
    int zone_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
    std::vector<std::int64_t> populations_;
};

/// Complete network on n >= 2 zones; n(n-1)/2 edges. Populations left unset.
RoadNetwork generate_complete(int n, const WeightSpec& weights, RngStream& rng);

/// Rectangular grid, vertices (i,j) flattened row-major. Adjacent iff
/// |i-i'| <= 1 and |j-j'| <= 1 (and not equal); the von Neumann flag drops
/// the diagonals. Requires rows, cols >= 2. Populations left unset.
RoadNetwork generate_grid(int rows, int cols, const WeightSpec& weights, RngStream& rng,
                          GridNeighborhood neighborhood = GridNeighborhood::moore);

/// Plain-text format: header "n m", m lines "u v w", then (when populations
/// are set) one line "zone population" per zone. Weights use the shortest
/// decimal rendering that round-trips, so integer weights stay integers.
void save_network(const RoadNetwork& net, std::ostream& out);
void save_network(const RoadNetwork& net, const std::string& path);
RoadNetwork load_network(std::istream& in);
RoadNetwork load_network(const std::string& path);

} // namespace sdfl
