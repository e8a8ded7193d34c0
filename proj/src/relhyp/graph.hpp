#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace relhyp {

using VertexId = std::uint32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

// Version tag of the text graph format, echoed into every report.
inline constexpr const char* kGraphFormatVersion = "relhyp-graph/1";

struct Edge {
    VertexId u;
    VertexId v;
    double length;
};

struct Arc {
    VertexId to;
    double length;
};

/// Finite undirected graph with positive edge lengths, stored as CSR.
/// Immutable once built.
class WeightedGraph {
public:
    WeightedGraph() = default;

    /// Parallel edges collapse to the minimum length. Throws on self-loops,
    /// out-of-range endpoints and non-positive lengths.
    static WeightedGraph build(std::size_t n_vertices, std::span<const Edge> edges);

    std::size_t num_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_edges() const { return arcs_.size() / 2; }

    std::span<const Arc> neighbors(VertexId v) const {
        return {arcs_.data() + offsets_[v], arcs_.data() + offsets_[v + 1]};
    }
    std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

    /// Edge list with u < v, sorted.
    std::vector<Edge> edges() const;

    bool unit_lengths() const { return unit_; }

    void set_labels(std::vector<std::string> labels);
    bool has_labels() const { return !labels_.empty(); }
    const std::string& label(VertexId v) const { return labels_.at(v); }
    const std::vector<std::string>& labels() const { return labels_; }

    /// Component index per vertex, numbered in order of first vertex.
    std::vector<std::uint32_t> components() const;
    std::size_t num_components() const;
    bool is_connected() const { return num_vertices() <= 1 || num_components() == 1; }
    bool is_tree() const { return is_connected() && num_edges() + 1 == num_vertices(); }

private:
    std::vector<std::size_t> offsets_;
    std::vector<Arc> arcs_;
    std::vector<std::string> labels_;
    bool unit_ = true;
};

/// Shortest-path distances from one source; BFS on unit graphs, Dijkstra otherwise.
std::vector<double> single_source_distances(const WeightedGraph& g, VertexId source);

/// Distances to the nearest of several sources.
std::vector<double> multi_source_distances(const WeightedGraph& g, std::span<const VertexId> sources);

/// Vertices reachable from `sources` when every vertex with blocked[v] set is removed.
std::vector<char> reachable_avoiding(const WeightedGraph& g, std::span<const VertexId> sources,
                                     const std::vector<char>& blocked);

/// Exact path metric with cached single-source rows. Safe for concurrent reads.
/// dist(u, v) always reads the row of min(u, v), so it is bitwise symmetric.
class MetricOracle {
public:
    explicit MetricOracle(const WeightedGraph& g) : graph_(&g) {}

    const WeightedGraph& graph() const { return *graph_; }

    double dist(VertexId u, VertexId v) const;
    /// The returned reference stays valid until clear_cache().
    const std::vector<double>& row(VertexId source) const;
    void clear_cache() const;
    std::size_t cached_rows() const;

private:
    const WeightedGraph* graph_;
    mutable std::mutex mu_;
    mutable std::unordered_map<VertexId, std::vector<double>> rows_;
};

using Quadruple = std::array<VertexId, 4>;

struct FourPointResult {
    double delta = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped_disconnected = 0;
    Quadruple argmax{kNoVertex, kNoVertex, kNoVertex, kNoVertex};
};

/// Four-point defect of one quadruple: (largest - middle) / 2 of the three pairings.
double four_point_defect(double d01, double d23, double d02, double d13, double d03, double d12);

/// Max defect over the sample; disconnected quadruples are skipped and counted.
FourPointResult four_point_delta(const MetricOracle& oracle, std::span<const Quadruple> sample);

double subset_diameter(const MetricOracle& oracle, std::span<const VertexId> subset);

// Text format: header "V E", then E lines "u v length". Labels go in a sidecar
// with lines "v label".
void write_graph(const WeightedGraph& g, std::ostream& out);
void write_labels(const WeightedGraph& g, std::ostream& out);
WeightedGraph read_graph(std::istream& in);
void read_labels(WeightedGraph& g, std::istream& in);

WeightedGraph path_graph(std::size_t n_edges);
WeightedGraph cycle_graph(std::size_t n);
WeightedGraph grid_graph(std::size_t width, std::size_t height);

}  // namespace relhyp
