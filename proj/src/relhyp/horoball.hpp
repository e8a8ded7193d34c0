#pragma once

#include <iosfwd>
#include <vector>

#include "relhyp/graph.hpp"

namespace relhyp {

// e^{-n}, computed once per level so equal levels compare bitwise-equal.
double level_length(int n);

struct HoroballGraph {
    WeightedGraph graph;
    int depth = 0;
    std::size_t base_size = 0;
    // Smallest depth at which no optimal transit level is clipped.
    int sufficient_depth = 0;

    VertexId id(VertexId base, int level) const { return static_cast<VertexId>(level * base_size + base); }
    VertexId base_of(VertexId v) const { return static_cast<VertexId>(v % base_size); }
    int level_of(VertexId v) const { return static_cast<int>(v / base_size); }
};

// Requires a connected base graph with unit edges.
HoroballGraph build_horoball(const WeightedGraph& base, int depth);

// Levels sidecar: "v level base" per vertex.
void write_levels(const HoroballGraph& h, std::ostream& out);

double horo_estimate(double d_base, int m, int n);

struct TransitBound {
    double distance;
    int level;        // optimal transit level after clipping
    bool truncated;   // the unclipped optimum lies above depth
};

// Closed form min over integer t in [max(m,n), depth] of (t-m)+(t-n)+e^{-t} d.
TransitBound horo_transit_distance(double d_base, int m, int n, int depth);

struct ErrorScanReport {
    int depth = 0;
    int sufficient_depth = 0;
    std::size_t vertices = 0;
    std::size_t pairs = 0;
    double max_error = 0.0;
    // argmax pair as (base x, level m, base y, level n)
    VertexId arg_x = 0, arg_y = 0;
    int arg_m = 0, arg_n = 0;
    // max error indexed by min(m, n)
    std::vector<double> level_max_error;
    std::size_t truncated_pairs = 0;
    std::size_t closed_form_mismatches = 0;
    std::size_t bound_violations = 0;
    double max_closed_form_gap = 0.0;
};

ErrorScanReport estimate_error_scan(const WeightedGraph& base, int depth);

}  // namespace relhyp
