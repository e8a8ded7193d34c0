#include "relhyp/horoball.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "relhyp/error.hpp"

namespace relhyp {

namespace {

constexpr int kMaxDepth = 200;

const std::vector<double>& length_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kMaxDepth + 1);
        for (int n = 0; n <= kMaxDepth; ++n) t[n] = std::exp(-static_cast<double>(n));
        return t;
    }();
    return table;
}

}  // namespace

double level_length(int n) {
    require(n >= 0 && n <= kMaxDepth, "horoball level out of range");
    return length_table()[n];
}

HoroballGraph build_horoball(const WeightedGraph& base, int depth) {
    require(depth >= 0 && depth <= kMaxDepth, "horoball depth out of range");
    require(base.num_vertices() > 0, "horoball base is empty");
    require(base.unit_lengths(), "horoball base must have unit edge lengths");
    require(base.is_connected(), "horoball base must be connected");
    std::size_t nv = base.num_vertices() * static_cast<std::size_t>(depth + 1);
    if (nv > vertex_cap()) {
        fail(ErrorCode::kCapExceeded, "cap exceeded (predicted " + std::to_string(nv) + " > cap " +
                                          std::to_string(vertex_cap()) + ")");
    }
    HoroballGraph h;
    h.depth = depth;
    h.base_size = base.num_vertices();
    auto base_edges = base.edges();
    std::vector<Edge> edges;
    edges.reserve(base_edges.size() * (depth + 1) + h.base_size * depth);
    for (int n = 0; n <= depth; ++n) {
        double len = level_length(n);
        for (const Edge& e : base_edges) edges.push_back({h.id(e.u, n), h.id(e.v, n), len});
        if (n < depth) {
            for (VertexId v = 0; v < h.base_size; ++v) edges.push_back({h.id(v, n), h.id(v, n + 1), 1.0});
        }
    }
    h.graph = WeightedGraph::build(nv, edges);

    double diam = 0;
    if (h.base_size > 1) {
        // Exact diameter of the base; eccentricity scan is cheap at these sizes.
        for (VertexId v = 0; v < h.base_size; ++v) {
            auto d = single_source_distances(base, v);
            diam = std::max(diam, *std::max_element(d.begin(), d.end()));
        }
    }
    h.sufficient_depth = diam <= 1 ? 2 : static_cast<int>(std::ceil(std::log(diam))) + 2;
    return h;
}

void write_levels(const HoroballGraph& h, std::ostream& out) {
    for (VertexId v = 0; v < h.graph.num_vertices(); ++v) {
        out << v << ' ' << h.level_of(v) << ' ' << h.base_of(v) << '\n';
    }
}

double horo_estimate(double d_base, int m, int n) {
    require(d_base >= 0, "base distance must be nonnegative");
    return 2.0 * std::log(d_base * std::exp(-static_cast<double>(std::min(m, n))) + 1.0) + std::abs(m - n);
}

TransitBound horo_transit_distance(double d_base, int m, int n, int depth) {
    int lo = std::max(m, n);
    TransitBound best{kInfinity, lo, false};
    if (d_base == 0) return {static_cast<double>(std::abs(m - n)), lo, false};
    // The objective is convex in t with real minimum at ln(d/2); scan a little past it.
    int unclipped_hi = std::max(lo, static_cast<int>(std::ceil(std::log(d_base / 2.0))) + 2);
    int hi = std::min(unclipped_hi, depth);
    int unclipped_arg = lo;
    double unclipped_best = kInfinity;
    for (int t = lo; t <= unclipped_hi; ++t) {
        double e = t <= kMaxDepth ? level_length(t) : std::exp(-static_cast<double>(t));
        double val = (t - m) + (t - n) + e * d_base;
        if (val < unclipped_best) {
            unclipped_best = val;
            unclipped_arg = t;
        }
        if (t <= hi && val < best.distance) {
            best.distance = val;
            best.level = t;
        }
    }
    best.truncated = unclipped_arg > depth;
    return best;
}

ErrorScanReport estimate_error_scan(const WeightedGraph& base, int depth) {
    HoroballGraph h = build_horoball(base, depth);
    ErrorScanReport rep;
    rep.depth = depth;
    rep.sufficient_depth = h.sufficient_depth;
    rep.vertices = h.graph.num_vertices();
    rep.level_max_error.assign(depth + 1, 0.0);

    std::vector<std::vector<double>> base_d(h.base_size);
    for (VertexId v = 0; v < h.base_size; ++v) base_d[v] = single_source_distances(base, v);

    bool first = true;
    for (VertexId u = 0; u < h.graph.num_vertices(); ++u) {
        auto row = single_source_distances(h.graph, u);
        VertexId x = h.base_of(u);
        int m = h.level_of(u);
        for (VertexId v = u; v < h.graph.num_vertices(); ++v) {
            VertexId y = h.base_of(v);
            int n = h.level_of(v);
            double dg = base_d[x][y];
            double exact = row[v];
            double est = horo_estimate(dg, m, n);
            double err = std::abs(exact - est);
            ++rep.pairs;
            if (first || err > rep.max_error) {
                rep.max_error = std::max(rep.max_error, err);
                rep.arg_x = x;
                rep.arg_m = m;
                rep.arg_y = y;
                rep.arg_n = n;
                first = false;
            }
            int lvl = std::min(m, n);
            rep.level_max_error[lvl] = std::max(rep.level_max_error[lvl], err);

            TransitBound tb = horo_transit_distance(dg, m, n, depth);
            if (tb.truncated) ++rep.truncated_pairs;
            double gap = std::abs(tb.distance - exact);
            rep.max_closed_form_gap = std::max(rep.max_closed_form_gap, gap);
            if (gap > 1e-9) ++rep.closed_form_mismatches;
            double upper = dg * level_length(lvl) + std::abs(m - n);
            if (exact < std::abs(m - n) - 1e-12 || exact > upper + 1e-9) ++rep.bound_violations;
        }
    }
    return rep;
}

}  // namespace relhyp
