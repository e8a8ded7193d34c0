#include "relhyp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include "relhyp/error.hpp"

namespace relhyp {

std::size_t vertex_cap() {
    constexpr std::size_t kDefaultCap = 2'000'000;
    if (const char* env = std::getenv("RELHYP_CAP_VERTICES")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultCap;
}

WeightedGraph WeightedGraph::build(std::size_t n_vertices, std::span<const Edge> edges) {
    if (n_vertices >= kNoVertex) fail(ErrorCode::kCapExceeded, "vertex count exceeds id range");
    std::vector<Edge> norm;
    norm.reserve(edges.size());
    for (const Edge& e : edges) {
        if (e.u >= n_vertices || e.v >= n_vertices) {
            fail(ErrorCode::kInvalidArgument, "edge endpoint out of range: " + std::to_string(e.u) + " " +
                                                  std::to_string(e.v));
        }
        if (e.u == e.v) fail(ErrorCode::kInvalidArgument, "self-loop at vertex " + std::to_string(e.u));
        if (!(e.length > 0.0) || !std::isfinite(e.length)) {
            fail(ErrorCode::kInvalidArgument, "non-positive edge length");
        }
        norm.push_back(e.u < e.v ? e : Edge{e.v, e.u, e.length});
    }
    std::sort(norm.begin(), norm.end(), [](const Edge& a, const Edge& b) {
        if (a.u != b.u) return a.u < b.u;
        if (a.v != b.v) return a.v < b.v;
        return a.length < b.length;
    });
    // Keep the first (shortest) copy of each parallel class.
    norm.erase(std::unique(norm.begin(), norm.end(),
                           [](const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }),
               norm.end());

    WeightedGraph g;
    g.offsets_.assign(n_vertices + 1, 0);
    for (const Edge& e : norm) {
        ++g.offsets_[e.u + 1];
        ++g.offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n_vertices; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.arcs_.resize(norm.size() * 2);
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const Edge& e : norm) {
        g.arcs_[fill[e.u]++] = Arc{e.v, e.length};
        g.arcs_[fill[e.v]++] = Arc{e.u, e.length};
        if (e.length != 1.0) g.unit_ = false;
    }
    return g;
}

std::vector<Edge> WeightedGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (VertexId v = 0; v < num_vertices(); ++v) {
        for (const Arc& a : neighbors(v)) {
            if (v < a.to) out.push_back({v, a.to, a.length});
        }
    }
    return out;
}

void WeightedGraph::set_labels(std::vector<std::string> labels) {
    require(labels.empty() || labels.size() == num_vertices(), "label count must match vertex count");
    labels_ = std::move(labels);
}

std::vector<std::uint32_t> WeightedGraph::components() const {
    const std::size_t n = num_vertices();
    std::vector<std::uint32_t> comp(n, std::numeric_limits<std::uint32_t>::max());
    std::uint32_t next = 0;
    std::vector<VertexId> stack;
    for (VertexId s = 0; s < n; ++s) {
        if (comp[s] != std::numeric_limits<std::uint32_t>::max()) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (const Arc& a : neighbors(v)) {
                if (comp[a.to] == std::numeric_limits<std::uint32_t>::max()) {
                    comp[a.to] = next;
                    stack.push_back(a.to);
                }
            }
        }
        ++next;
    }
    return comp;
}

std::size_t WeightedGraph::num_components() const {
    auto comp = components();
    return comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
}

namespace {

std::vector<double> bfs_from(const WeightedGraph& g, std::span<const VertexId> sources) {
    std::vector<double> dist(g.num_vertices(), kInfinity);
    std::vector<VertexId> frontier;
    frontier.reserve(g.num_vertices());
    for (VertexId s : sources) {
        if (dist[s] != 0.0) {
            dist[s] = 0.0;
            frontier.push_back(s);
        }
    }
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        VertexId v = frontier[head];
        double next = dist[v] + 1.0;
        for (const Arc& a : g.neighbors(v)) {
            if (dist[a.to] == kInfinity) {
                dist[a.to] = next;
                frontier.push_back(a.to);
            }
        }
    }
    return dist;
}

std::vector<double> dijkstra_from(const WeightedGraph& g, std::span<const VertexId> sources) {
    std::vector<double> dist(g.num_vertices(), kInfinity);
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (VertexId s : sources) {
        dist[s] = 0.0;
        heap.push({0.0, s});
    }
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (const Arc& a : g.neighbors(v)) {
            double nd = d + a.length;
            if (nd < dist[a.to]) {
                dist[a.to] = nd;
                heap.push({nd, a.to});
            }
        }
    }
    return dist;
}

}  // namespace

std::vector<double> single_source_distances(const WeightedGraph& g, VertexId source) {
    require(source < g.num_vertices(), "invalid vertex id " + std::to_string(source));
    const VertexId s[1] = {source};
    return g.unit_lengths() ? bfs_from(g, s) : dijkstra_from(g, s);
}

std::vector<double> multi_source_distances(const WeightedGraph& g, std::span<const VertexId> sources) {
    for (VertexId s : sources) require(s < g.num_vertices(), "invalid vertex id " + std::to_string(s));
    return g.unit_lengths() ? bfs_from(g, sources) : dijkstra_from(g, sources);
}

std::vector<char> reachable_avoiding(const WeightedGraph& g, std::span<const VertexId> sources,
                                     const std::vector<char>& blocked) {
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<VertexId> stack;
    for (VertexId s : sources) {
        if (!blocked[s] && !seen[s]) {
            seen[s] = 1;
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (const Arc& a : g.neighbors(v)) {
            if (!blocked[a.to] && !seen[a.to]) {
                seen[a.to] = 1;
                stack.push_back(a.to);
            }
        }
    }
    return seen;
}

const std::vector<double>& MetricOracle::row(VertexId source) const {
    {
        std::lock_guard lock(mu_);
        auto it = rows_.find(source);
        if (it != rows_.end()) return it->second;
    }
    auto computed = single_source_distances(*graph_, source);
    std::lock_guard lock(mu_);
    auto [it, inserted] = rows_.emplace(source, std::move(computed));
    return it->second;
}

double MetricOracle::dist(VertexId u, VertexId v) const {
    require(u < graph_->num_vertices() && v < graph_->num_vertices(), "invalid vertex id");
    if (u == v) return 0.0;
    // Always read the row of the smaller id so floating sums are exactly symmetric.
    return row(std::min(u, v))[std::max(u, v)];
}

void MetricOracle::clear_cache() const {
    std::lock_guard lock(mu_);
    rows_.clear();
}

std::size_t MetricOracle::cached_rows() const {
    std::lock_guard lock(mu_);
    return rows_.size();
}

double four_point_defect(double d01, double d23, double d02, double d13, double d03, double d12) {
    std::array<double, 3> s{d01 + d23, d02 + d13, d03 + d12};
    std::sort(s.begin(), s.end());
    return (s[2] - s[1]) / 2.0;
}

FourPointResult four_point_delta(const MetricOracle& oracle, std::span<const Quadruple> sample) {
    require(!sample.empty(), "four-point sample is empty");
    FourPointResult res;
    for (const Quadruple& q : sample) {
        double d01 = oracle.dist(q[0], q[1]), d23 = oracle.dist(q[2], q[3]);
        double d02 = oracle.dist(q[0], q[2]), d13 = oracle.dist(q[1], q[3]);
        double d03 = oracle.dist(q[0], q[3]), d12 = oracle.dist(q[1], q[2]);
        if (!std::isfinite(d01 + d23 + d02 + d13 + d03 + d12)) {
            ++res.skipped_disconnected;
            continue;
        }
        ++res.evaluated;
        double d = four_point_defect(d01, d23, d02, d13, d03, d12);
        if (d > res.delta || res.argmax[0] == kNoVertex) {
            res.delta = std::max(res.delta, d);
            res.argmax = q;
        }
    }
    return res;
}

double subset_diameter(const MetricOracle& oracle, std::span<const VertexId> subset) {
    require(!subset.empty(), "subset_diameter of an empty set");
    double best = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        const auto& r = oracle.row(subset[i]);
        for (std::size_t j = i + 1; j < subset.size(); ++j) best = std::max(best, r[subset[j]]);
    }
    return best;
}

void write_graph(const WeightedGraph& g, std::ostream& out) {
    auto es = g.edges();
    out << g.num_vertices() << ' ' << es.size() << '\n';
    char buf[64];
    for (const Edge& e : es) {
        std::snprintf(buf, sizeof buf, "%.17g", e.length);
        out << e.u << ' ' << e.v << ' ' << buf << '\n';
    }
}

void write_labels(const WeightedGraph& g, std::ostream& out) {
    for (VertexId v = 0; v < g.labels().size(); ++v) out << v << ' ' << g.label(v) << '\n';
}

WeightedGraph read_graph(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::kParse, "graph file: missing header");
    std::istringstream hs(line);
    long long nv = -1, ne = -1;
    if (!(hs >> nv >> ne) || nv < 0 || ne < 0) fail(ErrorCode::kParse, "graph file: bad header '" + line + "'");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(ne));
    for (long long i = 0; i < ne; ++i) {
        if (!std::getline(in, line)) fail(ErrorCode::kParse, "graph file: truncated edge list");
        std::istringstream ls(line);
        long long u = -1, v = -1;
        double len = 0;
        if (!(ls >> u >> v >> len) || u < 0 || v < 0) {
            fail(ErrorCode::kParse, "graph file: bad edge line '" + line + "'");
        }
        edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), len});
    }
    return WeightedGraph::build(static_cast<std::size_t>(nv), edges);
}

void read_labels(WeightedGraph& g, std::istream& in) {
    std::vector<std::string> labels(g.num_vertices());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto sp = line.find(' ');
        if (sp == std::string::npos) fail(ErrorCode::kParse, "label file: bad line '" + line + "'");
        unsigned long v = std::stoul(line.substr(0, sp));
        if (v >= labels.size()) fail(ErrorCode::kParse, "label file: vertex out of range");
        labels[v] = line.substr(sp + 1);
    }
    g.set_labels(std::move(labels));
}

WeightedGraph path_graph(std::size_t n_edges) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n_edges; ++i) e.push_back({VertexId(i), VertexId(i + 1), 1.0});
    return WeightedGraph::build(n_edges + 1, e);
}

WeightedGraph cycle_graph(std::size_t n) {
    require(n >= 3, "cycle needs at least 3 vertices");
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i) e.push_back({VertexId(i), VertexId((i + 1) % n), 1.0});
    return WeightedGraph::build(n, e);
}

WeightedGraph grid_graph(std::size_t width, std::size_t height) {
    std::vector<Edge> e;
    auto id = [&](std::size_t x, std::size_t y) { return VertexId(y * width + x); };
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            if (x + 1 < width) e.push_back({id(x, y), id(x + 1, y), 1.0});
            if (y + 1 < height) e.push_back({id(x, y), id(x, y + 1), 1.0});
        }
    }
    return WeightedGraph::build(width * height, e);
}

}  // namespace relhyp
