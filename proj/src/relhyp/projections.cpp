#include "relhyp/projections.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "relhyp/error.hpp"

namespace relhyp {

namespace {

// BFS on a unit graph that stops at `max_depth`, reusing scratch storage.
class BoundedBfs {
public:
    explicit BoundedBfs(const WeightedGraph& g) : g_(g), dist_(g.num_vertices(), -1) {}

    void run(VertexId src, int max_depth) {
        for (VertexId v : touched_) dist_[v] = -1;
        touched_.clear();
        dist_[src] = 0;
        touched_.push_back(src);
        for (std::size_t head = 0; head < touched_.size(); ++head) {
            VertexId v = touched_[head];
            if (dist_[v] >= max_depth) continue;
            for (const Arc& a : g_.neighbors(v)) {
                if (dist_[a.to] < 0) {
                    dist_[a.to] = dist_[v] + 1;
                    touched_.push_back(a.to);
                }
            }
        }
    }
    int dist(VertexId v) const { return dist_[v]; }

private:
    const WeightedGraph& g_;
    std::vector<int> dist_;
    std::vector<VertexId> touched_;
};

// Upper bound on the ambient diameter of C(Y) in the ball: intrinsic diameter
// times the ambient length of one local edge.
int coset_diameter_bound(const GroupSpace& g, const Coset& c) {
    if (c.vertices.size() <= 1) return 0;
    WeightedGraph sub = c.subgraph();
    int diam = 0;
    for (VertexId v = 0; v < sub.num_vertices(); ++v) {
        auto d = single_source_distances(sub, v);
        for (double x : d) diam = std::max(diam, static_cast<int>(x));
    }
    int edge_len = 1;
    if (g.spec->mode == PeripheralMode::kCyclic) edge_len = static_cast<int>(normal_form(*g.spec, g.spec->cyclic_word).size());
    return diam * edge_len;
}

std::vector<int> point_distances(const Coset& c, std::span<const std::uint32_t> points, int bound, BoundedBfs& bfs) {
    const std::size_t m = points.size();
    std::vector<int> out(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        bfs.run(c.vertices[points[i]], bound);
        for (std::size_t j = 0; j < m; ++j) {
            int d = bfs.dist(c.vertices[points[j]]);
            if (d < 0) fail(ErrorCode::kInternal, "coset points farther apart than the diameter bound");
            out[i * m + j] = d;
        }
    }
    return out;
}

// Diameter of the union of two sorted index sets under a point-distance matrix.
int union_diameter(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, const std::vector<int>& dm,
                   const std::vector<std::uint32_t>& row_of, std::size_t m, int diam_a, int diam_b) {
    int best = std::max(diam_a, diam_b);
    for (auto p : a)
        for (auto q : b) best = std::max(best, dm[row_of[p] * m + row_of[q]]);
    return best;
}

int set_diameter(std::span<const std::uint32_t> a, const std::vector<int>& dm, const std::vector<std::uint32_t>& row_of,
                 std::size_t m) {
    int best = 0;
    for (auto p : a)
        for (auto q : a) best = std::max(best, dm[row_of[p] * m + row_of[q]]);
    return best;
}

}  // namespace

ConedOffGraph build_coned_off(const GroupSpace& g) {
    ConedOffGraph out;
    std::vector<Edge> edges = g.ball.graph.edges();
    std::size_t extra = 0;
    for (const auto& c : g.cosets.cosets) extra += c.vertices.size() * (c.vertices.size() - 1) / 2;
    if (edges.size() + extra > 8 * vertex_cap()) {
        fail(ErrorCode::kCapExceeded, "cap exceeded (coned-off graph needs " + std::to_string(edges.size() + extra) + " edges)");
    }
    edges.reserve(edges.size() + extra);
    for (const auto& c : g.cosets.cosets) {
        std::size_t k = c.vertices.size();
        out.cone_pairs.push_back(k * (k - 1) / 2);
        out.total_cone_pairs += k * (k - 1) / 2;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) edges.push_back({c.vertices[i], c.vertices[j], 1.0});
    }
    out.graph = WeightedGraph::build(g.ball.size(), edges);
    return out;
}

CosetProjection project_all(const GroupSpace& g, std::size_t coset) {
    const Coset& c = g.cosets.cosets.at(coset);
    require(!c.vertices.empty(), "coset has no vertices in the ball");
    const WeightedGraph& gr = g.ball.graph;
    const std::size_t n = gr.num_vertices();
    CosetProjection p;
    p.dist.assign(n, -1);
    p.start.assign(n, 0);
    p.count.assign(n, 0);
    std::vector<VertexId> order;
    order.reserve(n);
    for (std::uint32_t i = 0; i < c.vertices.size(); ++i) {
        p.dist[c.vertices[i]] = 0;
        order.push_back(c.vertices[i]);
    }
    for (std::size_t head = 0; head < order.size(); ++head) {
        VertexId v = order[head];
        for (const Arc& a : gr.neighbors(v)) {
            if (p.dist[a.to] < 0) {
                p.dist[a.to] = p.dist[v] + 1;
                order.push_back(a.to);
            }
        }
    }
    std::vector<std::uint32_t> local(n, 0);
    for (std::uint32_t i = 0; i < c.vertices.size(); ++i) local[c.vertices[i]] = i;
    std::vector<std::uint32_t> scratch;
    for (VertexId v : order) {
        p.start[v] = static_cast<std::uint32_t>(p.items.size());
        if (p.dist[v] == 0) {
            p.items.push_back(local[v]);
            p.count[v] = 1;
            continue;
        }
        scratch.clear();
        for (const Arc& a : gr.neighbors(v)) {
            if (p.dist[a.to] == p.dist[v] - 1) {
                auto s = p.of(a.to);
                scratch.insert(scratch.end(), s.begin(), s.end());
            }
        }
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        p.items.insert(p.items.end(), scratch.begin(), scratch.end());
        p.count[v] = static_cast<std::uint32_t>(scratch.size());
    }
    return p;
}

std::vector<VertexId> closest_point_projection(const GroupSpace& g, std::size_t coset, VertexId x) {
    require(x < g.ball.size(), "invalid vertex id");
    const Coset& c = g.cosets.cosets.at(coset);
    if (c.vertices.empty()) fail(ErrorCode::kInvalidArgument, "coset has no vertices in the ball");
    auto d = single_source_distances(g.ball.graph, x);
    double best = kInfinity;
    for (VertexId v : c.vertices) best = std::min(best, d[v]);
    if (!std::isfinite(best)) fail(ErrorCode::kInvalidArgument, "coset unreachable from vertex");
    std::vector<VertexId> out;
    for (VertexId v : c.vertices) {
        if (d[v] == best) out.push_back(v);
    }
    return out;
}

std::vector<int> coset_point_distances(const GroupSpace& g, std::size_t coset, std::span<const std::uint32_t> points) {
    const Coset& c = g.cosets.cosets.at(coset);
    BoundedBfs bfs(g.ball.graph);
    return point_distances(c, points, coset_diameter_bound(g, c), bfs);
}

namespace {

std::vector<int> set_distance_table(const Coset& c, const std::vector<std::vector<std::uint32_t>>& sets, int bound,
                                    BoundedBfs& bfs) {
    std::vector<std::uint32_t> involved;
    for (const auto& s : sets) involved.insert(involved.end(), s.begin(), s.end());
    std::sort(involved.begin(), involved.end());
    involved.erase(std::unique(involved.begin(), involved.end()), involved.end());
    std::vector<std::uint32_t> row_of(c.vertices.size(), 0);
    for (std::uint32_t i = 0; i < involved.size(); ++i) row_of[involved[i]] = i;
    auto dm = point_distances(c, involved, bound, bfs);
    const std::size_t m = involved.size(), k = sets.size();
    std::vector<int> diam(k);
    for (std::size_t i = 0; i < k; ++i) diam[i] = set_diameter(sets[i], dm, row_of, m);
    std::vector<int> table(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            int v = i == j ? diam[i] : union_diameter(sets[i], sets[j], dm, row_of, m, diam[i], diam[j]);
            table[i * k + j] = table[j * k + i] = v;
        }
    return table;
}

}  // namespace

std::vector<int> projection_set_distances(const GroupSpace& g, std::size_t coset,
                                          const std::vector<std::vector<std::uint32_t>>& sets) {
    const Coset& c = g.cosets.cosets.at(coset);
    BoundedBfs bfs(g.ball.graph);
    return set_distance_table(c, sets, coset_diameter_bound(g, c), bfs);
}

long ProjectionTable::position(std::uint32_t coset) const {
    auto it = std::lower_bound(scanned.begin(), scanned.end(), coset);
    return it != scanned.end() && *it == coset ? it - scanned.begin() : -1;
}

ProjectionTable build_projection_table(const GroupSpace& g, int inner_radius) {
    ProjectionTable t;
    t.group = &g;
    t.inner_radius = inner_radius;
    const auto& cosets = g.cosets.cosets;
    for (std::uint32_t i = 0; i < cosets.size(); ++i) {
        if (static_cast<int>(cosets[i].rep.size()) <= inner_radius) t.scanned.push_back(i);
    }
    const std::size_t n = t.scanned.size();
    if (static_cast<double>(n) * n * n > 6e8) {
        fail(ErrorCode::kCapExceeded, "cap exceeded (projection table over " + std::to_string(n) + " cosets)");
    }
    std::vector<std::vector<VertexId>> inner(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (VertexId v : cosets[t.scanned[i]].vertices) {
            if (g.ball.length[v] <= inner_radius) inner[i].push_back(v);
        }
    }
    t.sets.assign(n, std::vector<std::vector<VertexId>>(n));
    t.dpi.assign(n * n * n, ProjectionTable::kUndefined);
    BoundedBfs bfs(g.ball.graph);

    for (std::size_t y = 0; y < n; ++y) {
        const Coset& cy = cosets[t.scanned[y]];
        CosetProjection p = project_all(g, t.scanned[y]);
        std::vector<std::vector<std::uint32_t>> local(n);
        std::vector<std::uint32_t> involved;
        for (std::size_t x = 0; x < n; ++x) {
            if (x == y) continue;
            auto& s = local[x];
            for (VertexId v : inner[x]) {
                auto pv = p.of(v);
                s.insert(s.end(), pv.begin(), pv.end());
            }
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            involved.insert(involved.end(), s.begin(), s.end());
        }
        std::sort(involved.begin(), involved.end());
        involved.erase(std::unique(involved.begin(), involved.end()), involved.end());
        std::vector<std::uint32_t> row_of(cy.vertices.size(), 0);
        for (std::uint32_t i = 0; i < involved.size(); ++i) row_of[involved[i]] = i;
        auto dm = point_distances(cy, involved, coset_diameter_bound(g, cy), bfs);
        const std::size_t m = involved.size();

        std::vector<int> diam(n, 0);
        for (std::size_t x = 0; x < n; ++x) {
            if (x == y) continue;
            diam[x] = set_diameter(local[x], dm, row_of, m);
            for (auto li : local[x]) t.sets[y][x].push_back(cy.vertices[li]);
        }
        for (std::size_t x = 0; x < n; ++x) {
            if (x == y) continue;
            for (std::size_t z = x; z < n; ++z) {
                if (z == y) continue;
                int v = z == x ? diam[x] : union_diameter(local[x], local[z], dm, row_of, m, diam[x], diam[z]);
                if (v >= ProjectionTable::kUndefined) fail(ErrorCode::kInternal, "projection distance overflow");
                t.dpi[(y * n + x) * n + z] = static_cast<std::uint8_t>(v);
                t.dpi[(y * n + z) * n + x] = static_cast<std::uint8_t>(v);
            }
        }
    }
    return t;
}

AxiomReport verify_axioms(const ProjectionTable& t, const ConedOffGraph& coned) {
    AxiomReport r;
    const GroupSpace& g = *t.group;
    r.radius = g.ball.radius;
    r.inner_radius = t.inner_radius;
    const std::size_t n = t.size();
    r.cosets = n;
    r.vacuous = n < 2;
    if (r.vacuous) return r;

    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
            if (x == y) continue;
            ++r.pairs;
            int v = t.proj_distance(y, x, x);
            if (v > r.xi0) {
                r.xi0 = v;
                r.xi0_y = t.scanned[y];
                r.xi0_x = t.scanned[x];
            }
        }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            for (std::size_t z = 0; z < n; ++z) {
                if (z == x || z == y) continue;
                ++r.triples;
                int v = std::min(t.proj_distance(y, x, z), t.proj_distance(z, x, y));
                if (v > r.xi3) {
                    r.xi3 = v;
                    r.xi3_x = t.scanned[x];
                    r.xi3_y = t.scanned[y];
                    r.xi3_z = t.scanned[z];
                }
            }
        }

    r.probe = r.xi3 + 1;
    std::vector<std::vector<double>> dhat(n);
    std::vector<VertexId> reps(n);
    for (std::size_t i = 0; i < n; ++i) reps[i] = g.ball.find(g.cosets.cosets[t.scanned[i]].rep);
    for (std::size_t i = 0; i < n; ++i) dhat[i] = single_source_distances(coned.graph, reps[i]);
    bool first = true;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t z = x + 1; z < n; ++z) {
            std::size_t count = 0;
            for (std::size_t y = 0; y < n; ++y) {
                if (y != x && y != z && t.proj_distance(y, x, z) >= r.probe) ++count;
            }
            long bound = static_cast<long>(dhat[x][reps[z]]) + 1;
            long slack = static_cast<long>(count) - bound;
            r.axiom4_max_count = std::max(r.axiom4_max_count, count);
            if (slack > 0) ++r.axiom4_violations;
            if (first || slack > r.axiom4_worst_slack) {
                r.axiom4_worst_slack = slack;
                r.axiom4_x = t.scanned[x];
                r.axiom4_z = t.scanned[z];
                first = false;
            }
        }
    return r;
}

PairSet exact_region_pairs(const CayleyBall& ball) {
    PairSet ps;
    const int R = ball.radius;
    for (VertexId x = 0; x < ball.size(); ++x) {
        if (2 * ball.length[x] > R) continue;
        for (VertexId y = 0; y < ball.size(); ++y) {
            if (ball.length[x] + ball.length[y] > R) continue;
            if (ball.length[y] > ball.length[x] || (ball.length[y] == ball.length[x] && y > x)) {
                ps.xs.push_back(x);
                ps.ys.push_back(y);
            }
        }
    }
    return ps;
}

namespace {

// Adds {{d^pi_Y(x, y)}}_L to rhs[i] for every pair i and every coset whose
// ball part is wider than L.
void accumulate_projection_terms(const GroupSpace& g, const std::vector<VertexId>& xs, const std::vector<VertexId>& ys,
                                 double L, std::vector<double>& rhs) {
    BoundedBfs bfs(g.ball.graph);
    for (std::size_t ci = 0; ci < g.cosets.cosets.size(); ++ci) {
        const Coset& c = g.cosets.cosets[ci];
        int bound = coset_diameter_bound(g, c);
        if (bound <= L) continue;
        CosetProjection p = project_all(g, ci);
        std::map<std::vector<std::uint32_t>, std::uint32_t> set_id;
        std::vector<std::uint32_t> single_id(c.vertices.size(), kNoVertex);
        std::vector<std::uint32_t> id_of(g.ball.size(), kNoVertex);
        std::vector<std::vector<std::uint32_t>> sets;
        auto intern = [&](VertexId v) {
            if (id_of[v] != kNoVertex) return;
            auto s = p.of(v);
            if (s.size() == 1) {
                if (single_id[s[0]] == kNoVertex) {
                    single_id[s[0]] = static_cast<std::uint32_t>(sets.size());
                    sets.push_back({s[0]});
                }
                id_of[v] = single_id[s[0]];
                return;
            }
            std::vector<std::uint32_t> key(s.begin(), s.end());
            auto [it, inserted] = set_id.emplace(key, static_cast<std::uint32_t>(sets.size()));
            if (inserted) sets.push_back(std::move(key));
            id_of[v] = it->second;
        };
        for (std::size_t i = 0; i < xs.size(); ++i) {
            intern(xs[i]);
            intern(ys[i]);
        }
        if (sets.size() == 1 && sets[0].size() == 1) continue;
        const std::size_t k = sets.size();
        auto table = set_distance_table(c, sets, bound, bfs);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            int v = table[id_of[xs[i]] * k + id_of[ys[i]]];
            if (v > L) rhs[i] += v;
        }
    }
}

}  // namespace

double distance_formula_eval(const GroupSpace& g, const ConedOffGraph& coned, VertexId x, VertexId y, double L) {
    require(x < g.ball.size() && y < g.ball.size(), "invalid vertex id");
    if (x == y) return 0.0;
    std::vector<VertexId> xs{x}, ys{y};
    std::vector<double> rhs(1, 0.0);
    accumulate_projection_terms(g, xs, ys, L, rhs);
    MetricOracle o(coned.graph);
    return rhs[0] + o.dist(x, y);
}

std::vector<FormulaPair> distance_formula_pairs(const GroupSpace& g, const ConedOffGraph& coned, double L) {
    PairSet ps = exact_region_pairs(g.ball);
    std::vector<double> rhs(ps.xs.size(), 0.0);
    accumulate_projection_terms(g, ps.xs, ps.ys, L, rhs);
    std::vector<FormulaPair> out(ps.xs.size());
    std::vector<double> row, hrow;
    VertexId current = kNoVertex;
    for (std::size_t i = 0; i < ps.xs.size(); ++i) {
        if (ps.xs[i] != current) {
            current = ps.xs[i];
            row = single_source_distances(g.ball.graph, current);
            hrow = single_source_distances(coned.graph, current);
        }
        out[i] = {ps.xs[i], ps.ys[i], row[ps.ys[i]], rhs[i] + hrow[ps.ys[i]], hrow[ps.ys[i]]};
    }
    return out;
}

TwoSidedFit fit_two_sided(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "fit inputs differ in length");
    require(!a.empty(), "fit needs at least one pair");
    TwoSidedFit f;
    f.pairs = a.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        double gap = std::abs(a[i] - b[i]);
        if (gap > f.unit_mu) {
            f.unit_mu = gap;
            f.unit_worst = i;
        }
        if (a[i] == 0 && b[i] > f.mu) {
            f.mu = b[i];
            f.worst = i;
        }
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        double lower = b[i] + f.mu > 0 ? a[i] / (b[i] + f.mu) : kInfinity;
        double need = std::max((b[i] - f.mu) / a[i], lower);
        if (need > f.lambda) {
            f.lambda = need;
            f.worst = i;
        }
    }
    if (!std::isfinite(f.lambda)) {
        f.fallback = true;
        f.lambda = 1.0;
        f.mu = f.unit_mu;
        f.worst = f.unit_worst;
    }
    return f;
}

DistanceFormulaFit fit_distance_formula(const GroupSpace& g, const ConedOffGraph& coned, double L) {
    DistanceFormulaFit out;
    out.L = L;
    out.radius = g.ball.radius;
    out.residuals = distance_formula_pairs(g, coned, L);
    std::vector<double> d, rhs;
    for (const auto& p : out.residuals) {
        d.push_back(p.d);
        rhs.push_back(p.rhs);
    }
    // d is compared against the formula: rhs / lambda - mu <= d <= lambda rhs + mu
    out.fit = fit_two_sided(rhs, d);
    return out;
}

void write_residuals_csv(const GroupSpace& g, const DistanceFormulaFit& fit, std::ostream& out) {
    out << "x,y,d,rhs,d_hat,residual\n";
    for (const auto& p : fit.residuals) {
        out << g.ball.graph.label(p.x) << ',' << g.ball.graph.label(p.y) << ',' << p.d << ',' << p.rhs << ',' << p.dhat << ','
            << (p.d - p.rhs) << '\n';
    }
}

}  // namespace relhyp
