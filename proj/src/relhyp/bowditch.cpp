#include "relhyp/bowditch.hpp"

#include <cmath>
#include <ostream>

#include "relhyp/error.hpp"
#include "relhyp/horoball.hpp"
#include "relhyp/sampling.hpp"

namespace relhyp {

VertexId BowditchBall::horo_vertex(std::size_t coset, std::size_t local, int lvl) const {
    if (lvl == 0) return group->cosets.cosets[coset].vertices[local];
    std::size_t k = group->cosets.cosets[coset].vertices.size();
    return static_cast<VertexId>(first_id[coset] + (lvl - 1) * k + local);
}

std::size_t predicted_bowditch_size(const GroupSpace& g, int depth) {
    std::size_t n = g.ball.size();
    for (const auto& c : g.cosets.cosets) n += c.vertices.size() * static_cast<std::size_t>(depth);
    return n;
}

BowditchBall build_bowditch(const GroupSpace& g, int depth) {
    require(depth >= 0, "depth must be nonnegative");
    std::size_t total = predicted_bowditch_size(g, depth);
    if (total > vertex_cap()) {
        fail(ErrorCode::kCapExceeded,
             "cap exceeded (predicted " + std::to_string(total) + " > cap " + std::to_string(vertex_cap()) + ")");
    }
    BowditchBall b;
    b.group = &g;
    b.radius = g.ball.radius;
    b.depth = depth;
    b.cayley_size = g.ball.size();
    b.level.assign(total, 0);
    b.shadow.resize(total);
    b.owner.assign(total, -1);
    for (VertexId v = 0; v < b.cayley_size; ++v) b.shadow[v] = v;

    std::vector<Edge> edges = g.ball.graph.edges();
    VertexId next = static_cast<VertexId>(b.cayley_size);
    b.first_id.resize(g.cosets.cosets.size());
    for (std::size_t ci = 0; ci < g.cosets.cosets.size(); ++ci) {
        const Coset& c = g.cosets.cosets[ci];
        const std::size_t k = c.vertices.size();
        b.first_id[ci] = next;
        for (int lvl = 1; lvl <= depth; ++lvl) {
            for (std::size_t i = 0; i < k; ++i) {
                VertexId id = next++;
                b.level[id] = lvl;
                b.shadow[id] = c.vertices[i];
                b.owner[id] = static_cast<std::int32_t>(ci);
            }
        }
        for (int lvl = 0; lvl <= depth; ++lvl) {
            double len = level_length(lvl);
            for (const Edge& e : c.local_edges) {
                edges.push_back({b.horo_vertex(ci, e.u, lvl), b.horo_vertex(ci, e.v, lvl), len});
            }
            if (lvl < depth) {
                for (std::size_t i = 0; i < k; ++i) edges.push_back({b.horo_vertex(ci, i, lvl), b.horo_vertex(ci, i, lvl + 1), 1.0});
            }
        }
    }
    b.graph = WeightedGraph::build(total, edges);
    return b;
}

std::string bowditch_label(const BowditchBall& b, VertexId v) {
    const std::string& base = b.group->ball.graph.label(b.shadow[v]);
    if (b.level[v] == 0) return base;
    return base + "@" + std::to_string(b.owner[v]) + ":" + std::to_string(b.level[v]);
}

double gromov_product(const MetricOracle& o, VertexId x, VertexId y, VertexId base) {
    double dx = o.dist(base, x), dy = o.dist(base, y), dxy = o.dist(x, y);
    if (!std::isfinite(dx + dy + dxy)) fail(ErrorCode::kInvalidArgument, "gromov_product on disconnected vertices");
    return (dx + dy - dxy) / 2.0;
}

double visual_quasimetric(const MetricOracle& o, const VisualParams& p, VertexId x, VertexId y, VertexId base) {
    require(x != y, "visual quasi-metric needs distinct points");
    return std::exp(-p.epsilon * gromov_product(o, x, y, base));
}

namespace {

std::size_t pool_size_for(std::size_t budget) {
    std::size_t n = 4;
    while (choose4(n + 1) <= budget) ++n;
    return n;
}

// Scan all quadruples of the pool when they fit in `budget`, else `budget` random ones.
FourPointResult scan_pool(const MetricOracle& o, const std::vector<VertexId>& pool, std::size_t budget,
                          std::mt19937_64& rng, bool& exhaustive, std::size_t& count) {
    std::vector<Quadruple> qs;
    exhaustive = choose4(pool.size()) <= budget;
    if (exhaustive) {
        const std::size_t n = pool.size();
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t bb = a + 1; bb < n; ++bb)
                for (std::size_t c = bb + 1; c < n; ++c)
                    for (std::size_t d = c + 1; d < n; ++d) qs.push_back({pool[a], pool[bb], pool[c], pool[d]});
    } else {
        for (std::size_t i = 0; i < budget; ++i) {
            Quadruple q;
            for (auto& x : q) x = pool[bounded(rng, pool.size())];
            qs.push_back(q);
        }
    }
    count = qs.size();
    if (qs.empty()) return {};
    return four_point_delta(o, qs);
}

}  // namespace

HyperbolicityReport delta_estimate(const BowditchBall& b, std::size_t budget, std::uint64_t seed) {
    require(b.graph.is_connected(), "delta_estimate needs a connected space");
    std::mt19937_64 rng(seed);
    HyperbolicityReport rep;
    const std::size_t sphere_budget = budget * 6 / 10;
    const std::size_t random_budget = budget - sphere_budget;

    auto sphere = b.group->ball.sphere(b.radius);
    std::vector<VertexId> sphere_pool;
    for (auto i : sample_indices(sphere.size(), pool_size_for(sphere_budget), rng)) sphere_pool.push_back(sphere[i]);
    std::vector<VertexId> random_pool;
    for (auto i : sample_indices(b.graph.num_vertices(), pool_size_for(random_budget), rng)) {
        random_pool.push_back(static_cast<VertexId>(i));
    }
    rep.sphere_pool = sphere_pool.size();
    rep.random_pool = random_pool.size();

    MetricOracle o(b.graph);
    // Warm rows in ascending id order; dist() reads the smaller id's row.
    std::vector<VertexId> all = sphere_pool;
    all.insert(all.end(), random_pool.begin(), random_pool.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    for (VertexId v : all) o.row(v);

    std::size_t c1 = 0, c2 = 0;
    auto r1 = scan_pool(o, sphere_pool, sphere_budget, rng, rep.sphere_exhaustive, c1);
    auto r2 = scan_pool(o, random_pool, random_budget, rng, rep.random_exhaustive, c2);
    rep.quadruples = c1 + c2;
    rep.skipped = r1.skipped_disconnected + r2.skipped_disconnected;
    if (r1.evaluated && (r1.delta >= r2.delta || !r2.evaluated)) {
        rep.delta = r1.delta;
        rep.argmax = r1.argmax;
    } else {
        rep.delta = r2.delta;
        rep.argmax = r2.argmax;
    }
    return rep;
}

double quasi_ultrametric_defect(const MetricOracle& o, const VisualParams& p, std::span<const VertexId> points,
                                VertexId base, std::size_t samples, std::uint64_t seed) {
    require(points.size() >= 3, "need at least three sphere points");
    std::mt19937_64 rng(seed);
    double worst = 1.0;
    for (std::size_t s = 0; s < samples; ++s) {
        VertexId x = points[bounded(rng, points.size())];
        VertexId y = points[bounded(rng, points.size())];
        VertexId z = points[bounded(rng, points.size())];
        if (x == y || y == z || x == z) continue;
        double rxz = visual_quasimetric(o, p, x, z, base);
        double m = std::max(visual_quasimetric(o, p, x, y, base), visual_quasimetric(o, p, y, z, base));
        worst = std::max(worst, rxz / m);
    }
    return worst;
}

void write_sphere_csv(const BowditchBall& b, const MetricOracle& o, const VisualParams& p,
                      std::span<const VertexId> sphere, std::span<const VertexId> refs, std::ostream& out) {
    out << "label,ref,gromov,rho\n";
    char buf[96];
    for (VertexId x : sphere) {
        for (VertexId r : refs) {
            if (x == r) continue;
            double gp = gromov_product(o, x, r, b.base_point);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", gp, std::exp(-p.epsilon * gp));
            out << bowditch_label(b, x) << ',' << bowditch_label(b, r) << ',' << buf << '\n';
        }
    }
}

}  // namespace relhyp
