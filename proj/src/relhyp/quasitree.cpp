#include "relhyp/quasitree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>

#include "relhyp/error.hpp"
#include "relhyp/sampling.hpp"

namespace relhyp {

long ProjectionComplex::position(std::uint32_t coset) const {
    auto it = std::lower_bound(cosets.begin(), cosets.end(), coset);
    return it != cosets.end() && *it == coset ? it - cosets.begin() : -1;
}

namespace {

std::vector<std::uint32_t> local_indices(const Coset& c, const std::vector<VertexId>& ball_ids) {
    std::vector<std::uint32_t> out;
    for (VertexId v : ball_ids) {
        out.push_back(static_cast<std::uint32_t>(std::lower_bound(c.vertices.begin(), c.vertices.end(), v) - c.vertices.begin()));
    }
    return out;
}

void finish_complex(ProjectionComplex& pc) {
    std::vector<Edge> edges;
    for (auto [x, z] : pc.edges) edges.push_back({x, z, 1.0});
    pc.graph = WeightedGraph::build(pc.cosets.size(), edges);
}

// pi_Y(X) for every listed coset X, as ids into `sets`, which holds sorted local index lists.
struct InternedProjections {
    std::vector<std::vector<std::uint32_t>> sets;
    std::vector<std::uint32_t> id;  // per listed coset, kNoVertex for Y itself
};

InternedProjections intern_projections(const GroupSpace& g, const std::vector<std::uint32_t>& cosets,
                                       const std::vector<std::vector<VertexId>>& inner, std::size_t y) {
    const Coset& cy = g.cosets.cosets[cosets[y]];
    CosetProjection p = project_all(g, cosets[y]);
    InternedProjections out;
    out.id.assign(cosets.size(), kNoVertex);
    std::vector<std::uint32_t> single(cy.vertices.size(), kNoVertex);
    std::map<std::vector<std::uint32_t>, std::uint32_t> multi;
    auto intern = [&](std::vector<std::uint32_t> key) {
        if (key.size() == 1) {
            auto& slot = single[key[0]];
            if (slot == kNoVertex) {
                slot = static_cast<std::uint32_t>(out.sets.size());
                out.sets.push_back(std::move(key));
            }
            return slot;
        }
        auto [it, inserted] = multi.emplace(key, static_cast<std::uint32_t>(out.sets.size()));
        if (inserted) out.sets.push_back(std::move(key));
        return it->second;
    };
    std::vector<std::uint32_t> scratch;
    for (std::size_t x = 0; x < cosets.size(); ++x) {
        if (x == y) continue;
        scratch.clear();
        bool same = true;
        std::span<const std::uint32_t> first;
        for (std::size_t i = 0; i < inner[x].size(); ++i) {
            auto s = p.of(inner[x][i]);
            if (i == 0) {
                first = s;
            } else if (same && !std::equal(s.begin(), s.end(), first.begin(), first.end())) {
                same = false;
            }
            scratch.insert(scratch.end(), s.begin(), s.end());
        }
        if (same) {
            out.id[x] = intern({first.begin(), first.end()});
            continue;
        }
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        out.id[x] = intern(scratch);
    }
    return out;
}

}  // namespace

ProjectionComplex build_projection_complex(const ProjectionTable& t, double K, int xi3) {
    if (!(K > 0)) fail(ErrorCode::kInvalidArgument, "threshold K must be positive");
    ProjectionComplex pc;
    pc.K = K;
    pc.below_xi3 = K <= xi3;
    pc.inner_radius = t.inner_radius;
    pc.cosets = t.scanned;
    const auto& cosets = t.group->cosets.cosets;
    const std::size_t n = t.size();
    for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t z = x + 1; z < n; ++z) {
            bool ok = true;
            for (std::size_t y = 0; y < n && ok; ++y) {
                if (y != x && y != z && t.proj_distance(y, x, z) > K) ok = false;
            }
            if (!ok) continue;
            pc.edges.push_back({x, z});
            pc.images.push_back({local_indices(cosets[t.scanned[x]], t.sets[x][z]),
                                 local_indices(cosets[t.scanned[z]], t.sets[z][x])});
        }
    finish_complex(pc);
    return pc;
}

ProjectionComplex build_projection_complex(const GroupSpace& g, int inner_radius, double K, int xi3) {
    if (!(K > 0)) fail(ErrorCode::kInvalidArgument, "threshold K must be positive");
    ProjectionComplex pc;
    pc.K = K;
    pc.below_xi3 = K <= xi3;
    pc.inner_radius = inner_radius;
    const auto& all = g.cosets.cosets;
    for (std::uint32_t i = 0; i < all.size(); ++i) {
        if (static_cast<int>(all[i].rep.size()) <= inner_radius) pc.cosets.push_back(i);
    }
    const std::size_t n = pc.cosets.size();
    if (static_cast<double>(n) * n > 2e9) {
        fail(ErrorCode::kCapExceeded, "cap exceeded (projection complex over " + std::to_string(n) + " cosets)");
    }
    std::vector<std::vector<VertexId>> inner(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (VertexId v : all[pc.cosets[i]].vertices) {
            if (g.ball.length[v] <= inner_radius) inner[i].push_back(v);
        }
    }

    // bad[x * n + z]: some Y has d^pi_Y(X, Z) > K
    std::vector<char> bad(n * n, 0);
    std::vector<std::uint32_t> count, outside;
    for (std::size_t y = 0; y < n; ++y) {
        auto ip = intern_projections(g, pc.cosets, inner, y);
        const std::size_t k = ip.sets.size();
        if (k == 0) continue;
        auto table = projection_set_distances(g, pc.cosets[y], ip.sets);
        count.assign(k, 0);
        for (std::size_t x = 0; x < n; ++x)
            if (x != y) ++count[ip.id[x]];
        std::uint32_t dom = static_cast<std::uint32_t>(std::max_element(count.begin(), count.end()) - count.begin());
        // Pairs inside the dominant class are settled by its own diameter.
        const bool dom_ok = table[dom * k + dom] <= K;
        outside.clear();
        for (std::uint32_t x = 0; x < n; ++x)
            if (x != y && (!dom_ok || ip.id[x] != dom)) outside.push_back(x);
        for (std::uint32_t x : outside) {
            const int* row = &table[ip.id[x] * k];
            for (std::size_t z = 0; z < n; ++z) {
                if (z == y || z == x) continue;
                if (row[ip.id[z]] > K) bad[x * n + z] = bad[z * n + x] = 1;
            }
        }
    }
    std::vector<std::vector<std::pair<std::uint32_t, int>>> incident(n);  // (edge, side)
    for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t z = x + 1; z < n; ++z) {
            if (bad[x * n + z]) continue;
            incident[x].push_back({static_cast<std::uint32_t>(pc.edges.size()), 0});
            incident[z].push_back({static_cast<std::uint32_t>(pc.edges.size()), 1});
            pc.edges.push_back({x, z});
        }
    pc.images.resize(pc.edges.size());
    for (std::size_t y = 0; y < n; ++y) {
        if (incident[y].empty()) continue;
        auto ip = intern_projections(g, pc.cosets, inner, y);
        for (auto [e, side] : incident[y]) {
            auto other = side == 0 ? pc.edges[e].second : pc.edges[e].first;
            pc.images[e][side] = ip.sets[ip.id[other]];
        }
    }
    finish_complex(pc);
    return pc;
}

QuasiTreeOfSpaces build_quasitree_of_spaces(const ProjectionComplex& complex, const std::vector<WeightedGraph>& pieces,
                                            const EdgeImages& images) {
    require(pieces.size() == complex.graph.num_vertices(), "one piece per complex vertex");
    require(images.size() == complex.edges.size(), "one image pair per complex edge");
    QuasiTreeOfSpaces q;
    std::size_t total = 0;
    for (const auto& p : pieces) {
        q.offset.push_back(total);
        total += p.num_vertices();
    }
    if (total > vertex_cap()) {
        fail(ErrorCode::kCapExceeded, "cap exceeded (predicted " + std::to_string(total) + " > cap " + std::to_string(vertex_cap()) + ")");
    }
    q.piece_of.resize(total);
    q.local_of.resize(total);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        for (VertexId v = 0; v < pieces[i].num_vertices(); ++v) {
            q.piece_of[q.offset[i] + v] = static_cast<std::uint32_t>(i);
            q.local_of[q.offset[i] + v] = v;
        }
        for (const Edge& e : pieces[i].edges()) edges.push_back({q.vertex(i, e.u), q.vertex(i, e.v), e.length});
    }
    for (std::size_t e = 0; e < complex.edges.size(); ++e) {
        auto [x, z] = complex.edges[e];
        const auto& a = images[e][0];
        const auto& b = images[e][1];
        if (a.empty() || b.empty()) fail(ErrorCode::kInvalidArgument, "empty projection image");
        for (VertexId u : a)
            for (VertexId v : b) {
                require(u < pieces[x].num_vertices() && v < pieces[z].num_vertices(), "image vertex outside its piece");
                edges.push_back({q.vertex(x, u), q.vertex(z, v), 1.0});
                ++q.bridges;
            }
    }
    q.graph = WeightedGraph::build(total, edges);
    return q;
}

CosetPieces coset_pieces(const GroupSpace& g, const ProjectionComplex& complex) {
    CosetPieces cp;
    for (auto ci : complex.cosets) cp.pieces.push_back(g.cosets.cosets[ci].subgraph());
    cp.images.resize(complex.images.size());
    for (std::size_t e = 0; e < complex.images.size(); ++e)
        for (int s = 0; s < 2; ++s) cp.images[e][s].assign(complex.images[e][s].begin(), complex.images[e][s].end());
    return cp;
}

void write_quasitree_annotations(const QuasiTreeOfSpaces& q, const std::vector<std::string>& piece_names,
                                 std::ostream& out) {
    for (VertexId v = 0; v < q.graph.num_vertices(); ++v) {
        out << v << ' ' << q.piece_of[v] << ' ' << q.local_of[v];
        if (q.piece_of[v] < piece_names.size()) out << ' ' << piece_names[q.piece_of[v]];
        out << '\n';
    }
}

namespace {

constexpr double kEps = 1e-9;

// Smallest grid value at which removing B(m, delta) separates x from y, capped at `cap`.
double separating_radius(const WeightedGraph& g, const std::vector<double>& dm, VertexId x, VertexId y, double cap) {
    std::vector<char> blocked(g.num_vertices(), 0);
    const VertexId src[1] = {x};
    for (double delta = 0; delta < cap; delta += 0.5) {
        if (dm[x] <= delta + kEps || dm[y] <= delta + kEps) return delta;
        for (VertexId v = 0; v < g.num_vertices(); ++v) blocked[v] = dm[v] <= delta + kEps;
        if (!reachable_avoiding(g, src, blocked)[y]) return delta;
    }
    return cap;
}

}  // namespace

BottleneckReport bottleneck_check(const WeightedGraph& g, std::size_t max_pairs, std::uint64_t seed) {
    BottleneckReport rep;
    const std::size_t n = g.num_vertices();
    if (n < 2) {
        rep.exhaustive = true;
        return rep;
    }
    require(g.is_connected(), "bottleneck check needs a connected graph");
    std::vector<std::pair<VertexId, VertexId>> pairs;
    rep.exhaustive = n * (n - 1) / 2 <= max_pairs;
    if (rep.exhaustive) {
        for (VertexId x = 0; x < n; ++x)
            for (VertexId y = x + 1; y < n; ++y) pairs.push_back({x, y});
    } else {
        std::mt19937_64 rng(seed);
        while (pairs.size() < max_pairs) {
            auto x = static_cast<VertexId>(bounded(rng, n)), y = static_cast<VertexId>(bounded(rng, n));
            if (x == y) continue;
            pairs.push_back({std::min(x, y), std::max(x, y)});
        }
        std::sort(pairs.begin(), pairs.end());
    }
    rep.pairs = pairs.size();

    MetricOracle o(g);
    for (auto [x, y] : pairs) {
        if (o.cached_rows() > 4096) o.clear_cache();
        const auto& dx = o.row(x);
        const auto dy = o.row(y);
        const double d = dx[y];
        const double cap = std::ceil(d - kEps) / 2;  // smallest grid value with d <= 2 delta
        double need = 0;
        VertexId worst_m = kNoVertex;
        for (VertexId m = 0; m < n && need < cap; ++m) {
            if (std::abs(dx[m] + dy[m] - d) > kEps || std::abs(dx[m] - d / 2) > 1 + kEps) continue;
            double r = separating_radius(g, o.row(m), x, y, cap);
            if (r > need) {
                need = r;
                worst_m = m;
            }
        }
        if (need >= cap && cap > 0) ++rep.failures;
        if (need > rep.delta) {
            rep.delta = need;
            rep.x = x;
            rep.y = y;
            rep.m = worst_m;
        }
    }
    return rep;
}

}  // namespace relhyp
