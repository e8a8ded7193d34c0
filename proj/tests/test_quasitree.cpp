#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "relhyp/error.hpp"
#include "relhyp/quasitree.hpp"

using namespace relhyp;

namespace {

// d^pi recomputed from scratch with one BFS per inner vertex.
std::vector<int> oracle_dpi(const GroupSpace& g, const ProjectionTable& t) {
    const std::size_t n = t.size();
    MetricOracle o(g.ball.graph);
    // proj[y][x]: union over inner x' in X of the argmin set on Y
    std::vector<std::vector<std::set<VertexId>>> proj(n, std::vector<std::set<VertexId>>(n));
    for (std::size_t x = 0; x < n; ++x) {
        for (VertexId v : g.cosets.cosets[t.scanned[x]].vertices) {
            if (g.ball.length[v] > t.inner_radius) continue;
            const auto& d = o.row(v);
            for (std::size_t y = 0; y < n; ++y) {
                if (y == x) continue;
                double best = kInfinity;
                for (VertexId w : g.cosets.cosets[t.scanned[y]].vertices) best = std::min(best, d[w]);
                for (VertexId w : g.cosets.cosets[t.scanned[y]].vertices)
                    if (d[w] == best) proj[y][x].insert(w);
            }
        }
    }
    std::vector<int> out(n * n * n, -1);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t z = 0; z < n; ++z) {
                if (y == x || y == z) continue;
                std::vector<VertexId> u(proj[y][x].begin(), proj[y][x].end());
                u.insert(u.end(), proj[y][z].begin(), proj[y][z].end());
                double diam = 0;
                for (VertexId a : u)
                    for (VertexId b : u) diam = std::max(diam, o.dist(a, b));
                out[(y * n + x) * n + z] = static_cast<int>(diam);
            }
    return out;
}

std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(const ProjectionComplex& c) {
    return {c.edges.begin(), c.edges.end()};
}

}  // namespace

TEST_CASE("projection table and complex against a brute-force oracle") {
    auto g = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), 5);
    auto t = build_projection_table(g, 2);
    auto want = oracle_dpi(g, t);
    const std::size_t n = t.size();
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t z = 0; z < n; ++z) {
                if (y == x || y == z) continue;
                CHECK(t.proj_distance(y, x, z) == want[(y * n + x) * n + z]);
            }
    for (double K : {1.0, 2.0}) {
        auto c = build_projection_complex(t, K, 0);
        for (std::uint32_t x = 0; x < n; ++x)
            for (std::uint32_t z = x + 1; z < n; ++z) {
                bool ok = true;
                for (std::size_t y = 0; y < n; ++y)
                    if (y != x && y != z && want[(y * n + x) * n + z] > K) ok = false;
                CHECK(edge_set(c).count({x, z}) == (ok ? 1u : 0u));
            }
    }
}

TEST_CASE("table-free builder agrees with the table builder") {
    for (const char* f : {"Z,Z", "Z2,Z2", "Z2,Z"}) {
        auto g = build_group_space(RelHypSpec::from_fields(f, "all"), 5);
        auto t = build_projection_table(g, 3);
        for (double K : {1.0, 2.0, 4.0}) {
            auto a = build_projection_complex(t, K, 0);
            auto b = build_projection_complex(g, 3, K, 0);
            CHECK(a.cosets == b.cosets);
            CHECK(a.edges == b.edges);
            CHECK(a.images == b.images);
        }
    }
}

TEST_CASE("degenerate complexes") {
    auto g = build_group_space(RelHypSpec::from_fields("Z2,Z2", "all"), 3);
    auto two = build_projection_table(g, 0);
    REQUIRE(two.size() == 2);
    CHECK(build_projection_complex(two, 1, 0).edges.size() == 1);
    CHECK_THROWS_AS(build_projection_complex(two, 0, 0), Error);
    CHECK_THROWS_AS(build_projection_complex(two, -1, 0), Error);

    auto t = build_projection_table(g, 1);
    int mx = 0;
    for (std::size_t i = 0; i < t.dpi.size(); ++i)
        if (t.dpi[i] != ProjectionTable::kUndefined) mx = std::max<int>(mx, t.dpi[i]);
    auto full = build_projection_complex(t, mx, 0);
    CHECK(full.edges.size() == t.size() * (t.size() - 1) / 2);
    CHECK(build_projection_complex(t, 1, 2).below_xi3);
}

TEST_CASE("complex edges grow with K") {
    auto g = build_group_space(RelHypSpec::from_fields("Z2,Z2", "all"), 5);
    auto t = build_projection_table(g, 2);
    auto prev = edge_set(build_projection_complex(t, 0.5, 0));
    for (double K : {1.0, 2.0, 3.0, 5.0}) {
        auto cur = edge_set(build_projection_complex(t, K, 0));
        for (const auto& e : prev) CHECK(cur.count(e) == 1);
        CHECK(cur.size() >= prev.size());
        prev = cur;
    }
}

TEST_CASE("F2 complex and quasi-tree of spaces") {
    auto g = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), 6);
    auto t = build_projection_table(g, default_inner_radius(6));
    auto ax = verify_axioms(t, build_coned_off(g));
    auto c = build_projection_complex(t, ax.xi3 + 1, ax.xi3);
    CHECK(c.graph.is_connected());
    CHECK_FALSE(c.below_xi3);
    const std::size_t n = t.size();
    for (auto [x, z] : c.edges)
        for (std::size_t y = 0; y < n; ++y)
            if (y != x && y != z) CHECK(t.proj_distance(y, x, z) <= c.K + ax.xi0);

    auto cp = coset_pieces(g, c);
    auto q = build_quasitree_of_spaces(c, cp.pieces, cp.images);
    CHECK(q.graph.is_connected());
    MetricOracle oq(q.graph);
    std::size_t bridges = 0;
    for (std::size_t e = 0; e < c.edges.size(); ++e) {
        auto [x, z] = c.edges[e];
        const auto& a = cp.images[e][0];
        const auto& b = cp.images[e][1];
        bridges += a.size() * b.size();
        for (auto u : a)
            for (auto v : b) CHECK(oq.dist(q.vertex(x, u), q.vertex(z, v)) == 1.0);
    }
    CHECK(q.bridges == bridges);
    // Every non-piece edge is a bridge between complex-adjacent pieces.
    auto es = edge_set(c);
    std::size_t cross = 0;
    for (const auto& e : q.graph.edges()) {
        auto pu = q.piece_of[e.u], pv = q.piece_of[e.v];
        if (pu == pv) continue;
        ++cross;
        CHECK(es.count({std::min(pu, pv), std::max(pu, pv)}) == 1);
    }
    CHECK(cross == bridges);
    // Pieces are lines here, and no bridge path shortcuts them.
    for (std::size_t i = 0; i < n; ++i) {
        MetricOracle op(cp.pieces[i]);
        for (VertexId u = 0; u < cp.pieces[i].num_vertices(); ++u)
            for (VertexId v = 0; v < cp.pieces[i].num_vertices(); ++v)
                CHECK(oq.dist(q.vertex(i, u), q.vertex(i, v)) == op.dist(u, v));
    }
    std::ostringstream out;
    write_quasitree_annotations(q, {}, out);
    std::string s = out.str();
    CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == q.graph.num_vertices());
}

TEST_CASE("two lines joined by one bridge") {
    auto g = build_group_space(RelHypSpec::from_fields("Z2,Z2", "all"), 3);
    auto t = build_projection_table(g, 0);
    auto c = build_projection_complex(t, 1, 0);
    std::vector<WeightedGraph> pieces{path_graph(6), path_graph(6)};
    EdgeImages images{{std::vector<VertexId>{3}, std::vector<VertexId>{0}}};
    auto q = build_quasitree_of_spaces(c, pieces, images);
    CHECK(q.graph.is_connected());
    CHECK(q.graph.is_tree());
    auto rep = bottleneck_check(q.graph, 1000, 1);
    CHECK(rep.exhaustive);
    CHECK(rep.delta <= 1.0);
    EdgeImages empty(1);
    CHECK_THROWS_AS(build_quasitree_of_spaces(c, pieces, empty), Error);
}

TEST_CASE("bottleneck on trees and cycles") {
    CHECK(bottleneck_check(path_graph(12), 10000, 1).delta == 0.0);
    auto tree = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), 3);
    auto rt = bottleneck_check(tree.ball.graph, 100000, 1);
    CHECK(rt.exhaustive);
    CHECK(rt.delta <= 1.0);
    CHECK(rt.failures == 0);

    auto c24 = bottleneck_check(cycle_graph(24), 100000, 1);
    CHECK(c24.delta >= 5.0);
    CHECK(c24.delta == 6.0);
    CHECK(c24.failures > 0);
    for (std::size_t n = 3; n <= 12; ++n) CHECK(bottleneck_check(cycle_graph(2 * n), 100000, 1).delta >= n / 4.0 - 1);

    auto a = bottleneck_check(grid_graph(6, 6), 200, 7);
    auto b = bottleneck_check(grid_graph(6, 6), 200, 7);
    CHECK_FALSE(a.exhaustive);
    CHECK(a.pairs == 200);
    CHECK(a.delta == b.delta);
    CHECK(a.x == b.x);

    std::vector<Edge> two{{0, 1, 1.0}, {2, 3, 1.0}};
    CHECK_THROWS_AS(bottleneck_check(WeightedGraph::build(4, two), 10, 1), Error);
}

TEST_CASE("F2 quasi-tree bottleneck is radius-stable") {
    double deltas[2];
    int i = 0;
    for (int r : {4, 6}) {
        auto g = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), r);
        auto t = build_projection_table(g, default_inner_radius(r));
        auto ax = verify_axioms(t, build_coned_off(g));
        auto c = build_projection_complex(t, ax.xi3 + 1, ax.xi3);
        auto cp = coset_pieces(g, c);
        auto q = build_quasitree_of_spaces(c, cp.pieces, cp.images);
        deltas[i++] = bottleneck_check(q.graph, 20000, 3).delta;
    }
    CHECK(deltas[1] <= deltas[0] + 1);
}
