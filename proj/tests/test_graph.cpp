#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "relhyp/error.hpp"
#include "relhyp/graph.hpp"

using namespace relhyp;

namespace {

// Independent oracle: Floyd-Warshall on the raw edge list.
std::vector<std::vector<double>> floyd(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, kInfinity));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (const Edge& e : edges) {
        d[e.u][e.v] = std::min(d[e.u][e.v], e.length);
        d[e.v][e.u] = std::min(d[e.v][e.u], e.length);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

// Four-point defect via Gromov products at w, maximised over relabelings.
double gromov_defect(const std::vector<std::vector<double>>& d, std::array<int, 4> q) {
    double best = 0;
    std::sort(q.begin(), q.end());
    do {
        int w = q[0], x = q[1], y = q[2], z = q[3];
        auto gp = [&](int a, int b) { return (d[w][a] + d[w][b] - d[a][b]) / 2; };
        best = std::max(best, std::min(gp(x, y), gp(y, z)) - gp(x, z));
    } while (std::next_permutation(q.begin(), q.end()));
    return best;
}

std::vector<Quadruple> all_quadruples(std::size_t n) {
    std::vector<Quadruple> out;
    for (VertexId a = 0; a < n; ++a)
        for (VertexId b = a + 1; b < n; ++b)
            for (VertexId c = b + 1; c < n; ++c)
                for (VertexId d = c + 1; d < n; ++d) out.push_back({a, b, c, d});
    return out;
}

WeightedGraph random_tree(std::mt19937_64& rng, std::size_t n, bool weighted) {
    std::vector<Edge> e;
    std::uniform_real_distribution<double> len(0.25, 3.0);
    for (std::size_t v = 1; v < n; ++v) {
        std::uniform_int_distribution<std::size_t> parent(0, v - 1);
        e.push_back({VertexId(parent(rng)), VertexId(v), weighted ? len(rng) : 1.0});
    }
    return WeightedGraph::build(n, e);
}

}  // namespace

TEST_CASE("build_graph basics") {
    auto g = WeightedGraph::build(1, {});
    CHECK(g.num_vertices() == 1);
    CHECK(g.num_edges() == 0);
    CHECK(g.is_connected());

    std::vector<Edge> tri{{0, 1, 1}, {1, 2, 1}, {2, 0, 1}};
    auto t = WeightedGraph::build(3, tri);
    MetricOracle o(t);
    std::vector<VertexId> all{0, 1, 2};
    CHECK(subset_diameter(o, all) == 1.0);

    auto p = path_graph(10);
    MetricOracle po(p);
    CHECK(po.dist(0, 10) == 10.0);
    CHECK(po.dist(4, 4) == 0.0);
}

TEST_CASE("parallel edges collapse to the minimum length") {
    std::vector<Edge> e{{0, 1, 3.0}, {1, 0, 2.0}, {0, 1, 5.0}};
    auto g = WeightedGraph::build(2, e);
    CHECK(g.num_edges() == 1);
    CHECK(g.edges()[0].length == 2.0);
    CHECK_FALSE(g.unit_lengths());
}

TEST_CASE("build_graph rejects bad input") {
    std::vector<Edge> neg{{0, 1, -1.0}};
    std::vector<Edge> zero{{0, 1, 0.0}};
    std::vector<Edge> range{{0, 5, 1.0}};
    std::vector<Edge> loop{{1, 1, 1.0}};
    CHECK_THROWS_AS(WeightedGraph::build(2, neg), Error);
    CHECK_THROWS_AS(WeightedGraph::build(2, zero), Error);
    CHECK_THROWS_AS(WeightedGraph::build(2, range), Error);
    CHECK_THROWS_AS(WeightedGraph::build(2, loop), Error);
}

TEST_CASE("disconnected pairs are infinite") {
    std::vector<Edge> e{{0, 1, 1.0}};
    auto g = WeightedGraph::build(3, e);
    MetricOracle o(g);
    CHECK(std::isinf(o.dist(0, 2)));
    CHECK(g.num_components() == 2);
    Quadruple q{0, 1, 2, 0};
    auto r = four_point_delta(o, std::span<const Quadruple>(&q, 1));
    CHECK(r.skipped_disconnected == 1);
    CHECK(r.evaluated == 0);
}

TEST_CASE("shortest paths agree with Floyd-Warshall on random graphs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 3 + rng() % 25;
        std::vector<Edge> e;
        std::uniform_real_distribution<double> len(0.1, 4.0);
        bool unit = trial % 2 == 0;
        for (int k = 0; k < static_cast<int>(2 * n); ++k) {
            VertexId u = rng() % n, v = rng() % n;
            if (u != v) e.push_back({u, v, unit ? 1.0 : len(rng)});
        }
        auto g = WeightedGraph::build(n, e);
        auto ref = floyd(n, e);
        MetricOracle o(g);
        for (VertexId u = 0; u < n; ++u) {
            for (VertexId v = 0; v < n; ++v) {
                double d = o.dist(u, v);
                if (std::isinf(ref[u][v])) {
                    CHECK(std::isinf(d));
                    continue;
                }
                CHECK(d == doctest::Approx(ref[u][v]).epsilon(1e-12));
                CHECK(d == o.dist(v, u));
                for (VertexId w = 0; w < n; ++w) {
                    double via = o.dist(u, w) + o.dist(w, v);
                    CHECK(d <= via + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("multi-source distance is the pointwise minimum") {
    auto g = grid_graph(6, 4);
    std::vector<VertexId> src{0, 23};
    auto m = multi_source_distances(g, src);
    auto a = single_source_distances(g, 0);
    auto b = single_source_distances(g, 23);
    for (VertexId v = 0; v < g.num_vertices(); ++v) CHECK(m[v] == std::min(a[v], b[v]));
}

TEST_CASE("reachability avoiding a cut") {
    auto p = path_graph(6);
    std::vector<char> blocked(7, 0);
    blocked[3] = 1;
    VertexId s[1] = {0};
    auto seen = reachable_avoiding(p, s, blocked);
    CHECK(seen[2]);
    CHECK_FALSE(seen[3]);
    CHECK_FALSE(seen[6]);
}

TEST_CASE("four-point defect agrees with the Gromov product formulation") {
    std::mt19937_64 rng(11);
    double dd[4][4];
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<double>> d(4, std::vector<double>(4, 0));
        // Random metric: shortest paths on a random weighted K4.
        std::vector<Edge> e;
        std::uniform_real_distribution<double> len(0.5, 5.0);
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) e.push_back({VertexId(i), VertexId(j), len(rng)});
        d = floyd(4, e);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) dd[i][j] = d[i][j];
        double a = four_point_defect(dd[0][1], dd[2][3], dd[0][2], dd[1][3], dd[0][3], dd[1][2]);
        CHECK(a == doctest::Approx(gromov_defect(d, {0, 1, 2, 3})));
    }
}

TEST_CASE("four-point delta of small cycles and grids matches brute force") {
    auto c = cycle_graph(12);
    MetricOracle co(c);
    auto q12 = all_quadruples(12);
    std::vector<Edge> ce = c.edges();
    auto cref = floyd(12, ce);
    double cexpect = 0;
    for (const auto& q : q12) cexpect = std::max(cexpect, gromov_defect(cref, {int(q[0]), int(q[1]), int(q[2]), int(q[3])}));
    // The antipodal square 0, 3, 6, 9 gives (12 - 6) / 2.
    CHECK(cexpect == 3.0);
    CHECK(four_point_delta(co, q12).delta == cexpect);

    auto grid = grid_graph(5, 5);
    MetricOracle go(grid);
    std::vector<Edge> ge = grid.edges();
    auto ref = floyd(25, ge);
    double expect = 0;
    auto q25 = all_quadruples(25);
    for (const auto& q : q25) {
        expect = std::max(expect, gromov_defect(ref, {int(q[0]), int(q[1]), int(q[2]), int(q[3])}));
    }
    auto r = four_point_delta(go, q25);
    CHECK(r.delta == expect);
    CHECK(r.evaluated == q25.size());
}

TEST_CASE("four-point delta vanishes on random trees") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 120; ++trial) {
        auto t = random_tree(rng, 4 + rng() % 30, trial % 3 == 0);
        CHECK(t.is_tree());
        MetricOracle o(t);
        std::vector<Quadruple> sample;
        for (int k = 0; k < 300; ++k) {
            Quadruple q;
            for (auto& x : q) x = rng() % t.num_vertices();
            sample.push_back(q);
        }
        CHECK(four_point_delta(o, sample).delta <= 1e-9);
    }
}

TEST_CASE("four-point delta is monotone under subsampling") {
    std::mt19937_64 rng(5);
    auto g = grid_graph(7, 7);
    MetricOracle o(g);
    std::vector<Quadruple> sample;
    for (int k = 0; k < 500; ++k) {
        Quadruple q;
        for (auto& x : q) x = rng() % g.num_vertices();
        sample.push_back(q);
    }
    double full = four_point_delta(o, sample).delta;
    for (std::size_t len : {1u, 10u, 100u, 499u}) {
        CHECK(four_point_delta(o, std::span<const Quadruple>(sample.data(), len)).delta <= full);
    }
    CHECK_THROWS_AS(four_point_delta(o, {}), Error);
}

TEST_CASE("subset_diameter") {
    auto p = path_graph(8);
    MetricOracle o(p);
    std::vector<VertexId> one{3};
    std::vector<VertexId> two{1, 6};
    CHECK(subset_diameter(o, one) == 0.0);
    CHECK(subset_diameter(o, two) == 5.0);
    CHECK_THROWS_AS(subset_diameter(o, {}), Error);
}

TEST_CASE("graph text format round-trips") {
    std::vector<Edge> e{{0, 1, 1.0}, {1, 2, std::exp(-3.0)}, {0, 3, 0.1}};
    auto g = WeightedGraph::build(4, e);
    g.set_labels({"1", "a", "ab", "B"});
    std::stringstream gs, ls;
    write_graph(g, gs);
    write_labels(g, ls);
    auto h = read_graph(gs);
    read_labels(h, ls);
    REQUIRE(h.num_vertices() == 4);
    auto he = h.edges(), ge = g.edges();
    REQUIRE(he.size() == ge.size());
    for (std::size_t i = 0; i < he.size(); ++i) {
        CHECK(he[i].u == ge[i].u);
        CHECK(he[i].v == ge[i].v);
        CHECK(he[i].length == ge[i].length);
    }
    CHECK(h.label(2) == "ab");

    std::stringstream bad("3\n");
    CHECK_THROWS_AS(read_graph(bad), Error);
}
