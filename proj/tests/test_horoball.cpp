#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "relhyp/error.hpp"
#include "relhyp/group.hpp"
#include "relhyp/horoball.hpp"

using namespace relhyp;

namespace {

// Independent horoball oracle: edges written out from the definition and a
// Bellman-Ford relaxation on the raw list.
std::vector<double> oracle_row(std::size_t n_base, const std::vector<std::pair<int, int>>& base_edges, int depth,
                               std::size_t source) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> e;
    for (int lvl = 0; lvl <= depth; ++lvl) {
        for (auto [a, b] : base_edges) e.emplace_back(lvl * n_base + a, lvl * n_base + b, std::exp(-double(lvl)));
        if (lvl < depth)
            for (std::size_t v = 0; v < n_base; ++v) e.emplace_back(lvl * n_base + v, (lvl + 1) * n_base + v, 1.0);
    }
    std::vector<double> d(n_base * (depth + 1), kInfinity);
    d[source] = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (auto [a, b, w] : e) {
            if (d[a] + w < d[b]) d[b] = d[a] + w, changed = true;
            if (d[b] + w < d[a]) d[a] = d[b] + w, changed = true;
        }
    }
    return d;
}

}  // namespace

TEST_CASE("horoball construction inventory") {
    std::vector<Edge> one{{0, 1, 1.0}};
    auto g = WeightedGraph::build(2, one);
    auto h = build_horoball(g, 1);
    CHECK(h.graph.num_vertices() == 4);
    int vertical = 0;
    std::set<double> horizontal;
    for (const auto& e : h.graph.edges()) {
        if (h.base_of(e.u) == h.base_of(e.v)) {
            ++vertical;
            CHECK(e.length == 1.0);
            CHECK(std::abs(h.level_of(e.u) - h.level_of(e.v)) == 1);
        } else {
            CHECK(h.level_of(e.u) == h.level_of(e.v));
            horizontal.insert(e.length);
        }
    }
    CHECK(vertical == 2);
    CHECK(horizontal == std::set<double>{1.0, std::exp(-1.0)});

    auto p = path_graph(7);
    auto hp = build_horoball(p, 5);
    CHECK(hp.graph.num_vertices() == 8 * 6);
    CHECK(level_length(3) == std::exp(-3.0));
    for (const auto& e : hp.graph.edges()) {
        if (hp.level_of(e.u) == 3 && hp.level_of(e.v) == 3) CHECK(e.length == level_length(3));
    }
}

TEST_CASE("horoball rejects bad bases") {
    std::vector<Edge> w{{0, 1, 2.0}};
    CHECK_THROWS_AS(build_horoball(WeightedGraph::build(2, w), 2), Error);
    CHECK_THROWS_AS(build_horoball(WeightedGraph::build(2, {}), 2), Error);
    CHECK_THROWS_AS(build_horoball(path_graph(2), -1), Error);
}

TEST_CASE("estimate formula") {
    CHECK(horo_estimate(0, 2, 5) == 3.0);
    CHECK(horo_estimate(10, 0, 0) == doctest::Approx(2 * std::log(11.0)));
    CHECK(horo_estimate(10, 0, 0) == doctest::Approx(4.7958).epsilon(1e-4));
}

TEST_CASE("path-10 endpoints at level 0") {
    std::vector<std::pair<int, int>> pe;
    for (int i = 0; i < 10; ++i) pe.emplace_back(i, i + 1);
    auto od = oracle_row(11, pe, 6, 0);
    CHECK(od[10] == doctest::Approx(4 + 10 * std::exp(-2.0)));
    CHECK(od[10] == doctest::Approx(5.3534).epsilon(1e-4));

    auto h = build_horoball(path_graph(10), 6);
    MetricOracle o(h.graph);
    CHECK(o.dist(h.id(0, 0), h.id(10, 0)) == doctest::Approx(4 + 10 * std::exp(-2.0)));
    auto tb = horo_transit_distance(10, 0, 0, 6);
    CHECK(tb.level == 2);
    CHECK_FALSE(tb.truncated);
    CHECK(horo_transit_distance(10, 0, 0, 1).truncated);
}

TEST_CASE("horoball distances match the independent oracle") {
    for (int len : {3, 6, 9}) {
        std::vector<std::pair<int, int>> pe;
        for (int i = 0; i < len; ++i) pe.emplace_back(i, i + 1);
        int depth = 4;
        auto h = build_horoball(path_graph(len), depth);
        MetricOracle o(h.graph);
        for (std::size_t s = 0; s < h.graph.num_vertices(); s += 3) {
            auto od = oracle_row(len + 1, pe, depth, s);
            for (VertexId v = 0; v < h.graph.num_vertices(); ++v) {
                CHECK(o.dist(VertexId(s), v) == doctest::Approx(od[v]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("error scan on small bases") {
    auto pt = estimate_error_scan(WeightedGraph::build(1, {}), 5);
    CHECK(pt.max_error == 0.0);

    auto p8 = estimate_error_scan(path_graph(20), 8);
    auto p12 = estimate_error_scan(path_graph(20), 12);
    CHECK(p8.max_error <= 8.0);
    CHECK(std::abs(p8.max_error - p12.max_error) < 1.0);
    CHECK(p8.closed_form_mismatches == 0);
    CHECK(p8.bound_violations == 0);
    CHECK(p8.truncated_pairs == 0);
    CHECK(p8.sufficient_depth == 5);  // ceil(ln 20) + 2
    CHECK(p8.pairs == (21 * 9) * (21 * 9 + 1) / 2);

    auto c12 = estimate_error_scan(cycle_graph(12), 8);
    CHECK(c12.max_error <= 8.0);
    CHECK(c12.closed_form_mismatches == 0);

    auto f2 = RelHypSpec::from_fields("F2", "none");
    auto ball = cayley_ball(f2, 3);
    auto fb = estimate_error_scan(ball.graph, 8);
    CHECK(fb.max_error <= 8.0);
    CHECK(fb.closed_form_mismatches == 0);
    CHECK(fb.bound_violations == 0);
}

TEST_CASE("truncation is flagged when depth is too small") {
    auto s = estimate_error_scan(path_graph(40), 1);
    CHECK(s.truncated_pairs > 0);
    CHECK(s.closed_form_mismatches == 0);
}

TEST_CASE("level sidecar") {
    auto h = build_horoball(path_graph(1), 1);
    std::ostringstream out;
    write_levels(h, out);
    CHECK(out.str() == "0 0 0\n1 0 1\n2 1 0\n3 1 1\n");
}
