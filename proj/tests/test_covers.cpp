#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "relhyp/bowditch.hpp"
#include "relhyp/covers.hpp"
#include "relhyp/error.hpp"
#include "relhyp/group.hpp"

using namespace relhyp;

namespace {

std::vector<VertexId> range(VertexId a, VertexId b) {
    std::vector<VertexId> v;
    for (VertexId x = a; x <= b; ++x) v.push_back(x);
    return v;
}

// Brute-force multiplicity: balls from full distance rows.
std::size_t oracle_multiplicity(const WeightedGraph& g, const ColoredCover& c, double r) {
    MetricOracle o(g);
    std::size_t best = 0;
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
        const auto& row = o.row(x);
        std::size_t met = 0;
        for (const auto& cls : c.classes)
            for (const auto& s : cls) {
                bool hit = false;
                for (VertexId v : s) hit = hit || row[v] <= r / 2 + 1e-9;
                met += hit;
            }
        best = std::max(best, met);
    }
    return best;
}

// Brute-force diameter and same-colour separation.
std::pair<double, double> oracle_shape(const WeightedGraph& g, const ColoredCover& c) {
    MetricOracle o(g);
    double diam = 0, sep = kInfinity;
    for (const auto& cls : c.classes)
        for (std::size_t i = 0; i < cls.size(); ++i) {
            for (VertexId a : cls[i])
                for (VertexId b : cls[i]) diam = std::max(diam, o.dist(a, b));
            for (std::size_t j = i + 1; j < cls.size(); ++j)
                for (VertexId a : cls[i])
                    for (VertexId b : cls[j]) sep = std::min(sep, o.dist(a, b));
        }
    return {diam, sep};
}

}  // namespace

TEST_CASE("greedy covers of a segment alternate intervals") {
    auto g = path_graph(100);
    auto gc = greedy_colored_cover(g, {5, 10, 2});
    REQUIRE(gc.ok());
    CHECK(gc.cover.classes[0][0] == range(0, 10));
    CHECK(gc.cover.classes[1][0] == range(11, 15));
    CHECK(gc.cover.classes[0][1] == range(16, 26));
    auto a = audit_cover(g, gc.cover, range(0, 100));
    CHECK(a.holds);
    CHECK(a.overlaps == 0);
    auto [diam, sep] = oracle_shape(g, gc.cover);
    CHECK(a.max_diameter == diam);
    CHECK(a.min_separation == sep);
    CHECK(r_multiplicity(g, gc.cover, 5).value == 2);
    CHECK(oracle_multiplicity(g, gc.cover, 5) == 2);
    auto loose = greedy_colored_cover(g, {5, 10, 2, false});
    REQUIRE(loose.ok());
    CHECK(loose.cover.classes[1][0] == range(11, 14));
    CHECK(audit_cover(g, loose.cover, range(0, 100)).min_separation == 5);

    CHECK_THROWS_AS(greedy_colored_cover(g, {0, 1, 1}), Error);
    CHECK_THROWS_AS(greedy_colored_cover(g, {4, 3, 1}), Error);
}

TEST_CASE("sweep order") {
    auto p = path_graph(12);
    CHECK(sweep_order(p) == range(0, 12));
    // Row-major on a grid ball: each coordinate is monotone in its own row.
    auto z2 = build_group_space(RelHypSpec::from_fields("Z2", "none"), 4);
    auto order = sweep_order(z2.ball.graph);
    auto coord = [&](VertexId v) {
        int x = 0, y = 0;
        for (char ch : z2.ball.elements[v].label()) {
            x += ch == 'a' ? 1 : ch == 'A' ? -1 : 0;
            y += ch == 'b' ? 1 : ch == 'B' ? -1 : 0;
        }
        return std::pair(x, y);
    };
    for (std::size_t i = 0; i + 1 < order.size(); ++i) CHECK(coord(order[i]) < coord(order[i + 1]));
}

TEST_CASE("singletons have multiplicity one at scale zero") {
    auto g = path_graph(6);
    ColoredCover c;
    c.classes.resize(1);
    for (VertexId v = 0; v <= 6; ++v) c.classes[0].push_back({v});
    CHECK(r_multiplicity(g, c, 0).value == 1);
    CHECK(r_multiplicity(g, c, 2).value == 3);
    CHECK(oracle_multiplicity(g, c, 2) == 3);
}

TEST_CASE("greedy covers of a Z2 ball") {
    auto z2 = build_group_space(RelHypSpec::from_fields("Z2", "none"), 20);
    const auto& g = z2.ball.graph;
    auto three = greedy_colored_cover(g, {4, 16, 3});
    CHECK(three.ok());
    std::vector<VertexId> all = range(0, static_cast<VertexId>(g.num_vertices() - 1));
    auto a = audit_cover(g, three.cover, all);
    CHECK(a.holds);
    CHECK(a.min_separation > 4);
    auto m = r_multiplicity(g, three.cover, 4);
    CHECK(m.value == 3);
    CHECK(oracle_multiplicity(g, three.cover, 4) == m.value);

    auto two = greedy_colored_cover(g, {4, 8, 2});
    CHECK_FALSE(two.ok());
    CHECK_FALSE(two.remainder.empty());
    CHECK(audit_cover(g, two.cover, all).uncovered == two.remainder.size());
}

TEST_CASE("rescaled level metric") {
    CHECK(rescaled_distance(0, 3) == 0.0);
    CHECK(rescaled_distance(std::exp(1.0) - 1, 0) == doctest::Approx(2.0).epsilon(1e-12));
    for (double d : {0.5, 1.0, 7.0, 100.0})
        for (int n = 0; n < 6; ++n) CHECK(rescaled_distance(d, n + 1) < rescaled_distance(d, n));
    auto g = path_graph(10);
    MetricOracle o(g);
    RescaledMetric dn(o, 2);
    CHECK(dn.dist(1, 8) == doctest::Approx(2 * std::log(7 * std::exp(-2.0) + 1)));
}

TEST_CASE("horoball cover of a point is alternating intervals") {
    auto point = WeightedGraph::build(1, std::vector<Edge>{});
    auto hc = horoball_cover(point, {8, 2, 1, 2, 2});
    REQUIRE(hc.ok);
    CHECK(hc.cover.num_colors() == 2);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t k = 0; k < hc.cover.classes[c].size(); ++k) {
            const auto& s = hc.cover.classes[c][k];
            int band = hc.horoball.level_of(s.front()) / hc.band_height;
            CHECK(static_cast<std::size_t>(band % 2) == c);
        }
    CHECK(audit_cover(hc.horoball.graph, hc.cover, range(0, 8)).holds);
    CHECK(r_multiplicity(hc.horoball.graph, hc.cover, 2).value <= 2);
}

TEST_CASE("horoball cover of a path") {
    auto base = path_graph(200);
    HoroballCoverParams p{8, 2, 2, 2, 2};
    auto hc = horoball_cover(base, p);
    REQUIRE(hc.ok);
    CHECK(hc.cover.num_colors() == 3);
    CHECK(hc.cover.nonempty_colors() == 3);
    const auto& g = hc.horoball.graph;
    auto all = range(0, static_cast<VertexId>(g.num_vertices() - 1));
    auto a = audit_cover(g, hc.cover, all);
    CHECK(a.uncovered == 0);
    CHECK(a.overlaps == 0);
    CHECK(a.max_diameter <= hc.cover.D + 1e-9);
    CHECK(a.min_separation >= hc.cover.r - 1e-9);
    auto m = r_multiplicity(g, hc.cover, 2);
    CHECK(m.value <= 3);
    CHECK(oracle_multiplicity(g, hc.cover, 2) == m.value);

    auto br = band_ratio_summary(hc);
    CHECK(br.bands >= 2);
    CHECK(br.level_independent);
    // Bands whose scale exceeds the path hold a single subset.
    for (const auto& b : hc.bands)
        if (b.scale > 200) CHECK(b.degenerate);
}

TEST_CASE("horoball cover reports a failing band") {
    // One base colour cannot cover a path at any separation.
    auto hc = horoball_cover(path_graph(30), {4, 2, 1, 2, 2});
    CHECK_FALSE(hc.ok);
    CHECK(hc.failed_band == 0);
    CHECK_FALSE(hc.remainder.empty());
}

TEST_CASE("pullback slices") {
    auto hc = horoball_cover(path_graph(200), {8, 2, 2, 2, 2});
    REQUIRE(hc.ok);
    auto s0 = cover_pullback_check(hc, 0);
    CHECK_FALSE(s0.degenerate);
    CHECK(s0.ratio == doctest::Approx(hc.bands[0].diam_base / hc.bands[0].sep_base));
    auto s2 = cover_pullback_check(hc, 2);
    CHECK_FALSE(s2.degenerate);
    CHECK(s2.ratio == doctest::Approx(s0.ratio).epsilon(0.05));
    CHECK(cover_pullback_check(hc, 5).degenerate);
    CHECK_THROWS_AS(cover_pullback_check(hc, 9), Error);

    std::vector<int> levels{0, 1, 2, 3, 4, 5, 6, 7, 8};
    auto sum = pullback_summary(hc, levels);
    CHECK(sum.measured == 4);
    CHECK(sum.level_independent);
    CHECK(sum.bound_holds);

    // One colour with overlapping subsets has no separation at all.
    HoroballCover bad = hc;
    bad.cover.classes.assign(1, {});
    bad.cover.classes[0].push_back(range(0, 120));
    bad.cover.classes[0].push_back(range(100, 200));
    auto sb = cover_pullback_check(bad, 0);
    CHECK(std::isinf(sb.ratio));
    std::vector<int> zero{0};
    auto sumb = pullback_summary(bad, zero);
    CHECK_FALSE(sumb.bound_holds);
    CHECK_FALSE(sumb.level_independent);
}

TEST_CASE("boundary projection of tree cylinders") {
    auto f2 = build_group_space(RelHypSpec::from_fields("F2", "none"), 6);
    const auto& g = f2.ball.graph;
    const VertexId o = 0;
    const double R = 3, T = 5;
    auto cyl = sphere_singletons(g, o, R);
    CHECK(cyl.classes[0].size() == 36);
    BoundaryProjectionParams p{R, T, 0.2, 4, 6000};
    auto bp = boundary_cover_projection(g, o, cyl, p);
    CHECK(bp.uncovered == 0);
    CHECK(bp.point_multiplicity == 1);
    CHECK(bp.visual_multiplicity == 1);
    // Oracle: the cylinder of w is the set of sphere points whose geodesic passes w.
    MetricOracle om(g);
    std::set<std::vector<VertexId>> want, got;
    for (const auto& s : cyl.classes[0]) {
        std::vector<VertexId> c;
        for (VertexId z : bp.sphere)
            if (om.dist(o, s[0]) + om.dist(s[0], z) == om.dist(o, z)) c.push_back(z);
        want.insert(c);
    }
    for (const auto& s : bp.cover.classes[0]) got.insert(s);
    CHECK(got == want);
    CHECK(bp.ball_separation == 2.0);
    CHECK(bp.ball_diameter == 0.0);
    CHECK(bp.diam_ratio == doctest::Approx(1.0));
    CHECK(bp.sep_ratio == doctest::Approx(1.0));
    CHECK(bp.shapes_match);

    CHECK_THROWS_AS(boundary_cover_projection(g, o, cyl, {5, 3, 0.2, 4, 6000}), Error);
    CHECK_THROWS_AS(boundary_cover_projection(g, o, cyl, {3, 40, 0.2, 4, 6000}), Error);
    CHECK_THROWS_AS(boundary_cover_projection(g, o, cyl, {3, 5, 0.2, 4, 10}), Error);
}

TEST_CASE("boundary projection of a Bowditch ball cover") {
    auto gs = build_group_space(RelHypSpec::from_fields("Z2,Z2", "all"), 4);
    auto b = build_bowditch(gs, 2);
    const double R = 3;
    auto gc = ball_cover(b.graph, b.base_point, R, {2, 6, 3});
    REQUIRE(gc.ok());
    auto d = single_source_distances(b.graph, b.base_point);
    std::vector<VertexId> ball;
    for (VertexId v = 0; v < b.graph.num_vertices(); ++v)
        if (d[v] <= R + 1e-9) ball.push_back(v);
    CHECK(audit_cover(b.graph, gc.cover, ball).holds);
    auto bp = boundary_cover_projection(b.graph, b.base_point, gc.cover, {R, 5, 0.2, 4, 6000});
    CHECK(bp.uncovered == 0);
    CHECK(bp.point_multiplicity <= 3);
    CHECK(bp.visual_multiplicity <= 3);
    CHECK(bp.ball_separation > 2);
    CHECK(bp.shapes_match);
}

TEST_CASE("cover JSON round trip") {
    auto gc = greedy_colored_cover(path_graph(20), {3, 6, 2});
    std::ostringstream out;
    write_cover_json(gc.cover, out);
    std::istringstream in(out.str());
    auto back = read_cover_json(in);
    CHECK(back.classes == gc.cover.classes);
    CHECK(back.r == gc.cover.r);
    std::istringstream junk("{\"r\": 1}");
    CHECK_THROWS_AS(read_cover_json(junk), Error);
}
