#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "relhyp/error.hpp"
#include "relhyp/projections.hpp"

using namespace relhyp;

namespace {

std::size_t coset_index(const GroupSpace& g, const char* rep, int peripheral) {
    Word w = normal_form(*g.spec, parse_word(*g.spec, rep));
    for (std::size_t i = 0; i < g.cosets.cosets.size(); ++i) {
        const auto& c = g.cosets.cosets[i];
        if (c.peripheral == peripheral && c.rep == w) return i;
    }
    FAIL("coset not found: " << rep);
    return 0;
}

}  // namespace

TEST_CASE("coned-off distances in F2") {
    auto g = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), 8);
    auto c = build_coned_off(g);
    MetricOracle o(c.graph);
    auto id = [&](const char* w) { return g.ball.find(parse_word(*g.spec, w)); };
    CHECK(o.dist(0, id("aaaaa")) == 1.0);
    CHECK(o.dist(0, id("aaaaabbb")) == 2.0);
    CHECK(o.dist(0, id("abab")) == 4.0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < g.cosets.cosets.size(); ++i) {
        std::size_t k = g.cosets.cosets[i].vertices.size();
        CHECK(c.cone_pairs[i] == k * (k - 1) / 2);
        total += c.cone_pairs[i];
    }
    CHECK(c.total_cone_pairs == total);
}

TEST_CASE("closest-point projection onto <a>") {
    auto g = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), 8);
    std::size_t ya = coset_index(g, "1", 0);
    auto p = project_all(g, ya);
    std::string w = "b";
    for (int k = 0; k <= 7; ++k) {
        VertexId x = g.ball.find(parse_word(*g.spec, w));
        auto pr = closest_point_projection(g, ya, x);
        REQUIRE(pr.size() == 1);
        CHECK(pr[0] == 0);
        CHECK(p.dist[x] == k + 1);
        w += "a";
    }
    auto far = closest_point_projection(g, ya, g.ball.find(parse_word(*g.spec, "aaaaab")));
    REQUIRE(far.size() == 1);
    CHECK(g.ball.graph.label(far[0]) == "aaaaa");
    // Projection distance between b and a^5 b is the spread of {e, a^5}.
    std::vector<std::uint32_t> pts;
    const auto& verts = g.cosets.cosets[ya].vertices;
    for (std::uint32_t i = 0; i < verts.size(); ++i)
        if (verts[i] == 0 || verts[i] == far[0]) pts.push_back(i);
    auto dm = coset_point_distances(g, ya, pts);
    CHECK(dm[1] == 5);
}

TEST_CASE("project_all matches brute force") {
    auto g = build_group_space(RelHypSpec::from_fields("Z2,Z2", "all"), 4);
    std::vector<std::size_t> picked;
    std::vector<CosetProjection> projs;
    for (std::size_t ci = 0; ci < g.cosets.cosets.size(); ci += 5) {
        picked.push_back(ci);
        projs.push_back(project_all(g, ci));
    }
    for (VertexId x = 0; x < g.ball.size(); ++x) {
        auto d = single_source_distances(g.ball.graph, x);
        for (std::size_t k = 0; k < picked.size(); ++k) {
            const auto& verts = g.cosets.cosets[picked[k]].vertices;
            double best = kInfinity;
            for (VertexId v : verts) best = std::min(best, d[v]);
            std::vector<VertexId> want, got;
            for (VertexId v : verts)
                if (d[v] == best) want.push_back(v);
            for (auto li : projs[k].of(x)) got.push_back(verts[li]);
            CHECK(got == want);
            CHECK(projs[k].dist[x] == best);
        }
    }
}

TEST_CASE("neighbouring points have nearby projections") {
    auto g = build_group_space(RelHypSpec::from_fields("Z2,Z2", "all"), 5);
    MetricOracle o(g.ball.graph);
    for (std::size_t ci = 0; ci < g.cosets.cosets.size(); ci += 3) {
        if (g.cosets.cosets[ci].rep.size() > 2) continue;
        auto p = project_all(g, ci);
        const auto& verts = g.cosets.cosets[ci].vertices;
        for (VertexId x = 0; x < g.ball.size(); ++x) {
            if (g.ball.length[x] > 3) continue;
            for (const auto& a : g.ball.graph.neighbors(x)) {
                double worst = 0;
                for (auto i : p.of(x))
                    for (auto j : p.of(a.to)) worst = std::max(worst, o.dist(verts[i], verts[j]));
                CHECK(worst <= 1.0);
            }
        }
    }
}

TEST_CASE("projection table") {
    auto g = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), 5);
    auto t = build_projection_table(g, 4);
    for (auto ci : t.scanned) CHECK(g.cosets.cosets[ci].rep.size() <= 4);
    long y = t.position(static_cast<std::uint32_t>(coset_index(g, "1", 0)));
    long x = t.position(static_cast<std::uint32_t>(coset_index(g, "b", 0)));
    long z = t.position(static_cast<std::uint32_t>(coset_index(g, "aaab", 0)));
    REQUIRE(y >= 0);
    REQUIRE(x >= 0);
    REQUIRE(z >= 0);
    CHECK(t.proj_distance(y, x, z) == 3);
    CHECK(t.proj_distance(y, x, x) == 0);
    CHECK(t.proj_distance(y, y, x) == ProjectionTable::kUndefined);
    const std::size_t n = t.size();
    for (std::size_t a = 0; a < n; a += 7)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; c += 3) CHECK(t.proj_distance(a, b, c) == t.proj_distance(a, c, b));
}

TEST_CASE("axioms hold with zero constants on the tree") {
    auto g = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), 6);
    auto t = build_projection_table(g, default_inner_radius(6));
    auto rep = verify_axioms(t, build_coned_off(g));
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.xi0 == 0);
    CHECK(rep.xi3 == 0);
    CHECK(rep.probe == 1);
    CHECK(rep.axiom4_violations == 0);
    CHECK(rep.triples == rep.cosets * (rep.cosets - 1) * (rep.cosets - 2));
}

TEST_CASE("tables with fewer than two cosets are vacuous") {
    auto g = build_group_space(RelHypSpec::from_fields("Z2,Z2", "all"), 3);
    auto t = build_projection_table(g, 0);
    auto rep = verify_axioms(t, build_coned_off(g));
    CHECK(t.size() == 2);
    CHECK_FALSE(rep.vacuous);
    auto t1 = build_projection_table(g, -1);
    CHECK(verify_axioms(t1, build_coned_off(g)).vacuous);
}

TEST_CASE("distance formula on a hand-computed pair") {
    auto g = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), 8);
    auto c = build_coned_off(g);
    VertexId y = g.ball.find(parse_word(*g.spec, "aaaaabbb"));
    // 5 from <a>, 3 from a^5<b>, plus d_hat = 2.
    CHECK(distance_formula_eval(g, c, 0, y, 2) == 10.0);
    CHECK(distance_formula_eval(g, c, 0, y, 3) == 7.0);
    CHECK(distance_formula_eval(g, c, 0, y, kInfinity) == 2.0);
    CHECK(distance_formula_eval(g, c, y, y, 0) == 0.0);
}

TEST_CASE("distance formula pairs agree with single evaluation") {
    auto g = build_group_space(RelHypSpec::from_fields("Z2,Z", "all"), 4);
    auto c = build_coned_off(g);
    auto pairs = distance_formula_pairs(g, c, 1);
    MetricOracle o(g.ball.graph);
    for (std::size_t i = 0; i < pairs.size(); i += 37) {
        const auto& p = pairs[i];
        CHECK(g.ball.length[p.x] + g.ball.length[p.y] <= 4);
        CHECK(p.d == o.dist(p.x, p.y));
        CHECK(p.rhs == distance_formula_eval(g, c, p.x, p.y, 1));
    }
}

TEST_CASE("no peripherals gives the identity fit") {
    auto g = build_group_space(RelHypSpec::from_fields("Z2", "none"), 4);
    auto f = fit_distance_formula(g, build_coned_off(g), 2);
    CHECK(f.fit.lambda == 1.0);
    CHECK(f.fit.mu == 0.0);
    CHECK(f.fit.unit_mu == 0.0);
    std::ostringstream out;
    write_residuals_csv(g, f, out);
    CHECK(out.str().rfind("x,y,d,rhs,d_hat,residual\n", 0) == 0);
}

TEST_CASE("two-sided fit") {
    std::vector<double> a{1, 2, 3}, b{1, 2, 5};
    auto f = fit_two_sided(a, b);
    CHECK(f.mu == 0.0);
    CHECK(f.lambda == doctest::Approx(5.0 / 3.0));
    CHECK(f.worst == 2);
    CHECK_FALSE(f.fallback);
    CHECK(f.unit_mu == 2.0);
    CHECK(f.unit_worst == 2);

    // b at a = 0 forces mu.
    std::vector<double> a2{0, 1, 4}, b2{2, 4, 3};
    auto g = fit_two_sided(a2, b2);
    CHECK(g.mu == 2.0);
    CHECK(g.lambda == 2.0);
    CHECK(g.unit_mu == 3.0);

    // Collapse: no finite lambda at mu = 0.
    std::vector<double> a3{1, 3, 2}, b3{0, 0, 0};
    auto c = fit_two_sided(a3, b3);
    CHECK(c.fallback);
    CHECK(c.lambda == 1.0);
    CHECK(c.mu == 3.0);
    CHECK_THROWS_AS(fit_two_sided(std::span<const double>{}, std::span<const double>{}), Error);
}

TEST_CASE("fitted constants satisfy the two-sided bound") {
    auto g = build_group_space(RelHypSpec::from_fields("Z,Z", "all"), 6);
    auto f = fit_distance_formula(g, build_coned_off(g), 4);
    REQUIRE_FALSE(f.fit.fallback);
    for (const auto& p : f.residuals) {
        CHECK(p.d <= f.fit.lambda * p.rhs + f.fit.mu + 1e-9);
        CHECK(p.d >= p.rhs / f.fit.lambda - f.fit.mu - 1e-9);
        CHECK(std::abs(p.rhs - p.d) <= f.fit.unit_mu);
    }
}
