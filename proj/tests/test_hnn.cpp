#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <deque>
#include <set>
#include <sstream>

#include "relhyp/error.hpp"
#include "relhyp/hnn.hpp"

using namespace relhyp;

namespace {

std::set<std::string> labels_of(const HnnBall& ball, const std::vector<VertexId>& xs) {
    std::set<std::string> s;
    for (VertexId x : xs) s.insert(ball.elements[x].label());
    return s;
}

// Levels by breadth-first search over the pairwise adjacency relation.
std::vector<int> oracle_levels(const DualGraphK& k) {
    std::vector<int> lv(k.size(), -1);
    lv[k.base] = 0;
    std::deque<std::uint32_t> q{k.base};
    while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        for (std::uint32_t v = 0; v < k.size(); ++v)
            if (lv[v] < 0 && k.adjacent(u, v)) {
                lv[v] = lv[u] + 1;
                q.push_back(v);
            }
    }
    return lv;
}

std::uint32_t coset(const DualGraphK& k, const std::string& w) { return k.index.at(w); }

}  // namespace

TEST_CASE("HNN group arithmetic") {
    HnnGroup klein(hnn_model("ii"));
    CHECK(klein.parse("taT") == klein.parse("A"));
    CHECK(klein.parse("tat") == klein.parse("Att"));
    HnnGroup z2(hnn_model("i"));
    CHECK(z2.parse("taT") == z2.parse("a"));
    HnnGroup zf(hnn_model("iii"));
    CHECK(zf.parse("bab") == zf.parse("abb"));
    CHECK(zf.parse("tbT").label() == "tbT");
    for (const char* w : {"aatbA", "TTab", "btaBt"}) {
        auto x = zf.parse(w);
        CHECK(zf.multiply(x, zf.inverse(x)) == HnnElement{});
    }
    auto x = klein.parse("aatA");
    CHECK(klein.multiply(x, klein.inverse(x)) == HnnElement{});
    CHECK_THROWS_AS(klein.parse("ab"), Error);
    CHECK_THROWS_AS(hnn_model("iv"), Error);
    CHECK_THROWS_AS(validate(HnnSpec{"x", "Z3", "a", HnnAction::kIdentity}), Error);
}

TEST_CASE("HNN balls") {
    for (const char* m : {"i", "ii", "iii"}) {
        auto spec = hnn_model(m);
        auto ball = build_hnn_ball(spec, 5);
        CHECK(ball.elements.size() == predicted_hnn_ball_size(spec, 5));
        // word length agrees with the BFS distance from the identity
        auto d = single_source_distances(ball.graph, 0);
        for (VertexId v = 0; v < ball.elements.size(); ++v) CHECK(d[v] == ball.length[v]);
    }
    CHECK(predicted_hnn_ball_size(hnn_model("i"), 20) == 841);
    try {
        build_hnn_ball(hnn_model("iii"), 20);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kCapExceeded);
    }
}

TEST_CASE("dual graph and projection") {
    auto ball = build_hnn_ball(hnn_model("i"), 6);
    auto k = build_dual_graph(ball);
    CHECK(k.size() == 13);
    CHECK(k.reversed_count == 0);
    for (VertexId x = 0; x < ball.elements.size(); ++x) {
        const auto& e = ball.elements[x];
        CHECK(k.keys[dual_projection(k, x)] == e.w);
        if (e.w.empty()) CHECK(dual_projection(k, x) == k.base);
        const int n = static_cast<int>(e.w.size());
        CHECK(k.level[dual_projection(k, x)] == n);
        CHECK(static_cast<bool>(k.in_k1[dual_projection(k, x)]) == (e.w.empty() || e.w[0] == 't'));
    }
    CHECK(k.leq(coset(k, "t"), coset(k, "ttt")));
    CHECK_FALSE(k.leq(coset(k, "T"), coset(k, "ttt")));

    for (const char* m : {"i", "ii", "iii"}) {
        auto b = build_hnn_ball(hnn_model(m), 6);
        auto kk = build_dual_graph(b);
        auto lip = projection_lipschitz_scan(b, kk);
        CHECK(lip.edges == b.graph.num_edges());
        CHECK(lip.violations == 0);
        CHECK(oracle_levels(kk) == kk.level);
        for (std::uint32_t u = 0; u < kk.size(); ++u) {
            const auto& w = kk.keys[u];
            CHECK(static_cast<bool>(kk.in_k1[u]) == (w.empty() || w[0] == 't'));
            // |pi(x)| <= |x| on the coset representative
            CHECK(kk.level[u] <= static_cast<int>(w.size()));
        }
    }
}

TEST_CASE("reversed cosets in Z x F(b, t)") {
    auto ball = build_hnn_ball(hnn_model("iii"), 5);
    auto k = build_dual_graph(ball);
    CHECK(k.reversed_count > 0);
    const auto u = coset(k, "tbT");
    CHECK(k.level[u] == 1);
    CHECK(k.reversed[u]);
    CHECK(k.in_k1[u]);
    CHECK_FALSE(k.reversed[coset(k, "tb")]);
    // the literal translate of D_R lands on the C side of a reversed coset
    auto lit = compute_DR(ball, k, 2, u, DConvention::kLiteral);
    auto ori = compute_DR(ball, k, 2, u, DConvention::kOriented);
    CHECK(labels_of(ball, lit) != labels_of(ball, ori));
    for (VertexId x : ori) CHECK(k.leq(u, dual_projection(k, x)));
}

TEST_CASE("separating sets D_R") {
    auto ball = build_hnn_ball(hnn_model("i"), 20);
    auto k = build_dual_graph(ball);
    auto d2 = compute_DR(ball, k, 2, k.base, DConvention::kLiteral);
    std::set<std::string> want;
    for (int m = -18; m <= 18; ++m) want.insert(std::string(std::abs(m), m < 0 ? 'A' : 'a') + "tt");
    CHECK(labels_of(ball, d2) == want);
    auto d0 = compute_DR(ball, k, 0, k.base, DConvention::kLiteral);
    CHECK(d0.size() == 41);
    for (VertexId x : d0) CHECK(ball.elements[x].w.empty());
    CHECK_THROWS_AS(compute_DR(ball, k, 2, coset(k, "T"), DConvention::kLiteral), Error);

    // equivariance: D^u_R = g_u D_R, and both conventions agree off reversed cosets
    for (const char* m : {"ii", "iii"}) {
        auto b = build_hnn_ball(hnn_model(m), 7);
        auto kk = build_dual_graph(b);
        // translates of D_R points up to length 7 + |g_u| can land in the ball
        auto big = build_hnn_ball(hnn_model(m), 10);
        auto kb = build_dual_graph(big);
        auto base = compute_DR(big, kb, 2, kb.base, DConvention::kLiteral);
        for (std::uint32_t u = 0; u < kk.size(); ++u) {
            if (!kk.in_k1[u] || kk.keys[u].size() > 3) continue;
            auto lit = compute_DR(b, kk, 2, u, DConvention::kLiteral);
            std::set<std::string> moved;
            for (VertexId y : base) {
                auto z = b.group.multiply({0, kk.keys[u]}, big.elements[y]);
                if (b.find(z) != kNoVertex) moved.insert(z.label());
            }
            CHECK(labels_of(b, lit) == moved);
            if (!kk.reversed[u]) CHECK(lit == compute_DR(b, kk, 2, u, DConvention::kOriented));
        }
        CHECK_FALSE(base.empty());
    }
}

TEST_CASE("separation of one triple") {
    auto ball = build_hnn_ball(hnn_model("i"), 12);
    auto k = build_dual_graph(ball);
    auto t = separation_check(ball, k, k.base, coset(k, "T"), coset(k, "ttt"), 2, DConvention::kLiteral);
    CHECK(t.hypotheses);
    CHECK(t.separated);
    // a gap of R fails the hypothesis but still separates, since pi^-1(t^2) lies on D_2
    auto at = separation_check(ball, k, k.base, coset(k, "TT"), coset(k, "tt"), 2, DConvention::kLiteral);
    CHECK_FALSE(at.hypotheses);
    CHECK(at.separated);
    auto below = separation_check(ball, k, k.base, coset(k, "TT"), coset(k, "t"), 2, DConvention::kLiteral);
    CHECK_FALSE(below.hypotheses);
    CHECK_FALSE(below.separated);
}

TEST_CASE("tech1 scans") {
    for (const char* m : {"i", "ii"}) {
        auto ball = build_hnn_ball(hnn_model(m), 12);
        auto k = build_dual_graph(ball);
        for (int R : {2, 3}) {
            auto rep = tech1_scan(ball, k, R, DConvention::kLiteral, R + 1);
            CHECK(rep.triples > 0);
            CHECK(rep.pass());
        }
        auto neg = tech1_scan(ball, k, 2, DConvention::kLiteral, 1);
        CHECK(neg.failures > 0);
        CHECK(neg.witness[0] == "1");
    }
    auto ball = build_hnn_ball(hnn_model("iii"), 6);
    auto k = build_dual_graph(ball);
    auto ori = tech1_scan(ball, k, 2, DConvention::kOriented, 3);
    CHECK(ori.triples > 0);
    CHECK(ori.pass());
    auto lit = tech1_scan(ball, k, 2, DConvention::kLiteral, 3);
    CHECK(lit.triples == ori.triples);
    CHECK(lit.failures > 0);
    CHECK(k.reversed[coset(k, lit.witness[0])]);
}

TEST_CASE("tech2 scans") {
    auto ball = build_hnn_ball(hnn_model("i"), 20);
    auto k = build_dual_graph(ball);
    auto rep = tech2_scan(ball, k, 8, 2, DConvention::kLiteral);
    CHECK(rep.hypothesis);
    CHECK(rep.cosets == 3);
    CHECK(rep.min_distance == 8);
    CHECK(rep.pass());
    auto flagged = tech2_scan(ball, k, 4, 2, DConvention::kLiteral);
    CHECK_FALSE(flagged.hypothesis);
    CHECK(flagged.min_distance == 4);

    auto small = build_hnn_ball(hnn_model("ii"), 9);
    auto ks = build_dual_graph(small);
    auto vac = tech2_scan(small, ks, 8, 2, DConvention::kLiteral);
    CHECK(vac.cosets == 1);
    CHECK(vac.pairs == 0);
    CHECK(vac.pass());

    // brute force over every pair of D-points for the Klein bottle group
    auto kb = build_hnn_ball(hnn_model("ii"), 14);
    auto kk = build_dual_graph(kb);
    auto r2 = tech2_scan(kb, kk, 4, 1, DConvention::kLiteral);
    double best = kInfinity;
    std::vector<std::vector<VertexId>> sets;
    for (std::uint32_t u = 0; u < kk.size(); ++u)
        if (kk.in_k1[u] && kk.level[u] % 4 == 0) sets.push_back(compute_DR(kb, kk, 1, u, DConvention::kLiteral));
    auto d = [&](VertexId x, VertexId y) { return single_source_distances(kb.graph, x)[y]; };
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j)
            for (VertexId x : sets[i])
                for (VertexId y : sets[j])
                    if (kb.length[x] <= 6 && kb.length[y] <= 6) best = std::min(best, d(x, y));
    CHECK(r2.min_distance <= best);
    CHECK(r2.min_distance == 4);
}

TEST_CASE("partition pieces") {
    for (const char* m : {"i", "ii"}) {
        auto ball = build_hnn_ball(hnn_model(m), 20);
        auto k = build_dual_graph(ball);
        for (auto [r, R] : {std::pair{8, 2}, std::pair{12, 3}}) {
            auto p = build_partition(ball, k, r, R);
            CHECK(p.audit.clean());
            CHECK(p.audit.uncovered == 0);
            CHECK(p.audit.boundary_mismatches == 0);
            CHECK(p.audit.cover_multiplicity <= 2);
            CHECK(p.pieces.size() == static_cast<std::size_t>(19 / r + 1));
            // the pieces together with N_R(C) cover pi^-1(K_1) in the region
            std::set<VertexId> all(p.near_base.begin(), p.near_base.end());
            for (const auto& s : p.pieces) all.insert(s.begin(), s.end());
            CHECK(all.size() == p.audit.region);
            // Z is exactly the union of the D^u_R in the region
            std::set<VertexId> z;
            for (std::uint32_t u : p.piece_coset)
                for (VertexId x : compute_DR(ball, k, R, u, DConvention::kLiteral))
                    if (ball.length[x] <= 19) z.insert(x);
            CHECK(std::vector<VertexId>(z.begin(), z.end()) == p.z);
        }
    }
    auto zf = build_hnn_ball(hnn_model("iii"), 9);
    auto kz = build_dual_graph(zf);
    auto p = build_partition(zf, kz, 4, 1);
    CHECK(p.audit.clean());
    CHECK(p.pieces.size() > 10);
    CHECK_THROWS_AS(build_partition(zf, kz, 8, 2), Error);

    std::ostringstream out;
    auto small = build_hnn_ball(hnn_model("i"), 12);
    auto ks = build_dual_graph(small);
    write_partition_csv(small, ks, build_partition(small, ks, 8, 2), out);
    CHECK(out.str().rfind("piece,coset,label\n-1,1,", 0) == 0);
}
