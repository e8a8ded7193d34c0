#include <cmath>
#include <sstream>

#include "relhyp/embeddings.hpp"
#include "relhyp/error.hpp"
#include "relhyp/projections.hpp"
#include "relhyp/quasitree.hpp"
#include "relhyp/suite_detail.hpp"

namespace relhyp::detail {

namespace {

constexpr std::size_t kBottleneckPairs = 20000;
// Controls must need at least this Delta; certified graphs at most kTreeLikeDelta.
constexpr double kControlDelta = 5;
constexpr double kTreeLikeDelta = 1;
constexpr double kStability = 0.1;

Json bottleneck_json(const WeightedGraph& g, const BottleneckReport& b) {
    Json j;
    j["delta"] = json_number(b.delta);
    j["pairs"] = b.pairs;
    j["exhaustive"] = b.exhaustive;
    j["short_pair_failures"] = b.failures;
    if (b.x != kNoVertex) {
        j["witness"] = Json{{"x", vertex_text(g, b.x)}, {"y", vertex_text(g, b.y)}, {"midpoint", vertex_text(g, b.m)}};
    }
    return j;
}

struct QuasiTreeRun {
    Json json;
    double delta = 0;
};

QuasiTreeRun quasitree_run(const RelHypSpec& spec, int R, const std::optional<double>& K_flag, std::uint64_t seed) {
    auto g = build_group_space(spec, R);
    auto t = build_projection_table(g, default_inner_radius(R));
    auto ax = verify_axioms(t, build_coned_off(g));
    const double K = K_flag.value_or(ax.xi3 + 1.0);
    auto c = build_projection_complex(t, K, ax.xi3);
    auto cp = coset_pieces(g, c);
    auto q = build_quasitree_of_spaces(c, cp.pieces, cp.images);
    std::vector<std::string> labels(q.graph.num_vertices());
    for (VertexId v = 0; v < q.graph.num_vertices(); ++v) {
        const auto& cs = g.cosets.cosets[c.cosets[q.piece_of[v]]];
        labels[v] = cs.rep_label + "H" + std::to_string(cs.peripheral + 1) + ":" + std::to_string(q.local_of[v]);
    }
    q.graph.set_labels(std::move(labels));
    auto b = bottleneck_check(q.graph, kBottleneckPairs, seed);
    Json j;
    j["radius"] = R;
    j["xi3"] = ax.xi3;
    j["K"] = json_number(K);
    j["below_xi3"] = c.below_xi3;
    j["complex_vertices"] = c.cosets.size();
    j["complex_edges"] = c.edges.size();
    j["complex_connected"] = c.graph.is_connected();
    j["vertices"] = q.graph.num_vertices();
    j["edges"] = q.graph.num_edges();
    j["bridges"] = q.bridges;
    j["bottleneck"] = bottleneck_json(q.graph, b);
    return {j, b.delta};
}

bool within(double a, double b, double rel) { return a == b || std::abs(a - b) <= rel * std::abs(b); }

Json fit_json(const TwoSidedFit& f) {
    return Json{{"pairs", f.pairs},
                {"lambda", json_number(f.lambda)},
                {"mu", json_number(f.mu)},
                {"fallback", f.fallback},
                {"unit_mu", json_number(f.unit_mu)}};
}

}  // namespace

SuiteResult suite_quasitree(const RunConfig& config) {
    ReportBuilder rb("quasitree", config);
    CheckList checks;
    rb.parameter("bottleneck_pairs", kBottleneckPairs);
    rb.parameter("delta_grid", 0.5);

    if (!config.spec_text.empty() && looks_like_graph(config.spec_text)) {
        // A graph file is certified on its own against the tree-like bound.
        std::istringstream in(config.spec_text);
        WeightedGraph g = read_graph(in);
        rb.parameter("mode", "graph");
        rb.parameter("max_delta", kTreeLikeDelta);
        checks.run("bottleneck/graph", [&] {
            auto b = bottleneck_check(g, kBottleneckPairs, config.seed);
            Outcome o;
            o.measured["vertices"] = g.num_vertices();
            o.measured["edges"] = g.num_edges();
            o.measured["bottleneck"] = bottleneck_json(g, b);
            o.pass = b.delta <= kTreeLikeDelta;
            if (!o.pass) o.witness = o.measured["bottleneck"]["witness"];
            return o;
        });
        return rb.finish(checks);
    }

    const int radius = config.radius.value_or(6);
    const RelHypSpec spec = specs_or(config, {RelHypSpec::from_fields("Z,Z", "all")})[0];
    rb.input(spec_id(spec), spec.to_text());
    rb.parameter("mode", "quasi-tree of spaces");
    rb.parameter("spec", spec_id(spec));
    rb.parameter("radii", Json::array({radius - 2, radius}));
    rb.parameter("edge_rule", "d_pi_Y(X, Z) <= K for every other scanned Y");
    rb.parameter("control", "cycle_24");
    rb.parameter("control_min_delta", kControlDelta);

    checks.run("bottleneck_stability/" + spec_id(spec), [&] {
        Outcome o;
        QuasiTreeRun lo, hi;
        const bool a = attempt(o, "lower", [&] { o.measured["lower"] = (lo = quasitree_run(spec, radius - 2, config.threshold_K, config.seed)).json; });
        const bool b = attempt(o, "upper", [&] { o.measured["upper"] = (hi = quasitree_run(spec, radius, config.threshold_K, config.seed)).json; });
        if (!a || !b) return o;
        o.pass = hi.delta <= lo.delta + 1;
        if (!o.pass) o.witness = hi.json["bottleneck"]["witness"];
        return o;
    });

    checks.run("control/cycle_24", [&] {
        WeightedGraph c = cycle_graph(24);
        auto b = bottleneck_check(c, kBottleneckPairs, config.seed);
        Outcome o;
        o.measured["bottleneck"] = bottleneck_json(c, b);
        o.pass = b.delta >= kControlDelta;
        if (!o.pass) o.witness = o.measured["bottleneck"]["witness"];
        return o;
    });
    return rb.finish(checks);
}

SuiteResult suite_embed(const RunConfig& config) {
    const int radius = config.radius.value_or(8);
    const double L = config.cutoff_L;
    const auto specs = specs_or(config, {});
    const RelHypSpec composed_spec = specs.empty() ? RelHypSpec::from_fields("Z,Z", "all") : specs[0];
    const RelHypSpec join_spec = specs.empty() ? RelHypSpec::from_fields("Z2,F2", "all") : specs[0];
    const int join_hi = radius - 2, join_lo = radius - 4;

    ReportBuilder rb("embed", config);
    rb.input(spec_id(composed_spec), composed_spec.to_text());
    if (specs.empty()) rb.input(spec_id(join_spec), join_spec.to_text());
    rb.parameter("composed_spec", spec_id(composed_spec));
    rb.parameter("composed_radii", Json::array({radius - 2, radius}));
    rb.parameter("complex_inner_radius", "radius - 1");
    rb.parameter("K", config.threshold_K ? json_number(*config.threshold_K) : Json("xi3 + 1"));
    rb.parameter("cutoff_L", json_number(L));
    rb.parameter("lower_bound_slack", 1);
    rb.parameter("join_spec", spec_id(join_spec));
    rb.parameter("join_radii", Json::array({join_lo, join_hi}));
    rb.parameter("restriction_ball", join_hi);
    rb.parameter("stability", kStability);

    CheckList checks;
    checks.run("composed_embedding/" + spec_id(composed_spec), [&] {
        Outcome o;
        Json runs = Json::array();
        std::vector<DistortionReport> reps;
        std::size_t lower_violations = 0;
        Json lower_witness = nullptr;
        Json df_json = nullptr;
        for (int R : {radius - 2, radius}) {
            attempt(o, "R" + std::to_string(R), [&] {
                auto g = build_group_space(composed_spec, R);
                auto coned = build_coned_off(g);
                auto ax = verify_axioms(build_projection_table(g, default_inner_radius(R)), coned);
                const double K = config.threshold_K.value_or(ax.xi3 + 1.0);
                auto complex = build_projection_complex(g, R - 1, K, ax.xi3);
                auto f = compose_embedding(g, complex, coned);
                auto pairs = exact_region_pairs(g.ball);
                auto rep = distortion_report(f, pairs);
                Json r;
                r["radius"] = R;
                r["K"] = json_number(K);
                r["trees"] = f.num_trees();
                r["complex_vertices"] = complex.cosets.size();
                r["complex_edges"] = complex.edges.size();
                r["fit"] = fit_json(rep.fit);
                if (R == radius - 2) {
                    // The distance-formula constants bound the embedding from below.
                    auto df = fit_distance_formula(g, coned, L);
                    df_json = fit_json(df.fit);
                    for (std::size_t i = 0; i < pairs.size(); ++i) {
                        if (rep.image[i] < rep.d[i] / df.fit.lambda - df.fit.mu - 1) {
                            if (!lower_violations) {
                                lower_witness = Json{{"x", g.ball.elements[pairs.xs[i]].label()},
                                                     {"y", g.ball.elements[pairs.ys[i]].label()},
                                                     {"d", json_number(rep.d[i])},
                                                     {"image", json_number(rep.image[i])}};
                            }
                            ++lower_violations;
                        }
                    }
                    std::ostringstream csv;
                    write_embedding_csv(f, csv);
                    rb.artifact("embed_composed_" + file_tag(spec_id(composed_spec)) + "_R" + std::to_string(R) + ".csv",
                                csv.str());
                }
                runs.push_back(r);
                reps.push_back(std::move(rep));
            });
        }
        o.measured["runs"] = runs;
        o.measured["distance_formula_fit"] = df_json;
        o.measured["lower_bound_violations"] = lower_violations;
        if (reps.size() < 2) return o;
        const auto& a = reps[0].fit;
        const auto& b = reps[1].fit;
        const bool finite = !a.fallback && !b.fallback && std::isfinite(a.lambda) && std::isfinite(b.lambda);
        o.pass = finite && within(a.lambda, b.lambda, kStability) && within(a.mu, b.mu, kStability) &&
                 lower_violations == 0;
        if (!o.pass) o.witness = lower_violations ? lower_witness : runs[1]["fit"];
        return o;
    });

    checks.run("free_product_join/" + spec_id(join_spec), [&] {
        Outcome o;
        Json runs = Json::array();
        std::vector<TwoSidedFit> fits;
        bool trees_ok = true;
        double restriction = 0;
        for (int R : {join_lo, join_hi}) {
            attempt(o, "R" + std::to_string(R), [&] {
                auto g = build_group_space(join_spec, R);
                auto j = free_product_join(g);
                auto rep = distortion_report(j.embedding, exact_region_pairs(g.ball));
                Json r;
                r["radius"] = R;
                r["trees"] = j.embedding.num_trees();
                Json cyc = Json::array();
                for (const auto& t : j.embedding.coords) {
                    cyc.push_back(t.is_tree());
                    trees_ok = trees_ok && t.is_tree();
                }
                r["coordinates_are_trees"] = cyc;
                trees_ok = trees_ok && j.embedding.num_trees() == 2;
                r["fit"] = fit_json(rep.fit);
                if (R == join_hi) {
                    restriction = join_restriction_error(j);
                    r["restriction_error"] = json_number(restriction);
                }
                if (R == join_lo) {
                    std::ostringstream csv;
                    write_embedding_csv(j.embedding, csv);
                    rb.artifact("embed_join_" + file_tag(spec_id(join_spec)) + "_R" + std::to_string(R) + ".csv",
                                csv.str());
                }
                runs.push_back(r);
                fits.push_back(rep.fit);
            });
        }
        o.measured["runs"] = runs;
        if (fits.size() < 2) return o;
        const auto& a = fits[0];
        const auto& b = fits[1];
        const bool finite = !a.fallback && !b.fallback && std::isfinite(a.lambda) && std::isfinite(b.lambda);
        o.pass = trees_ok && restriction <= 1 && finite && within(a.lambda, b.lambda, kStability) &&
                 within(a.mu, b.mu, kStability);
        if (!o.pass) o.witness = runs;
        return o;
    });
    return rb.finish(checks);
}

}  // namespace relhyp::detail
