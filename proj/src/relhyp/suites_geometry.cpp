#include <cmath>
#include <sstream>

#include "relhyp/bowditch.hpp"
#include "relhyp/error.hpp"
#include "relhyp/horoball.hpp"
#include "relhyp/projections.hpp"
#include "relhyp/suite_detail.hpp"

namespace relhyp::detail {

namespace {

constexpr double kLemmaTolerance = 8;
constexpr double kDepthDrift = 1;
constexpr int kBowditchDepth = 4;
constexpr std::size_t kQuadrupleBudget = 100000;

Json scan_json(const ErrorScanReport& s) {
    Json j;
    j["depth"] = s.depth;
    j["sufficient_depth"] = s.sufficient_depth;
    j["vertices"] = s.vertices;
    j["pairs"] = s.pairs;
    j["max_error"] = json_number(s.max_error);
    j["argmax"] = Json{{"x", s.arg_x}, {"m", s.arg_m}, {"y", s.arg_y}, {"n", s.arg_n}};
    Json lv = Json::array();
    for (double e : s.level_max_error) lv.push_back(json_number(e));
    j["level_max_error"] = lv;
    j["truncated_pairs"] = s.truncated_pairs;
    j["closed_form_mismatches"] = s.closed_form_mismatches;
    j["bound_violations"] = s.bound_violations;
    j["max_closed_form_gap"] = json_number(s.max_closed_form_gap);
    return j;
}

Json delta_json(const HyperbolicityReport& h, const BowditchBall& b) {
    Json j;
    j["delta"] = json_number(h.delta);
    j["vertices"] = b.graph.num_vertices();
    j["sphere_pool"] = h.sphere_pool;
    j["random_pool"] = h.random_pool;
    j["quadruples"] = h.quadruples;
    j["skipped"] = h.skipped;
    j["sphere_exhaustive"] = h.sphere_exhaustive;
    j["random_exhaustive"] = h.random_exhaustive;
    Json q = Json::array();
    for (VertexId v : h.argmax) q.push_back(bowditch_label(b, v));
    j["argmax"] = q;
    return j;
}

struct DeltaRun {
    Json json;
    double delta = 0;
};

DeltaRun measure_delta(const RelHypSpec& spec, int radius, int depth, std::uint64_t seed) {
    auto g = build_group_space(spec, radius);
    auto b = build_bowditch(g, depth);
    auto h = delta_estimate(b, kQuadrupleBudget, seed);
    Json j{{"radius", radius}, {"depth", depth}};
    j.update(delta_json(h, b));
    return {j, h.delta};
}

Json axiom_json(const GroupSpace& g, const AxiomReport& a) {
    auto rep = [&](std::uint32_t c) {
        const auto& cs = g.cosets.cosets[c];
        return cs.rep_label + "H" + std::to_string(cs.peripheral + 1);
    };
    Json j;
    j["radius"] = a.radius;
    j["inner_radius"] = a.inner_radius;
    j["cosets"] = a.cosets;
    j["pairs"] = a.pairs;
    j["triples"] = a.triples;
    j["vacuous"] = a.vacuous;
    j["xi0"] = a.xi0;
    j["xi3"] = a.xi3;
    if (!a.vacuous) {
        j["xi0_witness"] = Json{{"Y", rep(a.xi0_y)}, {"X", rep(a.xi0_x)}};
        j["xi3_witness"] = Json{{"Y", rep(a.xi3_y)}, {"X", rep(a.xi3_x)}, {"Z", rep(a.xi3_z)}};
        j["axiom4_witness"] = Json{{"X", rep(a.axiom4_x)}, {"Z", rep(a.axiom4_z)}};
    }
    j["probe_xi"] = a.probe;
    j["axiom4_max_count"] = a.axiom4_max_count;
    j["axiom4_violations"] = a.axiom4_violations;
    j["axiom4_worst_slack"] = a.axiom4_worst_slack;
    return j;
}

std::vector<RelHypSpec> shipped_relhyp_specs() {
    return {RelHypSpec::from_fields("Z,Z", "all"), RelHypSpec::from_fields("Z2,Z2", "all")};
}

}  // namespace

SuiteResult suite_horoball(const RunConfig& config) {
    const int depth = config.depth.value_or(8);
    const int deep = depth + 4;
    const int radius = config.radius.value_or(8);
    const RelHypSpec spec = specs_or(config, {RelHypSpec::from_fields("Z2,Z2", "all")})[0];
    const RelHypSpec z2 = RelHypSpec::from_fields("Z2", "none");
    const RelHypSpec f2 = RelHypSpec::from_fields("F2", "none");

    ReportBuilder rb("horoball", config);
    rb.parameter("depth", depth);
    rb.parameter("comparison_depth", deep);
    rb.parameter("error_tolerance", kLemmaTolerance);
    rb.parameter("depth_drift_tolerance", kDepthDrift);
    rb.parameter("delta_estimator", "four-point (largest - middle) / 2 of the pairing sums");
    rb.parameter("spec", spec_id(spec));
    rb.parameter("radius", radius);
    rb.parameter("comparison_radius", radius - 2);
    rb.parameter("bowditch_depth", kBowditchDepth);
    rb.parameter("quadruple_budget", kQuadrupleBudget);
    rb.parameter("control", spec_id(z2));
    rb.parameter("control_radii", Json::array({radius / 2, radius}));

    struct Base {
        std::string name;
        WeightedGraph graph;
    };
    std::vector<Base> bases;
    bases.push_back({"path_20", path_graph(20)});
    bases.push_back({"cycle_12", cycle_graph(12)});
    bases.push_back({"F2_ball_3", cayley_ball(f2, 3).graph});
    rb.input(spec_id(spec), spec.to_text());
    for (const auto& b : bases) {
        std::ostringstream s;
        write_graph(b.graph, s);
        rb.input(b.name, s.str());
    }

    CheckList checks;
    for (const auto& b : bases) {
        checks.run("distance_lemma/" + b.name, [&] {
            auto s = estimate_error_scan(b.graph, depth);
            auto t = estimate_error_scan(b.graph, deep);
            Outcome o;
            o.measured["scan"] = scan_json(s);
            o.measured["comparison_scan"] = scan_json(t);
            const double drift = std::abs(s.max_error - t.max_error);
            o.measured["depth_drift"] = json_number(drift);
            o.pass = s.max_error <= kLemmaTolerance && drift < kDepthDrift && s.closed_form_mismatches == 0 &&
                     s.bound_violations == 0 && t.closed_form_mismatches == 0;
            if (!o.pass) o.witness = o.measured["scan"]["argmax"];
            return o;
        });
    }

    checks.run("hyperbolicity/" + spec_id(spec), [&] {
        Outcome o;
        DeltaRun lo, hi;
        const bool ok_lo = attempt(o, "lower", [&] { o.measured["lower"] = (lo = measure_delta(spec, radius - 2, kBowditchDepth, config.seed)).json; });
        const bool ok_hi = attempt(o, "upper", [&] { o.measured["upper"] = (hi = measure_delta(spec, radius, kBowditchDepth, config.seed)).json; });
        if (!ok_lo || !ok_hi) return o;
        o.pass = hi.delta <= lo.delta + 1;
        if (!o.pass) o.witness = hi.json["argmax"];
        return o;
    });

    checks.run("hyperbolicity_control/" + spec_id(z2), [&] {
        auto lo = measure_delta(z2, radius / 2, 0, config.seed);
        auto hi = measure_delta(z2, radius, 0, config.seed);
        Outcome o;
        o.measured["lower"] = lo.json;
        o.measured["upper"] = hi.json;
        o.pass = hi.delta >= lo.delta + 2;
        if (!o.pass) o.witness = hi.json["argmax"];
        return o;
    });
    return rb.finish(checks);
}

SuiteResult suite_axioms(const RunConfig& config) {
    const int radius = config.radius.value_or(8);
    const auto specs = specs_or(config, shipped_relhyp_specs());
    ReportBuilder rb("axioms", config);
    rb.parameter("radii", Json::array({radius - 2, radius}));
    rb.parameter("inner_radius", "radius - 3");
    rb.parameter("metric", "Cayley metric of the ball");
    rb.parameter("axiom4_probe", "xi3 + 1, count <= d_hat(rep X, rep Z) + 1");

    CheckList checks;
    for (const auto& spec : specs) {
        rb.input(spec_id(spec), spec.to_text());
        checks.run("projection_axioms/" + spec_id(spec), [&] {
            Outcome o;
            Json runs = Json::array();
            std::vector<AxiomReport> reps;
            for (int R : {radius - 2, radius}) {
                attempt(o, "R" + std::to_string(R), [&] {
                    auto g = build_group_space(spec, R);
                    auto t = build_projection_table(g, default_inner_radius(R));
                    auto a = verify_axioms(t, build_coned_off(g));
                    runs.push_back(axiom_json(g, a));
                    reps.push_back(a);
                });
            }
            o.measured["runs"] = runs;
            if (reps.size() < 2) return o;
            const auto& a = reps[0];
            const auto& b = reps[1];
            o.pass = !a.vacuous && !b.vacuous && a.xi0 == b.xi0 && a.xi3 == b.xi3 && a.axiom4_violations == 0 &&
                     b.axiom4_violations == 0;
            if (!o.pass) {
                if (a.axiom4_violations || b.axiom4_violations) {
                    o.witness = runs[a.axiom4_violations ? 0 : 1]["axiom4_witness"];
                } else {
                    o.witness = Json{{"xi0", Json::array({a.xi0, b.xi0})}, {"xi3", Json::array({a.xi3, b.xi3})}};
                }
            }
            return o;
        });
    }
    return rb.finish(checks);
}

SuiteResult suite_distform(const RunConfig& config) {
    const int radius = config.radius.value_or(8);
    const double L = config.cutoff_L;
    const auto specs = specs_or(config, shipped_relhyp_specs());
    ReportBuilder rb("distform", config);
    rb.parameter("radii", Json::array({radius - 2, radius}));
    rb.parameter("cutoff_L", json_number(L));
    rb.parameter("pairs", "all unordered pairs with |x| + |y| <= radius");
    rb.parameter("fit", "rhs / lambda - mu <= d <= lambda rhs + mu, least mu then least lambda");
    rb.parameter("lambda_tolerance", 0.1);
    rb.parameter("mu_tolerance", 2);

    CheckList checks;
    for (const auto& spec : specs) {
        rb.input(spec_id(spec), spec.to_text());
        checks.run("distance_formula/" + spec_id(spec), [&] {
            Outcome o;
            Json runs = Json::array();
            std::vector<TwoSidedFit> fits;
            for (int R : {radius - 2, radius}) {
                attempt(o, "R" + std::to_string(R), [&] {
                auto g = build_group_space(spec, R);
                auto f = fit_distance_formula(g, build_coned_off(g), L);
                Json r;
                r["radius"] = R;
                r["pairs"] = f.fit.pairs;
                r["lambda"] = json_number(f.fit.lambda);
                r["mu"] = json_number(f.fit.mu);
                r["fallback"] = f.fit.fallback;
                r["unit_mu"] = json_number(f.fit.unit_mu);
                const auto& w = f.residuals[f.fit.worst];
                r["binding_pair"] = Json{{"x", g.ball.elements[w.x].label()},
                                         {"y", g.ball.elements[w.y].label()},
                                         {"d", json_number(w.d)},
                                         {"rhs", json_number(w.rhs)}};
                runs.push_back(r);
                fits.push_back(f.fit);
                std::ostringstream csv;
                write_residuals_csv(g, f, csv);
                rb.artifact("distform_residuals_" + file_tag(spec_id(spec)) + "_R" + std::to_string(R) + ".csv",
                            csv.str());
                });
            }
            o.measured["runs"] = runs;
            if (fits.size() < 2) return o;
            const auto& a = fits[0];
            const auto& b = fits[1];
            const bool finite = !a.fallback && !b.fallback && std::isfinite(a.lambda) && std::isfinite(b.lambda);
            o.pass = finite && std::abs(b.lambda - a.lambda) <= 0.1 * a.lambda && std::abs(b.mu - a.mu) <= 2;
            if (!o.pass) o.witness = runs[1]["binding_pair"];
            return o;
        });
    }
    return rb.finish(checks);
}

}  // namespace relhyp::detail
