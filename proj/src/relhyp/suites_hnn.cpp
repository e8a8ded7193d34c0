#include <memory>
#include <sstream>

#include "relhyp/error.hpp"
#include "relhyp/hnn.hpp"
#include "relhyp/suite_detail.hpp"

namespace relhyp::detail {

namespace {

struct Pair {
    int r, R;
};

constexpr Pair kPairs[] = {{8, 2}, {12, 3}};
// Radii for the diagnostic runs of models whose main ball is over the cap.
constexpr int kTech1DiagnosticRadius = 8;
constexpr int kPartitionDiagnosticRadius = 11;

std::string pair_tag(const Pair& p) { return "r" + std::to_string(p.r) + "_R" + std::to_string(p.R); }

Json tech1_json(const Tech1Report& t) {
    Json j{{"convention", to_string(t.convention)},
           {"R", t.R},
           {"min_gap", t.min_gap},
           {"centers", t.centers},
           {"triples", t.triples},
           {"failures", t.failures}};
    if (t.failures) j["witness"] = Json{{"u", t.witness[0]}, {"v", t.witness[1]}, {"u2", t.witness[2]}};
    return j;
}

Json tech2_json(const Tech2Report& t) {
    Json j{{"convention", to_string(t.convention)},
           {"r", t.r},
           {"R", t.R},
           {"hypothesis", t.hypothesis},
           {"cosets", t.cosets},
           {"pairs", t.pairs},
           {"failures", t.failures},
           {"min_distance", json_number(t.min_distance)}};
    if (t.pairs) j["closest"] = Json{{"x", t.witness[0]}, {"y", t.witness[1]}};
    return j;
}

Json audit_json(const HnnPartition& p) {
    const auto& a = p.audit;
    return Json{{"pieces", p.pieces.size()},
                {"region", a.region},
                {"near_base", p.near_base.size()},
                {"uncovered", a.uncovered},
                {"interior_overlaps", a.interior_overlaps},
                {"bad_incidences", a.bad_incidences},
                {"intersection_mismatches", a.intersection_mismatches},
                {"boundary_mismatches", a.boundary_mismatches},
                {"z_points", a.z_points},
                {"z_cover_colors", a.cover_colors},
                {"z_cover_multiplicity", a.cover_multiplicity},
                {"z_cover_holds", a.cover_holds},
                {"clean", a.clean()}};
}

Json space_json(const HnnBall& ball, const DualGraphK& k, const LipschitzReport& lip) {
    return Json{{"radius", ball.radius},
                {"vertices", ball.elements.size()},
                {"dual_vertices", k.size()},
                {"reversed_cosets", k.reversed_count},
                {"lipschitz_edges", lip.edges},
                {"lipschitz_violations", lip.violations}};
}

// Both conventions on a smaller ball, for models the main run cannot build.
Json diagnostics_for(const HnnSpec& spec) {
    Json d;
    d["note"] = "oriented convention alongside the literal one; does not enter pass/fail";
    {
        auto ball = build_hnn_ball(spec, kTech1DiagnosticRadius);
        auto k = build_dual_graph(ball);
        Json r = space_json(ball, k, projection_lipschitz_scan(ball, k));
        for (const auto& p : kPairs) {
            Json q;
            for (auto c : {DConvention::kLiteral, DConvention::kOriented}) {
                q[std::string("tech1_") + to_string(c)] = tech1_json(tech1_scan(ball, k, p.R, c, p.R + 1));
                q[std::string("tech2_") + to_string(c)] = tech2_json(tech2_scan(ball, k, p.r, p.R, c));
            }
            r[pair_tag(p)] = q;
        }
        d["radius_" + std::to_string(kTech1DiagnosticRadius)] = r;
    }
    {
        auto ball = build_hnn_ball(spec, kPartitionDiagnosticRadius);
        auto k = build_dual_graph(ball);
        Json r = space_json(ball, k, projection_lipschitz_scan(ball, k));
        for (const auto& p : kPairs) {
            if (ball.radius - 1 < p.r + p.R) continue;
            Json q;
            for (auto c : {DConvention::kLiteral, DConvention::kOriented}) {
                q[std::string("tech2_") + to_string(c)] = tech2_json(tech2_scan(ball, k, p.r, p.R, c));
            }
            q["partition_oriented"] = audit_json(build_partition(ball, k, p.r, p.R));
            r[pair_tag(p)] = q;
        }
        d["radius_" + std::to_string(kPartitionDiagnosticRadius)] = r;
    }
    return d;
}

}  // namespace

SuiteResult suite_hnn(const RunConfig& config) {
    const int radius = config.radius.value_or(20);
    ReportBuilder rb("hnn", config);
    rb.parameter("radius", radius);
    Json pairs = Json::array();
    for (const auto& p : kPairs) pairs.push_back(Json{{"r", p.r}, {"R", p.R}});
    rb.parameter("pairs", pairs);
    rb.parameter("convention", "literal: D^u_R = g_u D_R");
    rb.parameter("levels", "|u| in {0, r, 2r, ...}");
    rb.parameter("tech1_min_gap", "R + 1");
    rb.parameter("metric", "exact group metric; separation paths inside the ball");

    CheckList checks;
    for (const char* name : {"i", "ii", "iii"}) {
        const HnnSpec spec = hnn_model(name);
        rb.input("hnn_model_" + spec.name,
                 "base = " + spec.base + "\nedge = " + spec.edge +
                     "\naction = " + (spec.action == HnnAction::kIdentity ? "identity" : "inversion") + "\n");
        std::unique_ptr<HnnBall> ball;
        std::unique_ptr<DualGraphK> k;
        Json space = nullptr;
        std::string cap_error;
        try {
            ball = std::make_unique<HnnBall>(build_hnn_ball(spec, radius));
            k = std::make_unique<DualGraphK>(build_dual_graph(*ball));
            space = space_json(*ball, *k, projection_lipschitz_scan(*ball, *k));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kCapExceeded) throw;
            cap_error = e.what();
        }
        for (const auto& p : kPairs) {
            checks.run("hnn/" + spec.name + "/" + pair_tag(p), [&] {
                if (!ball) fail(ErrorCode::kCapExceeded, cap_error);
                Outcome o;
                o.measured["space"] = space;
                auto t2 = tech2_scan(*ball, *k, p.r, p.R, DConvention::kLiteral);
                auto t1 = tech1_scan(*ball, *k, p.R, DConvention::kLiteral, p.R + 1);
                o.measured["tech2"] = tech2_json(t2);
                o.measured["tech1"] = tech1_json(t1);
                auto part = build_partition(*ball, *k, p.r, p.R);
                o.measured["partition"] = audit_json(part);
                std::ostringstream csv;
                write_partition_csv(*ball, *k, part, csv);
                rb.artifact("hnn_partition_" + spec.name + "_" + pair_tag(p) + ".csv", csv.str());

                const bool tech2_ok = t2.hypothesis && t2.pass() && t2.min_distance >= 2 * p.R;
                const bool tech1_ok = t1.pass() && t1.triples > 0;
                o.pass = tech2_ok && tech1_ok && part.audit.clean() && space["lipschitz_violations"] == 0;
                if (!tech1_ok) {
                    o.witness = o.measured["tech1"];
                } else if (!tech2_ok) {
                    o.witness = o.measured["tech2"];
                } else if (!o.pass) {
                    o.witness = o.measured["partition"];
                }
                return o;
            });
        }
        if (!ball) {
            rb.diagnostics()[spec.name] = Json{{"error", cap_error}};
            rb.diagnostics()[spec.name].update(diagnostics_for(spec));
        }
    }
    return rb.finish(checks);
}

}  // namespace relhyp::detail
