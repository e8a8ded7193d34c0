#include <sstream>

#include "relhyp/bowditch.hpp"
#include "relhyp/covers.hpp"
#include "relhyp/error.hpp"
#include "relhyp/suite_detail.hpp"

namespace relhyp::detail {

namespace {

constexpr std::size_t kPathLength = 200;
constexpr int kBoundaryGroupRadius = 4;
constexpr int kBoundaryDepth = 2;

Json audit_json(const CoverAudit& a) {
    return Json{{"max_diameter", json_number(a.max_diameter)},
                {"min_separation", json_number(a.min_separation)},
                {"uncovered", a.uncovered},
                {"overlaps", a.overlaps},
                {"holds", a.holds}};
}

Json projection_json(const BoundaryProjection& bp) {
    Json j;
    j["sphere_points"] = bp.sphere.size();
    j["projected_subsets"] = bp.cover.num_subsets();
    j["uncovered"] = bp.uncovered;
    j["ball_separation"] = json_number(bp.ball_separation);
    j["ball_diameter"] = json_number(bp.ball_diameter);
    j["visual_separation"] = json_number(bp.visual_separation);
    j["visual_diameter"] = json_number(bp.visual_diameter);
    j["separation_shape"] = json_number(bp.sep_shape);
    j["diameter_shape"] = json_number(bp.diam_shape);
    j["separation_ratio"] = json_number(bp.sep_ratio);
    j["diameter_ratio"] = json_number(bp.diam_ratio);
    j["shapes_hold"] = bp.shapes_hold;
    j["shapes_match"] = bp.shapes_match;
    j["point_multiplicity"] = bp.point_multiplicity;
    j["visual_multiplicity"] = bp.visual_multiplicity;
    return j;
}

std::vector<VertexId> all_vertices(const WeightedGraph& g) {
    std::vector<VertexId> v(g.num_vertices());
    for (VertexId i = 0; i < v.size(); ++i) v[i] = i;
    return v;
}

}  // namespace

SuiteResult suite_covers(const RunConfig& config) {
    const int depth = config.depth.value_or(8);
    const HoroballCoverParams hp{depth, 2, 2, 2, 2};
    const BoundaryProjectionParams bpp{3, 5, 0.2, 4, 6000};
    const CoverSpec ball_spec{2, 6, 3, true};
    const RelHypSpec f2 = RelHypSpec::from_fields("F2", "none");
    const RelHypSpec zz = specs_or(config, {RelHypSpec::from_fields("Z2,Z2", "all")})[0];

    ReportBuilder rb("covers", config);
    WeightedGraph path = path_graph(kPathLength);
    {
        std::ostringstream s;
        write_graph(path, s);
        rb.input("path_200", s.str());
    }
    rb.input(spec_id(f2), f2.to_text());
    rb.input(spec_id(zz), zz.to_text());
    rb.parameter("horoball_depth", depth);
    rb.parameter("band_scan_R", hp.R);
    rb.parameter("base_colors", hp.base_colors);
    rb.parameter("base_ratio", hp.base_ratio);
    rb.parameter("max_colors", hp.base_colors + 1);
    rb.parameter("ratio_tolerance", 0.05);
    rb.parameter("multiplicity_witness", "closed balls of radius r/2 around vertices");
    rb.parameter("boundary_R", bpp.R);
    rb.parameter("boundary_T", bpp.T);
    rb.parameter("epsilon", bpp.epsilon);
    rb.parameter("shape_factor", bpp.factor);
    rb.parameter("sphere", "annulus T <= d(o, x) < T + 1");
    rb.parameter("tree", spec_id(f2) + " ball of radius 6");
    rb.parameter("bowditch", spec_id(zz) + " group radius 4, horoball depth 2");
    rb.parameter("ball_cover", Json{{"r", ball_spec.r}, {"D", ball_spec.D}, {"colors", ball_spec.n_colors}});

    CheckList checks;
    HoroballCover hc;
    bool have_hc = false;
    checks.run("horoball_cover/path_200", [&] {
        hc = horoball_cover(path, hp);
        have_hc = true;
        Outcome o;
        const auto& g = hc.horoball.graph;
        o.measured["vertices"] = g.num_vertices();
        o.measured["ok"] = hc.ok;
        o.measured["colors"] = hc.cover.num_colors();
        o.measured["nonempty_colors"] = hc.cover.nonempty_colors();
        o.measured["subsets"] = hc.cover.num_subsets();
        o.measured["declared_r"] = json_number(hc.cover.r);
        o.measured["declared_D"] = json_number(hc.cover.D);
        o.measured["declared_scale"] = json_number(hc.declared_scale);
        if (!hc.ok) {
            o.measured["failed_band"] = hc.failed_band;
            o.witness = Json{{"failed_band", hc.failed_band}, {"remainder", hc.remainder}};
            return o;
        }
        auto a = audit_cover(g, hc.cover, all_vertices(g));
        auto m = r_multiplicity(g, hc.cover, hc.declared_scale);
        auto br = band_ratio_summary(hc);
        o.measured["audit"] = audit_json(a);
        o.measured["multiplicity"] = m.value;
        Json bands = Json::array();
        for (const auto& b : hc.bands) {
            bands.push_back(Json{{"bottom", b.bottom},
                                 {"top", b.top},
                                 {"scale", json_number(b.scale)},
                                 {"bound", json_number(b.bound)},
                                 {"subsets", b.subsets},
                                 {"degenerate", b.degenerate},
                                 {"ratio_dn", json_number(b.ratio_dn)}});
        }
        o.measured["bands"] = bands;
        o.measured["band_ratio"] = Json{{"bands", br.bands},
                                        {"min", json_number(br.ratio_min)},
                                        {"max", json_number(br.ratio_max)},
                                        {"level_independent", br.level_independent}};
        const std::size_t max_colors = static_cast<std::size_t>(hp.base_colors + 1);
        o.pass = hc.cover.nonempty_colors() == max_colors && hc.cover.num_colors() == max_colors && a.holds &&
                 a.overlaps == 0 && m.value <= max_colors && br.level_independent;
        if (!o.pass) {
            o.witness = Json{{"multiplicity_center", m.center == kNoVertex ? Json(nullptr) : Json(m.center)},
                             {"band_ratio", o.measured["band_ratio"]}};
        }
        std::ostringstream cj;
        write_cover_json(hc.cover, cj);
        rb.artifact("covers_horoball_path_200.json", cj.str());
        return o;
    });

    checks.run("pullback/path_200", [&] {
        Outcome o;
        if (!have_hc || !hc.ok) {
            o.witness = "no horoball cover";
            return o;
        }
        std::vector<int> levels;
        for (int n = 0; n <= depth; ++n) levels.push_back(n);
        auto s = pullback_summary(hc, levels);
        Json slices = Json::array();
        for (const auto& sl : s.slices) {
            slices.push_back(Json{{"level", sl.level},
                                  {"subsets", sl.subsets},
                                  {"degenerate", sl.degenerate},
                                  {"diam_base", json_number(sl.diam_base)},
                                  {"sep_base", json_number(sl.sep_base)},
                                  {"ratio", json_number(sl.ratio)}});
        }
        o.measured["slices"] = slices;
        o.measured["measured"] = s.measured;
        o.measured["ratio_min"] = json_number(s.ratio_min);
        o.measured["ratio_max"] = json_number(s.ratio_max);
        o.measured["dn_bound"] = json_number(s.bound);
        o.measured["dn_bound_holds"] = s.bound_holds;
        o.pass = s.measured >= 2 && s.level_independent;
        if (!o.pass) o.witness = Json{{"ratio_min", o.measured["ratio_min"]}, {"ratio_max", o.measured["ratio_max"]}};
        return o;
    });

    checks.run("boundary_cylinders/" + spec_id(f2), [&] {
        auto g = build_group_space(f2, 6);
        const auto& graph = g.ball.graph;
        auto cyl = sphere_singletons(graph, 0, bpp.R);
        auto bp = boundary_cover_projection(graph, 0, cyl, bpp);
        Outcome o;
        o.measured["cylinders"] = cyl.num_subsets();
        o.measured["projection"] = projection_json(bp);
        o.pass = bp.uncovered == 0 && bp.point_multiplicity == 1 && bp.visual_multiplicity == 1;
        if (!o.pass) o.witness = o.measured["projection"];
        return o;
    });

    checks.run("boundary_ball_cover/" + spec_id(zz), [&] {
        Outcome o;
        auto g = build_group_space(zz, kBoundaryGroupRadius);
        auto b = build_bowditch(g, kBoundaryDepth);
        o.measured["vertices"] = b.graph.num_vertices();
        auto gc = ball_cover(b.graph, b.base_point, bpp.R, ball_spec);
        o.measured["ball_cover_ok"] = gc.ok();
        o.measured["ball_cover_subsets"] = gc.cover.num_subsets();
        if (!gc.ok()) {
            Json rem = Json::array();
            for (VertexId v : gc.remainder) rem.push_back(bowditch_label(b, v));
            o.witness = Json{{"remainder", rem}};
            return o;
        }
        auto d = single_source_distances(b.graph, b.base_point);
        std::vector<VertexId> ball;
        for (VertexId v = 0; v < b.graph.num_vertices(); ++v)
            if (d[v] <= bpp.R + 1e-9) ball.push_back(v);
        auto a = audit_cover(b.graph, gc.cover, ball);
        o.measured["ball_cover_audit"] = audit_json(a);
        auto bp = boundary_cover_projection(b.graph, b.base_point, gc.cover, bpp);
        o.measured["projection"] = projection_json(bp);
        const auto colors = static_cast<std::size_t>(ball_spec.n_colors);
        o.pass = a.holds && bp.uncovered == 0 && bp.point_multiplicity <= colors &&
                 bp.visual_multiplicity <= colors && bp.shapes_match;
        if (!o.pass) o.witness = o.measured["projection"];

        std::ostringstream bc, pc, sc;
        write_cover_json(gc.cover, bc);
        write_cover_json(bp.cover, pc);
        if (!bp.sphere.empty()) {
            MetricOracle oracle(b.graph);
            VisualParams vp{bpp.epsilon, 1.0};
            std::vector<VertexId> refs{bp.sphere.front()};
            write_sphere_csv(b, oracle, vp, bp.sphere, refs, sc);
        }
        rb.artifact("covers_ball_" + file_tag(spec_id(zz)) + ".json", bc.str());
        rb.artifact("covers_boundary_" + file_tag(spec_id(zz)) + ".json", pc.str());
        rb.artifact("covers_sphere_" + file_tag(spec_id(zz)) + ".csv", sc.str());
        return o;
    });
    return rb.finish(checks);
}

}  // namespace relhyp::detail
