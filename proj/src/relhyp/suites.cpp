#include "relhyp/suites.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "relhyp/bowditch.hpp"
#include "relhyp/embeddings.hpp"
#include "relhyp/error.hpp"
#include "relhyp/graph.hpp"
#include "relhyp/suite_detail.hpp"

namespace relhyp {

namespace {

Json optional_json(const std::optional<int>& v) { return v ? Json(*v) : Json("default"); }

}  // namespace

Json RunConfig::to_json() const {
    Json j;
    j["spec"] = spec_path.empty() ? Json(nullptr) : Json(spec_path);
    j["radius"] = optional_json(radius);
    j["depth"] = optional_json(depth);
    j["cutoff_L"] = json_number(cutoff_L);
    j["threshold_K"] = threshold_K ? json_number(*threshold_K) : Json("xi3+1");
    j["seed"] = seed;
    j["cap_vertices"] = vertex_cap();
    return j;
}

void load_spec_file(RunConfig& config) {
    if (config.spec_path.empty()) return;
    std::ifstream in(config.spec_path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot read spec file '" + config.spec_path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    config.spec_text = s.str();
}

int parse_int_flag(const std::string& name, const std::string& value) {
    int v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) {
        fail(ErrorCode::kParse, "--" + name + " expects an integer, got '" + value + "'");
    }
    if (v < 0) fail(ErrorCode::kParse, "--" + name + " must be non-negative");
    return v;
}

double parse_real_flag(const std::string& name, const std::string& value) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(v)) {
        fail(ErrorCode::kParse, "--" + name + " expects a number, got '" + value + "'");
    }
    return v;
}

std::uint64_t parse_seed_flag(const std::string& value) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) {
        fail(ErrorCode::kParse, "--seed expects an unsigned integer, got '" + value + "'");
    }
    return v;
}

int SuiteResult::exit_code() const {
    if (pass) return 0;
    const std::string status = report.value("status", "");
    return status == "blocked" ? 2 : 3;
}

namespace detail {

void CheckList::run(const std::string& name, const std::function<Outcome()>& body) {
    Json entry;
    entry["name"] = name;
    try {
        Outcome o = body();
        const bool blocked = !o.blocked.empty() && !o.pass;
        entry["status"] = o.pass ? "pass" : blocked ? "blocked" : "fail";
        entry["measured"] = std::move(o.measured);
        if (blocked) {
            entry["error"] = o.blocked;
            blocked_ = true;
        } else if (!o.pass) {
            entry["witness"] = o.witness;
            if (!failed_) first_witness_ = Json{{"check", name}, {"witness", o.witness}};
            failed_ = true;
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kCapExceeded) {
            entry["status"] = "blocked";
            entry["error"] = e.what();
            blocked_ = true;
        } else if (e.code() == ErrorCode::kAssertion) {
            entry["status"] = "fail";
            entry["witness"] = e.what();
            if (!failed_) first_witness_ = Json{{"check", name}, {"witness", e.what()}};
            failed_ = true;
        } else {
            throw;
        }
    }
    checks_.push_back(std::move(entry));
}

ReportBuilder::ReportBuilder(std::string suite, const RunConfig& config)
    : suite_(std::move(suite)), config_(config.to_json()) {
    if (!config.spec_path.empty()) input("spec_file", config.spec_text);
}

void ReportBuilder::input(const std::string& name, const std::string& content) {
    inputs_.push_back(Json{{"name", name}, {"sha1", git_blob_sha1(content)}});
}

void ReportBuilder::artifact(std::string name, std::string content) {
    artifacts_.push_back({std::move(name), std::move(content)});
}

SuiteResult ReportBuilder::finish(const CheckList& checks) {
    SuiteResult r;
    r.pass = !checks.failed() && !checks.blocked();
    r.blocked = checks.blocked();
    const char* status = checks.failed() ? "fail" : checks.blocked() ? "blocked" : "pass";
    Json& j = r.report;
    j["format_version"] = kReportFormatVersion;
    j["graph_format_version"] = kGraphFormatVersion;
    j["suite"] = suite_;
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["parameters"] = parameters_;
    j["checks"] = checks.json();
    j["diagnostics"] = diagnostics_;
    Json arts = Json::array();
    for (const auto& a : artifacts_) arts.push_back(Json{{"name", a.name}, {"sha1", git_blob_sha1(a.content)}});
    j["artifacts"] = arts;
    j["status"] = status;
    j["witness"] = checks.first_witness();
    r.artifacts = std::move(artifacts_);
    return r;
}

std::string spec_id(const RelHypSpec& spec) {
    std::string text = spec.to_text();
    // "factors = X\nperipheral_mode = Y\n" -> "X/Y"
    auto value = [&](std::size_t line) {
        std::istringstream in(text);
        std::string s;
        for (std::size_t i = 0; i <= line; ++i) std::getline(in, s);
        return s.substr(s.find('=') + 2);
    };
    return value(0) + "/" + value(1);
}

std::string file_tag(const std::string& id) {
    std::string out;
    for (char c : id) out += c == ',' ? '-' : c == '/' || c == ':' ? '_' : c;
    return out;
}

std::vector<RelHypSpec> specs_or(const RunConfig& config, const std::vector<RelHypSpec>& defaults) {
    if (config.spec_text.empty()) return defaults;
    return {RelHypSpec::parse(config.spec_text)};
}

bool looks_like_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        long v = -1, e = -1;
        std::string rest;
        return static_cast<bool>(ls >> v >> e) && !(ls >> rest) && v >= 0 && e >= 0;
    }
    return false;
}

std::string vertex_text(const WeightedGraph& g, VertexId v) {
    return g.has_labels() ? g.label(v) : std::to_string(v);
}

}  // namespace detail

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"horoball", "axioms", "distform", "quasitree",
                                                "embed",    "covers", "hnn"};
    return names;
}

SuiteResult run_suite(const std::string& name, const RunConfig& config) {
    using namespace detail;
    if (name == "horoball") return suite_horoball(config);
    if (name == "axioms") return suite_axioms(config);
    if (name == "distform") return suite_distform(config);
    if (name == "quasitree") return suite_quasitree(config);
    if (name == "embed") return suite_embed(config);
    if (name == "covers") return suite_covers(config);
    if (name == "hnn") return suite_hnn(config);
    fail(ErrorCode::kParse, "unknown suite '" + name + "'");
}

SuiteResult build_space(const RunConfig& config) {
    using namespace detail;
    if (config.spec_text.empty()) fail(ErrorCode::kParse, "build-space needs --spec");
    const RelHypSpec spec = RelHypSpec::parse(config.spec_text);
    const int radius = config.radius.value_or(4);
    const int depth = config.depth.value_or(0);
    ReportBuilder rb("build-space", config);
    rb.parameter("spec", spec_id(spec));
    rb.parameter("radius", radius);
    rb.parameter("depth", depth);
    rb.parameter("predicted_cayley_size", json_number(predicted_ball_size(spec, radius)));

    CheckList checks;
    checks.run("build", [&] {
        auto g = build_group_space(spec, radius);
        Outcome o;
        o.measured["cayley_vertices"] = g.ball.size();
        o.measured["cayley_edges"] = g.ball.graph.num_edges();
        o.measured["peripheral_cosets"] = g.cosets.cosets.size();
        o.measured["predicted_vertices"] = predicted_bowditch_size(g, depth);
        auto b = build_bowditch(g, depth);
        WeightedGraph graph = b.graph;
        std::vector<std::string> labels(graph.num_vertices());
        for (VertexId v = 0; v < graph.num_vertices(); ++v) labels[v] = bowditch_label(b, v);
        graph.set_labels(std::move(labels));
        o.measured["vertices"] = graph.num_vertices();
        o.measured["edges"] = graph.num_edges();
        // Ball distances equal group distances when |x| + |y| <= radius.
        o.measured["exact_region_radius"] = radius;
        std::ostringstream gs, ls;
        write_graph(graph, gs);
        write_labels(graph, ls);
        rb.artifact("space.graph", gs.str());
        rb.artifact("space.labels", ls.str());
        o.pass = true;
        return o;
    });
    return rb.finish(checks);
}

SuiteResult embed(const RunConfig& config) {
    using namespace detail;
    const RelHypSpec spec = specs_or(config, {RelHypSpec::from_fields("Z,Z", "all")})[0];
    const int radius = config.radius.value_or(6);
    ReportBuilder rb("embed", config);
    rb.input(spec_id(spec), spec.to_text());
    rb.parameter("spec", spec_id(spec));
    rb.parameter("radius", radius);
    rb.parameter("inner_radius", radius - 1);
    rb.parameter("final_coordinate", "coned_off");

    CheckList checks;
    checks.run("embedding", [&] {
        auto g = build_group_space(spec, radius);
        auto coned = build_coned_off(g);
        double K = 0;
        int xi3 = 0;
        if (config.threshold_K) {
            K = *config.threshold_K;
            xi3 = static_cast<int>(std::ceil(K)) - 1;
        } else {
            auto ax = verify_axioms(build_projection_table(g, default_inner_radius(radius)), coned);
            xi3 = ax.xi3;
            K = xi3 + 1.0;
        }
        auto complex = build_projection_complex(g, radius - 1, K, xi3);
        auto f = compose_embedding(g, complex, coned);
        auto rep = distortion_report(f, exact_region_pairs(g.ball));
        Outcome o;
        o.measured["K"] = json_number(K);
        o.measured["trees"] = f.num_trees();
        o.measured["complex_vertices"] = complex.cosets.size();
        o.measured["complex_edges"] = complex.edges.size();
        o.measured["pairs"] = rep.pairs;
        o.measured["lambda"] = json_number(rep.fit.lambda);
        o.measured["mu"] = json_number(rep.fit.mu);
        o.measured["unit_mu"] = json_number(rep.fit.unit_mu);
        o.measured["fallback"] = rep.fit.fallback;
        o.measured["nearest_assigned"] = f.nearest_assigned;
        std::ostringstream csv;
        write_embedding_csv(f, csv);
        rb.artifact("embedding_" + file_tag(spec_id(spec)) + "_R" + std::to_string(radius) + ".csv", csv.str());
        o.pass = std::isfinite(rep.fit.lambda) && !rep.fit.fallback;
        if (!o.pass) o.witness = Json{{"x", g.ball.elements[rep.worst_x].label()}, {"y", g.ball.elements[rep.worst_y].label()}};
        return o;
    });
    return rb.finish(checks);
}

SuiteResult report_bundle(const RunConfig& config) {
    using namespace detail;
    ReportBuilder rb("report-bundle", config);
    CheckList checks;
    for (const auto& name : suite_names()) {
        SuiteResult s = run_suite(name, config);
        const std::string text = dump_report(s.report);
        rb.artifact(name + ".json", text);
        for (auto& a : s.artifacts) rb.artifact(std::move(a.name), std::move(a.content));
        checks.run(name, [&] {
            Outcome o;
            o.measured["status"] = s.report["status"];
            o.measured["report_sha1"] = git_blob_sha1(text);
            o.pass = s.pass;
            if (!s.pass) o.witness = s.report["witness"];
            if (s.blocked && !s.pass && s.report["status"] == "blocked") {
                // a cap-blocked suite is reported as blocked, not failed
                throw Error(ErrorCode::kCapExceeded, name + " blocked by the vertex cap");
            }
            return o;
        });
    }
    return rb.finish(checks);
}

void write_result(const SuiteResult& result, const std::string& out_dir, const std::string& stem) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + out_dir + "'");
    auto put = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        out << content;
        if (!out) fail(ErrorCode::kIo, "cannot write '" + (fs::path(out_dir) / name).string() + "'");
    };
    for (const auto& a : result.artifacts) put(a.name, a.content);
    put(stem + ".json", dump_report(result.report));
}

}  // namespace relhyp
