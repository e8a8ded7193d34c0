#include "relhyp/relhyp.h"

#include <fstream>
#include <new>
#include <random>
#include <string>
#include <vector>

#include "relhyp/error.hpp"
#include "relhyp/graph.hpp"
#include "relhyp/sampling.hpp"
#include "relhyp/suites.hpp"

struct relhyp_config {
    relhyp::RunConfig config;
};

struct relhyp_result {
    relhyp::SuiteResult result;
    std::string json;
};

struct relhyp_graph {
    relhyp::WeightedGraph graph;
};

namespace {

thread_local std::string last_error;

relhyp_status to_status(relhyp::ErrorCode c) { return static_cast<relhyp_status>(static_cast<int>(c)); }

// Runs f, translating exceptions into a status and the thread's last error.
template <class F>
relhyp_status guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return RELHYP_OK;
    } catch (const relhyp::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown error";
    }
    return RELHYP_ERR_INTERNAL;
}

relhyp_status invalid(const char* what) {
    last_error = what;
    return RELHYP_ERR_INVALID;
}

template <class F>
relhyp_status run_command(const relhyp_config* config, relhyp_result** out, F&& command) {
    if (!config || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        relhyp::RunConfig c = config->config;
        relhyp::load_spec_file(c);
        auto* r = new relhyp_result{command(c), {}};
        r->json = relhyp::dump_report(r->result.report);
        *out = r;
    });
}

}  // namespace

extern "C" {

const char* relhyp_version(void) { return "1.0.0"; }
const char* relhyp_report_format_version(void) { return relhyp::kReportFormatVersion; }
const char* relhyp_graph_format_version(void) { return relhyp::kGraphFormatVersion; }
const char* relhyp_last_error(void) { return last_error.c_str(); }

relhyp_status relhyp_config_new(relhyp_config** out) {
    if (!out) return invalid("null argument");
    return guarded([&] { *out = new relhyp_config{}; });
}

relhyp_status relhyp_config_set(relhyp_config* config, const char* key, const char* value) {
    if (!config || !key || !value) return invalid("null argument");
    return guarded([&] {
        const std::string k = key, v = value;
        auto& c = config->config;
        if (k == "spec") {
            c.spec_path = v;
        } else if (k == "radius") {
            c.radius = relhyp::parse_int_flag(k, v);
        } else if (k == "depth") {
            c.depth = relhyp::parse_int_flag(k, v);
        } else if (k == "cutoff-L") {
            c.cutoff_L = relhyp::parse_real_flag(k, v);
        } else if (k == "threshold-K") {
            c.threshold_K = relhyp::parse_real_flag(k, v);
        } else if (k == "seed") {
            c.seed = relhyp::parse_seed_flag(v);
        } else {
            relhyp::fail(relhyp::ErrorCode::kParse, "unknown config key '" + k + "'");
        }
    });
}

void relhyp_config_free(relhyp_config* config) { delete config; }

size_t relhyp_suite_count(void) { return relhyp::suite_names().size(); }

const char* relhyp_suite_name(size_t index) {
    const auto& names = relhyp::suite_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

relhyp_status relhyp_verify(const relhyp_config* config, const char* suite, relhyp_result** out) {
    if (!suite) return invalid("null suite");
    const std::string name = suite;
    return run_command(config, out, [&](const relhyp::RunConfig& c) { return relhyp::run_suite(name, c); });
}

relhyp_status relhyp_build_space(const relhyp_config* config, relhyp_result** out) {
    return run_command(config, out, [](const relhyp::RunConfig& c) { return relhyp::build_space(c); });
}

relhyp_status relhyp_embed(const relhyp_config* config, relhyp_result** out) {
    return run_command(config, out, [](const relhyp::RunConfig& c) { return relhyp::embed(c); });
}

relhyp_status relhyp_report_bundle(const relhyp_config* config, relhyp_result** out) {
    return run_command(config, out, [](const relhyp::RunConfig& c) { return relhyp::report_bundle(c); });
}

int relhyp_result_exit_code(const relhyp_result* result) { return result ? result->result.exit_code() : -1; }

const char* relhyp_result_json(const relhyp_result* result) { return result ? result->json.c_str() : nullptr; }

size_t relhyp_result_artifact_count(const relhyp_result* result) {
    return result ? result->result.artifacts.size() : 0;
}

const char* relhyp_result_artifact_name(const relhyp_result* result, size_t index) {
    if (!result || index >= result->result.artifacts.size()) return nullptr;
    return result->result.artifacts[index].name.c_str();
}

const char* relhyp_result_artifact_data(const relhyp_result* result, size_t index, size_t* size) {
    if (!result || index >= result->result.artifacts.size()) return nullptr;
    const auto& a = result->result.artifacts[index];
    if (size) *size = a.content.size();
    return a.content.data();
}

relhyp_status relhyp_result_write(const relhyp_result* result, const char* out_dir, const char* stem) {
    if (!result || !out_dir || !stem) return invalid("null argument");
    return guarded([&] { relhyp::write_result(result->result, out_dir, stem); });
}

void relhyp_result_free(relhyp_result* result) { delete result; }

relhyp_status relhyp_graph_read(const char* path, relhyp_graph** out) {
    if (!path || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        std::ifstream in(path);
        if (!in) relhyp::fail(relhyp::ErrorCode::kIo, std::string("cannot read graph file '") + path + "'");
        *out = new relhyp_graph{relhyp::read_graph(in)};
    });
}

size_t relhyp_graph_num_vertices(const relhyp_graph* graph) { return graph ? graph->graph.num_vertices() : 0; }

size_t relhyp_graph_num_edges(const relhyp_graph* graph) { return graph ? graph->graph.num_edges() : 0; }

relhyp_status relhyp_graph_distance(const relhyp_graph* graph, uint32_t u, uint32_t v, double* out) {
    if (!graph || !out) return invalid("null argument");
    const auto n = graph->graph.num_vertices();
    if (u >= n || v >= n) return invalid("vertex out of range");
    return guarded([&] { *out = relhyp::single_source_distances(graph->graph, u)[v]; });
}

relhyp_status relhyp_graph_four_point_delta(const relhyp_graph* graph, uint64_t budget, uint64_t seed, double* out) {
    if (!graph || !out) return invalid("null argument");
    return guarded([&] {
        const std::uint64_t n = graph->graph.num_vertices();
        std::vector<relhyp::Quadruple> sample;
        if (relhyp::choose4(n) <= budget) {
            for (relhyp::VertexId a = 0; a < n; ++a)
                for (relhyp::VertexId b = a + 1; b < n; ++b)
                    for (relhyp::VertexId c = b + 1; c < n; ++c)
                        for (relhyp::VertexId d = c + 1; d < n; ++d) sample.push_back({a, b, c, d});
        } else {
            std::mt19937_64 rng(seed);
            for (std::uint64_t i = 0; i < budget; ++i) {
                relhyp::Quadruple q;
                for (int k = 0; k < 4; ++k) {
                    bool fresh;
                    do {
                        q[k] = static_cast<relhyp::VertexId>(relhyp::bounded(rng, n));
                        fresh = true;
                        for (int j = 0; j < k; ++j) fresh = fresh && q[j] != q[k];
                    } while (!fresh);
                }
                sample.push_back(q);
            }
        }
        relhyp::MetricOracle oracle(graph->graph);
        *out = relhyp::four_point_delta(oracle, sample).delta;
    });
}

void relhyp_graph_free(relhyp_graph* graph) { delete graph; }

}  // extern "C"
