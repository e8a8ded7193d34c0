// relhyp command-line driver. Links only the C API.

#include <cstdio>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "relhyp/relhyp.h"

namespace {

struct Flags {
    std::map<std::string, std::string> values;  // config key -> text
    std::string out = ".";
};

void add_flags(CLI::App* cmd, Flags& f) {
    for (const char* key : {"spec", "radius", "depth", "cutoff-L", "threshold-K", "seed"}) {
        std::string name = std::string("--") + key;
        cmd->add_option_function<std::string>(name, [&f, key](const std::string& v) { f.values[key] = v; },
                                              std::string("run parameter ") + key);
    }
    cmd->add_option("--out", f.out, "output directory")->capture_default_str();
}

int error_exit(relhyp_status s) {
    std::fprintf(stderr, "relhyp: %s\n", relhyp_last_error());
    // parse, cap and assertion codes map directly; other errors count as bad input
    if (s == RELHYP_ERR_PARSE || s == RELHYP_ERR_CAP || s == RELHYP_ERR_ASSERTION) return static_cast<int>(s);
    return s == RELHYP_ERR_INTERNAL ? 4 : 1;
}

template <class Command>
int run(const Flags& f, const std::string& stem, Command command) {
    relhyp_config* config = nullptr;
    if (relhyp_status s = relhyp_config_new(&config); s != RELHYP_OK) return error_exit(s);
    for (const auto& [k, v] : f.values) {
        if (relhyp_status s = relhyp_config_set(config, k.c_str(), v.c_str()); s != RELHYP_OK) {
            relhyp_config_free(config);
            return error_exit(s);
        }
    }
    relhyp_result* result = nullptr;
    relhyp_status s = command(config, &result);
    relhyp_config_free(config);
    if (s != RELHYP_OK) return error_exit(s);
    if (relhyp_status w = relhyp_result_write(result, f.out.c_str(), stem.c_str()); w != RELHYP_OK) {
        relhyp_result_free(result);
        return error_exit(w);
    }
    const int code = relhyp_result_exit_code(result);
    auto report = nlohmann::ordered_json::parse(relhyp_result_json(result));
    const std::string status = report["status"].get<std::string>();
    std::printf("%s: %s (%s/%s.json)\n", stem.c_str(), status.c_str(), f.out.c_str(), stem.c_str());
    for (const auto& c : report["checks"]) {
        if (c["status"] == "fail") {
            std::fprintf(stderr, "FAIL %s: %s\n", c["name"].get<std::string>().c_str(), c["witness"].dump().c_str());
        } else if (c["status"] == "blocked") {
            std::fprintf(stderr, "BLOCKED %s: %s\n", c["name"].get<std::string>().c_str(),
                         c["error"].get<std::string>().c_str());
        }
    }
    relhyp_result_free(result);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relatively hyperbolic group experiments: build spaces, verify suites, emit reports"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(relhyp_version()));

    Flags build_flags, verify_flags, embed_flags, bundle_flags;
    std::string suite;

    auto* build = app.add_subcommand("build-space", "build a Cayley or Bowditch ball and write it as a graph file");
    add_flags(build, build_flags);
    auto* verify = app.add_subcommand("verify", "run one verification suite");
    std::string suites;
    for (size_t i = 0; i < relhyp_suite_count(); ++i) suites += std::string(i ? " | " : "") + relhyp_suite_name(i);
    verify->add_option("suite", suite, suites)->required();
    add_flags(verify, verify_flags);
    auto* emb = app.add_subcommand("embed", "compose the product embedding and dump its coordinates");
    add_flags(emb, embed_flags);
    auto* bundle = app.add_subcommand("report-bundle", "run every suite and write all reports with an index");
    add_flags(bundle, bundle_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*build) return run(build_flags, "build-space", relhyp_build_space);
    if (*verify) {
        return run(verify_flags, suite, [&](const relhyp_config* c, relhyp_result** r) {
            return relhyp_verify(c, suite.c_str(), r);
        });
    }
    if (*emb) return run(embed_flags, "embedding", relhyp_embed);
    return run(bundle_flags, "bundle", relhyp_report_bundle);
}
