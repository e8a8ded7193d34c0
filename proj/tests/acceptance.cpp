// Acceptance driver: one PASS/FAIL line per criterion, judged from the suite reports.
// Usage: relhyp_acceptance [criterion...]   (default: all of 1..11)

#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "relhyp/relhyp.h"

namespace {

using Json = nlohmann::ordered_json;

struct Criterion {
    int id;
    const char* title;
    const char* suite;
    std::vector<std::string> checks;  // check names this criterion owns
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "horoball distance lemma", "horoball",
         {"distance_lemma/path_20", "distance_lemma/cycle_12", "distance_lemma/F2_ball_3"}},
        {2, "relative hyperbolicity witness", "horoball",
         {"hyperbolicity/Z2,Z2/all", "hyperbolicity_control/Z2/none"}},
        {3, "projection axioms", "axioms", {"projection_axioms/Z1,Z1/all", "projection_axioms/Z2,Z2/all"}},
        {4, "distance formula fit", "distform", {"distance_formula/Z1,Z1/all", "distance_formula/Z2,Z2/all"}},
        {5, "quasi-tree certification", "quasitree", {"bottleneck_stability/Z1,Z1/all", "control/cycle_24"}},
        {6, "composed embedding", "embed", {"composed_embedding/Z1,Z1/all"}},
        {7, "free-product join", "embed", {"free_product_join/Z2,F2/all"}},
        {8, "horoball covers", "covers", {"horoball_cover/path_200", "pullback/path_200"}},
        {9, "boundary cover projection", "covers", {"boundary_cylinders/F2/none", "boundary_ball_cover/Z2,Z2/all"}},
        {10, "HNN partition", "hnn",
         {"hnn/i/r8_R2", "hnn/i/r12_R3", "hnn/ii/r8_R2", "hnn/ii/r12_R3", "hnn/iii/r8_R2", "hnn/iii/r12_R3"}},
        {11, "determinism", nullptr, {}},
    };
    return list;
}

// JSON plus every artifact, the full byte content a run writes.
struct Run {
    bool ok = false;
    std::string error;
    std::string json;
    std::vector<std::pair<std::string, std::string>> artifacts;
};

Run run_suite(const std::string& suite) {
    Run run;
    relhyp_config* config = nullptr;
    relhyp_result* result = nullptr;
    if (relhyp_config_new(&config) != RELHYP_OK || relhyp_verify(config, suite.c_str(), &result) != RELHYP_OK) {
        run.error = relhyp_last_error();
        relhyp_config_free(config);
        return run;
    }
    relhyp_config_free(config);
    run.ok = true;
    run.json = relhyp_result_json(result);
    for (size_t i = 0; i < relhyp_result_artifact_count(result); ++i) {
        size_t size = 0;
        const char* data = relhyp_result_artifact_data(result, i, &size);
        run.artifacts.emplace_back(relhyp_result_artifact_name(result, i), std::string(data, size));
    }
    relhyp_result_free(result);
    return run;
}

std::map<std::string, Run> cache;

const Run& first_run(const std::string& suite) {
    auto it = cache.find(suite);
    if (it == cache.end()) it = cache.emplace(suite, run_suite(suite)).first;
    return it->second;
}

// Empty when every owned check passed; otherwise the reasons.
std::string judge(const Criterion& c) {
    const Run& run = first_run(c.suite);
    if (!run.ok) return "suite error: " + run.error;
    const Json report = Json::parse(run.json);
    std::string reasons;
    std::set<std::string> seen;
    for (const auto& check : report["checks"]) {
        const std::string name = check["name"].get<std::string>();
        bool owned = false;
        for (const auto& n : c.checks) owned = owned || n == name;
        if (!owned) continue;
        seen.insert(name);
        const std::string status = check["status"].get<std::string>();
        if (status == "pass") continue;
        reasons += (reasons.empty() ? "" : "; ") + name + " " + status;
        if (status == "blocked") reasons += " (" + check["error"].get<std::string>() + ")";
        if (status == "fail") reasons += " witness " + check["witness"].dump();
    }
    for (const auto& n : c.checks)
        if (!seen.count(n)) reasons += (reasons.empty() ? "" : "; ") + n + " missing from report";
    return reasons;
}

std::string judge_determinism() {
    std::string reasons;
    for (size_t i = 0; i < relhyp_suite_count(); ++i) {
        const std::string suite = relhyp_suite_name(i);
        const Run& a = first_run(suite);
        const Run b = run_suite(suite);
        if (!a.ok || !b.ok) {
            reasons += (reasons.empty() ? "" : "; ") + suite + " error: " + (a.ok ? b.error : a.error);
        } else if (a.json != b.json || a.artifacts != b.artifacts) {
            reasons += (reasons.empty() ? "" : "; ") + suite + " differs between runs";
        }
    }
    return reasons;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        char* end = nullptr;
        const long id = std::strtol(argv[i], &end, 10);
        if (*end || id < 1 || id > static_cast<long>(criteria().size())) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
            return 1;
        }
        wanted.insert(static_cast<int>(id));
    }
    bool all_pass = true;
    for (const auto& c : criteria()) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const std::string reasons = c.suite ? judge(c) : judge_determinism();
        all_pass = all_pass && reasons.empty();
        if (reasons.empty()) {
            std::printf("PASS %d %s\n", c.id, c.title);
        } else {
            std::printf("FAIL %d %s: %s\n", c.id, c.title, reasons.c_str());
        }
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
