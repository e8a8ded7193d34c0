#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relhyp/report.hpp"

namespace relhyp {

// Parameters shared by every command. Unset optionals take the suite default,
// and the resolved values are echoed into the report.
struct RunConfig {
    std::string spec_path;  // group spec, or a graph file for the quasitree suite
    std::string spec_text;  // contents of spec_path, loaded by load_spec_file
    std::optional<int> radius;
    std::optional<int> depth;
    double cutoff_L = 4;
    std::optional<double> threshold_K;
    std::uint64_t seed = 1;
    std::string out_dir = ".";

    Json to_json() const;
};

// Reads spec_path into spec_text; kIo when the file cannot be read.
void load_spec_file(RunConfig& config);

// Integer and real flag values; kParse on anything else.
int parse_int_flag(const std::string& name, const std::string& value);
double parse_real_flag(const std::string& name, const std::string& value);
std::uint64_t parse_seed_flag(const std::string& value);

struct Artifact {
    std::string name;  // file name inside the output directory
    std::string content;
};

struct SuiteResult {
    Json report;
    std::vector<Artifact> artifacts;
    bool pass = false;
    bool blocked = false;  // some check could not run because of the vertex cap

    // 0 on pass, 3 when a computed check failed, 2 when only cap-blocked checks remain
    int exit_code() const;
};

const std::vector<std::string>& suite_names();

// Runs one suite. Throws kParse for an unknown name. Cap errors inside a check
// mark that check as blocked instead of propagating.
SuiteResult run_suite(const std::string& name, const RunConfig& config);

// Group-spec or graph-file space with its files and a build report.
SuiteResult build_space(const RunConfig& config);

// Product embedding of the configured group with its CSV dump.
SuiteResult embed(const RunConfig& config);

// Every suite in order, plus an index of their hashes and verdicts.
SuiteResult report_bundle(const RunConfig& config);

// Writes the report as <stem>.json and each artifact next to it; kIo on failure.
void write_result(const SuiteResult& result, const std::string& out_dir, const std::string& stem);

}  // namespace relhyp
