#pragma once

// Shared between the suite translation units; not installed.

#include <functional>
#include <string>
#include <vector>

#include "relhyp/error.hpp"
#include "relhyp/group.hpp"
#include "relhyp/suites.hpp"

namespace relhyp::detail {

struct Outcome {
    bool pass = false;
    Json measured = Json::object();
    Json witness = nullptr;  // serialized when the check fails
    std::string blocked;     // cap error that stopped part of the check
};

// Runs f; a cap error is recorded under measured[key] and marks the outcome
// blocked. Returns whether f completed.
template <class F>
bool attempt(Outcome& o, const std::string& key, F&& f) {
    try {
        f();
        return true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::kCapExceeded) throw;
        o.measured[key] = Json{{"error", e.what()}};
        if (o.blocked.empty()) o.blocked = e.what();
        return false;
    }
}

// Ordered list of named checks. A cap error inside a check blocks it and an
// assertion error fails it with the message as witness; other errors propagate.
class CheckList {
public:
    void run(const std::string& name, const std::function<Outcome()>& body);

    const Json& json() const { return checks_; }
    bool failed() const { return failed_; }
    bool blocked() const { return blocked_; }
    // Witness of the first failed check, or null.
    const Json& first_witness() const { return first_witness_; }

private:
    Json checks_ = Json::array();
    bool failed_ = false, blocked_ = false;
    Json first_witness_ = nullptr;
};

class ReportBuilder {
public:
    ReportBuilder(std::string suite, const RunConfig& config);

    void input(const std::string& name, const std::string& content);
    void parameter(const std::string& key, Json value) { parameters_[key] = std::move(value); }
    Json& diagnostics() { return diagnostics_; }
    void artifact(std::string name, std::string content);

    SuiteResult finish(const CheckList& checks);

private:
    std::string suite_;
    Json config_;
    Json inputs_ = Json::array();
    Json parameters_ = Json::object();
    Json diagnostics_ = Json::object();
    std::vector<Artifact> artifacts_;
};

// "Z,Z/all" style identifier, and the same with file-name-safe characters.
std::string spec_id(const RelHypSpec& spec);
std::string file_tag(const std::string& id);

// The user spec when one was given, otherwise the defaults.
std::vector<RelHypSpec> specs_or(const RunConfig& config, const std::vector<RelHypSpec>& defaults);

// The first line of a graph file is "V E"; group specs are key-value lines.
bool looks_like_graph(const std::string& text);

std::string vertex_text(const WeightedGraph& g, VertexId v);

SuiteResult suite_horoball(const RunConfig& config);
SuiteResult suite_axioms(const RunConfig& config);
SuiteResult suite_distform(const RunConfig& config);
SuiteResult suite_quasitree(const RunConfig& config);
SuiteResult suite_embed(const RunConfig& config);
SuiteResult suite_covers(const RunConfig& config);
SuiteResult suite_hnn(const RunConfig& config);

}  // namespace relhyp::detail
