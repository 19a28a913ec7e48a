#pragma once

// Config-driven experiment runs behind the command-line tool. Everything is
// computed in memory; the caller decides where (and whether) to write.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vnlab/tolerances.hpp"

namespace vnlab {

struct ExperimentKind {
    std::string name;
    std::string description;
    std::vector<std::string> required;
    std::vector<std::string> optional;
    bool randomized = false;
};

// Stable order.
const std::vector<ExperimentKind>& experiment_kinds();
std::string list_experiments();

struct ExperimentConfig {
    std::string kind;
    nlohmann::json params;  // the whole config object
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    Tolerances tol;
};

// Throws InvalidArgument naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);

struct Artifact {
    std::string name;
    std::string content;
};

struct ExperimentResult {
    bool verdict = false;
    nlohmann::json summary;
    std::vector<Artifact> csvs;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

// result.json body: kind, version, seed, resolved tolerances, verdict, summary, artifact names.
nlohmann::json result_document(const ExperimentConfig& cfg, const ExperimentResult& r, const std::string& version);

}  // namespace vnlab
