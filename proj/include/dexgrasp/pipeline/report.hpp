#pragma once

#include <string>

#include <json.hpp>

#include "dexgrasp/pipeline/config.hpp"

namespace dexgrasp::pipeline {

struct EvaluationReport {
    nlohmann::json json;
    /// False when any section was skipped.
    bool complete = true;
};

/// Runs every harness: metric recall, parser scores, closure fits, grasp
/// scores, feature ranking and per-object simulated grasps. Each section
/// loads its own inputs; one whose inputs are missing or malformed is
/// marked "skipped" with the reason. Deterministic for a given config.
EvaluationReport evaluate_all(const PipelineConfig& config);

/// The report as aligned text tables.
std::string render_table(const nlohmann::json& report);

}  // namespace dexgrasp::pipeline
