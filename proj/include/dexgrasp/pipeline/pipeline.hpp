#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dexgrasp/hand/planner.hpp"
#include "dexgrasp/kb/knowledge_base.hpp"
#include "dexgrasp/learner/grasp.hpp"
#include "dexgrasp/parser/description_parser.hpp"
#include "dexgrasp/pipeline/config.hpp"

namespace dexgrasp::pipeline {

enum class RetrievalMethod { attributes, label };

struct Retrieval {
    kb::Match match;
    RetrievalMethod method = RetrievalMethod::attributes;
};

struct PipelineResult {
    std::string description;
    parser::ParseResult parse;  ///< after imputation
    Retrieval retrieval;
    kb::EncodedFeatures encoded;  ///< of the retrieved record
    learner::GraspDistribution distribution;
    learner::GraspClass selected = learner::GraspClass::rc_ab;
    std::optional<hand::GraspPlan> plan;
    std::string plan_error;  ///< set when planning failed
};

/// Lowercased lemmas with stop words dropped, joined by single spaces.
std::string normalize_label(std::string_view text);

/// The record whose normalized label equals the normalized `label`, lowest
/// id first; nullptr when none does.
const kb::ObjectRecord* find_by_label(const kb::KnowledgeBase& kb, std::string_view label);

/// A description equal to a known label retrieves that record at distance
/// 0. Otherwise the parsed attributes are matched with config.metric.
/// Throws RetrievalError when neither applies or the KB is empty.
Retrieval retrieve_object(std::string_view description, const parser::ParseResult& parse,
                          const Resources& resources);

/// Encodes `record`, predicts and selects its grasp class.
learner::GraspDistribution predict_record(const kb::ObjectRecord& record, const Resources& resources);

/// Plans `grasp` on `record` with the loaded closure models and tables.
hand::GraspPlan plan_record(learner::GraspClass grasp, const kb::ObjectRecord& record, const Resources& resources);

/// parse -> impute -> retrieve -> encode -> predict -> select -> plan.
/// Errors before planning propagate; a plan error is stored in the result.
PipelineResult run_pipeline(std::string_view description, const Resources& resources);

nlohmann::json to_json(const kb::FeatureQuery& query);
nlohmann::json to_json(const kb::ObjectRecord& record);
nlohmann::json to_json(const parser::ParseResult& parse);
nlohmann::json to_json(const learner::GraspDistribution& distribution);
nlohmann::json to_json(const hand::GraspPlan& plan);
nlohmann::json to_json(const PipelineResult& result);

}  // namespace dexgrasp::pipeline
