#include "dexgrasp/pipeline/pipeline.hpp"

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"
#include "dexgrasp/learner/classifier.hpp"
#include "dexgrasp/parser/tagger.hpp"

namespace dexgrasp::pipeline {

using nlohmann::json;

std::string normalize_label(std::string_view text) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
    std::string out;
    for (const auto& token : parser::tokenize_and_tag(text)) {
        if (token.tag == "." || token.tag == "," || token.tag == ":") continue;
        if (!out.empty()) out += ' ';
        out += token.lemma;
    }
    return out;
}

const kb::ObjectRecord* find_by_label(const kb::KnowledgeBase& kb, std::string_view label) {
    const auto wanted = normalize_label(label);
    if (wanted.empty()) return nullptr;
    const kb::ObjectRecord* best = nullptr;
    for (const auto& record : kb.records()) {
        if (normalize_label(record.label) == wanted && (!best || record.id < best->id)) best = &record;
    }
    return best;
}

Retrieval retrieve_object(std::string_view description, const parser::ParseResult& parse,
                          const Resources& resources) {
    if (resources.kb.empty()) throw RetrievalError("knowledge base is empty");
    if (const auto* record = find_by_label(resources.kb, description)) {
        return {kb::Match{*record, 0.0}, RetrievalMethod::label};
    }
    if (parse.query.presence().none()) {
        throw RetrievalError("description has no attributes and matches no known label");
    }
    return {resources.kb.retrieve(parse.query, resources.config.metric, 1).front(), RetrievalMethod::attributes};
}

learner::GraspDistribution predict_record(const kb::ObjectRecord& record, const Resources& resources) {
    return learner::predict(resources.model, kb::encode(record));
}

hand::GraspPlan plan_record(learner::GraspClass grasp, const kb::ObjectRecord& record, const Resources& resources) {
    return hand::plan_grasp(grasp, record, resources.closures.at(grasp), resources.topologies.get(grasp),
                            resources.geometry, resources.config.harness.plan_steps);
}

PipelineResult run_pipeline(std::string_view description, const Resources& resources) {
    PipelineResult result;
    result.description = std::string(description);
    result.parse = resources.description_parser.parse(description, resources.kb.records());
    result.retrieval = retrieve_object(description, result.parse, resources);
    const auto& record = result.retrieval.match.record;
    result.encoded = kb::encode(record);
    result.distribution = learner::predict(resources.model, result.encoded);
    result.selected = learner::select_grasp(result.distribution);
    try {
        result.plan = plan_record(result.selected, record, resources);
    } catch (const Error& e) {
        result.plan_error = e.what();
    }
    return result;
}

json to_json(const kb::FeatureQuery& q) {
    json j;
    auto number = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    auto name = [](const auto& v) { return v ? json(std::string(kb::to_string(*v))) : json(nullptr); };
    j["a"] = number(q.a);
    j["b"] = number(q.b);
    j["c"] = number(q.c);
    j["mass"] = number(q.mass);
    j["shape"] = name(q.shape);
    j["rigidity"] = name(q.rigidity);
    j["texture"] = name(q.texture);
    j["fragility"] = name(q.fragility);
    j["material"] = name(q.material);
    return j;
}

json to_json(const kb::ObjectRecord& record) {
    return {{"id", record.id}, {"label", record.label}, {"features", to_json(record.features)}};
}

json to_json(const parser::ParseResult& parse) {
    json provenance = json::object();
    for (const auto& [attribute, span] : parse.provenance) {
        provenance[std::string(kb::to_string(attribute))] = {span.begin, span.end};
    }
    json imputed = json::array();
    for (auto attribute : parse.imputed) imputed.push_back(std::string(kb::to_string(attribute)));
    return {{"query", to_json(parse.query)},
            {"provenance", provenance},
            {"imputed", imputed},
            {"warnings", parse.warnings}};
}

json to_json(const learner::GraspDistribution& distribution) {
    json j = json::object();
    for (auto grasp : learner::kAllGraspClasses) j[std::string(learner::code(grasp))] = distribution[grasp];
    return j;
}

json to_json(const hand::GraspPlan& plan) {
    json participating = json::array();
    for (auto finger : plan.participating) participating.push_back(std::string(hand::to_string(finger)));
    json trajectory = json::array();
    for (const auto& config : plan.trajectory) trajectory.push_back(config.theta);
    return {{"grasp", learner::code(plan.grasp)},
            {"participating", participating},
            {"d_o", plan.d_o},
            {"d_vf", plan.d_vf},
            {"d_start", plan.d_start},
            {"alpha_star", plan.alpha_star},
            {"time", plan.time},
            {"alpha", plan.alpha},
            {"completion", plan.completion},
            {"trajectory", trajectory},
            {"d_vf_profile", plan.d_vf_profile}};
}

json to_json(const PipelineResult& r) {
    json encoded = {{"values", r.encoded.values}, {"mask", r.encoded.mask.to_string()}};
    json j = {{"description", r.description},
              {"parse", to_json(r.parse)},
              {"retrieval",
               {{"method", r.retrieval.method == RetrievalMethod::label ? "label" : "attributes"},
                {"distance", r.retrieval.match.distance},
                {"record", to_json(r.retrieval.match.record)}}},
              {"encoded", encoded},
              {"distribution", to_json(r.distribution)},
              {"selected", learner::code(r.selected)}};
    j["plan"] = r.plan ? to_json(*r.plan) : json(nullptr);
    if (!r.plan_error.empty()) j["plan_error"] = r.plan_error;
    return j;
}

}  // namespace dexgrasp::pipeline
