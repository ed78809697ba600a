#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dexgrasp/hand/closure.hpp"
#include "dexgrasp/hand/geometry.hpp"
#include "dexgrasp/hand/topology.hpp"
#include "dexgrasp/kb/knowledge_base.hpp"
#include "dexgrasp/learner/classifier.hpp"
#include "dexgrasp/learner/grasp.hpp"
#include "dexgrasp/parser/description_parser.hpp"

namespace dexgrasp::pipeline {

/// Evaluation harness sizes.
struct HarnessConfig {
    std::size_t recall_trials = 1000;
    double recall_noise = 0.1;
    std::size_t recall_drop = 1;
    std::size_t closure_samples = 50;
    std::size_t plan_steps = 50;
    bool leave_one_out = true;
    std::size_t loo_epochs = 1000;
    std::size_t rfe_epochs = 500;
};

/// Paths are stored as written in the config file and resolved against
/// `base` (the config file's directory).
struct PipelineConfig {
    std::filesystem::path base;
    std::string kb = "kb.csv";
    std::string labels = "labels.csv";
    std::string lexicon = "lexicon/descriptors.txt";
    std::string geometry = "geometry.json";
    std::string topologies = "topologies.json";
    std::string model = "model.json";
    std::string corpus = "descriptions.jsonl";
    std::string pages = "pages";
    kb::Metric metric;
    learner::TrainConfig training;
    /// Seeds training, recall queries and every other random draw.
    std::uint64_t seed = 7;
    HarnessConfig harness;

    std::filesystem::path resolve(const std::string& path) const;
    /// Copies the seed into the training config.
    void set_seed(std::uint64_t value);
};

/// Reads a config object; missing keys keep their defaults. Throws
/// ConfigError on unknown keys or bad values.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base);
PipelineConfig load_config(const std::filesystem::path& path);
/// Effective config, echoed into every report.
nlohmann::json config_to_json(const PipelineConfig& config);

/// Everything the pipeline stages read, loaded up front.
struct Resources {
    PipelineConfig config;
    kb::KnowledgeBase kb;
    parser::DescriptionParser description_parser{parser::DescriptorLexicon()};
    hand::HandGeometry geometry;
    hand::TopologyTable topologies;
    std::map<learner::GraspClass, hand::ClosureModel> closures;
    learner::ClassifierModel model;
    /// "file", "trained" (no model file) or "none".
    std::string model_source;
};

/// Loads the KB, lexicon, geometry and topology tables, fits every closure
/// model and reads the classifier. A missing model file is replaced by
/// training on the label file; `with_model` false leaves it empty. Throws
/// ConfigError naming the file when any input is missing or malformed.
Resources load_resources(const PipelineConfig& config, bool with_model = true);

/// Trains the classifier on the config's label and KB files.
learner::TrainResult train_model(const PipelineConfig& config, const kb::KnowledgeBase& kb);

}  // namespace dexgrasp::pipeline
