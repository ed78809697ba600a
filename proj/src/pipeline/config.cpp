#include "dexgrasp/pipeline/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::pipeline {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("bad value for '{}'", key));
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

}  // namespace

std::filesystem::path PipelineConfig::resolve(const std::string& path) const {
    const std::filesystem::path p(path);
    return p.is_absolute() ? p : base / p;
}

void PipelineConfig::set_seed(std::uint64_t value) {
    seed = value;
    training.seed = value;
}

PipelineConfig config_from_json(const json& j, const std::filesystem::path& base) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"kb", "labels", "lexicon", "geometry", "topologies", "model", "corpus", "pages", "metric", "seed",
                    "training", "harness"},
                   "config");
    PipelineConfig c;
    c.base = base;
    read(j, "kb", c.kb);
    read(j, "labels", c.labels);
    read(j, "lexicon", c.lexicon);
    read(j, "geometry", c.geometry);
    read(j, "topologies", c.topologies);
    read(j, "model", c.model);
    read(j, "corpus", c.corpus);
    read(j, "pages", c.pages);

    std::string metric = "jpd";
    read(j, "metric", metric);
    try {
        c.metric = kb::parse_metric(metric);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    std::uint64_t seed = c.seed;
    read(j, "seed", seed);

    if (j.contains("training")) {
        const auto& t = j.at("training");
        reject_unknown(t, {"epochs", "learning_rate", "batch_size", "hidden", "activation"}, "training");
        read(t, "epochs", c.training.epochs);
        read(t, "learning_rate", c.training.learning_rate);
        read(t, "batch_size", c.training.batch_size);
        read(t, "hidden", c.training.model.hidden);
        std::string activation(learner::to_string(c.training.model.activation));
        read(t, "activation", activation);
        try {
            c.training.model.activation = learner::parse_activation(activation);
        } catch (const ModelError& e) {
            throw ConfigError(e.what());
        }
        if (!(c.training.learning_rate > 0.0)) throw ConfigError("training.learning_rate must be positive");
    }
    if (j.contains("harness")) {
        const auto& h = j.at("harness");
        reject_unknown(h,
                       {"recall_trials", "recall_noise", "recall_drop", "closure_samples", "plan_steps",
                        "leave_one_out", "loo_epochs", "rfe_epochs"},
                       "harness");
        read(h, "recall_trials", c.harness.recall_trials);
        read(h, "recall_noise", c.harness.recall_noise);
        read(h, "recall_drop", c.harness.recall_drop);
        read(h, "closure_samples", c.harness.closure_samples);
        read(h, "plan_steps", c.harness.plan_steps);
        read(h, "leave_one_out", c.harness.leave_one_out);
        read(h, "loo_epochs", c.harness.loo_epochs);
        read(h, "rfe_epochs", c.harness.rfe_epochs);
        if (c.harness.closure_samples < 2 || c.harness.plan_steps < 2) {
            throw ConfigError("closure_samples and plan_steps must be at least 2");
        }
        if (c.harness.recall_noise < 0.0 || c.harness.recall_drop > kb::kAttributeCount) {
            throw ConfigError("bad recall noise settings");
        }
    }
    c.set_seed(seed);
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return config_from_json(j, path.parent_path());
}

json config_to_json(const PipelineConfig& c) {
    return {
        {"kb", c.kb},
        {"labels", c.labels},
        {"lexicon", c.lexicon},
        {"geometry", c.geometry},
        {"topologies", c.topologies},
        {"model", c.model},
        {"corpus", c.corpus},
        {"pages", c.pages},
        {"metric", kb::to_string(c.metric)},
        {"seed", c.seed},
        {"training",
         {{"epochs", c.training.epochs},
          {"learning_rate", c.training.learning_rate},
          {"batch_size", c.training.batch_size},
          {"hidden", c.training.model.hidden},
          {"activation", learner::to_string(c.training.model.activation)}}},
        {"harness",
         {{"recall_trials", c.harness.recall_trials},
          {"recall_noise", c.harness.recall_noise},
          {"recall_drop", c.harness.recall_drop},
          {"closure_samples", c.harness.closure_samples},
          {"plan_steps", c.harness.plan_steps},
          {"leave_one_out", c.harness.leave_one_out},
          {"loo_epochs", c.harness.loo_epochs},
          {"rfe_epochs", c.harness.rfe_epochs}}},
    };
}

learner::TrainResult train_model(const PipelineConfig& config, const kb::KnowledgeBase& kb) {
    const auto labels = learner::load_labels(config.resolve(config.labels));
    return learner::train(learner::make_examples(labels, kb.records()), config.training);
}

Resources load_resources(const PipelineConfig& config, bool with_model) {
    Resources r;
    r.config = config;
    // Wraps load failures so the caller can tell bad inputs from stage errors.
    auto guard = [](const std::string& what, auto&& load) {
        try {
            load();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(fmt::format("{}: {}", what, e.what()));
        }
    };
    guard(config.kb, [&] { r.kb = kb::KnowledgeBase(kb::load_records(config.resolve(config.kb))); });
    guard(config.lexicon, [&] {
        r.description_parser = parser::DescriptionParser(parser::DescriptorLexicon::load(config.resolve(config.lexicon)));
    });
    guard(config.geometry, [&] { r.geometry = hand::load_geometry(config.resolve(config.geometry)); });
    guard(config.topologies,
          [&] { r.topologies = hand::load_topologies(config.resolve(config.topologies), r.geometry); });
    guard(config.topologies, [&] {
        for (auto grasp : learner::kAllGraspClasses) {
            r.closures[grasp] =
                hand::fit_closure_model(r.topologies.get(grasp), r.geometry, config.harness.closure_samples);
        }
    });
    const auto model_path = config.resolve(config.model);
    if (!with_model) {
        r.model_source = "none";
    } else if (std::filesystem::exists(model_path)) {
        guard(config.model, [&] { r.model = learner::load_model(model_path); });
        if (r.model.input_width() != learner::kModelInputWidth) {
            throw ConfigError(fmt::format("{}: model expects {} inputs", config.model, r.model.input_width()));
        }
        r.model_source = "file";
    } else {
        guard(config.labels, [&] { r.model = train_model(config, r.kb).model; });
        r.model_source = "trained";
    }
    return r;
}

}  // namespace dexgrasp::pipeline
