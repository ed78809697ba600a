#include "dexgrasp/pipeline/report.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"
#include "dexgrasp/hand/contact.hpp"
#include "dexgrasp/hand/planner.hpp"
#include "dexgrasp/kb/recall.hpp"
#include "dexgrasp/learner/evaluation.hpp"
#include "dexgrasp/parser/scoring.hpp"
#include "dexgrasp/pipeline/pipeline.hpp"

namespace dexgrasp::pipeline {
namespace {

using nlohmann::json;

constexpr const char* kMetrics[] = {"jpd", "euclidean", "minkowski", "cosine", "kd-tree"};

json confusion_json(const parser::ConfusionMatrix& m) {
    return {{"truth", m.truth_labels},
            {"predicted", m.predicted_labels},
            {"counts", m.counts},
            {"accuracy", m.accuracy()}};
}

json plan_outcome(learner::GraspClass grasp, const kb::ObjectRecord& record, const hand::HandGeometry& geometry,
                  const hand::TopologyTable& topologies,
                  const std::map<learner::GraspClass, hand::ClosureModel>& closures, std::size_t steps) {
    json j = {{"grasp", std::string(learner::code(grasp))}};
    try {
        const auto& topology = topologies.get(grasp);
        const auto& closure = closures.at(grasp);
        const auto plan = hand::plan_grasp(grasp, record, closure, topology, geometry, steps);
        const auto object = hand::object_for_plan(plan, record, topology, geometry);
        const auto report = hand::simulate_contact(plan, object, topology, geometry);
        j["d_o"] = plan.d_o;
        j["target_d_vf"] = plan.d_vf;
        j["planned_d_vf"] = plan.d_vf_profile.back();
        j["alpha_star"] = plan.alpha_star;
        j["secured"] = report.secured;
        j["secured_alpha"] = report.secured_alpha ? json(*report.secured_alpha) : json(nullptr);
        json fingers = json::object();
        for (const auto& f : report.fingers) {
            fingers[std::string(hand::to_string(f.finger))] = {
                {"contact", f.contact}, {"blocked", f.blocked}, {"stop_alpha", f.stop_alpha}};
        }
        j["fingers"] = fingers;
    } catch (const Error& e) {
        j["secured"] = false;
        j["error"] = e.what();
    }
    return j;
}

std::string fixed(const json& v, int digits = 3) {
    if (v.is_null()) return "-";
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    if (v.is_number()) return fmt::format("{:.{}f}", v.get<double>(), digits);
    return v.get<std::string>();
}

}  // namespace

EvaluationReport evaluate_all(const PipelineConfig& config) {
    EvaluationReport report;
    json sections = json::object();

    std::optional<kb::KnowledgeBase> kb;
    std::optional<std::vector<learner::Example>> examples;
    std::optional<learner::ClassifierModel> model;
    std::optional<hand::HandGeometry> geometry;
    std::optional<hand::TopologyTable> topologies;
    std::map<learner::GraspClass, hand::ClosureModel> closures;

    auto need_kb = [&]() -> const kb::KnowledgeBase& {
        if (!kb) kb = kb::KnowledgeBase(kb::load_records(config.resolve(config.kb)));
        return *kb;
    };
    auto need_examples = [&]() -> const std::vector<learner::Example>& {
        if (!examples) {
            examples = learner::make_examples(learner::load_labels(config.resolve(config.labels)), need_kb().records());
        }
        return *examples;
    };
    auto need_model = [&]() -> const learner::ClassifierModel& {
        if (!model) model = learner::train(need_examples(), config.training).model;
        return *model;
    };
    auto need_hand = [&] {
        if (!geometry) geometry = hand::load_geometry(config.resolve(config.geometry));
        if (!topologies) topologies = hand::load_topologies(config.resolve(config.topologies), *geometry);
    };
    auto section = [&](const std::string& name, const std::function<json()>& body) {
        try {
            json j = body();
            j["status"] = "ok";
            sections[name] = std::move(j);
        } catch (const std::exception& e) {
            sections[name] = {{"status", "skipped"}, {"reason", e.what()}};
            report.complete = false;
        }
    };

    section("recall", [&] {
        const auto& base = need_kb();
        kb::NoiseSpec noise;
        noise.relative_noise = config.harness.recall_noise;
        noise.drop_count = config.harness.recall_drop;
        const auto queries = kb::make_recall_queries(base, noise, config.harness.recall_trials, config.seed);
        json rows = json::array();
        double best_other = 0.0;
        double jpd = 0.0;
        for (const auto* name : kMetrics) {
            const auto result = kb::score_recall(base, queries, kb::parse_metric(name));
            rows.push_back({{"metric", name}, {"hits", result.hits}, {"trials", result.trials},
                            {"recall", result.recall()}});
            if (std::string_view(name) == "jpd") {
                jpd = result.recall();
            } else {
                best_other = std::max(best_other, result.recall());
            }
        }
        return json{{"records", base.size()},
                    {"noise", config.harness.recall_noise},
                    {"dropped_fields", config.harness.recall_drop},
                    {"metrics", rows},
                    {"jpd_best", jpd >= best_other}};
    });

    section("parser", [&] {
        const auto& base = need_kb();
        const parser::DescriptionParser parser(parser::DescriptorLexicon::load(config.resolve(config.lexicon)));
        const auto corpus = parser::load_corpus(config.resolve(config.corpus), base.records());
        const auto score = parser::score_parser(corpus, parser, base.records());
        return json{{"descriptions", score.descriptions},
                    {"r2_dimensions", score.r2_dimensions},
                    {"r2_mass", score.r2_mass},
                    {"dimension_pairs", score.dimension_pairs},
                    {"mass_pairs", score.mass_pairs},
                    {"material", confusion_json(score.material)},
                    {"shape", confusion_json(score.shape)},
                    {"rigidity", confusion_json(score.rigidity)}};
    });

    section("closure", [&] {
        need_hand();
        json rows = json::array();
        for (auto grasp : learner::kAllGraspClasses) {
            const auto fit =
                hand::fit_closure_model(topologies->get(grasp), *geometry, config.harness.closure_samples);
            closures[grasp] = fit;
            rows.push_back({{"grasp", std::string(learner::code(grasp))},
                            {"w1", fit.w1},
                            {"w0", fit.w0},
                            {"r2", fit.r2},
                            {"d_o_min", fit.d_o_min},
                            {"d_o_max", fit.d_o_max}});
        }
        return json{{"samples", config.harness.closure_samples}, {"classes", rows}};
    });

    section("grasp", [&] {
        const auto& data = need_examples();
        std::vector<learner::GraspDistribution> predictions;
        for (const auto& e : data) predictions.push_back(learner::predict(need_model(), e.features));
        const auto resub = learner::score_predictions(data, predictions);
        json j = {{"objects", data.size()},
                  {"resubstitution",
                   {{"feasibility", resub.feasibility}, {"match", resub.match},
                    {"match_le_feasibility", resub.match <= resub.feasibility}}}};
        if (config.harness.leave_one_out) {
            auto loo_config = config.training;
            loo_config.epochs = config.harness.loo_epochs;
            const auto loo = learner::evaluate_leave_one_out(data, loo_config);
            j["leave_one_out"] = {{"epochs", loo_config.epochs},
                                  {"feasibility", loo.feasibility},
                                  {"match", loo.match},
                                  {"match_le_feasibility", loo.match <= loo.feasibility}};
        }
        return j;
    });

    section("features", [&] {
        auto rfe_config = config.training;
        rfe_config.epochs = config.harness.rfe_epochs;
        json rows = json::array();
        for (const auto& f : learner::rank_features(need_examples(), rfe_config)) {
            rows.push_back({{"attribute", std::string(kb::to_string(f.attribute))}, {"importance", f.importance}});
        }
        return json{{"epochs", rfe_config.epochs}, {"ranking", rows}};
    });

    section("simulation", [&] {
        need_hand();
        if (closures.size() != learner::kGraspClassCount) throw PlanError("closure fits unavailable");
        const auto& data = need_examples();
        json rows = json::array();
        std::size_t modal_secured = 0;
        std::size_t predicted_secured = 0;
        std::size_t matches = 0;
        for (const auto& e : data) {
            const auto& record = *need_kb().find(e.label.object_id);
            const auto modal = learner::select_grasp(e.label.distribution());
            const auto predicted = learner::select_grasp(learner::predict(need_model(), e.features));
            const bool match = e.label.frequency(predicted) > 0 &&
                               e.label.frequency(predicted) == e.label.max_frequency();
            auto modal_run = plan_outcome(modal, record, *geometry, *topologies, closures, config.harness.plan_steps);
            auto predicted_run =
                predicted == modal ? modal_run
                                   : plan_outcome(predicted, record, *geometry, *topologies, closures,
                                                  config.harness.plan_steps);
            modal_secured += modal_run["secured"].get<bool>();
            predicted_secured += predicted_run["secured"].get<bool>();
            matches += match;
            rows.push_back({{"id", record.id},
                            {"label", record.label},
                            {"modal", std::string(learner::code(modal))},
                            {"predicted", std::string(learner::code(predicted))},
                            {"match", match},
                            {"modal_grasp", modal_run},
                            {"predicted_grasp", predicted_run}});
        }
        const double n = static_cast<double>(data.size());
        return json{{"objects", rows},
                    {"modal_secured_rate", modal_secured / n},
                    {"predicted_secured_rate", predicted_secured / n},
                    {"match_rate", matches / n}};
    });

    report.json = {{"config", config_to_json(config)}, {"complete", report.complete}, {"sections", sections}};
    return report;
}

std::string render_table(const json& report) {
    std::string out;
    auto line = [&](const std::string& s) {
        out += s;
        out += '\n';
    };
    const auto& s = report.at("sections");
    auto header = [&](const std::string& name) {
        line("");
        line(fmt::format("== {} ==", name));
        if (!s.contains(name)) return false;
        if (s[name].value("status", "") != "ok") {
            line(fmt::format("skipped: {}", s[name].value("reason", "")));
            return false;
        }
        return true;
    };

    line(fmt::format("seed {}  metric {}  complete {}", report["config"]["seed"].dump(),
                     report["config"]["metric"].get<std::string>(), report["complete"].get<bool>() ? "yes" : "no"));

    if (header("recall")) {
        const auto& r = s["recall"];
        line(fmt::format("{} records, noise {:.2f}, {} dropped field(s)", r["records"].get<int>(),
                         r["noise"].get<double>(), r["dropped_fields"].get<int>()));
        line(fmt::format("{:<12} {:>6} {:>8}", "metric", "hits", "recall"));
        for (const auto& row : r["metrics"]) {
            line(fmt::format("{:<12} {:>6} {:>8.3f}", row["metric"].get<std::string>(), row["hits"].get<int>(),
                             row["recall"].get<double>()));
        }
        line(fmt::format("jpd best: {}", fixed(r["jpd_best"])));
    }
    if (header("parser")) {
        const auto& p = s["parser"];
        line(fmt::format("{} descriptions", p["descriptions"].get<int>()));
        line(fmt::format("R^2 dimensions {:.4f} ({} pairs)", p["r2_dimensions"].get<double>(),
                         p["dimension_pairs"].get<int>()));
        line(fmt::format("R^2 mass       {:.4f} ({} pairs)", p["r2_mass"].get<double>(), p["mass_pairs"].get<int>()));
        for (const char* field : {"material", "shape", "rigidity"}) {
            const auto& m = p[field];
            line(fmt::format("{} accuracy {:.3f}", field, m["accuracy"].get<double>()));
            std::string head = fmt::format("  {:<11}", "truth\\pred");
            for (const auto& l : m["predicted"]) head += fmt::format(" {:>6.6}", l.get<std::string>());
            line(head);
            for (std::size_t i = 0; i < m["truth"].size(); ++i) {
                std::string row = fmt::format("  {:<11}", m["truth"][i].get<std::string>());
                for (const auto& c : m["counts"][i]) row += fmt::format(" {:>6}", c.get<int>());
                line(row);
            }
        }
    }
    if (header("closure")) {
        line(fmt::format("{:<8} {:>7} {:>7} {:>9} {:>7} {:>7}", "grasp", "w1", "w0", "R^2", "d_min", "d_max"));
        for (const auto& row : s["closure"]["classes"]) {
            line(fmt::format("{:<8} {:>7.4f} {:>7.4f} {:>9.6f} {:>7.2f} {:>7.2f}", row["grasp"].get<std::string>(),
                             row["w1"].get<double>(), row["w0"].get<double>(), row["r2"].get<double>(),
                             row["d_o_min"].get<double>(), row["d_o_max"].get<double>()));
        }
    }
    if (header("grasp")) {
        const auto& g = s["grasp"];
        line(fmt::format("{} objects", g["objects"].get<int>()));
        line(fmt::format("resubstitution  F_l {:.3f}  F_m {:.3f}", g["resubstitution"]["feasibility"].get<double>(),
                         g["resubstitution"]["match"].get<double>()));
        if (g.contains("leave_one_out")) {
            line(fmt::format("leave-one-out   F_l {:.3f}  F_m {:.3f}  ({} epochs)",
                             g["leave_one_out"]["feasibility"].get<double>(), g["leave_one_out"]["match"].get<double>(),
                             g["leave_one_out"]["epochs"].get<int>()));
        }
    }
    if (header("features")) {
        int rank = 1;
        for (const auto& row : s["features"]["ranking"]) {
            line(fmt::format("{:>2}. {:<10} {:>10.4f}", rank++, row["attribute"].get<std::string>(),
                             row["importance"].get<double>()));
        }
    }
    if (header("simulation")) {
        const auto& sim = s["simulation"];
        line(fmt::format("{:<20} {:<7} {:<7} {:<5} {:<8} {:<8}", "object", "modal", "robot", "match", "modal ok",
                         "robot ok"));
        for (const auto& row : sim["objects"]) {
            const bool match = row["match"].get<bool>();
            line(fmt::format("{:<20.20} {:<7} {:<7} {:<5} {:<8} {:<8}{}", row["label"].get<std::string>(),
                             row["modal"].get<std::string>(), row["predicted"].get<std::string>(),
                             match ? "yes" : "no", fixed(row["modal_grasp"]["secured"]),
                             fixed(row["predicted_grasp"]["secured"]), match ? "" : "  <- mismatch"));
        }
        line(fmt::format("modal secured {:.3f}  robot secured {:.3f}  match {:.3f}",
                         sim["modal_secured_rate"].get<double>(), sim["predicted_secured_rate"].get<double>(),
                         sim["match_rate"].get<double>()));
    }
    return out;
}

}  // namespace dexgrasp::pipeline
