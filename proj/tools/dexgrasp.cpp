// Command-line front end: ingest, parse, query, train, predict, plan, run,
// eval and rank-features.

#include <cctype>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "dexgrasp/common/error.hpp"
#include "dexgrasp/hand/planner.hpp"
#include "dexgrasp/learner/evaluation.hpp"
#include "dexgrasp/pipeline/config.hpp"
#include "dexgrasp/pipeline/ingest.hpp"
#include "dexgrasp/pipeline/pipeline.hpp"
#include "dexgrasp/pipeline/report.hpp"

namespace {

using namespace dexgrasp;
using namespace dexgrasp::pipeline;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kStageFailure = 1;
constexpr int kConfigFailure = 2;

struct Globals {
    std::string config_path = DEXGRASP_DEFAULT_CONFIG;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> metric;
    std::string format = "json";
};

PipelineConfig effective_config(const Globals& g) {
    auto config = load_config(g.config_path);
    if (g.seed) config.set_seed(*g.seed);
    if (g.metric) {
        try {
            config.metric = kb::parse_metric(*g.metric);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
    return config;
}

void emit(const Globals& g, const PipelineConfig& config, json body, const std::string& table) {
    if (g.format == "table") {
        std::cout << table;
        if (!table.empty() && table.back() != '\n') std::cout << '\n';
        return;
    }
    body["config"] = config_to_json(config);
    std::cout << body.dump(2) << '\n';
}

bool is_integer(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string distribution_table(const learner::GraspDistribution& d) {
    std::string out;
    for (auto grasp : learner::kAllGraspClasses) out += fmt::format("  {:<7} {:.4f}\n", learner::code(grasp), d[grasp]);
    return out;
}

std::string record_line(const kb::ObjectRecord& r) {
    return fmt::format("{} (id {}): {}", r.label, r.id, kb::describe(r.features));
}

std::string plan_table(const hand::GraspPlan& plan) {
    return fmt::format("grasp {}  d_o {:.2f}  d_vf {:.3f}  d_start {:.3f}  alpha* {:.4f}  final d_vf {:.3f}\n",
                       learner::code(plan.grasp), plan.d_o, plan.d_vf, plan.d_start, plan.alpha_star,
                       plan.d_vf_profile.back());
}

int cmd_ingest(const Globals& g, const std::string& dir, int first_id, const std::string& out) {
    const auto config = effective_config(g);
    parser::DescriptorLexicon lexicon;
    try {
        lexicon = parser::DescriptorLexicon::load(config.resolve(config.lexicon));
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    IngestResult result;
    try {
        result = ingest_pages(dir, lexicon, first_id);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    json pages = json::array();
    std::string table;
    for (const auto& page : result.pages) {
        const auto name = page.source.filename().string();
        if (page.skipped) {
            pages.push_back({{"source", name}, {"skipped", true}, {"reason", page.reason}});
            table += fmt::format("{}: skipped ({})\n", name, page.reason);
            continue;
        }
        json values = json::array();
        for (const auto& v : page.values) {
            values.push_back({{"attribute", std::string(kb::to_string(v.attribute))},
                              {"value", v.value},
                              {"snippet", v.snippet},
                              {"offset", v.offset}});
        }
        json missing = json::array();
        for (auto a : page.missing) missing.push_back(std::string(kb::to_string(a)));
        pages.push_back({{"source", name},
                         {"skipped", false},
                         {"draft", to_json(page.draft)},
                         {"values", values},
                         {"notes", page.notes},
                         {"missing", missing}});
        table += fmt::format("{}: {}\n", name, record_line(page.draft));
        for (const auto& v : page.values) {
            table += fmt::format("  {:<9} {:<8} from \"{}\"\n", kb::to_string(v.attribute), v.value, v.snippet);
        }
        for (const auto& n : page.notes) table += fmt::format("  note: {}\n", n);
        std::string missing_list;
        for (auto a : page.missing) missing_list += fmt::format(" {}", kb::to_string(a));
        if (!missing_list.empty()) table += fmt::format("  needs completion:{}\n", missing_list);
    }
    if (!out.empty()) {
        std::ofstream file(out);
        if (!file) throw ConfigError(fmt::format("cannot write {}", out));
        kb::write_records_csv(file, result.drafts);
    }
    emit(g, config, {{"pages", pages}, {"drafts", result.drafts.size()}}, table);
    return kOk;
}

int cmd_parse(const Globals& g, const std::string& text) {
    const auto config = effective_config(g);
    const auto resources = load_resources(config, false);
    const auto parse = resources.description_parser.parse(text, resources.kb.records());
    std::string table = kb::describe(parse.query) + "\n";
    for (const auto& w : parse.warnings) table += fmt::format("warning: {}\n", w);
    emit(g, config, {{"description", text}, {"parse", to_json(parse)}}, table);
    return kOk;
}

int cmd_query(const Globals& g, const std::string& text, const std::string& label, std::size_t k) {
    const auto config = effective_config(g);
    const auto resources = load_resources(config, false);
    json matches = json::array();
    std::string table;
    json body;
    if (!label.empty()) {
        const auto* record = find_by_label(resources.kb, label);
        if (!record) throw RetrievalError(fmt::format("no record labelled '{}'", label));
        matches.push_back({{"distance", 0.0}, {"record", to_json(*record)}});
        table = fmt::format("{:>8.4f}  {}\n", 0.0, record_line(*record));
        body = {{"label", label}, {"method", "label"}};
    } else {
        if (text.empty()) throw ConfigError("query needs a description or --label");
        const auto parse = resources.description_parser.parse(text, resources.kb.records());
        if (const auto* record = find_by_label(resources.kb, text)) {
            matches.push_back({{"distance", 0.0}, {"record", to_json(*record)}});
            table = fmt::format("{:>8.4f}  {}\n", 0.0, record_line(*record));
            body = {{"description", text}, {"method", "label"}};
        } else {
            if (parse.query.presence().none()) {
                throw RetrievalError("description has no attributes and matches no known label");
            }
            for (const auto& m : resources.kb.retrieve(parse.query, config.metric, std::min(k, resources.kb.size()))) {
                matches.push_back({{"distance", m.distance}, {"record", to_json(m.record)}});
                table += fmt::format("{:>8.4f}  {}\n", m.distance, record_line(m.record));
            }
            body = {{"description", text}, {"method", "attributes"}, {"parse", to_json(parse)}};
        }
    }
    body["matches"] = matches;
    emit(g, config, body, table);
    return kOk;
}

int cmd_train(const Globals& g, const std::string& out) {
    const auto config = effective_config(g);
    const auto resources = load_resources(config, false);
    const auto labels = learner::load_labels(config.resolve(config.labels));
    const auto examples = learner::make_examples(labels, resources.kb.records());
    const auto result = learner::train(examples, config.training);
    std::vector<learner::GraspDistribution> predictions;
    for (const auto& e : examples) predictions.push_back(learner::predict(result.model, e.features));
    const auto scores = learner::score_predictions(examples, predictions);
    const auto path = out.empty() ? config.resolve(config.model) : std::filesystem::path(out);
    learner::save_model(result.model, path);
    const double final_loss = result.loss_history.empty() ? 0.0 : result.loss_history.back();
    emit(g, config,
         {{"model", path.string()},
          {"examples", examples.size()},
          {"epochs", result.loss_history.size()},
          {"final_loss", final_loss},
          {"feasibility", scores.feasibility},
          {"match", scores.match}},
         fmt::format("trained on {} objects, {} epochs, final loss {:.4f}\nF_l {:.3f}  F_m {:.3f}\nsaved {}\n",
                     examples.size(), result.loss_history.size(), final_loss, scores.feasibility, scores.match,
                     path.string()));
    return kOk;
}

int cmd_predict(const Globals& g, const std::string& target) {
    const auto config = effective_config(g);
    const auto resources = load_resources(config);
    kb::ObjectRecord record;
    json body = {{"model_source", resources.model_source}};
    const kb::ObjectRecord* by_id = is_integer(target) ? resources.kb.find(std::stoi(target)) : nullptr;
    if (by_id) {
        record = *by_id;
    } else {
        const auto parse = resources.description_parser.parse(target, resources.kb.records());
        const auto retrieval = retrieve_object(target, parse, resources);
        record = retrieval.match.record;
        body["description"] = target;
        body["parse"] = to_json(parse);
        body["distance"] = retrieval.match.distance;
    }
    const auto distribution = predict_record(record, resources);
    const auto selected = learner::select_grasp(distribution);
    body["record"] = to_json(record);
    body["distribution"] = to_json(distribution);
    body["selected"] = std::string(learner::code(selected));
    emit(g, config, body,
         fmt::format("{}\n{}selected {}\n", record_line(record), distribution_table(distribution),
                     learner::code(selected)));
    return kOk;
}

int cmd_plan(const Globals& g, int id, const std::string& grasp_code, const std::string& csv) {
    const auto config = effective_config(g);
    const auto grasp = learner::parse_grasp_class(grasp_code);
    if (!grasp) throw ConfigError(fmt::format("unknown grasp class '{}'", grasp_code));
    const auto resources = load_resources(config, false);
    const auto* record = resources.kb.find(id);
    if (!record) throw RetrievalError(fmt::format("no record with id {}", id));
    const auto plan = plan_record(*grasp, *record, resources);
    if (!csv.empty()) {
        if (csv == "-") {
            hand::write_plan_csv(std::cout, plan);
            return kOk;
        }
        std::ofstream file(csv);
        if (!file) throw ConfigError(fmt::format("cannot write {}", csv));
        hand::write_plan_csv(file, plan);
    }
    const auto& closure = resources.closures.at(*grasp);
    emit(g, config,
         {{"record", to_json(*record)},
          {"closure", {{"w1", closure.w1}, {"w0", closure.w0}, {"r2", closure.r2}}},
          {"plan", to_json(plan)}},
         record_line(*record) + "\n" + plan_table(plan));
    return kOk;
}

int cmd_run(const Globals& g, const std::string& text) {
    const auto config = effective_config(g);
    const auto resources = load_resources(config);
    const auto result = run_pipeline(text, resources);
    auto body = to_json(result);
    body["model_source"] = resources.model_source;
    std::string table = fmt::format("retrieved {} ({}, distance {:.4f})\n{}selected {}\n",
                                    record_line(result.retrieval.match.record),
                                    result.retrieval.method == RetrievalMethod::label ? "label" : "attributes",
                                    result.retrieval.match.distance, distribution_table(result.distribution),
                                    learner::code(result.selected));
    table += result.plan ? plan_table(*result.plan) : fmt::format("plan failed: {}\n", result.plan_error);
    emit(g, config, body, table);
    return result.plan ? kOk : kStageFailure;
}

int cmd_eval(const Globals& g, const std::string& out) {
    const auto config = effective_config(g);
    const auto report = evaluate_all(config);
    const auto text = g.format == "table" ? render_table(report.json) : report.json.dump(2) + "\n";
    if (!out.empty()) {
        std::ofstream file(out);
        if (!file) throw ConfigError(fmt::format("cannot write {}", out));
        file << text;
    }
    std::cout << text;
    return report.complete ? kOk : kStageFailure;
}

int cmd_rank(const Globals& g) {
    const auto config = effective_config(g);
    const auto resources = load_resources(config, false);
    const auto examples =
        learner::make_examples(learner::load_labels(config.resolve(config.labels)), resources.kb.records());
    auto rfe = config.training;
    rfe.epochs = config.harness.rfe_epochs;
    json rows = json::array();
    std::string table;
    int rank = 1;
    for (const auto& f : learner::rank_features(examples, rfe)) {
        rows.push_back({{"attribute", std::string(kb::to_string(f.attribute))}, {"importance", f.importance}});
        table += fmt::format("{:>2}. {:<10} {:>10.4f}\n", rank++, kb::to_string(f.attribute), f.importance);
    }
    emit(g, config, {{"epochs", rfe.epochs}, {"ranking", rows}}, table);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Object affordance to grasp planning pipeline"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed = 0;
    std::string metric;
    app.add_option("--config", g.config_path, "Pipeline config file")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
    auto* metric_opt = app.add_option("--metric", metric, "jpd, euclidean, minkowski, cosine or kd-tree");
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"json", "table"}))
        ->capture_default_str();

    std::string dir;
    std::string text;
    std::string label;
    std::string out;
    std::string csv;
    std::string target;
    std::string grasp;
    int first_id = 1;
    int id = 0;
    std::size_t k = 1;

    auto* ingest = app.add_subcommand("ingest", "Extract object drafts from saved product pages");
    ingest->add_option("dir", dir, "Directory of .html/.txt pages")->required();
    ingest->add_option("--first-id", first_id, "Id of the first draft");
    ingest->add_option("--out", out, "Write drafts as KB CSV");

    auto* parse = app.add_subcommand("parse", "Extract attributes from a description");
    parse->add_option("text", text, "Description")->required();

    auto* query = app.add_subcommand("query", "Retrieve the closest knowledge-base records");
    query->add_option("text", text, "Description");
    query->add_option("--label", label, "Look up by object label");
    query->add_option("-k", k, "Number of matches")->check(CLI::PositiveNumber);

    auto* train = app.add_subcommand("train", "Train the grasp classifier and save it");
    train->add_option("--out", out, "Model path (default: config model)");

    auto* predict = app.add_subcommand("predict", "Predict the grasp class of an object id or description");
    predict->add_option("target", target, "Object id or description")->required();

    auto* plan = app.add_subcommand("plan", "Plan a grasp on a knowledge-base object");
    plan->add_option("object-id", id, "Object id")->required();
    plan->add_option("class", grasp, "Grasp class, e.g. rp.b")->required();
    plan->add_option("--csv", csv, "Write the trajectory CSV here ('-' for stdout)");

    auto* run = app.add_subcommand("run", "Run the whole pipeline on a description");
    run->add_option("text", text, "Description or object label")->required();

    auto* eval = app.add_subcommand("eval", "Run every evaluation harness");
    eval->add_option("--out", out, "Also write the report here");

    auto* rank = app.add_subcommand("rank-features", "Rank attributes by recursive elimination");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigFailure;
    }
    if (*seed_opt) g.seed = seed;
    if (*metric_opt) g.metric = metric;

    try {
        if (*ingest) return cmd_ingest(g, dir, first_id, out);
        if (*parse) return cmd_parse(g, text);
        if (*query) return cmd_query(g, text, label, k);
        if (*train) return cmd_train(g, out);
        if (*predict) return cmd_predict(g, target);
        if (*plan) return cmd_plan(g, id, grasp, csv);
        if (*run) return cmd_run(g, text);
        if (*eval) return cmd_eval(g, out);
        if (*rank) return cmd_rank(g);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const Error& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << '\n';
        return kStageFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kStageFailure;
    }
    return kStageFailure;
}
