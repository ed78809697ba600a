// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dexgrasp/common/random.hpp"
#include "dexgrasp/hand/closure.hpp"
#include "dexgrasp/hand/contact.hpp"
#include "dexgrasp/hand/geometry.hpp"
#include "dexgrasp/hand/planner.hpp"
#include "dexgrasp/hand/topology.hpp"
#include "dexgrasp/kb/knowledge_base.hpp"
#include "dexgrasp/kb/recall.hpp"
#include "dexgrasp/learner/classifier.hpp"
#include "dexgrasp/learner/evaluation.hpp"
#include "dexgrasp/learner/grasp.hpp"
#include "dexgrasp/parser/description_parser.hpp"
#include "dexgrasp/parser/scoring.hpp"
#include "dexgrasp/pipeline/config.hpp"
#include "dexgrasp/pipeline/report.hpp"

using namespace dexgrasp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string data(const std::string& name) { return std::string(DEXGRASP_DATA_DIR) + "/" + name; }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const std::vector<kb::Metric> kMetrics = {
    {kb::MetricKind::jpd}, {kb::MetricKind::euclidean}, {kb::MetricKind::minkowski, 3.0},
    {kb::MetricKind::cosine}, {kb::MetricKind::kd_tree},
};

Outcome metric_ordering() {
    const auto start = std::chrono::steady_clock::now();
    const kb::KnowledgeBase base(kb::load_records(data("kb.csv")));
    kb::NoiseSpec noise;
    noise.relative_noise = 0.1;
    noise.drop_count = 1;
    const auto queries = kb::make_recall_queries(base, noise, 1000, 7);
    std::vector<double> recall;
    for (const auto& metric : kMetrics) recall.push_back(kb::score_recall(base, queries, metric).recall());
    const double elapsed = seconds_since(start);

    const bool ordered = std::all_of(recall.begin() + 1, recall.end(), [&](double r) { return recall[0] >= r; });
    const bool pass = base.size() >= 100 && ordered && recall[0] >= 0.85 && elapsed < 10.0;
    return {pass, fmt::format("records={} jpd={:.3f} euclidean={:.3f} minkowski={:.3f} cosine={:.3f} kd-tree={:.3f} "
                              "(need jpd >= all, jpd >= 0.85) time={:.2f}s (< 10s)",
                              base.size(), recall[0], recall[1], recall[2], recall[3], recall[4], elapsed)};
}

Outcome parser_quality() {
    const auto records = kb::load_records(data("kb.csv"));
    const parser::DescriptionParser description_parser(parser::DescriptorLexicon::load(data("lexicon/descriptors.txt")));
    const auto corpus = parser::load_corpus(data("descriptions.jsonl"), records);
    const auto start = std::chrono::steady_clock::now();
    const auto score = parser::score_parser(corpus, description_parser, records);
    const double elapsed = seconds_since(start);
    const bool pass = corpus.size() >= 50 && score.r2_dimensions >= 0.95 && score.r2_mass >= 0.80 && elapsed < 5.0;
    return {pass, fmt::format("descriptions={} dimension R2={:.4f} (>= 0.95) mass R2={:.4f} (>= 0.80) time={:.2f}s (< 5s)",
                              corpus.size(), score.r2_dimensions, score.r2_mass, elapsed)};
}

Outcome grasp_scoring() {
    const auto labels = learner::load_labels(data("labels.csv"));
    const auto examples = learner::make_examples(labels, kb::load_records(data("kb.csv")));
    const auto config = pipeline::load_config(data("config.json")).training;
    const auto start = std::chrono::steady_clock::now();
    const auto trained = learner::train(examples, config);
    const double elapsed = seconds_since(start);

    std::vector<learner::GraspDistribution> predictions;
    for (const auto& e : examples) predictions.push_back(learner::predict(trained.model, e.features));
    const auto scores = learner::score_predictions(examples, predictions);

    // Random single pairs and random batches.
    Rng rng(7);
    std::size_t violations = 0;
    auto random_distribution = [&] {
        learner::GraspDistribution d;
        double sum = 0.0;
        for (double& v : d.p) {
            v = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
            sum += v;
        }
        if (sum == 0.0) return learner::GraspDistribution::uniform();
        for (double& v : d.p) v /= sum;
        return d;
    };
    auto random_label = [&] {
        learner::GraspLabel label;
        for (auto& f : label.frequencies) f = rng.uniform() < 0.5 ? 0u : static_cast<unsigned>(rng.index(6));
        if (label.total() == 0) label.frequencies[rng.index(learner::kGraspClassCount)] = 1;
        return label;
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = trial % 2 == 0 ? 1 : 1 + rng.index(20);
        std::vector<learner::GraspLabel> truth;
        std::vector<learner::GraspDistribution> guess;
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(random_label());
            guess.push_back(random_distribution());
        }
        if (learner::match_score(truth, guess) > learner::feasibility_score(truth, guess)) ++violations;
    }

    const bool pass = examples.size() >= 30 && scores.feasibility == 1.0 && scores.match >= 0.70 &&
                      scores.match <= scores.feasibility && violations == 0 && elapsed < 60.0;
    return {pass, fmt::format("objects={} F_l={:.3f} (= 1.0) F_m={:.3f} (>= 0.70) F_m>F_l violations={}/1000 (= 0) "
                              "training={:.2f}s (< 60s)",
                              examples.size(), scores.feasibility, scores.match, violations, elapsed)};
}

Outcome gradient_correctness() {
    Rng rng(2024);
    double worst = 0.0;
    std::size_t checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto activation = trial % 2 == 0 ? learner::Activation::tanh : learner::Activation::relu;
        const std::size_t inputs = 3 + rng.index(6);
        std::vector<std::size_t> hidden = {3 + rng.index(6)};
        if (trial % 3 != 0) hidden.push_back(2 + rng.index(5));
        auto model = learner::init_model(learner::ModelConfig{hidden, activation}, 500 + trial, inputs);
        for (auto& layer : model.layers) {
            for (double& b : layer.bias) b = rng.uniform(-0.5, 0.5);
        }
        std::vector<std::vector<double>> xs;
        std::vector<learner::GraspDistribution> ts;
        for (int i = 0; i < 5; ++i) {
            std::vector<double> x(inputs);
            for (double& v : x) v = rng.uniform(-1.0, 2.0);
            xs.push_back(std::move(x));
            learner::GraspDistribution t;
            double sum = 0.0;
            for (double& v : t.p) sum += (v = rng.uniform());
            for (double& v : t.p) v /= sum;
            ts.push_back(t);
        }
        const auto analytic = learner::loss_gradient(model, xs, ts);
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            auto check = [&](std::vector<double>& params, const std::vector<double>& grads) {
                for (std::size_t k = 0; k < params.size(); ++k) {
                    const double saved = params[k];
                    const double h = 1e-6;
                    params[k] = saved + h;
                    const double up = learner::dataset_loss(model, xs, ts);
                    params[k] = saved - h;
                    const double down = learner::dataset_loss(model, xs, ts);
                    params[k] = saved;
                    const double numeric = (up - down) / (2.0 * h);
                    const double scale = std::max({std::abs(numeric), std::abs(grads[k]), 1e-6});
                    worst = std::max(worst, std::abs(numeric - grads[k]) / scale);
                    ++checked;
                }
            };
            check(model.layers[l].weights, analytic.layers[l].weights);
            check(model.layers[l].bias, analytic.layers[l].bias);
        }
    }
    return {worst <= 1e-4,
            fmt::format("models=20 parameters={} max relative error={:.2e} (<= 1e-4)", checked, worst)};
}

Outcome closure_linearity() {
    const auto geometry = hand::load_geometry(data("geometry.json"));
    const auto topologies = hand::load_topologies(data("topologies.json"), geometry);
    double worst_r2 = 1.0;
    std::string worst_class;
    for (auto grasp : learner::kAllGraspClasses) {
        const auto model = hand::fit_closure_model(topologies.get(grasp), geometry);
        if (model.r2 <= worst_r2) {
            worst_r2 = model.r2;
            worst_class = std::string(learner::code(grasp));
        }
    }

    Rng rng(99);
    double worst_error = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double slope = rng.uniform(-5.0, 5.0);
        const double intercept = rng.uniform(-10.0, 10.0);
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < 5 + rng.index(50); ++i) {
            x.push_back(rng.uniform(-20.0, 20.0));
            y.push_back(slope * x.back() + intercept);
        }
        const auto fit = hand::fit_line(x, y);
        worst_error = std::max({worst_error, std::abs(fit.slope - slope), std::abs(fit.intercept - intercept)});
    }
    const bool pass = worst_r2 >= 0.99 && worst_error <= 1e-9;
    return {pass, fmt::format("min R2={:.5f} at {} (>= 0.99) OLS max parameter error={:.2e} (<= 1e-9)", worst_r2,
                              worst_class, worst_error)};
}

Outcome plan_fidelity() {
    const auto geometry = hand::load_geometry(data("geometry.json"));
    const auto topologies = hand::load_topologies(data("topologies.json"), geometry);
    std::map<learner::GraspClass, hand::ClosureModel> closures;
    for (auto grasp : learner::kAllGraspClasses) {
        closures[grasp] = hand::fit_closure_model(topologies.get(grasp), geometry);
    }
    std::map<int, kb::ObjectRecord> by_id;
    for (const auto& r : kb::load_records(data("kb.csv"))) by_id[r.id] = r;

    std::size_t plannable = 0;
    std::size_t secured = 0;
    std::size_t within = 0;
    double worst_gap = 0.0;
    std::vector<std::string> failures;
    for (const auto& label : learner::load_labels(data("labels.csv"))) {
        const auto grasp = learner::select_grasp(label.distribution());
        const auto& record = by_id.at(label.object_id);
        const auto& topology = topologies.get(grasp);
        const auto& closure = closures.at(grasp);
        hand::GraspPlan plan;
        try {
            plan = hand::plan_grasp(grasp, record, closure, topology, geometry);
        } catch (const std::exception&) {
            continue;
        }
        ++plannable;
        const auto report =
            hand::simulate_contact(plan, hand::object_for_plan(plan, record, topology, geometry), topology, geometry);
        const double gap = std::abs(plan.d_vf_profile.back() - closure.d_vf(plan.d_o));
        worst_gap = std::max(worst_gap, gap);
        secured += report.secured;
        within += gap <= 0.1;
        if (!report.secured || gap > 0.1) failures.push_back(record.label);
    }
    const double rate = plannable == 0 ? 0.0 : static_cast<double>(secured) / static_cast<double>(plannable);
    const bool pass = plannable > 0 && failures.empty() && rate >= 0.85;
    std::string detail = fmt::format("plannable={} secured={} d_vf within 0.1cm={} max |d_vf gap|={:.4f}cm "
                                     "secured rate={:.3f} (>= 0.85)",
                                     plannable, secured, within, worst_gap, rate);
    if (!failures.empty()) detail += fmt::format(" failing: {}", fmt::join(failures, ", "));
    return {pass, detail};
}

Outcome oracle_equivalence() {
    const kb::KnowledgeBase base(kb::load_records(data("kb.csv")));
    Rng rng(31);
    std::vector<kb::FeatureQuery> queries;
    for (int i = 0; i < 200; ++i) {
        const auto& source = base.records()[rng.index(base.size())];
        kb::NoiseSpec noise;
        noise.relative_noise = i % 4 == 0 ? 0.0 : rng.uniform(0.0, 0.5);
        noise.drop_count = rng.index(6);
        queries.push_back(kb::perturb(source.features, noise, rng));
    }

    const std::size_t k = 5;
    std::size_t mismatches = 0;
    std::size_t comparisons = 0;
    for (const auto& metric : kMetrics) {
        for (const auto& query : queries) {
            const auto encoded = kb::encode(query);
            std::vector<std::pair<double, int>> scan;
            for (std::size_t i = 0; i < base.size(); ++i) {
                scan.emplace_back(kb::distance(encoded, base.encoded()[i], metric), base.records()[i].id);
            }
            std::sort(scan.begin(), scan.end());
            const auto matches = base.retrieve(query, metric, k);
            bool same = matches.size() == k;
            for (std::size_t j = 0; same && j < k; ++j) same = matches[j].record.id == scan[j].second;
            mismatches += !same;
            ++comparisons;
        }
    }
    return {mismatches == 0, fmt::format("metrics=5 queries=200 top-{} id lists differing={}/{} (= 0)", k, mismatches,
                                         comparisons)};
}

Outcome determinism() {
    const auto config = pipeline::load_config(data("config.json"));
    const auto start = std::chrono::steady_clock::now();
    const auto first = pipeline::evaluate_all(config).json.dump();
    const auto second = pipeline::evaluate_all(config).json.dump();
    const double elapsed = seconds_since(start);
    return {first == second,
            fmt::format("report bytes={} identical={} time={:.1f}s", first.size(), first == second, elapsed)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 metric ordering", metric_ordering},       {"2 parser quality", parser_quality},
        {"3 grasp scoring", grasp_scoring},           {"4 gradient correctness", gradient_correctness},
        {"5 closure linearity", closure_linearity},   {"6 plan fidelity", plan_fidelity},
        {"7 oracle equivalence", oracle_equivalence}, {"8 determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome = {false, fmt::format("error: {}", e.what())};
        }
        failed += !outcome.pass;
        fmt::print("{} [{}] {}\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail);
        std::fflush(stdout);
    }
    fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
