#include "dexgrasp/learner/evaluation.hpp"

#include <algorithm>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::learner {
namespace {

using Matrix = std::vector<std::vector<double>>;

void neutralize(Matrix& inputs, kb::Attribute attribute) {
    for (std::size_t column : input_columns(attribute)) {
        double mean = 0.0;
        for (const auto& row : inputs) mean += row[column];
        mean /= static_cast<double>(inputs.size());
        for (auto& row : inputs) row[column] = mean;
    }
}

double final_loss(const Matrix& inputs, const std::vector<GraspDistribution>& truth, const TrainConfig& config) {
    const auto result = train(inputs, truth, config);
    return dataset_loss(result.model, inputs, truth);
}

}  // namespace

GraspScores score_predictions(const std::vector<Example>& examples,
                              const std::vector<GraspDistribution>& predictions) {
    std::vector<GraspLabel> labels;
    labels.reserve(examples.size());
    for (const auto& e : examples) labels.push_back(e.label);
    return {feasibility_score(labels, predictions), match_score(labels, predictions), predictions};
}

GraspScores evaluate_resubstitution(const std::vector<Example>& examples, const TrainConfig& config) {
    const auto model = train(examples, config).model;
    std::vector<GraspDistribution> predictions;
    for (const auto& e : examples) predictions.push_back(predict(model, e.features));
    return score_predictions(examples, predictions);
}

GraspScores evaluate_leave_one_out(const std::vector<Example>& examples, const TrainConfig& config) {
    if (examples.size() < 2) throw TrainingError("leave-one-out needs at least two examples");
    std::vector<GraspDistribution> predictions;
    for (std::size_t held = 0; held < examples.size(); ++held) {
        std::vector<Example> rest;
        for (std::size_t i = 0; i < examples.size(); ++i) {
            if (i != held) rest.push_back(examples[i]);
        }
        predictions.push_back(predict(train(rest, config).model, examples[held].features));
    }
    return score_predictions(examples, predictions);
}

std::vector<FeatureImportance> rank_features(const std::vector<Example>& examples, const TrainConfig& config) {
    if (examples.empty()) throw TrainingError("dataset is empty");
    Matrix inputs = input_matrix(examples);
    const auto truth = targets(examples);

    std::vector<kb::Attribute> remaining(kb::kAllAttributes.begin(), kb::kAllAttributes.end());
    std::vector<FeatureImportance> eliminated;
    while (remaining.size() >= 2) {
        const double base = final_loss(inputs, truth, config);
        std::size_t weakest = 0;
        double weakest_importance = 0.0;
        for (std::size_t k = 0; k < remaining.size(); ++k) {
            Matrix trial = inputs;
            neutralize(trial, remaining[k]);
            const double importance = final_loss(trial, truth, config) - base;
            if (k == 0 || importance <= weakest_importance) {
                weakest = k;
                weakest_importance = importance;
            }
        }
        eliminated.push_back({remaining[weakest], weakest_importance});
        neutralize(inputs, remaining[weakest]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(weakest));
    }

    const double base = final_loss(inputs, truth, config);
    Matrix trial = inputs;
    neutralize(trial, remaining.front());
    eliminated.push_back({remaining.front(), final_loss(trial, truth, config) - base});

    std::reverse(eliminated.begin(), eliminated.end());
    return eliminated;
}

}  // namespace dexgrasp::learner
