#pragma once

#include <cstddef>
#include <vector>

#include "dexgrasp/kb/attributes.hpp"
#include "dexgrasp/learner/classifier.hpp"

namespace dexgrasp::learner {

struct GraspScores {
    double feasibility = 0.0;  ///< F_l
    double match = 0.0;        ///< F_m
    std::vector<GraspDistribution> predictions;
};

GraspScores score_predictions(const std::vector<Example>& examples, const std::vector<GraspDistribution>& predictions);

/// Trains on every example and scores the same examples.
GraspScores evaluate_resubstitution(const std::vector<Example>& examples, const TrainConfig& config);

/// Each example is predicted by a model trained on all the others.
GraspScores evaluate_leave_one_out(const std::vector<Example>& examples, const TrainConfig& config);

struct FeatureImportance {
    kb::Attribute attribute;
    /// Increase in final training loss when the attribute is neutralized,
    /// measured in the round it was eliminated.
    double importance = 0.0;
};

/// Recursive feature elimination. Each round trains with the surviving
/// attributes, then retrains with each survivor neutralized (its input
/// columns replaced by their dataset mean) and eliminates the one whose
/// loss rises least; ties go to the later attribute. The result lists the
/// most important attribute first.
std::vector<FeatureImportance> rank_features(const std::vector<Example>& examples, const TrainConfig& config);

}  // namespace dexgrasp::learner
