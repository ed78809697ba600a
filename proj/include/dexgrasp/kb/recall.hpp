#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dexgrasp/common/random.hpp"
#include "dexgrasp/kb/knowledge_base.hpp"

namespace dexgrasp::kb {

/// How a knowledge-base record is corrupted into a query.
struct NoiseSpec {
    /// Continuous fields are scaled by (1 + u * relative_noise), u ~ U(-1, 1).
    double relative_noise = 0.0;
    /// Per-attribute independent drop probability; ignored when drop_count is set.
    double drop_probability = 0.0;
    /// When set, exactly this many distinct attributes are dropped per query.
    std::optional<std::size_t> drop_count;
};

struct RecallQuery {
    std::size_t source;  // index into kb.records()
    FeatureQuery query;
};

struct RecallResult {
    std::size_t hits = 0;
    std::size_t trials = 0;
    double recall() const { return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials); }
};

FeatureQuery perturb(const FeatureQuery& source, const NoiseSpec& noise, Rng& rng);

/// Draws `trials` perturbed queries. The sequence depends only on the seed,
/// so every metric can be scored on the same queries.
std::vector<RecallQuery> make_recall_queries(const KnowledgeBase& kb, const NoiseSpec& noise, std::size_t trials,
                                             std::uint64_t seed);

RecallResult score_recall(const KnowledgeBase& kb, const std::vector<RecallQuery>& queries, const Metric& metric);

/// Top-1 recall: a trial succeeds iff the source record is retrieved first.
RecallResult evaluate_recall(const KnowledgeBase& kb, const NoiseSpec& noise, const Metric& metric,
                             std::size_t trials, std::uint64_t seed);

}  // namespace dexgrasp::kb
