#include "dexgrasp/kb/recall.hpp"

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::kb {

FeatureQuery perturb(const FeatureQuery& source, const NoiseSpec& noise, Rng& rng) {
    FeatureQuery query = source;
    // Draw noise for every continuous slot even when absent so the stream of
    // draws does not depend on which fields a record carries.
    for (auto* field : {&query.a, &query.b, &query.c, &query.mass}) {
        const double u = rng.uniform(-1.0, 1.0);
        if (*field) **field *= 1.0 + u * noise.relative_noise;
    }
    if (noise.drop_count) {
        std::vector<Attribute> order(kAllAttributes.begin(), kAllAttributes.end());
        rng.shuffle(order);
        const std::size_t count = std::min(*noise.drop_count, order.size());
        for (std::size_t i = 0; i < count; ++i) query.drop(order[i]);
    } else {
        for (auto attribute : kAllAttributes) {
            if (rng.uniform() < noise.drop_probability) query.drop(attribute);
        }
    }
    query.normalize();
    return query;
}

std::vector<RecallQuery> make_recall_queries(const KnowledgeBase& kb, const NoiseSpec& noise, std::size_t trials,
                                             std::uint64_t seed) {
    if (kb.empty()) throw RetrievalError("knowledge base is empty");
    Rng rng(seed);
    std::vector<RecallQuery> queries;
    queries.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t source = rng.index(kb.size());
        queries.push_back({source, perturb(kb.records()[source].features, noise, rng)});
    }
    return queries;
}

RecallResult score_recall(const KnowledgeBase& kb, const std::vector<RecallQuery>& queries, const Metric& metric) {
    RecallResult result;
    for (const auto& item : queries) {
        const auto best = kb.retrieve(item.query, metric, 1);
        result.hits += best.front().record.id == kb.records()[item.source].id ? 1 : 0;
        ++result.trials;
    }
    return result;
}

RecallResult evaluate_recall(const KnowledgeBase& kb, const NoiseSpec& noise, const Metric& metric,
                             std::size_t trials, std::uint64_t seed) {
    return score_recall(kb, make_recall_queries(kb, noise, trials, seed), metric);
}

}  // namespace dexgrasp::kb
