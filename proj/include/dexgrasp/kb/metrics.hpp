#pragma once

#include <string>
#include <string_view>

#include "dexgrasp/kb/encoding.hpp"

namespace dexgrasp::kb {

enum class MetricKind { jpd, euclidean, minkowski, cosine, kd_tree };

/// A retrieval metric. `kd_tree` ranks by Euclidean distance through a
/// K-D tree index; `p` is only read for Minkowski.
struct Metric {
    MetricKind kind = MetricKind::jpd;
    double p = 3.0;

    friend bool operator==(const Metric&, const Metric&) = default;
};

/// "jpd", "euclidean", "minkowski" (p=3), "minkowski:<p>", "cosine", "kd-tree".
Metric parse_metric(std::string_view name);
std::string to_string(const Metric& metric);

/// Joint Probability Distance: sum of ln(1 + |x_j - y_j|) over the encoded
/// columns whose attribute is present in both masks. Raw units.
double jpd_distance(const EncodedFeatures& x, const EncodedFeatures& y);

double euclidean_distance(const EncodedFeatures& x, const EncodedFeatures& y);

/// Requires p >= 1; throws std::invalid_argument otherwise.
double minkowski_distance(const EncodedFeatures& x, const EncodedFeatures& y, double p);

/// 1 - cosine similarity over the masked subvectors. A zero-norm side gives 1.
double cosine_distance(const EncodedFeatures& x, const EncodedFeatures& y);

/// Dispatches on the metric kind (kd_tree evaluates as Euclidean).
double distance(const EncodedFeatures& x, const EncodedFeatures& y, const Metric& metric);

}  // namespace dexgrasp::kb
