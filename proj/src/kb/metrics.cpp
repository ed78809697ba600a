#include "dexgrasp/kb/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dexgrasp::kb {
namespace {

// Calls fn(dx, dy) for every encoded column shared by both masks.
template <typename Fn>
void for_shared_columns(const EncodedFeatures& x, const EncodedFeatures& y, Fn&& fn) {
    const AttributeMask shared = x.mask & y.mask;
    for (auto attribute : kAllAttributes) {
        if (!shared.test(index_of(attribute))) continue;
        const auto range = block_of(attribute);
        for (std::size_t j = range.offset; j < range.offset + range.width; ++j) fn(x.values[j], y.values[j]);
    }
}

}  // namespace

Metric parse_metric(std::string_view name) {
    if (name == "jpd") return {MetricKind::jpd};
    if (name == "euclidean") return {MetricKind::euclidean};
    if (name == "cosine") return {MetricKind::cosine};
    if (name == "kd-tree" || name == "kdtree" || name == "kd_tree") return {MetricKind::kd_tree};
    if (name == "minkowski") return {MetricKind::minkowski, 3.0};
    if (name.starts_with("minkowski:")) {
        const std::string p_text(name.substr(10));
        std::size_t used = 0;
        double p = 0.0;
        try {
            p = std::stod(p_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != p_text.size() || !(p >= 1.0)) {
            throw std::invalid_argument(fmt::format("invalid Minkowski order '{}'", p_text));
        }
        return {MetricKind::minkowski, p};
    }
    throw std::invalid_argument(fmt::format("unknown metric '{}'", name));
}

std::string to_string(const Metric& metric) {
    switch (metric.kind) {
        case MetricKind::jpd: return "jpd";
        case MetricKind::euclidean: return "euclidean";
        case MetricKind::cosine: return "cosine";
        case MetricKind::kd_tree: return "kd-tree";
        case MetricKind::minkowski: return fmt::format("minkowski:{:g}", metric.p);
    }
    return "unknown";
}

double jpd_distance(const EncodedFeatures& x, const EncodedFeatures& y) {
    double total = 0.0;
    for_shared_columns(x, y, [&](double u, double v) { total += std::log1p(std::abs(u - v)); });
    return total;
}

double euclidean_distance(const EncodedFeatures& x, const EncodedFeatures& y) {
    double total = 0.0;
    for_shared_columns(x, y, [&](double u, double v) { total += (u - v) * (u - v); });
    return std::sqrt(total);
}

double minkowski_distance(const EncodedFeatures& x, const EncodedFeatures& y, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument(fmt::format("Minkowski order must be >= 1, got {}", p));
    double total = 0.0;
    for_shared_columns(x, y, [&](double u, double v) { total += std::pow(std::abs(u - v), p); });
    return std::pow(total, 1.0 / p);
}

double cosine_distance(const EncodedFeatures& x, const EncodedFeatures& y) {
    double dot = 0.0;
    double xx = 0.0;
    double yy = 0.0;
    for_shared_columns(x, y, [&](double u, double v) {
        dot += u * v;
        xx += u * u;
        yy += v * v;
    });
    if (xx == 0.0 || yy == 0.0) return 1.0;
    const double similarity = dot / (std::sqrt(xx) * std::sqrt(yy));
    return std::max(0.0, 1.0 - similarity);
}

double distance(const EncodedFeatures& x, const EncodedFeatures& y, const Metric& metric) {
    switch (metric.kind) {
        case MetricKind::jpd: return jpd_distance(x, y);
        case MetricKind::euclidean:
        case MetricKind::kd_tree: return euclidean_distance(x, y);
        case MetricKind::minkowski: return minkowski_distance(x, y, metric.p);
        case MetricKind::cosine: return cosine_distance(x, y);
    }
    throw std::logic_error("unhandled metric kind");
}

}  // namespace dexgrasp::kb
