#pragma once

#include <cstddef>
#include <vector>

#include "dexgrasp/kb/encoding.hpp"

namespace dexgrasp::kb {

struct Neighbor {
    std::size_t index;  // position in the indexed point list
    int id;
    double distance;
};

/// Orders by distance, then ascending id.
inline bool closer(const Neighbor& lhs, const Neighbor& rhs) {
    if (lhs.distance != rhs.distance) return lhs.distance < rhs.distance;
    return lhs.id < rhs.id;
}

/// Exact k-nearest-neighbour index over encoded features under the masked
/// Euclidean distance. The query mask decides which columns count; a split
/// on a column the query lacks cannot prune, so both children are visited.
/// Points with absent attributes are kept outside the tree and scanned
/// linearly, since a missing coordinate invalidates the split-plane bound.
class KdTree {
public:
    KdTree() = default;

    /// `ids` tie-break equal distances; both spans must have equal length.
    KdTree(std::vector<EncodedFeatures> points, std::vector<int> ids);

    /// The k closest points, sorted by (distance, id). Returns fewer when the
    /// index holds fewer than k points.
    std::vector<Neighbor> nearest(const EncodedFeatures& query, std::size_t k) const;

    std::size_t size() const { return points_.size(); }
    std::size_t tree_size() const { return nodes_.size(); }

private:
    struct Node {
        std::size_t point;
        std::size_t column;
        int left = -1;
        int right = -1;
    };

    int build(std::vector<std::size_t>& order, std::size_t begin, std::size_t end, std::size_t depth);
    void search(int node, const EncodedFeatures& query, const std::array<bool, kEncodedWidth>& columns,
                std::size_t k, std::vector<Neighbor>& heap) const;
    void offer(std::size_t point, const EncodedFeatures& query, std::size_t k, std::vector<Neighbor>& heap) const;

    std::vector<EncodedFeatures> points_;
    std::vector<int> ids_;
    std::vector<Node> nodes_;
    std::vector<std::size_t> unindexed_;
    int root_ = -1;
};

}  // namespace dexgrasp::kb
