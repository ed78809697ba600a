#include "dexgrasp/kb/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dexgrasp/kb/metrics.hpp"

namespace dexgrasp::kb {

KdTree::KdTree(std::vector<EncodedFeatures> points, std::vector<int> ids)
    : points_(std::move(points)), ids_(std::move(ids)) {
    if (points_.size() != ids_.size()) throw std::invalid_argument("KdTree: points and ids differ in length");
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].mask.all()) {
            order.push_back(i);
        } else {
            unindexed_.push_back(i);
        }
    }
    nodes_.reserve(order.size());
    root_ = build(order, 0, order.size(), 0);
}

int KdTree::build(std::vector<std::size_t>& order, std::size_t begin, std::size_t end, std::size_t depth) {
    if (begin >= end) return -1;

    // Split on the widest column of this subset; cycling by depth breaks ties.
    std::size_t best_column = depth % kEncodedWidth;
    double best_spread = -1.0;
    for (std::size_t offset = 0; offset < kEncodedWidth; ++offset) {
        const std::size_t column = (depth + offset) % kEncodedWidth;
        double lo = points_[order[begin]].values[column];
        double hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const double v = points_[order[i]].values[column];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_column = column;
        }
    }

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(mid),
                     order.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t lhs, std::size_t rhs) {
                         const double l = points_[lhs].values[best_column];
                         const double r = points_[rhs].values[best_column];
                         return l != r ? l < r : lhs < rhs;
                     });

    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{order[mid], best_column});
    const int left = build(order, begin, mid, depth + 1);
    const int right = build(order, mid + 1, end, depth + 1);
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
}

void KdTree::offer(std::size_t point, const EncodedFeatures& query, std::size_t k,
                   std::vector<Neighbor>& heap) const {
    const Neighbor candidate{point, ids_[point], euclidean_distance(query, points_[point])};
    if (heap.size() < k) {
        heap.push_back(candidate);
        std::push_heap(heap.begin(), heap.end(), closer);
    } else if (closer(candidate, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), closer);
        heap.back() = candidate;
        std::push_heap(heap.begin(), heap.end(), closer);
    }
}

void KdTree::search(int node_index, const EncodedFeatures& query, const std::array<bool, kEncodedWidth>& columns,
                    std::size_t k, std::vector<Neighbor>& heap) const {
    if (node_index < 0) return;
    const Node& node = nodes_[static_cast<std::size_t>(node_index)];
    offer(node.point, query, k, heap);

    const double split = points_[node.point].values[node.column];
    if (!columns[node.column]) {
        search(node.left, query, columns, k, heap);
        search(node.right, query, columns, k, heap);
        return;
    }
    const double diff = query.values[node.column] - split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search(near, query, columns, k, heap);
    // Points on the far side are at least |diff| away. Equal distances must
    // still be visited because ids break ties, and the slack absorbs rounding
    // in the square root.
    const double worst = heap.size() < k ? INFINITY : heap.front().distance;
    if (std::abs(diff) <= worst * (1.0 + 1e-12) + 1e-300) search(far, query, columns, k, heap);
}

std::vector<Neighbor> KdTree::nearest(const EncodedFeatures& query, std::size_t k) const {
    std::vector<Neighbor> heap;
    if (k == 0) return heap;
    heap.reserve(k + 1);
    const auto columns = query.column_mask();
    search(root_, query, columns, k, heap);
    for (std::size_t point : unindexed_) offer(point, query, k, heap);
    std::sort_heap(heap.begin(), heap.end(), closer);
    return heap;
}

}  // namespace dexgrasp::kb
