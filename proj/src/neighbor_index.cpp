#include "distcomp/neighbor_index.hpp"

#include <algorithm>

namespace distcomp {

namespace {
constexpr Eigen::Index kLeafSize = 16;
}

NeighborIndex::NeighborIndex(PointMatrix points) : points_(std::move(points)) {
    validate_point_set(points_, "NeighborIndex");
    order_.resize(static_cast<std::size_t>(points_.rows()));
    for (std::size_t i = 0; i < order_.size(); ++i) {
        order_[i] = static_cast<Eigen::Index>(i);
    }
    nodes_.reserve(order_.size() / kLeafSize * 2 + 1);
    build(0, points_.rows(), 0);
}

int NeighborIndex::build(Eigen::Index begin, Eigen::Index end, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }
    const int axis = depth % static_cast<int>(points_.cols());
    const Eigen::Index mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) {
                         return points_(a, axis) < points_(b, axis);
                     });
    const double split = points_(order_[static_cast<std::size_t>(mid)], axis);
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void NeighborIndex::search(int node, const Eigen::RowVectorXd& q, int k,
                           std::vector<Candidate>& heap) const {
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    if (n.axis < 0) {
        for (Eigen::Index i = n.begin; i < n.end; ++i) {
            const Eigen::Index idx = order_[static_cast<std::size_t>(i)];
            const double d2 = (points_.row(idx) - q).squaredNorm();
            const Candidate c{d2, idx};
            if (heap.size() < static_cast<std::size_t>(k)) {
                heap.push_back(c);
                std::push_heap(heap.begin(), heap.end());
            } else if (c < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = c;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        return;
    }
    const double delta = q[n.axis] - n.split;
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    search(near, q, k, heap);
    if (heap.size() < static_cast<std::size_t>(k) || delta * delta <= heap.front().d2) {
        search(far, q, k, heap);
    }
}

std::vector<Eigen::Index> NeighborIndex::nearest(const Eigen::RowVectorXd& q, int k) const {
    if (k < 1) {
        throw std::invalid_argument("NeighborIndex::nearest: k must be >= 1");
    }
    if (q.size() != points_.cols()) {
        throw std::invalid_argument("NeighborIndex::nearest: query dimension mismatch");
    }
    k = static_cast<int>(std::min<Eigen::Index>(k, points_.rows()));
    std::vector<Candidate> heap;
    heap.reserve(static_cast<std::size_t>(k));
    search(0, q, k, heap);
    std::sort_heap(heap.begin(), heap.end());
    std::vector<Eigen::Index> out;
    out.reserve(heap.size());
    for (const Candidate& c : heap) {
        out.push_back(c.idx);
    }
    return out;
}

}  // namespace distcomp
