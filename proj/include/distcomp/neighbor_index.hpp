#pragma once

#include <vector>

#include "distcomp/core.hpp"

namespace distcomp {

/// Exact k-nearest-neighbor search over a fixed point set (kd-tree,
/// median split). Results come back in nondecreasing distance order with
/// ties broken by lower point index. Immutable after construction; safe
/// for concurrent queries.
class NeighborIndex {
public:
    explicit NeighborIndex(PointMatrix points);

    Eigen::Index size() const { return points_.rows(); }
    const PointMatrix& points() const { return points_; }

    /// Indices of the min(k, size()) nearest points to q.
    std::vector<Eigen::Index> nearest(const Eigen::RowVectorXd& q, int k) const;

private:
    struct Node {
        int axis = -1;          // -1 marks a leaf
        double split = 0.0;
        Eigen::Index begin = 0; // leaf range into order_
        Eigen::Index end = 0;
        int left = -1;
        int right = -1;
    };

    // (distance^2, index) pairs ordered worst-first while collecting.
    struct Candidate {
        double d2;
        Eigen::Index idx;
        bool operator<(const Candidate& o) const {
            return d2 < o.d2 || (d2 == o.d2 && idx < o.idx);
        }
    };

    int build(Eigen::Index begin, Eigen::Index end, int depth);
    void search(int node, const Eigen::RowVectorXd& q, int k,
                std::vector<Candidate>& heap) const;

    PointMatrix points_;
    std::vector<Eigen::Index> order_;
    std::vector<Node> nodes_;
};

}  // namespace distcomp
