#pragma once

#include <cstdint>
#include <vector>

#include "distcomp/core.hpp"

namespace distcomp {

struct DownsampleResult {
    PointMatrix points;
    /// Empty when no input weights were given; otherwise per-cell sums of
    /// the member weights, renormalized to mean 1.
    WeightVector weights;
    /// Source row of each output point.
    std::vector<Eigen::Index> source_indices;
};

/// Box grid filter: at most one point per occupied cubic cell of side
/// `cell`. The survivor is drawn uniformly among the cell's points from a
/// per-cell stream derived from `seed`, so the result is deterministic
/// and independent of input ordering within a cell. Output points keep
/// their input relative order.
DownsampleResult box_grid_downsample(const PointMatrix& points, const WeightVector& weights,
                                     double cell, std::uint64_t seed);

}  // namespace distcomp
