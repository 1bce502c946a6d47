#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace distcomp {

/// Point sets are stored one point per row, N x D with D in {2, 3}.
/// Design points are the data observations; scan points are the GMM centroids.
using PointMatrix = Eigen::MatrixXd;

/// Per-centroid area weights, positive with mean 1.
using WeightVector = Eigen::VectorXd;

/// Throws std::invalid_argument unless pts is a nonempty finite N x D set, D in {2, 3}.
void validate_point_set(const PointMatrix& pts, const std::string& name);

/// Throws std::invalid_argument unless w is positive with mean 1 (1e-12 relative).
void validate_weights(const WeightVector& w, const std::string& name);

/// Scales w so its mean is exactly 1. All entries must be positive.
WeightVector normalize_weights(WeightVector w);

/// Diagonal length of the axis-aligned bounding box. Used as the working
/// notion of point-set diameter for tolerances and floors.
double bounding_diagonal(const PointMatrix& pts);

/// splitmix64; used to derive independent per-key streams from one seed.
std::uint64_t hash_mix(std::uint64_t x);

}  // namespace distcomp
