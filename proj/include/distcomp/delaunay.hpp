#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace distcomp {

/// Delaunay triangulation of 2-D points by incremental Bowyer-Watson
/// insertion. Triangles are CCW-oriented index triples into `points`.
/// Requires at least 3 non-collinear points.
std::vector<std::array<std::uint32_t, 3>> delaunay_triangulate(
    const std::vector<Eigen::Vector2d>& points);

/// Signed in-circle measure: positive when p lies strictly inside the
/// circumcircle of CCW triangle (a, b, c). Exposed for the brute-force
/// empty-circumcircle check.
double in_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                 const Eigen::Vector2d& c, const Eigen::Vector2d& p);

}  // namespace distcomp
