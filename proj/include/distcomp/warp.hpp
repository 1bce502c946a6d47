#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "distcomp/core.hpp"

namespace distcomp {

/// Random smooth deformation of the unit square: each displacement
/// component is a bivariate polynomial of total degree <= 2 with
/// coefficients uniform in [-amplitude, amplitude]. Sampling rejects
/// candidates whose map Jacobian determinant is not positive everywhere
/// on a 50x50 probe grid, so the warp is bijective on the square.
class PolynomialWarp {
public:
    /// Basis order: 1, x, y, x^2, x*y, y^2. Row 0 is u_x, row 1 is u_y.
    using Coefficients = Eigen::Matrix<double, 2, 6>;

    explicit PolynomialWarp(const Coefficients& coeffs) : coeffs_(coeffs) {}

    /// Draws coefficients from the seeded stream until the Jacobian guard
    /// passes; throws after 100 consecutive rejections.
    static PolynomialWarp sample(double amplitude, std::uint64_t seed);

    Eigen::Vector2d displacement(const Eigen::Vector2d& p) const;
    Eigen::Vector2d apply(const Eigen::Vector2d& p) const;
    PointMatrix apply(const PointMatrix& points) const;

    /// Jacobian of the full map p + u(p).
    Eigen::Matrix2d jacobian(const Eigen::Vector2d& p) const;

    /// Smallest det(jacobian) over an (n+1)^2 grid on the unit square.
    double min_jacobian_det(int n = 50) const;

    const Coefficients& coefficients() const { return coeffs_; }

private:
    Coefficients coeffs_;
};

}  // namespace distcomp
