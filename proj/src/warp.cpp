#include "distcomp/warp.hpp"

#include <Eigen/LU>

#include <limits>
#include <random>
#include <stdexcept>

namespace distcomp {

PolynomialWarp PolynomialWarp::sample(double amplitude, std::uint64_t seed) {
    if (!(amplitude > 0.0)) {
        throw std::invalid_argument("PolynomialWarp::sample: amplitude must be > 0");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-amplitude, amplitude);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Coefficients c;
        for (int r = 0; r < 2; ++r) {
            for (int k = 0; k < 6; ++k) {
                c(r, k) = coeff(rng);
            }
        }
        const PolynomialWarp w(c);
        if (w.min_jacobian_det() > 0.0) {
            return w;
        }
    }
    throw std::runtime_error(
        "PolynomialWarp::sample: Jacobian guard failed 100 times; amplitude too large");
}

Eigen::Vector2d PolynomialWarp::displacement(const Eigen::Vector2d& p) const {
    Eigen::Matrix<double, 6, 1> basis;
    basis << 1.0, p.x(), p.y(), p.x() * p.x(), p.x() * p.y(), p.y() * p.y();
    return coeffs_ * basis;
}

Eigen::Vector2d PolynomialWarp::apply(const Eigen::Vector2d& p) const {
    return p + displacement(p);
}

PointMatrix PolynomialWarp::apply(const PointMatrix& points) const {
    if (points.cols() != 2) {
        throw std::invalid_argument("PolynomialWarp::apply: points must be 2-D");
    }
    PointMatrix out(points.rows(), 2);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        out.row(i) = apply(Eigen::Vector2d(points(i, 0), points(i, 1))).transpose();
    }
    return out;
}

Eigen::Matrix2d PolynomialWarp::jacobian(const Eigen::Vector2d& p) const {
    // d/dx of (1, x, y, x^2, xy, y^2) = (0, 1, 0, 2x, y, 0)
    Eigen::Matrix<double, 6, 1> dx, dy;
    dx << 0.0, 1.0, 0.0, 2.0 * p.x(), p.y(), 0.0;
    dy << 0.0, 0.0, 1.0, 0.0, p.x(), 2.0 * p.y();
    Eigen::Matrix2d J = Eigen::Matrix2d::Identity();
    J.col(0) += coeffs_ * dx;
    J.col(1) += coeffs_ * dy;
    return J;
}

double PolynomialWarp::min_jacobian_det(int n) const {
    double min_det = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const Eigen::Vector2d p(static_cast<double>(i) / n, static_cast<double>(j) / n);
            min_det = std::min(min_det, jacobian(p).determinant());
        }
    }
    return min_det;
}

}  // namespace distcomp
