#include "distcomp/core.hpp"

#include <cmath>

namespace distcomp {

void validate_point_set(const PointMatrix& pts, const std::string& name) {
    if (pts.rows() < 1) {
        throw std::invalid_argument(name + ": point set is empty");
    }
    // The data model is 2-D/3-D; D = 1 is accepted for the scalar cases
    // the hand-checkable examples use.
    if (pts.cols() < 1 || pts.cols() > 3) {
        throw std::invalid_argument(name + ": dimension must be 1, 2 or 3, got " +
                                    std::to_string(pts.cols()));
    }
    if (!pts.allFinite()) {
        throw std::invalid_argument(name + ": contains non-finite coordinates");
    }
}

void validate_weights(const WeightVector& w, const std::string& name) {
    if (w.size() < 1) {
        throw std::invalid_argument(name + ": weight vector is empty");
    }
    if (!(w.minCoeff() > 0.0)) {
        throw std::invalid_argument(name + ": weights must be positive");
    }
    const double mean = w.mean();
    if (std::abs(mean - 1.0) > 1e-12) {
        throw std::invalid_argument(name + ": weight mean " + std::to_string(mean) +
                                    " is not 1");
    }
}

WeightVector normalize_weights(WeightVector w) {
    if (w.size() < 1) {
        throw std::invalid_argument("normalize_weights: empty vector");
    }
    if (!(w.minCoeff() > 0.0)) {
        throw std::invalid_argument("normalize_weights: weights must be positive");
    }
    w /= w.mean();
    return w;
}

double bounding_diagonal(const PointMatrix& pts) {
    if (pts.rows() == 0) {
        return 0.0;
    }
    const Eigen::RowVectorXd lo = pts.colwise().minCoeff();
    const Eigen::RowVectorXd hi = pts.colwise().maxCoeff();
    return (hi - lo).norm();
}

std::uint64_t hash_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace distcomp
