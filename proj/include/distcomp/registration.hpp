#pragma once

#include <string>
#include <vector>

#include "distcomp/core.hpp"

namespace distcomp {

/// equal: every centroid gets unit weight (baseline coherent point drift).
/// area: per-centroid mesh-area weights scale both the membership
/// probability and the component variance.
enum class WeightMode { equal, area };

struct GmmConfig {
    double w = 0.0;           ///< uniform-outlier mixture weight, in [0, 1)
    double beta = 3.0;        ///< Gaussian kernel width
    double lambda = 2.0;      ///< motion-coherence regularization weight
    int max_iters = 150;
    double tol = 1e-6;        ///< relative objective-change stopping threshold
    double sigma2_floor = 0;  ///< <= 0 resolves to 1e-10 x squared bounding diagonal
    WeightMode weight_mode = WeightMode::area;
};

/// Throws std::invalid_argument on out-of-range parameters.
void validate_config(const GmmConfig& config);

struct Responsibilities {
    Eigen::MatrixXd P;        ///< m x N posterior probabilities
    Eigen::MatrixXd P_tilde;  ///< P with row j divided by the j-th weight
};

struct IterationStats {
    int iter;
    double sigma2;
    double objective;
};

struct RegistrationResult {
    PointMatrix transformed;    ///< T = y + G V
    PointMatrix displacements;  ///< T - y
    Eigen::MatrixXd coefficients;  ///< V
    double sigma2 = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<IterationStats> trace;
};

/// G(i,j) = exp(-|y_i - y_j|^2 / (2 beta^2)); symmetric with unit diagonal.
Eigen::MatrixXd gaussian_kernel(const PointMatrix& y, double beta);

/// Mean squared cross-distance: sum over all (centroid, data) pairs of
/// |y_j - X_I|^2, divided by D*N*m.
double init_sigma2(const PointMatrix& X, const PointMatrix& y);

/// Weighted E-step. With t_j = y_j + G(j,.)V, component j's numerator is
/// w_j^(1-D/2) * exp(-|X_I - t_j|^2 / (2 w_j sigma2)); the denominator adds
/// the uniform-component constant (2 pi sigma2)^(D/2) * w/(1-w) * m/N.
/// P_tilde divides row j by w_j. Evaluated with a per-column max-exponent
/// shift so small sigma2 cannot overflow.
Responsibilities e_step(const PointMatrix& X, const PointMatrix& y,
                        const Eigen::MatrixXd& V, const Eigen::MatrixXd& G, double sigma2,
                        const WeightVector& w_tilde, double w);

/// Solves [d(P_tilde 1) G + lambda sigma2 I] V = P_tilde X - d(P_tilde 1) y
/// by dense LU. Throws on pathological conditioning, reporting the
/// reciprocal condition estimate.
Eigen::MatrixXd m_step_solve_coefficients(const Eigen::MatrixXd& P_tilde,
                                          const Eigen::MatrixXd& G, const PointMatrix& X,
                                          const PointMatrix& y, double sigma2,
                                          double lambda);

/// sigma2 = [tr(X' d(P_tilde' 1) X) - 2 tr((P_tilde X)' T) + tr(T' d(P_tilde 1) T)]
/// / (N_P D) with N_P = 1' P 1, the unweighted responsibility mass. This
/// is the exact minimizer of the expected complete-data objective, so the
/// EM objective stays non-increasing for any weights; with unit weights P
/// and P_tilde coincide. Throws when N_P is zero (all mass on the uniform
/// component). The caller applies the floor.
double update_sigma2(const Eigen::MatrixXd& P, const Eigen::MatrixXd& P_tilde,
                     const PointMatrix& X, const PointMatrix& T);

/// Penalized negative log marginal likelihood:
/// -sum_I log p(X_I) + (lambda/2) tr(V' G V). Monitored for convergence.
double objective(const PointMatrix& X, const PointMatrix& y, const Eigen::MatrixXd& V,
                 const Eigen::MatrixXd& G, double sigma2, const WeightVector& w_tilde,
                 double w, double lambda);

/// EM driver: V = 0 and sigma2 from init_sigma2, then alternate e_step and
/// the two M-step updates until the relative objective change drops below
/// config.tol or max_iters is reached. With weight_mode = equal, w_tilde
/// is ignored and unit weights are used. Throws on non-finite objectives,
/// naming the iteration.
RegistrationResult register_point_sets(const PointMatrix& X, const PointMatrix& y,
                                       const WeightVector& w_tilde,
                                       const GmmConfig& config);

/// Mixture density (1-w) * sum_j (w_j/m) N(q | y_j, w_j sigma2 I) at each
/// query row. The uniform component is improper over unbounded space and
/// contributes nothing here.
Eigen::VectorXd eval_gmm_density(const PointMatrix& y, const WeightVector& w_tilde,
                                 double sigma2, double w, const PointMatrix& queries);

/// Objective-trace CSV with header iter,sigma2,objective.
std::string trace_csv(const RegistrationResult& result);

}  // namespace distcomp
