#include "distcomp/registration.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace distcomp {

namespace {

// Squared distances between rows of A (m x D) and rows of B (N x D), m x N.
Eigen::MatrixXd cross_sq_dist(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
    const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = (-2.0 * A * B.transpose()).eval();
    d2.colwise() += a2;
    d2.rowwise() += b2.transpose();
    return d2.cwiseMax(0.0);
}

void check_pair(const PointMatrix& X, const PointMatrix& y) {
    validate_point_set(X, "data points X");
    validate_point_set(y, "centroids y");
    if (X.cols() != y.cols()) {
        throw std::invalid_argument("point sets have different dimensions");
    }
}

// log of the uniform-component constant (2 pi sigma2)^(D/2) * w/(1-w) * m/N;
// -inf when w = 0.
double log_uniform_constant(double sigma2, double w, int D, Eigen::Index m,
                            Eigen::Index N) {
    if (w == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return 0.5 * D * std::log(2.0 * std::numbers::pi * sigma2) + std::log(w / (1.0 - w)) +
           std::log(static_cast<double>(m) / static_cast<double>(N));
}

}  // namespace

void validate_config(const GmmConfig& config) {
    if (!(config.w >= 0.0 && config.w < 1.0)) {
        throw std::invalid_argument("config: w must be in [0, 1)");
    }
    if (!(config.beta > 0.0)) {
        throw std::invalid_argument("config: beta must be > 0");
    }
    if (!(config.lambda > 0.0)) {
        throw std::invalid_argument("config: lambda must be > 0");
    }
    if (config.max_iters < 1) {
        throw std::invalid_argument("config: max_iters must be >= 1");
    }
    if (!(config.tol > 0.0)) {
        throw std::invalid_argument("config: tol must be > 0");
    }
}

Eigen::MatrixXd gaussian_kernel(const PointMatrix& y, double beta) {
    validate_point_set(y, "centroids y");
    if (!(beta > 0.0)) {
        throw std::invalid_argument("gaussian_kernel: beta must be > 0");
    }
    Eigen::MatrixXd G = cross_sq_dist(y, y);
    G = (-G.array() / (2.0 * beta * beta)).exp().matrix();
    // Symmetrize: the product form above is symmetric only up to rounding.
    G = 0.5 * (G + G.transpose()).eval();
    G.diagonal().setOnes();
    return G;
}

double init_sigma2(const PointMatrix& X, const PointMatrix& y) {
    check_pair(X, y);
    const Eigen::MatrixXd d2 = cross_sq_dist(y, X);
    return d2.sum() /
           (static_cast<double>(X.cols()) * static_cast<double>(d2.rows()) *
            static_cast<double>(d2.cols()));
}

Responsibilities e_step(const PointMatrix& X, const PointMatrix& y,
                        const Eigen::MatrixXd& V, const Eigen::MatrixXd& G, double sigma2,
                        const WeightVector& w_tilde, double w) {
    check_pair(X, y);
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("e_step: sigma2 must be > 0");
    }
    if (w_tilde.size() != y.rows() || !(w_tilde.minCoeff() > 0.0)) {
        throw std::invalid_argument("e_step: bad weight vector");
    }

    const Eigen::Index m = y.rows();
    const Eigen::Index N = X.rows();
    const int D = static_cast<int>(X.cols());

    const Eigen::MatrixXd T = y + G * V;
    const Eigen::MatrixXd d2 = cross_sq_dist(T, X);  // m x N

    // log numerator of p_jI: (1 - D/2) log w_j - d2 / (2 w_j sigma2)
    const Eigen::ArrayXd log_w = w_tilde.array().log();
    const Eigen::ArrayXd w_exp_term = (1.0 - 0.5 * D) * log_w;
    const Eigen::ArrayXd inv_two_ws2 = 1.0 / (2.0 * sigma2 * w_tilde.array());

    Eigen::MatrixXd lognum = (d2.array().colwise() * (-inv_two_ws2)).matrix();
    lognum.colwise() += w_exp_term.matrix();

    const double log_c = log_uniform_constant(sigma2, w, D, m, N);

    Responsibilities r;
    r.P.resize(m, N);
    for (Eigen::Index I = 0; I < N; ++I) {
        const double shift = lognum.col(I).maxCoeff();
        const Eigen::ArrayXd e = (lognum.col(I).array() - shift).exp();
        double denom = e.sum();
        if (std::isfinite(log_c)) {
            const double shifted = log_c - shift;
            if (shifted > 600.0) {
                // Uniform component dominates beyond double range: the
                // whole column is outlier mass.
                r.P.col(I).setZero();
                continue;
            }
            denom += std::exp(shifted);
        }
        r.P.col(I) = (e / denom).matrix();
    }
    r.P_tilde = (r.P.array().colwise() / w_tilde.array()).matrix();
    return r;
}

Eigen::MatrixXd m_step_solve_coefficients(const Eigen::MatrixXd& P_tilde,
                                          const Eigen::MatrixXd& G, const PointMatrix& X,
                                          const PointMatrix& y, double sigma2,
                                          double lambda) {
    if (!(sigma2 > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("m_step: sigma2 and lambda must be > 0");
    }
    const Eigen::VectorXd row_mass = P_tilde.rowwise().sum();  // P_tilde 1

    Eigen::MatrixXd A = row_mass.asDiagonal() * G;
    A.diagonal().array() += lambda * sigma2;
    const Eigen::MatrixXd rhs = P_tilde * X - row_mass.asDiagonal() * y;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::MatrixXd V = lu.solve(rhs);

    const double rhs_norm = rhs.norm();
    const double residual = (A * V - rhs).norm();
    if (!V.allFinite() || residual > 1e-8 * std::max(rhs_norm, 1.0)) {
        std::ostringstream msg;
        msg << "m_step: linear solve failed (rcond ~ " << lu.rcond() << ", residual "
            << residual << ")";
        throw std::runtime_error(msg.str());
    }
    return V;
}

double update_sigma2(const Eigen::MatrixXd& P, const Eigen::MatrixXd& P_tilde,
                     const PointMatrix& X, const PointMatrix& T) {
    const double Np = P.sum();
    if (!(Np > 0.0)) {
        throw std::runtime_error("update_sigma2: responsibility mass is zero");
    }
    const Eigen::VectorXd col_mass = P_tilde.colwise().sum();  // P_tilde' 1, length N
    const Eigen::VectorXd row_mass = P_tilde.rowwise().sum();  // P_tilde 1, length m

    const double t1 = (X.rowwise().squaredNorm().array() * col_mass.array()).sum();
    const double t2 = ((P_tilde * X).array() * T.array()).sum();
    const double t3 = (T.rowwise().squaredNorm().array() * row_mass.array()).sum();
    const double D = static_cast<double>(X.cols());
    return (t1 - 2.0 * t2 + t3) / (Np * D);
}

double objective(const PointMatrix& X, const PointMatrix& y, const Eigen::MatrixXd& V,
                 const Eigen::MatrixXd& G, double sigma2, const WeightVector& w_tilde,
                 double w, double lambda) {
    check_pair(X, y);
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("objective: sigma2 must be > 0");
    }
    const Eigen::Index m = y.rows();
    const Eigen::Index N = X.rows();
    const int D = static_cast<int>(X.cols());

    const Eigen::MatrixXd T = y + G * V;
    const Eigen::MatrixXd d2 = cross_sq_dist(T, X);

    const Eigen::ArrayXd w_exp_term = (1.0 - 0.5 * D) * w_tilde.array().log();
    const Eigen::ArrayXd inv_two_ws2 = 1.0 / (2.0 * sigma2 * w_tilde.array());
    Eigen::MatrixXd lognum = (d2.array().colwise() * (-inv_two_ws2)).matrix();
    lognum.colwise() += w_exp_term.matrix();

    // log p(X_I) = logaddexp(log[(1-w)/m] - (D/2) log(2 pi sigma2) + LSE_I,
    //                        log(w/N))
    const double log_mix = std::log1p(-w) - std::log(static_cast<double>(m)) -
                           0.5 * D * std::log(2.0 * std::numbers::pi * sigma2);
    const double log_unif =
        w > 0.0 ? std::log(w) - std::log(static_cast<double>(N))
                : -std::numeric_limits<double>::infinity();

    double nll = 0.0;
    for (Eigen::Index I = 0; I < N; ++I) {
        const double shift = lognum.col(I).maxCoeff();
        const double lse = shift + std::log((lognum.col(I).array() - shift).exp().sum());
        const double a = log_mix + lse;
        double log_p;
        if (!std::isfinite(log_unif)) {
            log_p = a;
        } else {
            const double hi = std::max(a, log_unif);
            log_p = hi + std::log(std::exp(a - hi) + std::exp(log_unif - hi));
        }
        nll -= log_p;
    }
    const double penalty = 0.5 * lambda * (V.transpose() * G * V).trace();
    return nll + penalty;
}

RegistrationResult register_point_sets(const PointMatrix& X, const PointMatrix& y,
                                       const WeightVector& w_tilde,
                                       const GmmConfig& config) {
    check_pair(X, y);
    validate_config(config);

    WeightVector weights;
    if (config.weight_mode == WeightMode::equal) {
        weights = WeightVector::Ones(y.rows());
    } else {
        if (w_tilde.size() != y.rows()) {
            throw std::invalid_argument("register: weight count does not match centroids");
        }
        validate_weights(w_tilde, "register: w_tilde");
        weights = w_tilde;
    }

    double floor = config.sigma2_floor;
    if (!(floor > 0.0)) {
        PointMatrix both(X.rows() + y.rows(), X.cols());
        both << X, y;
        const double diag = bounding_diagonal(both);
        floor = 1e-10 * diag * diag;
        if (!(floor > 0.0)) {
            floor = 1e-300;  // all points coincide
        }
    }

    const Eigen::MatrixXd G = gaussian_kernel(y, config.beta);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(y.rows(), y.cols());
    double sigma2 = std::max(init_sigma2(X, y), floor);

    RegistrationResult result;
    result.trace.reserve(static_cast<std::size_t>(config.max_iters));
    double prev_obj = std::numeric_limits<double>::quiet_NaN();

    int iter = 0;
    for (iter = 1; iter <= config.max_iters; ++iter) {
        const Responsibilities r = e_step(X, y, V, G, sigma2, weights, config.w);
        V = m_step_solve_coefficients(r.P_tilde, G, X, y, sigma2, config.lambda);
        const Eigen::MatrixXd T = y + G * V;
        sigma2 = std::max(update_sigma2(r.P, r.P_tilde, X, T), floor);

        const double obj = objective(X, y, V, G, sigma2, weights, config.w, config.lambda);
        if (!std::isfinite(obj)) {
            throw std::runtime_error("register: non-finite objective at iteration " +
                                     std::to_string(iter));
        }
        result.trace.push_back({iter, sigma2, obj});
        if (iter > 1 && std::abs(obj - prev_obj) < config.tol * std::abs(prev_obj)) {
            result.converged = true;
            break;
        }
        prev_obj = obj;
    }

    result.iterations = std::min(iter, config.max_iters);
    result.coefficients = V;
    result.transformed = y + G * V;
    result.displacements = result.transformed - y;
    result.sigma2 = sigma2;
    return result;
}

Eigen::VectorXd eval_gmm_density(const PointMatrix& y, const WeightVector& w_tilde,
                                 double sigma2, double w, const PointMatrix& queries) {
    check_pair(queries, y);
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("eval_gmm_density: sigma2 must be > 0");
    }
    validate_weights(w_tilde, "eval_gmm_density: w_tilde");
    const Eigen::Index m = y.rows();
    const int D = static_cast<int>(y.cols());

    const Eigen::MatrixXd d2 = cross_sq_dist(y, queries);  // m x Q
    const Eigen::ArrayXd inv_two_ws2 = 1.0 / (2.0 * sigma2 * w_tilde.array());
    // component amplitude: (w_j/m) (2 pi w_j sigma2)^(-D/2)
    const Eigen::ArrayXd amp =
        w_tilde.array() *
        (2.0 * std::numbers::pi * sigma2 * w_tilde.array()).pow(-0.5 * D) /
        static_cast<double>(m);

    Eigen::VectorXd density(queries.rows());
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
        const Eigen::ArrayXd e = (-d2.col(q).array() * inv_two_ws2).exp();
        density[q] = (1.0 - w) * (amp * e).sum();
    }
    return density;
}

std::string trace_csv(const RegistrationResult& result) {
    std::ostringstream out;
    out.precision(17);
    out << "iter,sigma2,objective\n";
    for (const auto& s : result.trace) {
        out << s.iter << ',' << s.sigma2 << ',' << s.objective << '\n';
    }
    return out.str();
}

}  // namespace distcomp
