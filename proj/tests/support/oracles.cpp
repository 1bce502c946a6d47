#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        s += (a[d] - b[d]) * (a[d] - b[d]);
    }
    return s;
}

double lower_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

}  // namespace

Mat zeros(std::size_t rows, std::size_t cols) {
    return Mat(rows, std::vector<double>(cols, 0.0));
}

Mat cpd_responsibilities(const Mat& X, const Mat& T, double sigma2, double w) {
    const std::size_t N = X.size();
    const std::size_t m = T.size();
    const std::size_t D = X[0].size();
    const double c = w > 0.0 ? std::pow(2.0 * kPi * sigma2, 0.5 * static_cast<double>(D)) *
                                   (w / (1.0 - w)) * static_cast<double>(m) /
                                   static_cast<double>(N)
                             : 0.0;
    Mat P = zeros(m, N);
    for (std::size_t I = 0; I < N; ++I) {
        double denom = c;
        for (std::size_t k = 0; k < m; ++k) {
            denom += std::exp(-sq_dist(X[I], T[k]) / (2.0 * sigma2));
        }
        for (std::size_t j = 0; j < m; ++j) {
            P[j][I] = std::exp(-sq_dist(X[I], T[j]) / (2.0 * sigma2)) / denom;
        }
    }
    return P;
}

Mat cpd_kernel(const Mat& y, double beta) {
    const std::size_t m = y.size();
    Mat G = zeros(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            G[i][j] = std::exp(-sq_dist(y[i], y[j]) / (2.0 * beta * beta));
        }
    }
    return G;
}

Mat cpd_solve_coefficients(const Mat& P, const Mat& G, const Mat& X, const Mat& y,
                           double sigma2, double lambda) {
    const std::size_t m = y.size();
    const std::size_t N = X.size();
    const std::size_t D = y[0].size();

    std::vector<double> row_mass(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t I = 0; I < N; ++I) {
            row_mass[j] += P[j][I];
        }
    }

    // A = d(P1) G + lambda sigma2 I, rhs = P X - d(P1) y
    Mat A = zeros(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            A[i][j] = row_mass[i] * G[i][j];
        }
        A[i][i] += lambda * sigma2;
    }
    Mat rhs = zeros(m, D);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t d = 0; d < D; ++d) {
            double s = 0.0;
            for (std::size_t I = 0; I < N; ++I) {
                s += P[j][I] * X[I][d];
            }
            rhs[j][d] = s - row_mass[j] * y[j][d];
        }
    }

    // Gauss-Jordan with partial pivoting on the augmented system.
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) {
                pivot = r;
            }
        }
        if (std::abs(A[pivot][col]) < 1e-300) {
            throw std::runtime_error("oracle solve: singular matrix");
        }
        std::swap(A[col], A[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        const double diag = A[col][col];
        for (std::size_t c = 0; c < m; ++c) {
            A[col][c] /= diag;
        }
        for (std::size_t d = 0; d < D; ++d) {
            rhs[col][d] /= diag;
        }
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || A[r][col] == 0.0) continue;
            const double factor = A[r][col];
            for (std::size_t c = 0; c < m; ++c) {
                A[r][c] -= factor * A[col][c];
            }
            for (std::size_t d = 0; d < D; ++d) {
                rhs[r][d] -= factor * rhs[col][d];
            }
        }
    }
    return rhs;
}

double cpd_update_sigma2(const Mat& P, const Mat& X, const Mat& T) {
    const std::size_t N = X.size();
    const std::size_t m = T.size();
    const std::size_t D = X[0].size();
    double num = 0.0;
    double mass = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t I = 0; I < N; ++I) {
            num += P[j][I] * sq_dist(X[I], T[j]);
            mass += P[j][I];
        }
    }
    return num / (mass * static_cast<double>(D));
}

double weighted_negative_log_likelihood(const Mat& X, const Mat& T,
                                        const std::vector<double>& w_tilde, double sigma2,
                                        double w, const Mat& V, const Mat& G,
                                        double lambda) {
    const std::size_t N = X.size();
    const std::size_t m = T.size();
    const std::size_t D = X[0].size();

    double nll = 0.0;
    for (std::size_t I = 0; I < N; ++I) {
        double p = w / static_cast<double>(N);
        for (std::size_t j = 0; j < m; ++j) {
            const double s2j = w_tilde[j] * sigma2;
            const double gauss = std::pow(2.0 * kPi * s2j, -0.5 * static_cast<double>(D)) *
                                 std::exp(-sq_dist(X[I], T[j]) / (2.0 * s2j));
            p += (1.0 - w) * (w_tilde[j] / static_cast<double>(m)) * gauss;
        }
        nll -= std::log(p);
    }

    // (lambda/2) tr(V' G V)
    double penalty = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            double dot = 0.0;
            for (std::size_t d = 0; d < V[0].size(); ++d) {
                dot += V[a][d] * V[b][d];
            }
            penalty += G[a][b] * dot;
        }
    }
    return nll + 0.5 * lambda * penalty;
}

double weighted_sigma2_brute(const Mat& P, const Mat& P_tilde, const Mat& X, const Mat& T) {
    const std::size_t N = X.size();
    const std::size_t m = T.size();
    const std::size_t D = X[0].size();
    double num = 0.0;
    double mass = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t I = 0; I < N; ++I) {
            num += P_tilde[j][I] * sq_dist(X[I], T[j]);
            mass += P[j][I];
        }
    }
    return num / (mass * static_cast<double>(D));
}

std::vector<std::size_t> brute_force_knn(const Mat& points, const std::vector<double>& q,
                                         std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        dist.emplace_back(sq_dist(points[i], q), i);
    }
    std::sort(dist.begin(), dist.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, dist.size()); ++i) {
        out.push_back(dist[i].second);
    }
    return out;
}

double normalized_median_residual(double u0, const std::vector<double>& u_neighbors,
                                  const std::vector<double>& distances, double eps_a) {
    const double med_d = lower_median(distances);
    std::vector<double> norm_u(u_neighbors.size());
    for (std::size_t i = 0; i < u_neighbors.size(); ++i) {
        norm_u[i] = u_neighbors[i] / (distances[i] + eps_a);
    }
    const double med_u = lower_median(norm_u);
    std::vector<double> dev(norm_u.size());
    for (std::size_t i = 0; i < norm_u.size(); ++i) {
        dev[i] = std::abs(norm_u[i] - med_u);
    }
    return std::abs(u0 / (med_d + eps_a) - med_u) / (lower_median(dev) + eps_a);
}

}  // namespace oracles
