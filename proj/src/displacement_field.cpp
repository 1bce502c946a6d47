#include "distcomp/displacement_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "distcomp/neighbor_index.hpp"

namespace distcomp {

namespace {

// Lower median: element at index (n-1)/2 of the sorted values.
double lower_median(std::vector<double> v) {
    if (v.empty()) {
        throw std::invalid_argument("median of empty range");
    }
    const std::size_t pos = (v.size() - 1) / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(pos), v.end());
    return v[pos];
}

// Index subset of valid samples plus an index over their positions.
struct ValidView {
    std::vector<Eigen::Index> rows;
    NeighborIndex index;
};

ValidView valid_view(const DisplacementField& field) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < field.size(); ++i) {
        if (field.valid[static_cast<std::size_t>(i)]) {
            rows.push_back(i);
        }
    }
    if (rows.empty()) {
        throw std::runtime_error("displacement field has no valid samples");
    }
    PointMatrix pts(static_cast<Eigen::Index>(rows.size()), field.samples.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        pts.row(static_cast<Eigen::Index>(i)) = field.samples.row(rows[i]);
    }
    return ValidView{std::move(rows), NeighborIndex(std::move(pts))};
}

}  // namespace

Eigen::Index DisplacementField::valid_count() const {
    Eigen::Index n = 0;
    for (char v : valid) {
        n += v ? 1 : 0;
    }
    return n;
}

DisplacementField make_field(PointMatrix samples, Eigen::MatrixXd vectors) {
    validate_point_set(samples, "field samples");
    if (vectors.rows() != samples.rows() || vectors.cols() != samples.cols()) {
        throw std::invalid_argument("field: vector shape does not match samples");
    }
    DisplacementField f;
    f.valid.assign(static_cast<std::size_t>(samples.rows()), 1);
    f.samples = std::move(samples);
    f.vectors = std::move(vectors);
    return f;
}

double default_eps_a(const DisplacementField& field) {
    const ValidView view = valid_view(field);
    if (view.rows.size() < 2) {
        return 0.1;
    }
    std::vector<double> spacing;
    spacing.reserve(view.rows.size());
    for (Eigen::Index i = 0; i < view.index.size(); ++i) {
        const auto nn = view.index.nearest(view.index.points().row(i), 2);
        // nn[0] is the point itself at distance 0
        spacing.push_back((view.index.points().row(nn[1]) - view.index.points().row(i)).norm());
    }
    return 0.1 * lower_median(std::move(spacing));
}

std::vector<char> detect_outliers(const DisplacementField& field, int k, double eps_a,
                                  double threshold) {
    if (k < 2) {
        throw std::invalid_argument("detect_outliers: k must be >= 2");
    }
    if (!(eps_a > 0.0)) {
        throw std::invalid_argument("detect_outliers: eps_a must be > 0");
    }
    const ValidView view = valid_view(field);
    if (view.rows.size() < static_cast<std::size_t>(k) + 1) {
        throw std::invalid_argument("detect_outliers: need at least k+1 valid samples");
    }

    const int dim = static_cast<int>(field.samples.cols());
    std::vector<char> mask = field.valid;
    for (Eigen::Index row : view.rows) {
        // k nearest valid neighbors, excluding the sample itself.
        const auto hits = view.index.nearest(field.samples.row(row), k + 1);
        std::vector<Eigen::Index> nbr;
        std::vector<double> dist;
        for (Eigen::Index h : hits) {
            const Eigen::Index src = view.rows[static_cast<std::size_t>(h)];
            if (src == row) {
                continue;
            }
            nbr.push_back(src);
            dist.push_back((field.samples.row(src) - field.samples.row(row)).norm());
            if (static_cast<int>(nbr.size()) == k) {
                break;
            }
        }

        const double med_d = lower_median(dist);
        bool outlier = false;
        for (int c = 0; c < dim && !outlier; ++c) {
            std::vector<double> norm_u(nbr.size());
            for (std::size_t i = 0; i < nbr.size(); ++i) {
                norm_u[i] = field.vectors(nbr[i], c) / (dist[i] + eps_a);
            }
            const double med_u = lower_median(norm_u);
            std::vector<double> dev(norm_u.size());
            for (std::size_t i = 0; i < norm_u.size(); ++i) {
                dev[i] = std::abs(norm_u[i] - med_u);
            }
            const double numer = std::abs(field.vectors(row, c) / (med_d + eps_a) - med_u);
            const double denom = lower_median(std::move(dev)) + eps_a;
            if (numer / denom > threshold) {
                outlier = true;
            }
        }
        if (outlier) {
            mask[static_cast<std::size_t>(row)] = 0;
        }
    }
    return mask;
}

Eigen::MatrixXd knn_interpolate(const DisplacementField& field, const PointMatrix& queries,
                                int k) {
    if (k < 1) {
        throw std::invalid_argument("knn_interpolate: k must be >= 1");
    }
    const ValidView view = valid_view(field);
    if (view.rows.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("knn_interpolate: fewer than k valid samples");
    }
    validate_point_set(queries, "knn_interpolate queries");
    if (queries.cols() != field.samples.cols()) {
        throw std::invalid_argument("knn_interpolate: query dimension mismatch");
    }

    Eigen::MatrixXd out(queries.rows(), field.vectors.cols());
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
        const auto hits = view.index.nearest(queries.row(q), k);
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(field.vectors.cols());
        for (Eigen::Index h : hits) {
            mean += field.vectors.row(view.rows[static_cast<std::size_t>(h)]);
        }
        out.row(q) = mean / static_cast<double>(hits.size());
    }
    return out;
}

Eigen::MatrixXd idw_interpolate(const DisplacementField& field, const PointMatrix& queries,
                                int k, double power) {
    if (k < 1) {
        throw std::invalid_argument("idw_interpolate: k must be >= 1");
    }
    if (!(power > 0.0)) {
        throw std::invalid_argument("idw_interpolate: power must be > 0");
    }
    const ValidView view = valid_view(field);
    if (view.rows.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("idw_interpolate: fewer than k valid samples");
    }
    validate_point_set(queries, "idw_interpolate queries");
    if (queries.cols() != field.samples.cols()) {
        throw std::invalid_argument("idw_interpolate: query dimension mismatch");
    }
    const double eps = default_eps_a(field) * 1e-9 + 1e-300;

    Eigen::MatrixXd out(queries.rows(), field.vectors.cols());
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
        const auto hits = view.index.nearest(queries.row(q), k);
        const Eigen::Index nearest_src = view.rows[static_cast<std::size_t>(hits[0])];
        if ((field.samples.row(nearest_src) - queries.row(q)).norm() == 0.0) {
            out.row(q) = field.vectors.row(nearest_src);
            continue;
        }
        double wsum = 0.0;
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(field.vectors.cols());
        for (Eigen::Index h : hits) {
            const Eigen::Index src = view.rows[static_cast<std::size_t>(h)];
            const double d = (field.samples.row(src) - queries.row(q)).norm();
            const double wgt = 1.0 / std::pow(d + eps, power);
            wsum += wgt;
            acc += wgt * field.vectors.row(src);
        }
        out.row(q) = acc / wsum;
    }
    return out;
}

std::string field_csv(const DisplacementField& field) {
    std::ostringstream out;
    out.precision(17);
    out << "x,y,z,ux,uy,uz,valid\n";
    const int dim = static_cast<int>(field.samples.cols());
    for (Eigen::Index i = 0; i < field.size(); ++i) {
        for (int d = 0; d < 3; ++d) {
            out << (d < dim ? field.samples(i, d) : 0.0) << ',';
        }
        for (int d = 0; d < 3; ++d) {
            out << (d < dim ? field.vectors(i, d) : 0.0) << ',';
        }
        out << (field.valid[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace distcomp
