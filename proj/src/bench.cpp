#include "distcomp/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "distcomp/delaunay.hpp"
#include "distcomp/displacement_field.hpp"

namespace distcomp {

namespace {

constexpr std::array<std::array<double, 2>, 4> kCorners{
    {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}};

bool too_close(const std::vector<Eigen::Vector2d>& pts, const Eigen::Vector2d& p,
               double minsep) {
    for (const auto& q : pts) {
        if ((q - p).squaredNorm() < minsep * minsep) {
            return true;
        }
    }
    return false;
}

}  // namespace

TriangleMesh make_uniform_square_mesh(int n) {
    if (n < 1) {
        throw std::invalid_argument("make_uniform_square_mesh: n must be >= 1");
    }
    TriangleMesh mesh;
    const int side = n + 1;
    mesh.vertices.reserve(static_cast<std::size_t>(side) * side);
    for (int j = 0; j < side; ++j) {
        for (int i = 0; i < side; ++i) {
            mesh.vertices.emplace_back(static_cast<double>(i) / n,
                                       static_cast<double>(j) / n, 0.0);
        }
    }
    auto vid = [side](int i, int j) { return static_cast<std::uint32_t>(j * side + i); };
    mesh.triangles.reserve(2u * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    return mesh;
}

RefinedSquareMesh make_refined_square_mesh(
    const std::function<double(double, double)>& density, int target_points,
    std::uint64_t seed) {
    if (target_points < 4) {
        throw std::invalid_argument("make_refined_square_mesh: need at least 4 points");
    }

    // Rejection bound and density integral from a probe grid.
    double max_density = 0.0;
    double density_sum = 0.0;
    for (int j = 0; j <= 40; ++j) {
        for (int i = 0; i <= 40; ++i) {
            const double d = density(i / 40.0, j / 40.0);
            if (!(d > 0.0)) {
                throw std::invalid_argument(
                    "make_refined_square_mesh: density must be positive on the square");
            }
            max_density = std::max(max_density, d);
            density_sum += d;
        }
    }
    max_density *= 1.1;
    const double mean_density = density_sum / (41.0 * 41.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Eigen::Vector2d> pts;
    pts.reserve(static_cast<std::size_t>(target_points));
    for (const auto& c : kCorners) {
        pts.emplace_back(c[0], c[1]);
    }

    // Graded dart throwing: candidates drawn by rejection against the
    // density, then kept only if they clear a separation radius scaled to
    // the local target spacing. That keeps the node pattern mesh-like
    // (bounded local clumping) while staying random. The radius shrinks
    // whenever candidates stop fitting, so the requested count is always
    // reached.
    const int n_boundary = static_cast<int>(std::lround(0.2 * (target_points - 4)));
    const int n_interior = target_points - 4 - n_boundary;
    double sep_factor = 0.70;

    auto local_sep = [&](const Eigen::Vector2d& p) {
        return sep_factor *
               std::sqrt(mean_density / (static_cast<double>(target_points) *
                                         density(p.x(), p.y())));
    };

    auto fill = [&](int count, auto draw) {
        int placed = 0;
        int misses = 0;
        while (placed < count) {
            const Eigen::Vector2d p = draw();
            if (unit(rng) * max_density > density(p.x(), p.y())) continue;
            if (too_close(pts, p, local_sep(p))) {
                if (++misses > 50 * target_points) {
                    sep_factor *= 0.85;
                    misses = 0;
                }
                continue;
            }
            pts.push_back(p);
            ++placed;
            misses = 0;
        }
    };

    fill(n_boundary, [&] {
        const double t = 4.0 * unit(rng);
        const int edge = static_cast<int>(t);
        const double s = t - edge;
        switch (edge) {
            case 0: return Eigen::Vector2d{s, 0.0};
            case 1: return Eigen::Vector2d{1.0, s};
            case 2: return Eigen::Vector2d{1.0 - s, 1.0};
            default: return Eigen::Vector2d{0.0, 1.0 - s};
        }
    });
    fill(n_interior, [&] { return Eigen::Vector2d{unit(rng), unit(rng)}; });

    RefinedSquareMesh out;
    out.corner_indices = {0, 1, 2, 3};
    out.on_boundary.assign(pts.size(), 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(4 + n_boundary); ++i) {
        out.on_boundary[i] = 1;
    }
    out.mesh.vertices.reserve(pts.size());
    for (const auto& p : pts) {
        out.mesh.vertices.emplace_back(p.x(), p.y(), 0.0);
    }
    out.mesh.triangles = delaunay_triangulate(pts);
    return out;
}

double clustered_density(double x, double y) {
    const double dx1 = x - 0.70, dy1 = y - 0.70;
    const double dx2 = x - 0.25, dy2 = y - 0.35;
    return 1.0 + 10.0 * std::exp(-(dx1 * dx1 + dy1 * dy1) / (2.0 * 0.12 * 0.12)) +
           7.0 * std::exp(-(dx2 * dx2 + dy2 * dy2) / (2.0 * 0.15 * 0.15));
}

double corner_error(const PointMatrix& transformed,
                    const std::array<std::uint32_t, 4>& corner_indices) {
    double total = 0.0;
    for (int c = 0; c < 4; ++c) {
        const Eigen::RowVector2d truth(kCorners[static_cast<std::size_t>(c)][0],
                                       kCorners[static_cast<std::size_t>(c)][1]);
        total += (transformed.row(corner_indices[static_cast<std::size_t>(c)]) - truth).norm();
    }
    return total / 4.0;
}

GmmConfig benchmark_gmm_config() {
    GmmConfig config;
    config.beta = 3.0;
    config.lambda = 2.0;
    config.w = 0.0;
    return config;
}

namespace {

void dump_field_grid(const std::string& dir, const BenchmarkRow& row,
                     const PolynomialWarp& warp, const PointMatrix& samples,
                     const Eigen::MatrixXd& recovered_u) {
    const int g = 25;
    std::ostringstream name;
    name << dir << "/field_a" << row.amplitude << "_s" << row.seed << "_"
         << (row.mode == WeightMode::area ? "area" : "equal") << ".csv";
    std::ofstream out(name.str());
    if (!out) {
        throw std::runtime_error("bench: cannot write " + name.str());
    }
    out.precision(17);
    out << "x,y,ux_true,uy_true,ux_recovered,uy_recovered\n";
    const DisplacementField field = make_field(samples, recovered_u);
    PointMatrix queries(g * g, 2);
    PointMatrix truth(g * g, 2);
    for (int j = 0; j < g; ++j) {
        for (int i = 0; i < g; ++i) {
            const Eigen::Vector2d material(i / (g - 1.0), j / (g - 1.0));
            const Eigen::Vector2d spatial = warp.apply(material);
            queries.row(j * g + i) = spatial.transpose();
            truth.row(j * g + i) = (material - spatial).transpose();
        }
    }
    const Eigen::MatrixXd rec = knn_interpolate(field, queries, 8);
    for (Eigen::Index r = 0; r < queries.rows(); ++r) {
        out << queries(r, 0) << ',' << queries(r, 1) << ',' << truth(r, 0) << ','
            << truth(r, 1) << ',' << rec(r, 0) << ',' << rec(r, 1) << '\n';
    }
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config) {
    validate_config(config.gmm);
    const TriangleMesh design = make_uniform_square_mesh(config.design_n);
    const PointMatrix X = mesh_points(design, 2);

    std::vector<BenchmarkRow> rows;
    for (const double amplitude : config.amplitudes) {
        for (int s = 0; s < config.seeds; ++s) {
            const std::uint64_t seed = static_cast<std::uint64_t>(s) + 1;
            RefinedSquareMesh scan;
            PointMatrix y;
            WeightVector weights;
            PolynomialWarp warp(PolynomialWarp::Coefficients::Zero());
            std::string setup_error;
            try {
                scan = make_refined_square_mesh(clustered_density, config.scan_points,
                                                hash_mix(seed));
                if (amplitude > 0.0) {
                    warp =
                        PolynomialWarp::sample(amplitude, hash_mix(seed ^ 0xa5a5a5a5ull));
                }  // amplitude 0 keeps the identity warp
                y = warp.apply(mesh_points(scan.mesh, 2));
                TriangleMesh warped = scan.mesh;
                for (std::size_t i = 0; i < warped.vertices.size(); ++i) {
                    warped.vertices[i].x() = y(static_cast<Eigen::Index>(i), 0);
                    warped.vertices[i].y() = y(static_cast<Eigen::Index>(i), 1);
                }
                weights = vertex_area_weights(warped);
            } catch (const std::exception& e) {
                setup_error = e.what();
            }

            for (const WeightMode mode : {WeightMode::equal, WeightMode::area}) {
                BenchmarkRow row;
                row.amplitude = amplitude;
                row.seed = seed;
                row.mode = mode;
                if (!setup_error.empty()) {
                    row.error = "setup: " + setup_error;
                    rows.push_back(row);
                    continue;
                }
                try {
                    GmmConfig gmm = config.gmm;
                    gmm.weight_mode = mode;
                    const auto start = std::chrono::steady_clock::now();
                    const RegistrationResult result =
                        register_point_sets(X, y, weights, gmm);
                    row.runtime_s =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                      start)
                            .count();
                    row.iterations = result.iterations;
                    row.converged = result.converged;
                    row.corner_err = corner_error(result.transformed, scan.corner_indices);
                    const PointMatrix truth = mesh_points(scan.mesh, 2);
                    double sq = 0.0;
                    int count = 0;
                    for (Eigen::Index j = 0; j < truth.rows(); ++j) {
                        if (!scan.on_boundary[static_cast<std::size_t>(j)]) continue;
                        sq += (result.transformed.row(j) - truth.row(j)).squaredNorm();
                        ++count;
                    }
                    row.boundary_rmse = std::sqrt(sq / count);
                    if (!config.fields_dir.empty()) {
                        dump_field_grid(config.fields_dir, row, warp, y,
                                        result.displacements);
                    }
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string benchmark_csv(const BenchmarkConfig& config,
                          const std::vector<BenchmarkRow>& rows) {
    std::ostringstream out;
    out.precision(6);
    out << "# unit-square benchmark: design grid " << (config.design_n + 1) << "x"
        << (config.design_n + 1) << " nodes, refined scan target " << config.scan_points
        << " nodes\n";
    out << "# gmm: beta=" << config.gmm.beta << " lambda=" << config.gmm.lambda
        << " w=" << config.gmm.w << " tol=" << config.gmm.tol
        << " max_iters=" << config.gmm.max_iters << "\n";
    out << "amplitude,seed,mode,corner_error,boundary_rmse,iterations,converged,runtime_s,"
           "error\n";
    out.precision(17);
    for (const auto& r : rows) {
        out << r.amplitude << ',' << r.seed << ','
            << (r.mode == WeightMode::area ? "area" : "equal") << ',' << r.corner_err << ','
            << r.boundary_rmse << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
            << r.runtime_s << ',' << r.error << '\n';
    }
    return out.str();
}

DensityStudy run_density_study(int grid_n, double sigma2, std::uint64_t seed) {
    if (grid_n < 2) {
        throw std::invalid_argument("run_density_study: grid_n must be >= 2");
    }
    // Scale chosen so each mixture resolves its mesh: 49x49 uniform grid,
    // ~3000 graded nodes, component sigma a bit above the node spacing.
    const TriangleMesh uniform = make_uniform_square_mesh(48);
    const RefinedSquareMesh refined =
        make_refined_square_mesh(clustered_density, 3000, seed);
    if (!(sigma2 > 0.0)) {
        sigma2 = 0.002;
    }

    DensityStudy study;
    study.grid.resize(static_cast<Eigen::Index>(grid_n) * grid_n, 2);
    for (int j = 0; j < grid_n; ++j) {
        for (int i = 0; i < grid_n; ++i) {
            study.grid(static_cast<Eigen::Index>(j) * grid_n + i, 0) = i / (grid_n - 1.0);
            study.grid(static_cast<Eigen::Index>(j) * grid_n + i, 1) = j / (grid_n - 1.0);
        }
    }

    const PointMatrix y_uniform = mesh_points(uniform, 2);
    const PointMatrix y_refined = mesh_points(refined.mesh, 2);
    const WeightVector ones_u = WeightVector::Ones(y_uniform.rows());
    const WeightVector ones_r = WeightVector::Ones(y_refined.rows());
    const WeightVector area = vertex_area_weights(refined.mesh);

    study.uniform_equal = eval_gmm_density(y_uniform, ones_u, sigma2, 0.0, study.grid);
    study.refined_equal = eval_gmm_density(y_refined, ones_r, sigma2, 0.0, study.grid);
    study.refined_area = eval_gmm_density(y_refined, area, sigma2, 0.0, study.grid);
    study.deviation_area =
        (study.refined_area - study.uniform_equal).cwiseAbs().maxCoeff();
    study.deviation_equal =
        (study.refined_equal - study.uniform_equal).cwiseAbs().maxCoeff();
    return study;
}

std::string density_csv(const PointMatrix& grid, const Eigen::VectorXd& density) {
    if (grid.rows() != density.size()) {
        throw std::invalid_argument("density_csv: size mismatch");
    }
    std::ostringstream out;
    out.precision(17);
    out << "x,y,density\n";
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        out << grid(i, 0) << ',' << grid(i, 1) << ',' << density[i] << '\n';
    }
    return out.str();
}

}  // namespace distcomp
