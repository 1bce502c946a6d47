#include "distcomp/compensate.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "distcomp/downsample.hpp"

namespace distcomp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(name) + ": " + e.what());
    }
}

}  // namespace

PipelineConfig default_pipeline_config() {
    PipelineConfig config;
    config.gmm.beta = 3.0;
    config.gmm.lambda = 2.0;
    config.gmm.w = 0.1;
    config.gmm.weight_mode = WeightMode::area;
    return config;
}

std::string report_csv(const PipelineReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "name,value\n";
    out << "design_vertices," << r.design_vertices << '\n';
    out << "scan_vertices," << r.scan_vertices << '\n';
    out << "design_points," << r.design_points << '\n';
    out << "scan_points," << r.scan_points << '\n';
    out << "iterations," << r.iterations << '\n';
    out << "converged," << (r.converged ? 1 : 0) << '\n';
    out << "sigma2," << r.sigma2 << '\n';
    out << "outliers," << r.outliers << '\n';
    out << "disp_min," << r.disp_min << '\n';
    out << "disp_max," << r.disp_max << '\n';
    out << "disp_mean," << r.disp_mean << '\n';
    return out.str();
}

TriangleMesh compensate_mesh(const TriangleMesh& design, const DisplacementField& field,
                             Interpolator interp, int k, double scale) {
    if (field.size() == 0 || field.valid_count() == 0) {
        throw std::invalid_argument("compensate_mesh: empty displacement field");
    }
    if (!std::isfinite(scale)) {
        throw std::invalid_argument("compensate_mesh: scale must be finite");
    }
    TriangleMesh out = design;
    if (scale == 0.0 || design.vertices.empty()) {
        return out;
    }
    const PointMatrix queries = mesh_points(design, static_cast<int>(field.samples.cols()));
    const Eigen::MatrixXd u = interp == Interpolator::knn
                                  ? knn_interpolate(field, queries, k)
                                  : idw_interpolate(field, queries, k);
    for (std::size_t i = 0; i < out.vertices.size(); ++i) {
        for (int d = 0; d < field.samples.cols(); ++d) {
            out.vertices[i][d] -= scale * u(static_cast<Eigen::Index>(i), d);
        }
    }
    return out;
}

PipelineResult run_pipeline(const TriangleMesh& design, const TriangleMesh& scan,
                            const PipelineConfig& config) {
    validate_config(config.gmm);
    if (!(config.cell_size > 0.0)) {
        throw std::invalid_argument("pipeline: cell_size must be > 0");
    }
    if (!std::isfinite(config.scale)) {
        throw std::invalid_argument("pipeline: scale must be finite");
    }

    PipelineResult result;
    PipelineReport& report = result.report;

    auto t0 = Clock::now();
    const TriangleMesh design_welded = stage("weld design", [&] {
        const double tol =
            config.weld_tol >= 0.0 ? config.weld_tol : default_weld_tolerance(design);
        return weld_vertices(design, tol);
    });
    const TriangleMesh scan_welded = stage("weld scan", [&] {
        const double tol =
            config.weld_tol >= 0.0 ? config.weld_tol : default_weld_tolerance(scan);
        return weld_vertices(scan, tol);
    });
    const WeightVector scan_weights =
        stage("area weights", [&] { return vertex_area_weights(scan_welded); });
    report.design_vertices = design_welded.vertex_count();
    report.scan_vertices = scan_welded.vertex_count();
    report.stage_seconds[0] = seconds_since(t0);

    t0 = Clock::now();
    const DownsampleResult design_ds = stage("downsample design", [&] {
        return box_grid_downsample(mesh_points(design_welded), WeightVector(),
                                   config.cell_size, config.seed);
    });
    const DownsampleResult scan_ds = stage("downsample scan", [&] {
        return box_grid_downsample(mesh_points(scan_welded), scan_weights,
                                   config.cell_size, hash_mix(config.seed ^ 1ull));
    });
    report.design_points = static_cast<std::size_t>(design_ds.points.rows());
    report.scan_points = static_cast<std::size_t>(scan_ds.points.rows());
    report.stage_seconds[1] = seconds_since(t0);

    t0 = Clock::now();
    const RegistrationResult reg = stage("register", [&] {
        return register_point_sets(design_ds.points, scan_ds.points, scan_ds.weights,
                                   config.gmm);
    });
    report.iterations = reg.iterations;
    report.converged = reg.converged;
    report.sigma2 = reg.sigma2;
    report.stage_seconds[2] = seconds_since(t0);

    t0 = Clock::now();
    result.field = make_field(scan_ds.points, reg.displacements);
    result.field.valid = stage("outlier detection", [&] {
        const double eps = config.outlier_eps_a > 0.0 ? config.outlier_eps_a
                                                      : default_eps_a(result.field);
        return detect_outliers(result.field, config.outlier_k, eps,
                               config.outlier_threshold);
    });
    report.outliers =
        static_cast<std::size_t>(result.field.size() - result.field.valid_count());
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0, sum = 0.0;
        Eigen::Index n = 0;
        for (Eigen::Index i = 0; i < result.field.size(); ++i) {
            if (!result.field.valid[static_cast<std::size_t>(i)]) continue;
            const double mag = result.field.vectors.row(i).norm();
            lo = std::min(lo, mag);
            hi = std::max(hi, mag);
            sum += mag;
            ++n;
        }
        report.disp_min = n > 0 ? lo : 0.0;
        report.disp_max = hi;
        report.disp_mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    }
    report.stage_seconds[3] = seconds_since(t0);

    t0 = Clock::now();
    // The registration displacement T - y points from spatial back to
    // material, i.e. minus the distortion; negate it to feed the
    // predicted-distortion field that compensate_mesh subtracts.
    DisplacementField distortion = result.field;
    distortion.vectors = -distortion.vectors;
    result.compensated = stage("compensate", [&] {
        return compensate_mesh(design_welded, distortion, config.interp, config.interp_k,
                               config.scale);
    });
    report.stage_seconds[4] = seconds_since(t0);
    return result;
}

PipelineStlResult run_pipeline_stl(std::span<const std::uint8_t> design_stl,
                                   std::span<const std::uint8_t> scan_stl,
                                   const PipelineConfig& config) {
    const TriangleMesh design = stage("read design", [&] { return read_stl(design_stl); });
    const TriangleMesh scan = stage("read scan", [&] { return read_stl(scan_stl); });
    PipelineResult r = run_pipeline(design, scan, config);
    PipelineStlResult out;
    out.stl_bytes = stage("write", [&] { return write_stl(r.compensated, StlFormat::binary); });
    out.report = r.report;
    return out;
}

}  // namespace distcomp
