// distcomp command-line tool: registration, thermal compensation,
// synthetic benchmark, and GMM density export.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "distcomp/bench.hpp"
#include "distcomp/compensate.hpp"
#include "distcomp/downsample.hpp"

namespace {

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

distcomp::WeightMode parse_mode(const std::string& s) {
    if (s == "equal") return distcomp::WeightMode::equal;
    if (s == "area") return distcomp::WeightMode::area;
    throw CLI::ValidationError("--weights must be 'equal' or 'area'");
}

distcomp::Interpolator parse_interp(const std::string& s) {
    if (s == "knn") return distcomp::Interpolator::knn;
    if (s == "linear") return distcomp::Interpolator::idw;
    throw CLI::ValidationError("--interp must be 'knn' or 'linear'");
}

int run_register(const std::string& design_path, const std::string& scan_path,
                 const std::string& mode, double cell, std::uint64_t seed,
                 distcomp::GmmConfig gmm, const std::string& field_path,
                 const std::string& trace_path) {
    using namespace distcomp;
    gmm.weight_mode = parse_mode(mode);

    TriangleMesh design = read_stl_file(design_path);
    design = weld_vertices(design, default_weld_tolerance(design));
    TriangleMesh scan = read_stl_file(scan_path);
    scan = weld_vertices(scan, default_weld_tolerance(scan));

    PointMatrix X = mesh_points(design);
    PointMatrix y = mesh_points(scan);
    WeightVector weights = vertex_area_weights(scan);
    if (cell > 0.0) {
        const DownsampleResult dd = box_grid_downsample(X, WeightVector(), cell, seed);
        const DownsampleResult sd = box_grid_downsample(y, weights, cell, hash_mix(seed ^ 1ull));
        X = dd.points;
        y = sd.points;
        weights = sd.weights;
    }

    const RegistrationResult result = register_point_sets(X, y, weights, gmm);
    DisplacementField field = make_field(y, result.displacements);
    write_text_file(field_path, field_csv(field));
    if (!trace_path.empty()) {
        write_text_file(trace_path, trace_csv(result));
    }
    std::cout << "registered " << y.rows() << " centroids against " << X.rows()
              << " data points in " << result.iterations << " iterations ("
              << (result.converged ? "converged" : "max iterations") << "), sigma2 "
              << result.sigma2 << "\n"
              << "field written to " << field_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distcomp: deformation recovery and thermal compensation for 3D printing"};
    app.require_subcommand(1);

    // ---- register ----
    auto* reg = app.add_subcommand("register",
                                   "Register a scan STL against a design STL and export "
                                   "the displacement field");
    std::string reg_design, reg_scan, reg_mode = "area";
    std::string reg_field = "field.csv", reg_trace;
    double reg_cell = 0.0;
    std::uint64_t reg_seed = 0;
    distcomp::GmmConfig reg_gmm;
    reg->add_option("--design", reg_design, "design STL path")->required();
    reg->add_option("--scan", reg_scan, "scan STL path")->required();
    reg->add_option("--weights", reg_mode, "weight mode: equal|area (default area)");
    reg->add_option("--cell-size", reg_cell, "box grid filter cell; 0 disables downsampling");
    reg->add_option("--beta", reg_gmm.beta, "Gaussian kernel width (default 3)");
    reg->add_option("--lambda", reg_gmm.lambda, "regularization weight (default 2)");
    reg->add_option("--w", reg_gmm.w, "uniform outlier weight in [0,1) (default 0)");
    reg->add_option("--max-iters", reg_gmm.max_iters, "EM iteration cap (default 150)");
    reg->add_option("--tol", reg_gmm.tol, "relative objective tolerance (default 1e-6)");
    reg->add_option("--seed", reg_seed, "downsampling seed (default 0)");
    reg->add_option("--out-field", reg_field, "output field CSV (default field.csv)");
    reg->add_option("--trace", reg_trace, "objective trace CSV");

    // ---- compensate ----
    auto* comp = app.add_subcommand("compensate",
                                    "Run the full pipeline and write a compensated STL");
    std::string comp_design, comp_scan, comp_out, comp_report, comp_interp = "knn";
    distcomp::PipelineConfig pipeline = distcomp::default_pipeline_config();
    comp->add_option("--design", comp_design, "design STL path")->required();
    comp->add_option("--scan", comp_scan, "scan STL path")->required();
    comp->add_option("--out", comp_out, "compensated STL path")->required();
    comp->add_option("--beta", pipeline.gmm.beta, "Gaussian kernel width (default 3)");
    comp->add_option("--lambda", pipeline.gmm.lambda, "regularization weight (default 2)");
    comp->add_option("--w", pipeline.gmm.w, "uniform outlier weight (default 0.1)");
    comp->add_option("--max-iters", pipeline.gmm.max_iters, "EM iteration cap (default 150)");
    comp->add_option("--tol", pipeline.gmm.tol, "relative objective tolerance (default 1e-6)");
    comp->add_option("--cell-size", pipeline.cell_size, "box grid filter cell (default 2)");
    comp->add_option("--weld-tol", pipeline.weld_tol,
                     "vertex weld tolerance; negative picks 1e-6 x bounding diagonal");
    comp->add_option("--knn-k", pipeline.interp_k, "interpolation neighbor count (default 8)");
    comp->add_option("--interp", comp_interp, "interpolator: knn|linear (default knn)");
    comp->add_option("--outlier-k", pipeline.outlier_k, "outlier test neighbors (default 8)");
    comp->add_option("--outlier-threshold", pipeline.outlier_threshold,
                     "normalized residual threshold (default 2)");
    comp->add_option("--outlier-eps", pipeline.outlier_eps_a,
                     "residual normalization floor; negative picks 0.1 x median spacing");
    comp->add_option("--scale", pipeline.scale, "compensation scale (default 1)");
    comp->add_option("--seed", pipeline.seed, "downsampling seed (default 0)");
    comp->add_option("--report", comp_report, "pipeline report CSV");

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "Unit-square benchmark: area vs equal weights");
    distcomp::BenchmarkConfig bench_config;
    bench_config.gmm = distcomp::benchmark_gmm_config();
    std::string bench_out = "bench_report.csv";
    std::vector<double> bench_amplitudes;
    bench->add_option("--seeds", bench_config.seeds, "trials per amplitude (default 10)");
    bench->add_option("--amplitude", bench_amplitudes,
                      "warp amplitude, repeatable (default 0.05 0.10 0.15)");
    bench->add_option("--design-n", bench_config.design_n,
                      "design grid subdivisions (default 10)");
    bench->add_option("--scan-points", bench_config.scan_points,
                      "refined scan mesh node target (default 200)");
    bench->add_option("--beta", bench_config.gmm.beta, "Gaussian kernel width (default 3)");
    bench->add_option("--lambda", bench_config.gmm.lambda, "regularization weight (default 2)");
    bench->add_option("--w", bench_config.gmm.w, "uniform outlier weight (default 0)");
    bench->add_option("--fields-dir", bench_config.fields_dir,
                      "write per-row displacement grids into this directory");
    bench->add_option("--out", bench_out, "report CSV (default bench_report.csv)");

    // ---- density ----
    auto* density = app.add_subcommand("density",
                                       "Export GMM density grids for the uniform and "
                                       "refined unit-square meshes");
    int density_grid = 64;
    double density_sigma2 = 0.0;
    std::uint64_t density_seed = 1;
    std::string density_prefix = "density";
    density->add_option("--grid", density_grid, "grid resolution per axis (default 64)");
    density->add_option("--sigma2", density_sigma2,
                        "component variance; 0 picks the uniform-mesh spacing squared");
    density->add_option("--seed", density_seed, "refined mesh seed (default 1)");
    density->add_option("--out-prefix", density_prefix, "output CSV prefix (default density)");

    if (argc < 2) {
        std::cout << app.help() << std::endl;
        return 2;
    }
    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(reg)) {
            return run_register(reg_design, reg_scan, reg_mode, reg_cell, reg_seed, reg_gmm,
                                reg_field, reg_trace);
        }
        if (app.got_subcommand(comp)) {
            pipeline.interp = parse_interp(comp_interp);
            const distcomp::TriangleMesh design = distcomp::read_stl_file(comp_design);
            const distcomp::TriangleMesh scan = distcomp::read_stl_file(comp_scan);
            const distcomp::PipelineResult result =
                distcomp::run_pipeline(design, scan, pipeline);
            distcomp::write_stl_file(result.compensated, comp_out,
                                     distcomp::StlFormat::binary);
            if (!comp_report.empty()) {
                write_text_file(comp_report, distcomp::report_csv(result.report));
            }
            const auto& rep = result.report;
            std::cout << "design " << rep.design_vertices << " -> " << rep.design_points
                      << " points, scan " << rep.scan_vertices << " -> " << rep.scan_points
                      << " points\n"
                      << "registration: " << rep.iterations << " iterations, sigma2 "
                      << rep.sigma2 << ", outliers " << rep.outliers << "\n"
                      << "displacement magnitude min/mean/max: " << rep.disp_min << " / "
                      << rep.disp_mean << " / " << rep.disp_max << "\n"
                      << "stage seconds (weld, downsample, register, field, compensate):";
            for (double s : rep.stage_seconds) {
                std::cout << ' ' << s;
            }
            std::cout << "\ncompensated STL written to " << comp_out << "\n";
            return 0;
        }
        if (app.got_subcommand(bench)) {
            if (!bench_amplitudes.empty()) {
                bench_config.amplitudes = bench_amplitudes;
            }
            const auto rows = distcomp::run_benchmark(bench_config);
            write_text_file(bench_out, distcomp::benchmark_csv(bench_config, rows));
            int failures = 0;
            for (const auto& r : rows) {
                failures += r.error.empty() ? 0 : 1;
            }
            std::cout << rows.size() << " rows written to " << bench_out;
            if (failures > 0) {
                std::cout << " (" << failures << " rows failed)";
            }
            std::cout << "\n";
            return failures == 0 ? 0 : 1;
        }
        if (app.got_subcommand(density)) {
            const distcomp::DensityStudy study =
                distcomp::run_density_study(density_grid, density_sigma2, density_seed);
            write_text_file(density_prefix + "_uniform_equal.csv",
                            distcomp::density_csv(study.grid, study.uniform_equal));
            write_text_file(density_prefix + "_refined_equal.csv",
                            distcomp::density_csv(study.grid, study.refined_equal));
            write_text_file(density_prefix + "_refined_area.csv",
                            distcomp::density_csv(study.grid, study.refined_area));
            std::cout << "max |refined_area - uniform_equal|  = " << study.deviation_area
                      << "\n"
                      << "max |refined_equal - uniform_equal| = " << study.deviation_equal
                      << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
