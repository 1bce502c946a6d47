#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "distcomp/bench.hpp"
#include "distcomp/delaunay.hpp"
#include "support/test_meshes.hpp"

using namespace distcomp;

TEST_CASE("uniform square mesh counts") {
    const TriangleMesh one = make_uniform_square_mesh(1);
    CHECK(one.vertex_count() == 4);
    CHECK(one.triangle_count() == 2);

    const TriangleMesh ten = make_uniform_square_mesh(10);
    CHECK(ten.vertex_count() == 121);
    CHECK(ten.triangle_count() == 200);
    validate_mesh(ten);
}

TEST_CASE("uniform square mesh interior weights approach one") {
    const int n = 16;
    const TriangleMesh mesh = make_uniform_square_mesh(n);
    const WeightVector w = vertex_area_weights(mesh);
    // Interior vertices sit on congruent six-triangle fans; their raw
    // shares are all equal, so normalized weights cluster slightly above
    // the boundary-dominated mean.
    const int side = n + 1;
    double lo = 1e9, hi = -1e9;
    for (int j = 1; j < n; ++j) {
        for (int i = 1; i < n; ++i) {
            const double wi = w[j * side + i];
            lo = std::min(lo, wi);
            hi = std::max(hi, wi);
        }
    }
    CHECK(hi - lo < 1e-12);           // identical fans
    CHECK(hi == doctest::Approx(1.0).epsilon(0.15));  // near mean for large n
}

TEST_CASE("delaunay of the four corners") {
    const std::vector<Eigen::Vector2d> corners = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto tris = delaunay_triangulate(corners);
    CHECK(tris.size() == 2);
}

TEST_CASE("delaunay rejects degenerate input") {
    CHECK_THROWS_AS(delaunay_triangulate({{0, 0}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("delaunay satisfies the empty-circumcircle property") {
    std::mt19937_64 rng(157);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        for (int i = 0; i < 120; ++i) {
            pts.emplace_back(unit(rng), unit(rng));
        }
        const auto tris = delaunay_triangulate(pts);
        for (const auto& t : tris) {
            for (std::size_t p = 0; p < pts.size(); ++p) {
                if (p == t[0] || p == t[1] || p == t[2]) continue;
                CHECK(in_circle(pts[t[0]], pts[t[1]], pts[t[2]], pts[p]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("refined square mesh hits the requested size and tags corners") {
    const RefinedSquareMesh refined =
        make_refined_square_mesh([](double, double) { return 1.0; }, 150, 7);
    const double count = static_cast<double>(refined.mesh.vertex_count());
    CHECK(std::abs(count - 150.0) / 150.0 < 0.10);
    CHECK(refined.mesh.vertices[refined.corner_indices[0]] == Eigen::Vector3d(0, 0, 0));
    CHECK(refined.mesh.vertices[refined.corner_indices[2]] == Eigen::Vector3d(1, 1, 0));
    CHECK(refined.on_boundary.size() == refined.mesh.vertex_count());
    validate_mesh(refined.mesh);

    // graded sampling places more nodes where the density is high
    const RefinedSquareMesh graded =
        make_refined_square_mesh(clustered_density, 300, 11);
    int near_bump = 0;
    for (const auto& v : graded.mesh.vertices) {
        if ((v.head<2>() - Eigen::Vector2d(0.70, 0.70)).norm() < 0.15) {
            ++near_bump;
        }
    }
    // the bump disk covers ~7% of the square; uniform sampling would put
    // ~21 nodes there, the graded density several times that
    CHECK(near_bump > 42);
}

TEST_CASE("refined mesh generation is seed deterministic") {
    const RefinedSquareMesh a = make_refined_square_mesh(clustered_density, 120, 3);
    const RefinedSquareMesh b = make_refined_square_mesh(clustered_density, 120, 3);
    REQUIRE(a.mesh.vertex_count() == b.mesh.vertex_count());
    for (std::size_t i = 0; i < a.mesh.vertices.size(); ++i) {
        CHECK(a.mesh.vertices[i] == b.mesh.vertices[i]);
    }
}

TEST_CASE("polynomial warp basics") {
    SUBCASE("zero coefficients give the identity map") {
        const PolynomialWarp warp(PolynomialWarp::Coefficients::Zero());
        const Eigen::Vector2d p(0.37, 0.81);
        CHECK(warp.apply(p) == p);
    }
    SUBCASE("constant-term-only warp is a pure translation") {
        PolynomialWarp::Coefficients c = PolynomialWarp::Coefficients::Zero();
        c(0, 0) = 0.1;
        c(1, 0) = -0.05;
        const PolynomialWarp warp(c);
        CHECK((warp.apply(Eigen::Vector2d(0.3, 0.7)) - Eigen::Vector2d(0.4, 0.65)).norm() <
              1e-15);
        CHECK(warp.min_jacobian_det() == doctest::Approx(1.0));
    }
    SUBCASE("sampled warps pass the Jacobian guard and are deterministic") {
        const PolynomialWarp a = PolynomialWarp::sample(0.1, 42);
        const PolynomialWarp b = PolynomialWarp::sample(0.1, 42);
        CHECK(a.coefficients() == b.coefficients());
        CHECK(a.min_jacobian_det() > 0.0);
    }
    SUBCASE("analytic Jacobian matches central differences") {
        const PolynomialWarp warp = PolynomialWarp::sample(0.15, 5);
        const double h = 1e-6;
        for (const auto& p : {Eigen::Vector2d(0.2, 0.3), Eigen::Vector2d(0.8, 0.6)}) {
            const Eigen::Matrix2d J = warp.jacobian(p);
            for (int d = 0; d < 2; ++d) {
                Eigen::Vector2d hi = p, lo = p;
                hi[d] += h;
                lo[d] -= h;
                const Eigen::Vector2d fd = (warp.apply(hi) - warp.apply(lo)) / (2.0 * h);
                CHECK(std::abs(fd[0] - J(0, d)) < 1e-6);
                CHECK(std::abs(fd[1] - J(1, d)) < 1e-6);
            }
        }
    }
    SUBCASE("sampled warps are reproducible across amplitudes") {
        for (double amp : {0.05, 0.1, 0.15}) {
            const PolynomialWarp w = PolynomialWarp::sample(amp, 9);
            CHECK(w.min_jacobian_det() > 0.0);
            CHECK(w.coefficients().cwiseAbs().maxCoeff() <= amp);
        }
    }
}

TEST_CASE("corner error arithmetic") {
    PointMatrix T(4, 2);
    T << 0, 0, 1, 0, 1, 1, 0, 1;  // exact corners
    const std::array<std::uint32_t, 4> idx{0, 1, 2, 3};
    CHECK(corner_error(T, idx) == 0.0);

    T(1, 0) = 1.2;  // one corner off by (0.2, 0)
    CHECK(corner_error(T, idx) == doctest::Approx(0.05));
}

TEST_CASE("benchmark smoke run produces the full grid of rows") {
    namespace fs = std::filesystem;
    const fs::path fields_dir = fs::temp_directory_path() / "distcomp_bench_fields";
    fs::remove_all(fields_dir);
    fs::create_directories(fields_dir);

    BenchmarkConfig config;
    config.amplitudes = {0.08};
    config.seeds = 2;
    config.design_n = 6;
    config.scan_points = 80;
    config.gmm = benchmark_gmm_config();
    config.gmm.max_iters = 60;
    config.fields_dir = fields_dir.string();

    const auto rows = run_benchmark(config);
    REQUIRE(rows.size() == 4);  // 1 amplitude x 2 seeds x 2 modes
    for (const auto& r : rows) {
        REQUIRE(r.error.empty());
        CHECK(r.corner_err >= 0.0);
        CHECK(r.boundary_rmse >= 0.0);
        CHECK(r.iterations >= 1);
    }
    const std::string csv = benchmark_csv(config, rows);
    CHECK(csv.find("amplitude,seed,mode,") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3 + 4);

    std::size_t grids = 0;
    for (const auto& entry : fs::directory_iterator(fields_dir)) {
        ++grids;
        CHECK(entry.path().extension() == ".csv");
    }
    CHECK(grids == rows.size());
    fs::remove_all(fields_dir);
}

TEST_CASE("benchmark at amplitude zero stays near the identity") {
    // Scan and design sample the same square with non-matching nodes, so
    // partnerless centroids settle a fraction of the node spacing away
    // from their start; area weights halve that drift.
    BenchmarkConfig config;
    config.amplitudes = {0.0};
    config.seeds = 2;
    config.design_n = 6;
    config.scan_points = 80;
    config.gmm = benchmark_gmm_config();

    const auto rows = run_benchmark(config);
    REQUIRE(rows.size() == 4);
    double equal_sum = 0.0, area_sum = 0.0;
    for (const auto& r : rows) {
        REQUIRE(r.error.empty());
        CHECK(r.corner_err < 0.05);
        CHECK(r.boundary_rmse < 0.05);
        (r.mode == WeightMode::area ? area_sum : equal_sum) += r.corner_err;
    }
    CHECK(area_sum < equal_sum);
}

TEST_CASE("density study exposes the equal-weight artifact") {
    const DensityStudy study = run_density_study(32, 0.0, 1);
    CHECK(study.grid.rows() == 32 * 32);
    CHECK(study.uniform_equal.minCoeff() >= 0.0);
    CHECK(study.deviation_equal > study.deviation_area);

    const std::string csv = density_csv(study.grid, study.refined_area);
    CHECK(csv.starts_with("x,y,density\n"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 32 * 32);
}
