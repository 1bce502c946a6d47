#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "distcomp/mesh.hpp"
#include "distcomp/registration.hpp"
#include "distcomp/warp.hpp"

namespace distcomp {

/// Unit square meshed with an (n+1)^2 grid, each cell split into two
/// triangles: 2 n^2 triangles, z = 0.
TriangleMesh make_uniform_square_mesh(int n);

struct RefinedSquareMesh {
    TriangleMesh mesh;
    /// Vertex indices of (0,0), (1,0), (1,1), (0,1).
    std::array<std::uint32_t, 4> corner_indices;
    /// Per-vertex flag: on the square boundary.
    std::vector<char> on_boundary;
};

/// Locally refined unit-square mesh: points drawn by rejection sampling
/// against the (positive) density function, a share placed on the
/// boundary, the four corners always included, triangulated by
/// Bowyer-Watson insertion. Total vertex count is close to
/// target_points.
RefinedSquareMesh make_refined_square_mesh(
    const std::function<double(double, double)>& density, int target_points,
    std::uint64_t seed);

/// Two-bump density used for the non-uniform density study; strongly
/// graded so equal-weight mixtures of its nodes show spurious modes.
double clustered_density(double x, double y);

/// Mean Euclidean error at the four square corners between the recovered
/// rows of `transformed` and the material corner positions.
double corner_error(const PointMatrix& transformed,
                    const std::array<std::uint32_t, 4>& corner_indices);

struct BenchmarkConfig {
    std::vector<double> amplitudes{0.05, 0.10, 0.15};
    int seeds = 10;
    int design_n = 10;        ///< design grid: (n+1)^2 nodes
    int scan_points = 200;    ///< refined scan mesh target node count
    GmmConfig gmm;            ///< benchmark default: beta 3, lambda 2, w 0
    std::string fields_dir;   ///< when nonempty, per-row field grids are written here
};

/// Default benchmark GmmConfig: beta = 3, lambda = 2, w = 0.
GmmConfig benchmark_gmm_config();

struct BenchmarkRow {
    double amplitude = 0.0;
    std::uint64_t seed = 0;
    WeightMode mode = WeightMode::equal;
    double corner_err = 0.0;
    double boundary_rmse = 0.0;
    int iterations = 0;
    bool converged = false;
    double runtime_s = 0.0;
    std::string error;  ///< nonempty when the row failed; other fields are zero
};

/// One registration per (amplitude, seed, mode): a seeded degree-2 warp
/// deforms the refined scan mesh, both modes register it against the
/// uniform design grid, and errors are measured against the known warp
/// truth. Row failures are recorded and the run continues.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config);

/// CSV with a commented header describing the mesh scale.
std::string benchmark_csv(const BenchmarkConfig& config,
                          const std::vector<BenchmarkRow>& rows);

struct DensityStudy {
    PointMatrix grid;                  ///< grid_n^2 query points on the unit square
    Eigen::VectorXd uniform_equal;     ///< uniform mesh, unit weights
    Eigen::VectorXd refined_equal;     ///< refined mesh, unit weights
    Eigen::VectorXd refined_area;      ///< refined mesh, area weights
    double deviation_area = 0.0;       ///< max |refined_area - uniform_equal|
    double deviation_equal = 0.0;      ///< max |refined_equal - uniform_equal|
};

/// Evaluates the three GMM densities of the same unit square on a
/// grid_n^2 grid. sigma2 <= 0 picks a default a bit above the squared
/// node spacing of both meshes.
DensityStudy run_density_study(int grid_n, double sigma2, std::uint64_t seed);

/// Density grid CSV: x,y,density lines.
std::string density_csv(const PointMatrix& grid, const Eigen::VectorXd& density);

}  // namespace distcomp
