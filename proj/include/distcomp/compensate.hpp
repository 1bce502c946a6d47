#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "distcomp/displacement_field.hpp"
#include "distcomp/mesh.hpp"
#include "distcomp/registration.hpp"
#include "distcomp/stl_io.hpp"

namespace distcomp {

enum class Interpolator { knn, idw };

struct PipelineConfig {
    GmmConfig gmm;                    ///< pipeline default carries w = 0.1
    double cell_size = 2.0;           ///< box grid filter edge, model units
    double weld_tol = -1.0;           ///< < 0: 1e-6 x bounding diagonal per mesh
    int outlier_k = 8;
    double outlier_eps_a = -1.0;      ///< < 0: 0.1 x median neighbor spacing
    double outlier_threshold = 2.0;
    Interpolator interp = Interpolator::knn;
    int interp_k = 8;
    double scale = 1.0;               ///< compensation scale; 0 leaves the design unchanged
    std::uint64_t seed = 0;
};

/// Pipeline defaults: beta = 3, lambda = 2, w = 0.1, cell = 2.
PipelineConfig default_pipeline_config();

struct PipelineReport {
    std::size_t design_vertices = 0;  ///< after welding
    std::size_t scan_vertices = 0;
    std::size_t design_points = 0;    ///< after downsampling
    std::size_t scan_points = 0;
    int iterations = 0;
    bool converged = false;
    double sigma2 = 0.0;
    std::size_t outliers = 0;
    double disp_min = 0.0;            ///< valid-sample displacement magnitudes
    double disp_max = 0.0;
    double disp_mean = 0.0;
    /// load is not timed; stages: weld, downsample, register, field, compensate.
    std::array<double, 5> stage_seconds{};
};

/// Deterministic report CSV (name,value rows). Stage timings are not
/// included so repeated runs produce identical bytes; they go to the
/// console instead.
std::string report_csv(const PipelineReport& report);

/// Moves every design vertex to v - scale * u(v), where u is the given
/// predicted distortion field evaluated by the chosen interpolator over
/// the field's valid samples. Topology is untouched.
TriangleMesh compensate_mesh(const TriangleMesh& design, const DisplacementField& field,
                             Interpolator interp, int k, double scale);

struct PipelineResult {
    TriangleMesh compensated;
    PipelineReport report;
    DisplacementField field;  ///< registration displacements T - y at scan samples
};

/// Full chain: weld both meshes, compute scan area weights, box-grid
/// downsample both point sets, register (scan points as centroids, design
/// points as data), reject displacement outliers, interpolate at the
/// design vertices, and pre-deform the design against the predicted
/// distortion. Stage failures are rethrown with the stage name.
PipelineResult run_pipeline(const TriangleMesh& design, const TriangleMesh& scan,
                            const PipelineConfig& config);

struct PipelineStlResult {
    std::vector<std::uint8_t> stl_bytes;
    PipelineReport report;
};

/// Byte-level wrapper: parses both STLs, runs the pipeline, and returns
/// the compensated mesh as binary STL.
PipelineStlResult run_pipeline_stl(std::span<const std::uint8_t> design_stl,
                                   std::span<const std::uint8_t> scan_stl,
                                   const PipelineConfig& config);

}  // namespace distcomp
