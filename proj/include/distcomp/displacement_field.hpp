#pragma once

#include <string>
#include <vector>

#include "distcomp/core.hpp"

namespace distcomp {

/// Registration displacements anchored at the scan-side sample points,
/// with a validity mask maintained by outlier rejection.
struct DisplacementField {
    PointMatrix samples;        ///< m x D positions
    Eigen::MatrixXd vectors;    ///< m x D displacements
    std::vector<char> valid;    ///< same length; outliers are 0

    Eigen::Index size() const { return samples.rows(); }
    Eigen::Index valid_count() const;
};

/// Field with all samples valid.
DisplacementField make_field(PointMatrix samples, Eigen::MatrixXd vectors);

/// 0.1 times the median nearest-neighbor spacing of the valid samples;
/// the default normalization floor for detect_outliers and the
/// inverse-distance weights.
double default_eps_a(const DisplacementField& field);

/// Normalized-median residual test, run per displacement component over
/// the k nearest valid neighbors of each sample. Medians are lower
/// medians for even counts. A sample is flagged when any component's
/// residual exceeds the threshold. Returns the updated mask (previously
/// invalid samples stay invalid). Requires at least k+1 valid samples.
std::vector<char> detect_outliers(const DisplacementField& field, int k, double eps_a,
                                  double threshold);

/// Mean displacement of the k nearest valid samples per query row.
Eigen::MatrixXd knn_interpolate(const DisplacementField& field, const PointMatrix& queries,
                                int k);

/// Inverse-distance weighting, weight 1/(d + eps)^power, over the k
/// nearest valid samples. A query coincident with a valid sample returns
/// that sample's vector exactly.
Eigen::MatrixXd idw_interpolate(const DisplacementField& field, const PointMatrix& queries,
                                int k, double power = 1.0);

/// CSV with columns x,y,z,ux,uy,uz,valid (z and uz written as 0 for 2-D).
std::string field_csv(const DisplacementField& field);

}  // namespace distcomp
