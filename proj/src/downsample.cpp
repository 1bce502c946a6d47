#include "distcomp/downsample.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace distcomp {

namespace {

struct Cell {
    std::array<std::int64_t, 3> c;
    bool operator==(const Cell&) const = default;
};

struct CellHash {
    std::size_t operator()(const Cell& k) const {
        std::uint64_t h = hash_mix(static_cast<std::uint64_t>(k.c[0]));
        h = hash_mix(h ^ static_cast<std::uint64_t>(k.c[1]));
        h = hash_mix(h ^ static_cast<std::uint64_t>(k.c[2]));
        return static_cast<std::size_t>(h);
    }
};

struct CellGroup {
    std::vector<Eigen::Index> members;
    double weight_sum = 0.0;
};

}  // namespace

DownsampleResult box_grid_downsample(const PointMatrix& points, const WeightVector& weights,
                                     double cell, std::uint64_t seed) {
    validate_point_set(points, "box_grid_downsample");
    if (!(cell > 0.0)) {
        throw std::invalid_argument("box_grid_downsample: cell size must be > 0");
    }
    const bool has_weights = weights.size() > 0;
    if (has_weights && weights.size() != points.rows()) {
        throw std::invalid_argument("box_grid_downsample: weight count mismatch");
    }

    const int dim = static_cast<int>(points.cols());
    std::unordered_map<Cell, CellGroup, CellHash> groups;
    groups.reserve(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        Cell key{{0, 0, 0}};
        for (int d = 0; d < dim; ++d) {
            key.c[d] = static_cast<std::int64_t>(std::floor(points(i, d) / cell));
        }
        CellGroup& g = groups[key];
        g.members.push_back(i);
        if (has_weights) {
            g.weight_sum += weights[i];
        }
    }

    std::vector<Eigen::Index> chosen;
    std::vector<double> chosen_weight;
    chosen.reserve(groups.size());
    for (const auto& [key, g] : groups) {
        // Survivor selection keyed on (seed, cell) so the draw does not
        // depend on hash-map iteration order.
        std::uint64_t h = hash_mix(seed ^ CellHash{}(key));
        const std::size_t pick = static_cast<std::size_t>(h % g.members.size());
        chosen.push_back(g.members[pick]);
        if (has_weights) {
            chosen_weight.push_back(g.weight_sum);
        }
    }

    // Sort by source index: stable output order, independent of hashing.
    std::vector<std::size_t> order(chosen.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return chosen[a] < chosen[b]; });

    DownsampleResult out;
    out.points.resize(static_cast<Eigen::Index>(order.size()), dim);
    out.source_indices.reserve(order.size());
    if (has_weights) {
        out.weights.resize(static_cast<Eigen::Index>(order.size()));
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Eigen::Index src = chosen[order[i]];
        out.points.row(static_cast<Eigen::Index>(i)) = points.row(src);
        out.source_indices.push_back(src);
        if (has_weights) {
            out.weights[static_cast<Eigen::Index>(i)] = chosen_weight[order[i]];
        }
    }
    if (has_weights) {
        out.weights = normalize_weights(std::move(out.weights));
    }
    return out;
}

}  // namespace distcomp
