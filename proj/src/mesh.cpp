#include "distcomp/mesh.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

namespace distcomp {

namespace {

struct CellKey {
    std::int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = hash_mix(static_cast<std::uint64_t>(k.x));
        h = hash_mix(h ^ static_cast<std::uint64_t>(k.y));
        h = hash_mix(h ^ static_cast<std::uint64_t>(k.z));
        return static_cast<std::size_t>(h);
    }
};

CellKey cell_of(const Eigen::Vector3d& v, double cell) {
    return CellKey{static_cast<std::int64_t>(std::floor(v.x() / cell)),
                   static_cast<std::int64_t>(std::floor(v.y() / cell)),
                   static_cast<std::int64_t>(std::floor(v.z() / cell))};
}

struct ExactKey {
    std::array<std::uint64_t, 3> bits;
    bool operator==(const ExactKey&) const = default;
};

struct ExactKeyHash {
    std::size_t operator()(const ExactKey& k) const {
        return static_cast<std::size_t>(
            hash_mix(k.bits[0] ^ hash_mix(k.bits[1] ^ hash_mix(k.bits[2]))));
    }
};

ExactKey exact_key(const Eigen::Vector3d& v) {
    ExactKey k{};
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&k.bits[0], &v.x(), sizeof(double));
    std::memcpy(&k.bits[1], &v.y(), sizeof(double));
    std::memcpy(&k.bits[2], &v.z(), sizeof(double));
    return k;
}

}  // namespace

void validate_mesh(const TriangleMesh& mesh) {
    const std::uint32_t n = static_cast<std::uint32_t>(mesh.vertices.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (std::uint32_t idx : tri) {
            if (idx >= n) {
                throw std::invalid_argument("mesh: triangle " + std::to_string(t) +
                                            " references vertex " + std::to_string(idx) +
                                            " out of " + std::to_string(n));
            }
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            throw std::invalid_argument("mesh: triangle " + std::to_string(t) +
                                        " repeats a vertex index");
        }
    }
}

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

TriangleMesh weld_vertices(const TriangleMesh& soup, double tol) {
    if (tol < 0.0) {
        throw std::invalid_argument("weld_vertices: tolerance must be >= 0");
    }

    TriangleMesh out;
    out.vertices.reserve(soup.vertices.size());
    std::vector<std::uint32_t> remap(soup.vertices.size());

    if (tol == 0.0) {
        std::unordered_map<ExactKey, std::uint32_t, ExactKeyHash> seen;
        seen.reserve(soup.vertices.size());
        for (std::size_t i = 0; i < soup.vertices.size(); ++i) {
            auto [it, inserted] =
                seen.try_emplace(exact_key(soup.vertices[i]),
                                 static_cast<std::uint32_t>(out.vertices.size()));
            if (inserted) {
                out.vertices.push_back(soup.vertices[i]);
            }
            remap[i] = it->second;
        }
    } else {
        // Representatives hashed on a grid with cell size tol: any point
        // within tol of a representative lies in one of the 27 cells
        // around it, so a linear scan of those cells is exhaustive.
        std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> grid;
        const double tol2 = tol * tol;
        for (std::size_t i = 0; i < soup.vertices.size(); ++i) {
            const Eigen::Vector3d& v = soup.vertices[i];
            const CellKey base = cell_of(v, tol);
            std::uint32_t found = std::numeric_limits<std::uint32_t>::max();
            for (std::int64_t dz = -1; dz <= 1 && found == UINT32_MAX; ++dz) {
                for (std::int64_t dy = -1; dy <= 1 && found == UINT32_MAX; ++dy) {
                    for (std::int64_t dx = -1; dx <= 1; ++dx) {
                        auto it = grid.find(CellKey{base.x + dx, base.y + dy, base.z + dz});
                        if (it == grid.end()) continue;
                        for (std::uint32_t rep : it->second) {
                            if ((out.vertices[rep] - v).squaredNorm() <= tol2) {
                                found = rep;
                                break;
                            }
                        }
                        if (found != UINT32_MAX) break;
                    }
                }
            }
            if (found == UINT32_MAX) {
                found = static_cast<std::uint32_t>(out.vertices.size());
                out.vertices.push_back(v);
                grid[base].push_back(found);
            }
            remap[i] = found;
        }
    }

    out.triangles.reserve(soup.triangles.size());
    for (const auto& tri : soup.triangles) {
        const std::array<std::uint32_t, 3> m{remap[tri[0]], remap[tri[1]], remap[tri[2]]};
        if (m[0] == m[1] || m[1] == m[2] || m[0] == m[2]) {
            continue;  // collapsed by the merge
        }
        out.triangles.push_back(m);
    }
    return out;
}

double default_weld_tolerance(const TriangleMesh& mesh) {
    return 1e-6 * mesh_bounding_diagonal(mesh);
}

WeightVector vertex_area_weights(const TriangleMesh& mesh) {
    validate_mesh(mesh);
    if (mesh.vertices.empty()) {
        throw std::invalid_argument("vertex_area_weights: empty mesh");
    }
    WeightVector raw = WeightVector::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
    for (const auto& tri : mesh.triangles) {
        const double share = triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                           mesh.vertices[tri[2]]) /
                             3.0;
        raw[tri[0]] += share;
        raw[tri[1]] += share;
        raw[tri[2]] += share;
    }
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        if (!(raw[i] > 0.0)) {
            throw std::invalid_argument("vertex_area_weights: vertex " + std::to_string(i) +
                                        " has zero incident area");
        }
    }
    return normalize_weights(std::move(raw));
}

PointMatrix mesh_points(const TriangleMesh& mesh, int dim) {
    if (dim != 2 && dim != 3) {
        throw std::invalid_argument("mesh_points: dim must be 2 or 3");
    }
    PointMatrix pts(static_cast<Eigen::Index>(mesh.vertices.size()), dim);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        for (int d = 0; d < dim; ++d) {
            pts(static_cast<Eigen::Index>(i), d) = mesh.vertices[i][d];
        }
    }
    return pts;
}

double mesh_bounding_diagonal(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) {
        return 0.0;
    }
    Eigen::Vector3d lo = mesh.vertices.front();
    Eigen::Vector3d hi = lo;
    for (const auto& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return (hi - lo).norm();
}

}  // namespace distcomp
