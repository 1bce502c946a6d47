#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "distcomp/core.hpp"

namespace distcomp {

/// Indexed triangle surface. STL readers produce an un-welded soup
/// (three fresh vertices per facet); weld_vertices turns it into a
/// shared-vertex mesh. Coordinates are model units, typically mm.
struct TriangleMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    /// Per-facet normals as read from file; empty if the mesh was not
    /// read from STL. Writers recompute normals and ignore this field.
    std::vector<Eigen::Vector3f> facet_normals;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
};

/// Throws std::invalid_argument if any triangle index is out of range or
/// a triangle repeats a vertex index.
void validate_mesh(const TriangleMesh& mesh);

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c);

/// Merges vertices within tol of each other (grid-hash, first occurrence
/// wins) and drops triangles that become degenerate. tol = 0 merges only
/// bit-identical coordinates. No two surviving vertices are within tol.
TriangleMesh weld_vertices(const TriangleMesh& soup, double tol);

/// 1e-6 times the bounding-box diagonal; the usual choice for STL soups
/// whose duplicated vertices are exact or near-exact copies.
double default_weld_tolerance(const TriangleMesh& mesh);

/// Per-vertex weight: one third of the incident triangle area, scaled so
/// the mean is 1. Requires a welded mesh in which every vertex carries
/// nonzero incident area; throws naming the first offending vertex.
WeightVector vertex_area_weights(const TriangleMesh& mesh);

/// Vertex coordinates as an N x dim matrix. dim = 2 keeps x,y only
/// (planar meshes with z = 0); dim = 3 keeps everything.
PointMatrix mesh_points(const TriangleMesh& mesh, int dim = 3);

/// Bounding-box diagonal over the vertices.
double mesh_bounding_diagonal(const TriangleMesh& mesh);

}  // namespace distcomp
