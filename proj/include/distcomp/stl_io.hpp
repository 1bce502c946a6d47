#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "distcomp/mesh.hpp"

namespace distcomp {

enum class StlFormat { binary, ascii };

/// Parses binary or ASCII STL. A file is treated as ASCII iff it begins
/// with "solid" and the whole body parses as ASCII; everything else goes
/// through the binary path. The result is an un-welded triangle soup with
/// the file's facet normals preserved verbatim.
/// Throws std::runtime_error on truncated binary bodies, malformed ASCII
/// token streams, and zero-triangle files.
TriangleMesh read_stl(std::span<const std::uint8_t> bytes);

/// Serializes the mesh. Binary layout: 80-byte header, uint32 triangle
/// count, then 50 bytes per triangle (12 little-endian float32 for normal
/// and vertices, uint16 attribute = 0). Facet normals are recomputed from
/// right-hand vertex order; ASCII numbers carry 9 significant digits so a
/// reparse recovers identical float32 values. Empty meshes are rejected.
std::vector<std::uint8_t> write_stl(const TriangleMesh& mesh, StlFormat format);

TriangleMesh read_stl_file(const std::string& path);
void write_stl_file(const TriangleMesh& mesh, const std::string& path, StlFormat format);

}  // namespace distcomp
