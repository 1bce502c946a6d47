#include <doctest.h>

#include <cstring>
#include <random>
#include <string>

#include "distcomp/stl_io.hpp"
#include "support/test_meshes.hpp"

using namespace distcomp;

namespace {

std::vector<std::uint8_t> to_bytes(const std::string& s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

}  // namespace

TEST_CASE("minimal binary record layout") {
    // 80-byte header + count=1 + one 50-byte record = 134 bytes.
    std::vector<std::uint8_t> bytes(134, 0);
    const std::uint32_t count = 1;
    std::memcpy(bytes.data() + 80, &count, 4);
    const float record[12] = {0, 0, 1,  0, 0, 0,  1, 0, 0,  0, 1, 0};
    std::memcpy(bytes.data() + 84, record, sizeof(record));

    const TriangleMesh mesh = read_stl(bytes);
    CHECK(mesh.triangle_count() == 1);
    CHECK(mesh.vertex_count() == 3);
    CHECK(mesh.facet_normals.size() == 1);
    CHECK(mesh.facet_normals[0] == Eigen::Vector3f(0, 0, 1));
    CHECK(mesh.vertices[1] == Eigen::Vector3d(1, 0, 0));
}

TEST_CASE("minimal ascii solid") {
    const std::string text =
        "solid a\n"
        "  facet normal 0 0 1\n"
        "    outer loop\n"
        "      vertex 0 0 0\n"
        "      vertex 1 0 0\n"
        "      vertex 0 1 0\n"
        "    endloop\n"
        "  endfacet\n"
        "endsolid a\n";
    const TriangleMesh mesh = read_stl(to_bytes(text));
    CHECK(mesh.triangle_count() == 1);
    CHECK(mesh.vertices[2] == Eigen::Vector3d(0, 1, 0));
}

TEST_CASE("read errors") {
    SUBCASE("truncated binary body") {
        std::vector<std::uint8_t> bytes(84 + 49, 0);  // one record short a byte
        const std::uint32_t count = 1;
        std::memcpy(bytes.data() + 80, &count, 4);
        CHECK_THROWS_WITH_AS(read_stl(bytes), doctest::Contains("truncated"),
                             std::runtime_error);
    }
    SUBCASE("zero triangles binary") {
        std::vector<std::uint8_t> bytes(84, 0);
        CHECK_THROWS_WITH_AS(read_stl(bytes), doctest::Contains("zero"),
                             std::runtime_error);
    }
    SUBCASE("malformed ascii falls back to binary and reports") {
        // Starts with "solid" but is neither valid ASCII nor valid binary.
        CHECK_THROWS_AS(read_stl(to_bytes("solid broken\nfacet normal x y z\n")),
                        std::runtime_error);
    }
    SUBCASE("ascii solid with no facets") {
        CHECK_THROWS_AS(read_stl(to_bytes("solid empty\nendsolid empty\n")),
                        std::runtime_error);
    }
}

TEST_CASE("write rejects empty meshes and records the triangle count") {
    CHECK_THROWS_AS(write_stl(TriangleMesh{}, StlFormat::binary), std::invalid_argument);

    std::mt19937_64 rng(23);
    const TriangleMesh mesh = fixtures::random_soup(17, rng);
    const auto bytes = write_stl(mesh, StlFormat::binary);
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    CHECK(count == 17);
    CHECK(bytes.size() == 84 + 50 * 17);
}

TEST_CASE("binary round trip is byte-exact on the triangle payload") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 25; ++trial) {
        const TriangleMesh mesh = fixtures::random_soup(1 + trial % 40, rng);
        const auto first = write_stl(mesh, StlFormat::binary);
        const auto second = write_stl(read_stl(first), StlFormat::binary);
        REQUIRE(first.size() == second.size());
        // payload: everything after the 80-byte header
        CHECK(std::memcmp(first.data() + 80, second.data() + 80, first.size() - 80) == 0);
    }
}

TEST_CASE("ascii round trip preserves float32 coordinates exactly") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const TriangleMesh mesh = fixtures::random_soup(12, rng);
        const TriangleMesh back = read_stl(write_stl(mesh, StlFormat::ascii));
        REQUIRE(back.vertex_count() == mesh.vertex_count());
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            for (int d = 0; d < 3; ++d) {
                CHECK(static_cast<float>(back.vertices[i][d]) ==
                      static_cast<float>(mesh.vertices[i][d]));
            }
        }
    }
}

TEST_CASE("binary files whose header starts with 'solid' still parse") {
    std::mt19937_64 rng(37);
    const TriangleMesh mesh = fixtures::random_soup(3, rng);
    auto bytes = write_stl(mesh, StlFormat::binary);
    std::memcpy(bytes.data(), "solid", 5);
    const TriangleMesh back = read_stl(bytes);
    CHECK(back.triangle_count() == 3);
}
