#include <doctest.h>

#include <Eigen/Geometry>

#include <random>

#include "distcomp/mesh.hpp"
#include "support/test_meshes.hpp"

using namespace distcomp;

TEST_CASE("weld merges shared edges at zero tolerance") {
    // Two triangles sharing an edge, coordinates bit-identical.
    TriangleMesh soup;
    soup.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0},
                     {0, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    soup.triangles = {{0, 1, 2}, {3, 4, 5}};
    const TriangleMesh welded = weld_vertices(soup, 0.0);
    CHECK(welded.vertex_count() == 4);
    CHECK(welded.triangle_count() == 2);
    validate_mesh(welded);
}

TEST_CASE("weld merges perturbed duplicates within tolerance") {
    TriangleMesh soup;
    soup.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0},
                     {1e-9, -1e-9, 0}, {1, 1, 1e-9}, {0, 1, 0}};
    soup.triangles = {{0, 1, 2}, {3, 4, 5}};
    const TriangleMesh welded = weld_vertices(soup, 1e-6);
    CHECK(welded.vertex_count() == 4);
    CHECK(welded.triangle_count() == 2);
}

TEST_CASE("weld with tolerance above the diameter collapses everything") {
    std::mt19937_64 rng(7);
    const TriangleMesh soup = fixtures::random_soup(20, rng);
    const TriangleMesh welded = weld_vertices(soup, 1e6);
    CHECK(welded.vertex_count() == 1);
    CHECK(welded.triangle_count() == 0);
}

TEST_CASE("weld is idempotent") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const TriangleMesh soup = fixtures::random_soup(30, rng);
        const double tol = 0.05;
        const TriangleMesh once = weld_vertices(soup, tol);
        const TriangleMesh twice = weld_vertices(once, tol);
        REQUIRE(once.vertex_count() == twice.vertex_count());
        REQUIRE(once.triangle_count() == twice.triangle_count());
        for (std::size_t i = 0; i < once.vertices.size(); ++i) {
            CHECK(once.vertices[i] == twice.vertices[i]);
        }
        for (std::size_t t = 0; t < once.triangles.size(); ++t) {
            CHECK(once.triangles[t] == twice.triangles[t]);
        }
    }
}

TEST_CASE("welded vertices are pairwise separated by more than the tolerance") {
    std::mt19937_64 rng(13);
    const TriangleMesh soup = fixtures::random_soup(50, rng);
    const double tol = 1.5;
    const TriangleMesh welded = weld_vertices(soup, tol);
    for (std::size_t i = 0; i < welded.vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < welded.vertices.size(); ++j) {
            CHECK((welded.vertices[i] - welded.vertices[j]).norm() > tol);
        }
    }
}

TEST_CASE("area weights of the split unit square") {
    // Areas 1/2 each; third-shares A=1/3, B=1/6, C=1/3, D=1/6, mean 1/4.
    const TriangleMesh mesh = fixtures::make_unit_square_pair();
    const WeightVector w = vertex_area_weights(mesh);
    REQUIRE(w.size() == 4);
    CHECK(w[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(w[2] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(w[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("area weights have mean one on random meshes") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const TriangleMesh mesh = fixtures::random_soup(40, rng);
        const WeightVector w = vertex_area_weights(mesh);
        CHECK(w.mean() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(w.minCoeff() > 0.0);
    }
}

TEST_CASE("area weights are rigid-motion and scale invariant") {
    const TriangleMesh box = fixtures::make_box_mesh(2.0, 1.5, 1.0, 0.5);
    const WeightVector w = vertex_area_weights(box);

    TriangleMesh moved = box;
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
    for (auto& v : moved.vertices) {
        v = rot * v + Eigen::Vector3d(5.0, -2.0, 0.5);
    }
    const WeightVector w_moved = vertex_area_weights(moved);
    CHECK((w - w_moved).cwiseAbs().maxCoeff() < 1e-10);

    TriangleMesh scaled = box;
    for (auto& v : scaled.vertices) {
        v *= 37.5;
    }
    const WeightVector w_scaled = vertex_area_weights(scaled);
    CHECK((w - w_scaled).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("area weights reject vertices with no incident area") {
    TriangleMesh mesh = fixtures::make_unit_square_pair();
    mesh.vertices.emplace_back(5.0, 5.0, 0.0);  // unreferenced
    CHECK_THROWS_WITH_AS(vertex_area_weights(mesh),
                         doctest::Contains("vertex 4"), std::invalid_argument);
}

TEST_CASE("validate_mesh rejects bad indices") {
    TriangleMesh mesh = fixtures::make_unit_square_pair();
    mesh.triangles.push_back({0, 1, 9});
    CHECK_THROWS_AS(validate_mesh(mesh), std::invalid_argument);
    mesh.triangles.back() = {0, 1, 1};
    CHECK_THROWS_AS(validate_mesh(mesh), std::invalid_argument);
}
