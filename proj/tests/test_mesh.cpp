#include "risolve/mesh.hpp"

#include "risolve/errors.hpp"
#include "risolve/fem.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

using namespace risolve;

TEST_SUITE("mesh") {

TEST_CASE("unit interval") {
    const SimplicialMesh m = unit_interval(4);
    CHECK(m.num_vertices() == 5);
    CHECK(m.num_cells() == 4);
    CHECK(m.h == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(m.rho == 1.0);

    const SimplicialMesh m2 = unit_interval(2);
    // exactly the two endpoint vertices are flagged
    for (int v = 0; v < m2.num_vertices(); ++v) {
        const bool endpoint = m2.vertices[v][0] == 0.0 || m2.vertices[v][0] == 1.0;
        CHECK(static_cast<bool>(m2.boundary[v]) == endpoint);
    }
}

TEST_CASE("unit square") {
    const SimplicialMesh m = unit_square(2);
    CHECK(m.num_vertices() == 9);
    CHECK(m.num_cells() == 8);
    CHECK(m.h == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    for (int v = 0; v < m.num_vertices(); ++v) {
        const auto& x = m.vertices[v];
        const bool on_edge = x[0] == 0.0 || x[0] == 1.0 || x[1] == 0.0 || x[1] == 1.0;
        CHECK(static_cast<bool>(m.boundary[v]) == on_edge);
    }
}

TEST_CASE("conformity: interior edges shared by exactly two triangles") {
    const SimplicialMesh m = unit_square(4);
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& c : m.cells)
        for (int e = 0; e < 3; ++e) {
            const int a = c[e], b = c[(e + 1) % 3];
            edge_use[{std::min(a, b), std::max(a, b)}] += 1;
        }
    for (const auto& [edge, count] : edge_use) {
        CHECK(count <= 2);
        if (count == 1) {
            CHECK(m.boundary[edge.first]);
            CHECK(m.boundary[edge.second]);
        }
    }
}

TEST_CASE("refinement halves h and keeps old vertices") {
    const SimplicialMesh coarse = unit_square(2);
    const SimplicialMesh fine = refine(coarse);
    CHECK(fine.num_vertices() == 25);
    CHECK(fine.h == doctest::Approx(coarse.h / 2.0).epsilon(1e-15));
    CHECK(fine.rho == coarse.rho);
    std::set<std::pair<double, double>> fine_coords;
    for (const auto& v : fine.vertices) fine_coords.insert({v[0], v[1]});
    for (const auto& v : coarse.vertices) CHECK(fine_coords.count({v[0], v[1]}) == 1);

    const SimplicialMesh i8 = refine(unit_interval(4));
    CHECK(i8.num_vertices() == 9);
    CHECK(i8.h == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("cell volumes sum to the domain measure") {
    for (const SimplicialMesh& m : {unit_interval(7), unit_square(5), refine(unit_square(3))})
        CHECK(m.total_volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("numerical Poincare constants") {
    const double cp_exact = 1.0 / std::numbers::pi;
    const double c8 = poincare_constant(make_space(unit_interval(8)));
    CHECK(std::abs(c8 - cp_exact) / cp_exact < 0.10);

    // monotone nondecreasing from below under refinement
    const double c16 = poincare_constant(make_space(unit_interval(16)));
    const double c32 = poincare_constant(make_space(unit_interval(32)));
    CHECK(c8 <= c16 + 1e-12);
    CHECK(c16 <= c32 + 1e-12);
    CHECK(c32 <= cp_exact + 1e-8);

    const double c2d = poincare_constant(make_space(unit_square(16)));
    CHECK(std::abs(c2d - 1.0 / (std::numbers::pi * std::sqrt(2.0))) < 1e-2);
}

TEST_CASE("eigen solve failure surfaces") {
    CHECK_THROWS_AS(poincare_constant(make_space(unit_interval(16)), 1), EigenSolveFailure);
}

TEST_CASE("point location") {
    const SimplicialMesh m = unit_square(4);
    std::array<double, 3> bary;
    const double x[2] = {0.3, 0.7};
    const int c = m.locate(x, bary);
    CHECK(c >= 0);
    CHECK(c < m.num_cells());
    double rx = 0.0, ry = 0.0;
    for (int a = 0; a < 3; ++a) {
        CHECK(bary[a] >= -1e-14);
        rx += bary[a] * m.vertices[m.cells[c][a]][0];
        ry += bary[a] * m.vertices[m.cells[c][a]][1];
    }
    CHECK(rx == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(ry == doctest::Approx(0.7).epsilon(1e-14));
}

} // TEST_SUITE
