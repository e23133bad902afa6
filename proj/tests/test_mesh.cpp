#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "layerlab/mesh.hpp"
#include "layerlab/oracle.hpp"

using namespace layerlab;
using namespace layerlab::geometry;
using namespace layerlab::meshing;

namespace {

LayerGeometry circle_geom(double h = 0.2, double eps = 0.1) {
    return LayerGeometry(ClosedCurve::circle(1.0), BoundaryField::constant(h), eps, 1.0, 0.5);
}

LayerGeometry ellipse_geom(double eps = 0.1) {
    FourierSeries f;
    f.c0 = 0.2;
    f.a = {0.05};
    return LayerGeometry(ClosedCurve::ellipse(2.0, 1.0), BoundaryField(std::move(f)), eps, 1.0,
                         0.45);
}

}  // namespace

TEST_CASE("layer area of a circular annulus", "[mesh]") {
    const auto geom = circle_geom();
    MeshParams p;
    p.n_b = 64;
    p.m = 4;
    const auto mesh = build_mesh(geom, 0.1, p);
    const auto diag = mesh_diagnostics(mesh);
    // annulus 1 < r < 1.02
    CHECK(std::abs(diag.area_layer - kPi * (1.02 * 1.02 - 1.0)) < 1e-3);
    CHECK(diag.area_interior == Catch::Approx(kPi).epsilon(2e-3));
}

TEST_CASE("outer ring does not depend on the fiber count", "[mesh]") {
    const auto geom = ellipse_geom();
    MeshParams p2, p4;
    p2.n_b = 64;
    p2.m = 2;
    p4.n_b = 64;
    p4.m = 4;
    const auto mesh2 = build_mesh(geom, 0.1, p2);
    const auto mesh4 = build_mesh(geom, 0.1, p4);
    for (int i = 0; i < 64; ++i) {
        const Vec2 a = mesh2.vertices[mesh2.ring_vertex(2, i)];
        const Vec2 b = mesh4.vertices[mesh4.ring_vertex(4, i)];
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
    }
}

TEST_CASE("layer area matches fiber quadrature on a varying profile", "[mesh]") {
    const auto geom = ellipse_geom();
    MeshParams p;
    p.n_b = 128;
    const auto mesh = build_mesh(geom, 0.1, p);
    const auto diag = mesh_diagnostics(mesh);
    const double exact =
        fiber_integral(geom, 0.1, [](Vec2) { return 1.0; }, FiberTarget::layer_volume);
    CHECK(diag.area_layer == Catch::Approx(exact).epsilon(5e-3));
}

TEST_CASE("diagnostics on a fine circle mesh", "[mesh]") {
    const auto geom = circle_geom();
    MeshParams p;
    p.n_b = 128;
    const auto mesh = build_mesh(geom, 0.1, p);
    const auto diag = mesh_diagnostics(mesh);

    CHECK(diag.euler_characteristic == 1);
    CHECK(std::abs(diag.length_outer - kTwoPi * 1.02) < 1e-3);
    CHECK(std::abs(diag.length_interface - kTwoPi) < 1e-3);
    CHECK(diag.min_angle_interior_deg >= 20.0);
    CHECK(diag.min_angle_layer_deg > 0.0);
}

TEST_CASE("interface length matches the arc-length table", "[mesh]") {
    const auto geom = ellipse_geom();
    MeshParams p;
    p.n_b = 128;
    const auto mesh = build_mesh(geom, 0.1, p);
    const auto diag = mesh_diagnostics(mesh);
    CHECK(diag.length_interface ==
          Catch::Approx(geom.curve().length()).epsilon(1e-3));
}

TEST_CASE("boundary approximation errors shrink under refinement", "[mesh]") {
    const auto geom = ellipse_geom();
    const double exact_area =
        fiber_integral(geom, 0.1, [](Vec2) { return 1.0; }, FiberTarget::layer_volume);
    const double exact_outer = fiber_integral(
        geom, 0.1, [](Vec2) { return 1.0; }, FiberTarget::outer_surface);

    double prev_area_err = 0.0, prev_len_err = 0.0;
    for (int level = 0; level < 2; ++level) {
        MeshParams p;
        p.n_b = 64 << level;
        p.m = 4 << level;
        p.interior_grading = 1.0;
        const auto diag = mesh_diagnostics(build_mesh(geom, 0.1, p));
        const double area_err = std::abs(diag.area_layer - exact_area);
        const double len_err = std::abs(diag.length_outer - exact_outer);
        if (level > 0) {
            CHECK(area_err * 2.0 <= prev_area_err);
            CHECK(len_err * 2.0 <= prev_len_err);
        }
        prev_area_err = area_err;
        prev_len_err = len_err;
    }
}

TEST_CASE("outer edge midpoints project back to eps*h", "[mesh]") {
    struct Case {
        LayerGeometry geom;
        int n_b;
    };
    const Case cases[] = {{circle_geom(0.2, 0.2), 128},
                          {LayerGeometry(ClosedCurve::ellipse(2.0, 1.0),
                                         BoundaryField::constant(0.2), 0.2, 1.0, 0.45),
                           256}};
    for (const auto& [geom, n_b] : cases) {
        MeshParams p;
        p.n_b = n_b;
        const auto mesh = build_mesh(geom, 0.2, p);
        for (const auto& e : mesh.edges) {
            if (e.tag != BoundaryTag::outer) continue;
            const Vec2 mid = (mesh.vertices[e.a] + mesh.vertices[e.b]) * 0.5;
            const auto tc = project(geom, mid);
            const double eh = 0.2 * geom.h().eval(tc.t);
            CHECK(std::abs(tc.d - eh) <= 0.01 * eh);
        }
    }
}

TEST_CASE("nonconvex domain meshes cleanly", "[mesh]") {
    FourierSeries x, y;
    x.a = {1.2, 0.0, 0.2};
    y.b = {0.8, 0.0, 0.2};
    const LayerGeometry geom(ClosedCurve(std::move(x), std::move(y)),
                             BoundaryField::constant(0.05), 0.5, 1.0, 0.2);
    MeshParams p;
    p.n_b = 128;
    const auto mesh = build_mesh(geom, 0.5, p);
    const auto diag = mesh_diagnostics(mesh);
    CHECK(diag.euler_characteristic == 1);
    CHECK(diag.min_angle_interior_deg >= 20.0);
    // area of r = 1 + 0.4 cos(2 theta): pi (1 + 0.16/2)
    CHECK(diag.area_interior == Catch::Approx(kPi * 1.08).epsilon(5e-3));
}

TEST_CASE("interior-only mesh", "[mesh]") {
    const auto geom = circle_geom();
    MeshParams p;
    p.n_b = 64;
    const auto mesh = build_interior_mesh(geom, p);
    CHECK(mesh.m == 0);
    const auto diag = mesh_diagnostics(mesh);
    CHECK(diag.area_layer == 0.0);
    CHECK(diag.length_outer == 0.0);
    CHECK(diag.euler_characteristic == 1);
    CHECK(diag.area_interior == Catch::Approx(kPi).epsilon(2e-3));

    // shares the interior triangulation of the full mesh bit-for-bit
    const auto full = build_mesh(geom, 0.1, p);
    std::size_t count = 0;
    for (const auto& tr : full.triangles)
        if (tr.region == Region::interior) ++count;
    CHECK(count == mesh.triangles.size());
}

TEST_CASE("mesh parameter validation", "[mesh]") {
    const auto geom = circle_geom();
    MeshParams p;
    p.n_b = 8;  // too coarse
    CHECK_THROWS_AS(build_mesh(geom, 0.1, p), Error);
    p.n_b = 64;
    p.m = 1;
    CHECK_THROWS_AS(build_mesh(geom, 0.1, p), Error);
}

TEST_CASE("text export shape", "[mesh]") {
    const auto geom = circle_geom();
    MeshParams p;
    p.n_b = 16;
    p.m = 2;
    const auto mesh = build_mesh(geom, 0.1, p);
    std::ostringstream os;
    write_mesh_text(mesh, os);
    std::istringstream is(os.str());
    std::string word;
    std::size_t nv, nt, ne;
    char slash;
    is >> word >> nv >> slash >> word >> nt >> slash >> word >> ne;
    CHECK(nv == mesh.vertices.size());
    CHECK(nt == mesh.triangles.size());
    CHECK(ne == mesh.edges.size());
    std::size_t lines = 0;
    std::string line;
    std::getline(is, line);  // rest of header
    while (std::getline(is, line))
        if (!line.empty()) ++lines;
    CHECK(lines == nv + nt + ne);
}
