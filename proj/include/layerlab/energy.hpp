#pragma once

// Every functional of the model: the thin-layer energy F_eps, its Robin limit
// F_0, the first-order development F1, the rescaled gap delta_F and the
// surrogate objective G_eps, plus the two diagnostics used to certify the
// asymptotics (tangential layer energy, weak residual of the limit profile).

#include <cmath>
#include <functional>
#include <vector>

#include "layerlab/fem.hpp"
#include "layerlab/geometry.hpp"
#include "layerlab/mesh.hpp"
#include "layerlab/report.hpp"

namespace layerlab::energy {

using solver::ReferenceLayerField;
using solver::ScalarField;
using solver::SourceFn;

namespace detail {

inline Vec2 element_gradient(const meshing::LayerMesh& mesh, const meshing::Triangle& tr,
                             const std::vector<double>& vals, double& area) {
    const auto g = solver::detail::p1_gradients(mesh.vertices[tr.v[0]], mesh.vertices[tr.v[1]],
                                                mesh.vertices[tr.v[2]]);
    area = g.area;
    return g.g[0] * vals[tr.v[0]] + g.g[1] * vals[tr.v[1]] + g.g[2] * vals[tr.v[2]];
}

inline double gradient_square(const ScalarField& u, meshing::Region region) {
    double total = 0.0;
    for (const auto& tr : u.mesh->triangles) {
        if (tr.region != region) continue;
        double area;
        const Vec2 grad = element_gradient(*u.mesh, tr, u.values, area);
        total += area * grad.norm2();
    }
    return total;
}

// coef(t) * u^2 over the tagged boundary, 2-point Gauss per edge with the
// density sampled through the boundary parameter (same rule as assembly).
template <class Coef>
double boundary_square(const ScalarField& u, meshing::BoundaryTag tag, Coef&& coef) {
    const auto& mesh = *u.mesh;
    const GaussRule& q = gauss01(2);
    const double half = 0.5 / mesh.n_b;
    double total = 0.0;
    for (const auto& be : mesh.edges) {
        if (be.tag != tag) continue;
        const double len = (mesh.vertices[be.b] - mesh.vertices[be.a]).norm();
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            const double g = q.nodes[k];
            const double v = (1.0 - g) * u.values[be.a] + g * u.values[be.b];
            total += coef(be.t_mid - half + 2.0 * half * g) * v * v * q.weights[k] * len;
        }
    }
    return total;
}

}  // namespace detail

// Integral of f * u, with the 3-point midedge rule the assembly uses, so the
// discrete energy identity F(u_h) = -l(u_h) holds to solver precision.
inline double load_product(const ScalarField& u, const SourceFn& f, bool interior_only) {
    const auto& mesh = *u.mesh;
    double total = 0.0;
    for (const auto& tr : mesh.triangles) {
        if (interior_only && tr.region != meshing::Region::interior) continue;
        const Vec2 a = mesh.vertices[tr.v[0]], b = mesh.vertices[tr.v[1]],
                   c = mesh.vertices[tr.v[2]];
        const double area = 0.5 * cross(b - a, c - a);
        const Vec2 mid[3] = {(a + b) * 0.5, (b + c) * 0.5, (c + a) * 0.5};
        const double uv[3] = {u.values[tr.v[0]], u.values[tr.v[1]], u.values[tr.v[2]]};
        const double umid[3] = {0.5 * (uv[0] + uv[1]), 0.5 * (uv[1] + uv[2]),
                                0.5 * (uv[2] + uv[0])};
        for (int q = 0; q < 3; ++q) total += area / 3.0 * f(mid[q]) * umid[q];
    }
    return total;
}

// Coercive part a(u,u) = |grad u|^2_interior + eps |grad u|^2_layer
// + beta |u|^2_outer: the quantity the uniform a-priori bound controls.
inline double bilinear_self(const ScalarField& u, double eps, double beta) {
    return detail::gradient_square(u, meshing::Region::interior) +
           eps * detail::gradient_square(u, meshing::Region::layer) +
           beta * detail::boundary_square(u, meshing::BoundaryTag::outer,
                                          [](double) { return 1.0; });
}

inline double energy_F_eps(const ScalarField& u, double eps, double beta, const SourceFn& f) {
    require(u.mesh != nullptr && u.mesh->m >= 1, errc::config,
            "energy_F_eps expects a field on a layer mesh");
    return bilinear_self(u, eps, beta) - 2.0 * load_product(u, f, /*interior_only=*/true);
}

inline double energy_F0(const ScalarField& u0, const geometry::BoundaryField& h, double beta,
                        const SourceFn& f) {
    require(u0.mesh != nullptr && u0.mesh->m == 0, errc::config,
            "energy_F0 expects a field on an interior-only mesh");
    return detail::gradient_square(u0, meshing::Region::interior) +
           detail::boundary_square(u0, meshing::BoundaryTag::interface,
                                   [&](double t) { return beta / (1.0 + beta * h.eval(t)); }) -
           2.0 * load_product(u0, f, /*interior_only=*/false);
}

// ---------------------------------------------------------------------------
// First-order coefficient
// ---------------------------------------------------------------------------

// beta k h (2 + beta h) / (2 (1 + beta h)^2) * trace^2 integrated over the
// interface, trace given analytically; composite 2-point Gauss in t.
inline double first_order(const std::function<double(double)>& trace,
                          const geometry::ClosedCurve& curve, const geometry::BoundaryField& h,
                          double beta, int n_panels = 512) {
    const GaussRule& q = gauss01(2);
    double total = 0.0;
    for (int p = 0; p < n_panels; ++p) {
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            const double t = (p + q.nodes[k]) / n_panels;
            const auto fr = curve.frame(t);
            const double hv = h.eval(t);
            const double bh = beta * hv;
            const double density =
                beta * fr.curvature * hv * (2.0 + bh) / (2.0 * (1.0 + bh) * (1.0 + bh));
            const double tr = trace(t);
            total += density * tr * tr * fr.speed * q.weights[k] / n_panels;
        }
    }
    return total;
}

// Same density with the trace of a limit solution, one panel per interface
// edge; curvature and h come from the geometry, never the polyline.
inline double first_order(const ScalarField& u0, const geometry::LayerGeometry& geom,
                          double beta) {
    require(u0.mesh != nullptr, errc::config, "first_order: field has no mesh");
    return first_order([&](double t) { return solver::trace_interp(u0, t); }, geom.curve(),
                       geom.h(), beta, u0.mesh->n_b);
}

inline double delta_F(double f_eps, double f0_min, double eps) { return (f_eps - f0_min) / eps; }

inline double approx_G(double f0, double f1, double eps) { return f0 + eps * f1; }

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

// Integral over the layer of |grad u - (grad u . nu0) nu0|^2, the tangential
// part of the gradient. nu0 is taken at each structured triangle's fiber
// parameter -- the centroid sits at panel fraction 2/3 (inner triangle) or
// 1/3 (outer) -- which matches the metric projection of the centroid to
// O(w^2) and stays defined on coarse meshes where the band-0 centroid can
// dip inside the domain by a chord sagitta.
inline double layer_tangential_energy(const ScalarField& u, const geometry::LayerGeometry& geom) {
    const auto& mesh = *u.mesh;
    double total = 0.0;
    for (int k = 0; k < 2 * mesh.m * mesh.n_b; ++k) {
        const auto& tr = mesh.triangles[k];
        double area;
        const Vec2 grad = detail::element_gradient(mesh, tr, u.values, area);
        const double frac = (k % 2 ? 1.0 : 2.0) / 3.0;
        const double t = ((k / 2) % mesh.n_b + frac) / mesh.n_b;
        const Vec2 nu = geom.curve().frame(t).normal;
        const Vec2 tang = grad - nu * dot(grad, nu);
        total += area * tang.norm2();
    }
    return total;
}

// Residual of the limit weak formulation against separable tests
// phi(t,s) = T(t) P(s) with P(0) = 0, for a reference-layer field sampled on
// the (n_t, n_s) grid. Along each fiber the volume Jacobian and the outer
// tilt factor cancel exactly, leaving
//   R(T,P) = int |gamma'| T(t) [ int (1/h) du/ds dP/ds ds + beta u(t,1) P(1) ] dt,
// and the s-integral is evaluated exactly for the piecewise-linear-in-s
// interpolant of the samples. Returns the largest |R| over the test basis
// T in {1, cos 2 pi k t, sin 2 pi k t : k <= t_modes}, P in {s^p : p <= s_degree}.
inline double limit_weak_residual(const ReferenceLayerField& u, const geometry::LayerGeometry& geom,
                                  double beta, int t_modes = 4, int s_degree = 3) {
    require(u.n_t >= 4 && u.n_s >= 2, errc::config, "limit_weak_residual: grid too coarse");
    const int n_t = u.n_t, n_s = u.n_s;

    std::vector<double> speed(n_t), hv(n_t);
    for (int i = 0; i < n_t; ++i) {
        const double t = static_cast<double>(i) / n_t;
        speed[i] = geom.curve().frame(t).speed;
        hv[i] = geom.h().eval(t);
    }

    double worst = 0.0;
    for (int p = 1; p <= s_degree; ++p) {
        // per-fiber functional against P(s) = s^p
        std::vector<double> fiber(n_t);
        for (int i = 0; i < n_t; ++i) {
            double grad_term = 0.0;
            for (int j = 0; j < n_s; ++j) {
                const double s0 = static_cast<double>(j) / n_s;
                const double s1 = static_cast<double>(j + 1) / n_s;
                grad_term += (u.at(i, j + 1) - u.at(i, j)) * n_s *
                             (std::pow(s1, p) - std::pow(s0, p));
            }
            fiber[i] = grad_term / hv[i] + beta * u.at(i, n_s);
        }
        for (int mode = 0; mode <= t_modes; ++mode) {
            double rc = 0.0, rs = 0.0;
            for (int i = 0; i < n_t; ++i) {
                const double w = kTwoPi * mode * i / n_t;
                rc += speed[i] * std::cos(w) * fiber[i] / n_t;
                if (mode > 0) rs += speed[i] * std::sin(w) * fiber[i] / n_t;
            }
            worst = std::max({worst, std::abs(rc), std::abs(rs)});
        }
    }
    return worst;
}

// eps * integral over the physical layer of |grad u|^2, reassembled from
// reference-layer samples: normal factor (1/(eps h)) du/ds, tangential factor
// 1/(1 + eps d k) on the physical t-derivative, volume weight eps (1 + eps d k).
// Cross-validates the mesh layer energy through the stretching map.
inline double transformed_layer_energy(const ReferenceLayerField& ref,
                                       const geometry::LayerGeometry& geom, double eps) {
    const int n_t = ref.n_t, n_s = ref.n_s;
    double total = 0.0;
    for (int i = 0; i < n_t; ++i) {
        const int i1 = (i + 1) % n_t;
        const double tm = (i + 0.5) / n_t;
        const auto fr = geom.curve().frame(tm);
        const double h = geom.h().eval(tm);
        const double hp = geom.h().d1(tm);
        for (int j = 0; j < n_s; ++j) {
            const double sm = (j + 0.5) / n_s;
            const double du_ds =
                0.5 * (ref.at(i, j + 1) + ref.at(i1, j + 1) - ref.at(i, j) - ref.at(i1, j)) * n_s;
            const double du_dt =
                0.5 * (ref.at(i1, j) + ref.at(i1, j + 1) - ref.at(i, j) - ref.at(i, j + 1)) * n_t;
            // samples live on the (t, s) grid; the physical field is u(t, d/h(t)),
            // so the fixed-d derivative picks up -s h'/h du/ds
            const double du_dt_fixed_d = du_dt - sm * hp / h * du_ds;
            const double d = sm * h;
            const double normal = du_ds / (eps * h);
            const double tangential = du_dt_fixed_d / (fr.speed * (1.0 + eps * d * fr.curvature));
            total += (normal * normal + tangential * tangential) * eps *
                     (1.0 + eps * d * fr.curvature) * fr.speed * h / (n_t * n_s);
        }
    }
    return eps * total;
}

// ---------------------------------------------------------------------------
// Full per-instance report
// ---------------------------------------------------------------------------

// Solves both problems at the geometry's eps on matching meshes (the interior
// triangulation is shared, so the F_eps - F0 subtraction cancels interior
// discretization bias) and evaluates every functional.
inline EnergyReport fem_energy_report(const geometry::LayerGeometry& geom, const SourceFn& f,
                                      const meshing::MeshParams& params, int threads = 1,
                                      double solver_tol = 1e-10) {
    const double eps = geom.eps(), beta = geom.beta();
    const auto mesh = meshing::build_mesh(geom, eps, params);
    const auto u = solver::solve_diffraction(mesh, geom, eps, beta, f, threads, solver_tol);
    const auto imesh = meshing::build_interior_mesh(geom, params);
    const auto u0 = solver::solve_limit(imesh, geom.h(), beta, f, threads, solver_tol);

    EnergyReport rep;
    rep.eps = eps;
    rep.n_b = mesh.n_b;
    rep.m = mesh.m;
    rep.f_eps = energy_F_eps(u, eps, beta, f);
    rep.f0 = energy_F0(u0, geom.h(), beta, f);
    rep.delta = delta_F(rep.f_eps, rep.f0, eps);
    rep.f1 = first_order(u0, geom, beta);
    rep.g_eps = approx_G(rep.f0, rep.f1, eps);
    rep.tangential_layer_energy = layer_tangential_energy(u, geom);
    rep.h1_bound_quantity = bilinear_self(u, eps, beta);
    return rep;
}

}  // namespace layerlab::energy
