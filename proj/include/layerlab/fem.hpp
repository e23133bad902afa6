#pragma once

// Piecewise-linear finite elements for the thin-layer diffraction problem and
// its Robin limit, plus the transfer maps between the physical layer and the
// reference layer: pullback (stretched solution), explicit limit profile, and
// the recovery field.

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "layerlab/geometry.hpp"
#include "layerlab/mesh.hpp"

namespace layerlab::solver {

using SourceFn = std::function<double(Vec2)>;

struct ScalarField {
    const meshing::LayerMesh* mesh = nullptr;
    std::vector<double> values;

    double operator[](int v) const { return values[static_cast<std::size_t>(v)]; }
};

// Samples of a field over the reference layer Sigma_1 on the tensor grid
// t_i = i/n_t (periodic), s_j = j/n_s (s = 0 is the interface fiber foot,
// s = 1 the outer end of the fiber).
struct ReferenceLayerField {
    int n_t = 0;
    int n_s = 0;
    std::vector<double> values;  // (n_t) x (n_s + 1), t-major

    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * (n_s + 1) + j];
    }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * (n_s + 1) + j]; }
};

namespace detail {

struct P1Gradients {
    Vec2 g[3];
    double area;
};

inline P1Gradients p1_gradients(Vec2 a, Vec2 b, Vec2 c) {
    const double area2 = cross(b - a, c - a);
    P1Gradients out;
    out.area = 0.5 * area2;
    // grad of the hat at vertex k is the rotated opposite edge / (2A)
    out.g[0] = Vec2{b.y - c.y, c.x - b.x} / area2;
    out.g[1] = Vec2{c.y - a.y, a.x - c.x} / area2;
    out.g[2] = Vec2{a.y - b.y, b.x - a.x} / area2;
    return out;
}

// Robin coefficient integrated along a boundary edge with 2-point Gauss; the
// density is sampled through the boundary parameter, never the polyline.
template <class Coef>
void robin_edge_matrix(Vec2 pa, Vec2 pb, double t_lo, double t_hi, Coef&& coef, double out[2][2]) {
    const double len = (pb - pa).norm();
    const GaussRule& q = gauss01(2);
    out[0][0] = out[0][1] = out[1][0] = out[1][1] = 0.0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        const double g = q.nodes[k];
        const double c = coef(t_lo + (t_hi - t_lo) * g) * q.weights[k] * len;
        const double la = 1.0 - g, lb = g;
        out[0][0] += c * la * la;
        out[0][1] += c * la * lb;
        out[1][0] += c * lb * la;
        out[1][1] += c * lb * lb;
    }
}

struct Assembled {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd rhs;
};

// Deterministic row-parallel assembly: every row is accumulated by one task
// walking its incident elements in index order, so the floating-point sums
// are independent of the thread budget.
template <class EdgeCoef>
Assembled assemble(const meshing::LayerMesh& mesh, double kappa_interior, double kappa_layer,
                   meshing::BoundaryTag robin_tag, EdgeCoef&& robin_coef, const SourceFn& f,
                   bool load_interior_only, int threads) {
    const int n = static_cast<int>(mesh.vertices.size());

    std::vector<std::vector<int>> v2t(n), v2e(n);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int k = 0; k < 3; ++k) v2t[mesh.triangles[t].v[k]].push_back(static_cast<int>(t));
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        if (mesh.edges[e].tag != robin_tag) continue;
        v2e[mesh.edges[e].a].push_back(static_cast<int>(e));
        v2e[mesh.edges[e].b].push_back(static_cast<int>(e));
    }

    std::vector<std::vector<std::pair<int, double>>> rows(n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    const GaussRule& qe = gauss01(2);

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t r) {
        auto& row = rows[r];
        const int ri = static_cast<int>(r);
        double load = 0.0;
        for (int t : v2t[r]) {
            const auto& tr = mesh.triangles[t];
            const Vec2 a = mesh.vertices[tr.v[0]], b = mesh.vertices[tr.v[1]],
                       c = mesh.vertices[tr.v[2]];
            const auto g = p1_gradients(a, b, c);
            const double kappa =
                tr.region == meshing::Region::layer ? kappa_layer : kappa_interior;
            int local = tr.v[0] == ri ? 0 : (tr.v[1] == ri ? 1 : 2);
            for (int k = 0; k < 3; ++k)
                row.emplace_back(tr.v[k], kappa * g.area * dot(g.g[local], g.g[k]));
            if (f && (!load_interior_only || tr.region == meshing::Region::interior)) {
                // 3-point midedge rule, order 2
                const Vec2 mid[3] = {(a + b) * 0.5, (b + c) * 0.5, (c + a) * 0.5};
                // hat function at vertex `local` on midedge points
                const double hat[3][3] = {{0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}};
                for (int q = 0; q < 3; ++q)
                    load += g.area / 3.0 * f(mid[q]) * hat[local][q];
            }
        }
        for (int e : v2e[r]) {
            const auto& be = mesh.edges[e];
            const double half = 0.5 / mesh.n_b;
            double M[2][2];
            robin_edge_matrix(mesh.vertices[be.a], mesh.vertices[be.b], be.t_mid - half,
                              be.t_mid + half, robin_coef, M);
            const int local = be.a == ri ? 0 : 1;
            row.emplace_back(be.a, M[local][0]);
            row.emplace_back(be.b, M[local][1]);
        }
        rhs[ri] = load;
        (void)qe;
    });

    std::vector<Eigen::Triplet<double>> trip;
    std::size_t nnz = 0;
    for (const auto& row : rows) nnz += row.size();
    trip.reserve(nnz);
    for (int r = 0; r < n; ++r)
        for (const auto& [c, v] : rows[r]) trip.emplace_back(r, c, v);

    Assembled out;
    out.A.resize(n, n);
    out.A.setFromTriplets(trip.begin(), trip.end());
    out.rhs = std::move(rhs);
    return out;
}

inline Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                                 double tol = 1e-10) {
    const double bnorm = b.norm();
    Eigen::VectorXd x;
    if (A.rows() < 200000) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
        require(ldlt.info() == Eigen::Success, errc::solver,
                "factorization failed: system not symmetric positive definite?");
        x = ldlt.solve(b);
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg(A);
        cg.setTolerance(0.01 * tol);
        cg.setMaxIterations(20000);
        x = cg.solve(b);
    }
    if (bnorm > 0.0) {
        const double rel = (A * x - b).norm() / bnorm;
        if (!(rel <= tol)) {
            std::ostringstream os;
            os << "linear solve did not reach the required residual: " << rel;
            fail(errc::solver, os.str());
        }
    }
    return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

// Thin-layer problem: conductivity 1 inside, eps across the layer, Robin mass
// beta on the outer boundary, source supported on the interior region.
inline ScalarField solve_diffraction(const meshing::LayerMesh& mesh,
                                     const geometry::LayerGeometry& geom, double eps, double beta,
                                     const SourceFn& f, int threads = 1, double tol = 1e-10) {
    require(mesh.m >= 1, errc::config, "solve_diffraction needs a mesh with a layer");
    require(beta > 0.0, errc::config, "solve_diffraction: beta must be positive");
    (void)geom;
    auto sys = detail::assemble(
        mesh, 1.0, eps, meshing::BoundaryTag::outer, [&](double) { return beta; }, f,
        /*load_interior_only=*/true, threads);
    ScalarField u;
    u.mesh = &mesh;
    const Eigen::VectorXd x = detail::solve_spd(sys.A, sys.rhs, tol);
    u.values.assign(x.data(), x.data() + x.size());
    return u;
}

// Limit problem on an interior-only mesh: Robin coefficient beta/(1+beta h)
// on the interface.
inline ScalarField solve_limit(const meshing::LayerMesh& mesh, const geometry::BoundaryField& h,
                               double beta, const SourceFn& f, int threads = 1,
                               double tol = 1e-10) {
    require(mesh.m == 0, errc::config, "solve_limit expects an interior-only mesh");
    require(beta > 0.0, errc::config, "solve_limit: beta must be positive");
    auto sys = detail::assemble(
        mesh, 1.0, 1.0, meshing::BoundaryTag::interface,
        [&](double t) { return beta / (1.0 + beta * h.eval(t)); }, f,
        /*load_interior_only=*/false, threads);
    ScalarField u;
    u.mesh = &mesh;
    const Eigen::VectorXd x = detail::solve_spd(sys.A, sys.rhs, tol);
    u.values.assign(x.data(), x.data() + x.size());
    return u;
}

// ---------------------------------------------------------------------------
// Transfer maps
// ---------------------------------------------------------------------------

// P1 evaluation in the structured layer by fiber index arithmetic. The mesh
// realizes the transplant map at the ring nodes, so on each layer triangle the
// map from fiber coordinates (t, s) to the element is affine and barycentric
// weights computed in (t, s) evaluate the discrete field exactly. No point
// location is needed; the sample sits at the chord image of (t, s), a sagitta
// ~ k (L/n_b)^2 / 8 away from the curved-layer point.
inline ReferenceLayerField pullback(const ScalarField& u, int n_t, int n_s) {
    const auto& mesh = *u.mesh;
    require(mesh.m >= 1, errc::config, "pullback needs a layer mesh");
    ReferenceLayerField out;
    out.n_t = n_t;
    out.n_s = n_s;
    out.values.resize(static_cast<std::size_t>(n_t) * (n_s + 1));

    for (int i = 0; i < n_t; ++i) {
        const double xt = static_cast<double>(i) / n_t * mesh.n_b;
        const int p = std::min(static_cast<int>(xt), mesh.n_b - 1);
        const double xi = xt - p;
        for (int j = 0; j <= n_s; ++j) {
            const double ys = static_cast<double>(j) / n_s * mesh.m;
            const int band = std::min(static_cast<int>(ys), mesh.m - 1);
            const double eta = ys - band;
            // quad corners a=(0,0) b=(1,0) c=(1,1) d=(0,1); diagonal a-c
            const double va = u.values[mesh.ring_vertex(band, p)];
            const double vc = u.values[mesh.ring_vertex(band + 1, p + 1)];
            out.at(i, j) = eta <= xi ? (1.0 - xi) * va + eta * vc +
                                           (xi - eta) * u.values[mesh.ring_vertex(band, p + 1)]
                                     : (1.0 - eta) * va + xi * vc +
                                           (eta - xi) * u.values[mesh.ring_vertex(band + 1, p)];
        }
    }
    return out;
}

// Periodic linear interpolation of the interface trace of a field whose first
// n_b vertices are the interface ring.
inline double trace_interp(const ScalarField& u, double t) {
    const int n_b = u.mesh->n_b;
    const double x = wrap01(t) * n_b;
    const int i = std::min(static_cast<int>(x), n_b - 1);
    const double w = x - i;
    return (1.0 - w) * u.values[i] + w * u.values[(i + 1) % n_b];
}

// Explicit first-order profile: trace(t) * (1 - beta s h / (1 + beta h)).
inline ReferenceLayerField limit_profile(const ScalarField& u0,
                                         const geometry::LayerGeometry& geom, int n_t, int n_s) {
    ReferenceLayerField out;
    out.n_t = n_t;
    out.n_s = n_s;
    out.values.resize(static_cast<std::size_t>(n_t) * (n_s + 1));
    const double beta = geom.beta();
    for (int i = 0; i < n_t; ++i) {
        const double t = static_cast<double>(i) / n_t;
        const double trace = trace_interp(u0, t);
        const double hv = geom.h().eval(t);
        for (int j = 0; j <= n_s; ++j) {
            const double s = static_cast<double>(j) / n_s;
            out.at(i, j) = trace * (1.0 - beta * s * hv / (1.0 + beta * hv));
        }
    }
    return out;
}

// Extends an interior-mesh field to a full layer mesh: interior vertices map
// one-to-one, layer vertices take the trace of their fiber foot.
inline ScalarField extend_by_trace(const ScalarField& u0, const meshing::LayerMesh& full) {
    require(u0.mesh != nullptr && u0.mesh->m == 0, errc::config,
            "extend_by_trace: source must live on an interior-only mesh");
    require(u0.mesh->n_b == full.n_b, errc::config,
            "extend_by_trace: meshes disagree on the boundary panels");
    const int n_b = full.n_b, m = full.m;
    ScalarField out;
    out.mesh = &full;
    out.values.resize(full.vertices.size());
    for (std::size_t v = 0; v < full.vertices.size(); ++v) {
        const int vi = static_cast<int>(v);
        if (vi < (m + 1) * n_b)
            out.values[v] = u0.values[vi % n_b];  // ring j keeps its fiber-foot trace
        else
            out.values[v] = u0.values[vi - m * n_b];  // interior fill
    }
    return out;
}

// Recovery field: u0 inside, trace * (1 - beta d / (eps (1 + beta h))) across
// the layer; on ring j the distance is exactly (j/m) eps h.
inline ScalarField recovery_sequence(const ScalarField& u0, const geometry::LayerGeometry& geom,
                                     double eps, const meshing::LayerMesh& full) {
    require(u0.mesh != nullptr && u0.mesh->m == 0, errc::config,
            "recovery_sequence: limit solution must live on an interior-only mesh");
    require(u0.mesh->n_b == full.n_b, errc::config,
            "recovery_sequence: meshes disagree on the boundary panels");
    const int n_b = full.n_b, m = full.m;
    const double beta = geom.beta();
    ScalarField out;
    out.mesh = &full;
    out.values.resize(full.vertices.size());
    for (std::size_t v = 0; v < full.vertices.size(); ++v) {
        const int vi = static_cast<int>(v);
        if (vi < (m + 1) * n_b) {
            const int i = vi % n_b, j = vi / n_b;
            const double hv = geom.h().eval(static_cast<double>(i) / n_b);
            const double s = static_cast<double>(j) / m;  // d = s * eps * h
            out.values[v] = u0.values[i] * (1.0 - beta * s * hv / (1.0 + beta * hv));
        } else {
            out.values[v] = u0.values[vi - m * n_b];
        }
    }
    (void)eps;
    return out;
}

// L2(Sigma_1) distance between two reference-layer fields, with the exact
// fiber weight (1 + tau k) and the curve speed.
inline double reference_l2_distance(const ReferenceLayerField& a, const ReferenceLayerField& b,
                                    const geometry::LayerGeometry& geom) {
    require(a.n_t == b.n_t && a.n_s == b.n_s, errc::config,
            "reference_l2_distance: grids disagree");
    double total = 0.0;
    for (int i = 0; i < a.n_t; ++i) {
        const double t = static_cast<double>(i) / a.n_t;
        const auto fr = geom.curve().frame(t);
        const double hv = geom.h().eval(t);
        double fiber = 0.0;
        for (int j = 0; j <= a.n_s; ++j) {
            const double s = static_cast<double>(j) / a.n_s;
            const double diff = a.at(i, j) - b.at(i, j);
            const double w = (j == 0 || j == a.n_s) ? 0.5 : 1.0;  // trapezoid in s
            fiber += w * diff * diff * (1.0 + s * hv * fr.curvature);
        }
        total += fiber * hv / a.n_s * fr.speed / a.n_t;
    }
    return std::sqrt(total);
}

}  // namespace layerlab::solver
