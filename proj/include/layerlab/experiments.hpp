#pragma once

// Orchestrated studies: the first-order rate experiment, stretched-solution
// convergence, tangential-energy scaling, and the exploratory profile
// optimizer for the surrogate objective G_eps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "layerlab/energy.hpp"

namespace layerlab::experiments {

enum class StudyKind { rates, stretch, scaling, optimize };

inline const char* study_name(StudyKind k) {
    switch (k) {
        case StudyKind::rates: return "rates";
        case StudyKind::stretch: return "stretch";
        case StudyKind::scaling: return "scaling";
        case StudyKind::optimize: return "optimize";
    }
    return "?";
}

struct StudyConfig {
    geometry::ClosedCurve curve;
    geometry::BoundaryField h;
    double beta = 1.0;
    double d0 = 0.5;
    solver::SourceFn f;
    StudyKind kind = StudyKind::rates;
    std::vector<double> eps_list;

    // mesh budget: n_b(eps) = nearest multiple of 8 of n_b_base*sqrt(eps_ref/eps),
    // clamped to [16, n_b_cap]; keeps the layer quad aspect bounded under halvings
    int n_b_base = 128;
    double eps_ref = 0.2;
    int n_b_cap = 512;
    int m = 4;
    int threads = 1;
    double solver_tol = 1e-10;

    // reference-layer sampling for the stretch study
    int profile_n_t = 256;
    int profile_n_s = 16;

    // verdict gates (documented defaults, overridable per run)
    double tol_final_gap = 0.05;
    double tol_fit_refusal = 0.5;
    double tol_slope = 0.8;
    double tol_scaling_residual = 0.2;
    double tol_plateau = 0.1;

    // optimizer knobs
    double opt_eps = 0.1;
    double mass = 0.0;
    double h_min = 0.05;
    int opt_modes = 8;
    int opt_max_iters = 200;
    double opt_step0 = 0.25;
    double opt_fd_step = 1e-5;
    double opt_tol = 1e-8;

    StudyConfig(geometry::ClosedCurve c, geometry::BoundaryField prof)
        : curve(std::move(c)), h(std::move(prof)) {}

    geometry::LayerGeometry geometry_at(double eps) const { return {curve, h, eps, beta, d0}; }

    int scaled_n_b(double eps) const {
        const double raw = n_b_base * std::sqrt(eps_ref / eps);
        const int nb = static_cast<int>(std::lround(raw / 8.0)) * 8;
        return std::clamp(nb, 16, n_b_cap);
    }

    void validate() const {
        require(static_cast<bool>(f), errc::config, "study config: no source term");
        require(!eps_list.empty(), errc::config, "study config: eps list is empty");
        for (std::size_t i = 1; i < eps_list.size(); ++i)
            require(eps_list[i] < eps_list[i - 1], errc::config,
                    "study config: eps list must be strictly decreasing");
        if (kind == StudyKind::rates)
            require(eps_list.size() >= 3, errc::config, "rate fits need at least 3 eps values");
        for (double e : eps_list) (void)geometry_at(e);  // trips the geometry guards
    }
};

struct EpsRecord {
    EnergyReport report;
    double value = 0.0;    // the study's tracked quantity at this eps
    double control = 0.0;  // secondary quantity (negative control / degeneracy ratio)
};

struct StudyResult {
    StudyKind kind = StudyKind::rates;
    bool pass = false;
    bool degenerate = false;
    bool fit_valid = false;
    double slope = 0.0;
    double fit_residual = 0.0;
    double richardson_delta = 0.0;
    double final_gap_rel = 0.0;
    std::vector<EpsRecord> records;
    std::vector<std::pair<std::string, double>> metrics;
};

namespace detail {

// Per-eps concurrency under the caller's budget: when the outer loop is
// parallel every inner solve runs single-threaded, never oversubscribing.
inline void run_per_eps(const StudyConfig& cfg,
                        const std::function<void(std::size_t, int)>& body) {
    const std::size_t n = cfg.eps_list.size();
    if (cfg.threads > 1 && n > 1) {
        const int outer = static_cast<int>(std::min<std::size_t>(cfg.threads, n));
        parallel_for(n, outer, [&](std::size_t i) { body(i, 1); });
    } else {
        for (std::size_t i = 0; i < n; ++i) body(i, cfg.threads);
    }
}

inline bool strictly_decreasing(const std::vector<EpsRecord>& recs) {
    for (std::size_t i = 1; i < recs.size(); ++i)
        if (!(recs[i].value < recs[i - 1].value)) return false;
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rate study: delta_F(eps) against the first-order coefficient
// ---------------------------------------------------------------------------

inline StudyResult rate_study(const StudyConfig& cfg) {
    require(cfg.kind == StudyKind::rates, errc::config, "rate_study: wrong study kind");
    cfg.validate();
    StudyResult res;
    res.kind = cfg.kind;
    res.records.resize(cfg.eps_list.size());

    detail::run_per_eps(cfg, [&](std::size_t i, int threads) {
        const double eps = cfg.eps_list[i];
        meshing::MeshParams p;
        p.n_b = cfg.scaled_n_b(eps);
        p.m = cfg.m;
        auto& rec = res.records[i];
        rec.report =
            energy::fem_energy_report(cfg.geometry_at(eps), cfg.f, p, threads, cfg.solver_tol);
        rec.value = std::abs(rec.report.delta - rec.report.f1);
    });

    bool all_zero = true;
    for (const auto& r : res.records)
        all_zero = all_zero && std::abs(r.report.f_eps) < 1e-13 &&
                   std::abs(r.report.f0) < 1e-13 && std::abs(r.report.f1) < 1e-13;
    if (all_zero) {
        res.degenerate = true;
        res.pass = true;
        res.metrics = {{"degenerate", 1.0}};
        return res;
    }

    std::vector<double> deltas;
    for (const auto& r : res.records) deltas.push_back(r.report.delta);
    res.richardson_delta = richardson(cfg.eps_list, deltas);

    bool fit_ok = true;
    for (const auto& r : res.records) fit_ok = fit_ok && r.value > 0.0;
    if (fit_ok) {
        std::vector<double> errs;
        for (const auto& r : res.records) errs.push_back(r.value);
        const LineFit fit = fit_loglog(cfg.eps_list, errs);
        res.slope = fit.slope;
        res.fit_residual = fit.residual;
        res.fit_valid = fit.residual <= cfg.tol_fit_refusal;
    }

    const auto& last = res.records.back();
    res.final_gap_rel = last.value / std::abs(last.report.f1);
    res.pass =
        detail::strictly_decreasing(res.records) && res.fit_valid &&
        res.final_gap_rel < cfg.tol_final_gap;
    res.metrics = {{"slope", res.slope},
                   {"fit_residual", res.fit_residual},
                   {"richardson_delta", res.richardson_delta},
                   {"final_gap_rel", res.final_gap_rel},
                   {"f1_final", last.report.f1}};
    return res;
}

// ---------------------------------------------------------------------------
// Stretch study: L2(Sigma_1) distance of the pulled-back solution to the
// explicit limit profile, with a wrong-factor negative control
// ---------------------------------------------------------------------------

inline StudyResult stretch_convergence_study(const StudyConfig& cfg) {
    require(cfg.kind == StudyKind::stretch, errc::config,
            "stretch_convergence_study: wrong study kind");
    cfg.validate();
    StudyResult res;
    res.kind = cfg.kind;
    res.records.resize(cfg.eps_list.size());

    detail::run_per_eps(cfg, [&](std::size_t i, int threads) {
        const double eps = cfg.eps_list[i];
        const auto geom = cfg.geometry_at(eps);
        meshing::MeshParams p;
        p.n_b = cfg.scaled_n_b(eps);
        p.m = cfg.m;
        const auto mesh = meshing::build_mesh(geom, eps, p);
        const auto u =
            solver::solve_diffraction(mesh, geom, eps, cfg.beta, cfg.f, threads, cfg.solver_tol);
        const auto stretched =
            solver::pullback(u, cfg.profile_n_t, cfg.profile_n_s);

        const auto imesh = meshing::build_interior_mesh(geom, p);
        const auto u0 =
            solver::solve_limit(imesh, geom.h(), cfg.beta, cfg.f, threads, cfg.solver_tol);
        const auto prof = solver::limit_profile(u0, geom, cfg.profile_n_t, cfg.profile_n_s);

        // negative control: same trace, wrong damping factor 1/(1 + beta h/2)
        solver::ReferenceLayerField wrong = prof;
        for (int it = 0; it < wrong.n_t; ++it) {
            const double t = static_cast<double>(it) / wrong.n_t;
            const double trace = solver::trace_interp(u0, t);
            const double hv = geom.h().eval(t);
            for (int js = 0; js <= wrong.n_s; ++js) {
                const double s = static_cast<double>(js) / wrong.n_s;
                wrong.at(it, js) =
                    trace * (1.0 - cfg.beta * s * hv / (1.0 + 0.5 * cfg.beta * hv));
            }
        }

        auto& rec = res.records[i];
        rec.report.eps = eps;
        rec.report.n_b = mesh.n_b;
        rec.report.m = mesh.m;
        rec.value = solver::reference_l2_distance(stretched, prof, geom);
        rec.control = solver::reference_l2_distance(stretched, wrong, geom);
    });

    double plateau = res.records.empty() ? 0.0 : res.records.front().control;
    for (const auto& r : res.records) plateau = std::min(plateau, r.control);
    res.pass = detail::strictly_decreasing(res.records) && plateau > cfg.tol_plateau;
    res.metrics = {{"final_norm", res.records.back().value},
                   {"control_plateau", plateau}};
    return res;
}

// ---------------------------------------------------------------------------
// Scaling study: tangential layer energy vs eps
// ---------------------------------------------------------------------------

inline StudyResult scaling_study(const StudyConfig& cfg) {
    require(cfg.kind == StudyKind::scaling, errc::config, "scaling_study: wrong study kind");
    cfg.validate();
    StudyResult res;
    res.kind = cfg.kind;
    res.records.resize(cfg.eps_list.size());

    detail::run_per_eps(cfg, [&](std::size_t i, int threads) {
        const double eps = cfg.eps_list[i];
        const auto geom = cfg.geometry_at(eps);
        meshing::MeshParams p;
        p.n_b = cfg.scaled_n_b(eps);
        p.m = cfg.m;
        const auto mesh = meshing::build_mesh(geom, eps, p);
        const auto u =
            solver::solve_diffraction(mesh, geom, eps, cfg.beta, cfg.f, threads, cfg.solver_tol);
        auto& rec = res.records[i];
        rec.report.eps = eps;
        rec.report.n_b = mesh.n_b;
        rec.report.m = mesh.m;
        rec.value = energy::layer_tangential_energy(u, geom);
        rec.report.tangential_layer_energy = rec.value;
        const double total = energy::detail::gradient_square(u, meshing::Region::layer);
        // fraction of the eps-scaled layer energy carried tangentially; a
        // radial instance sits orders of magnitude below any real signal
        rec.control = total > 0.0 ? rec.value / (eps * total) : 0.0;
    });

    // judge degeneracy at the largest eps, where a genuine tangential signal
    // is strongest relative to the projector's discretization leakage
    res.degenerate = res.records.front().control < 1e-3;
    if (res.degenerate) {
        res.pass = true;
        res.metrics = {{"degenerate", 1.0}};
        return res;
    }

    std::vector<double> vals;
    for (const auto& r : res.records) vals.push_back(r.value);
    const LineFit fit = fit_loglog(cfg.eps_list, vals);
    res.slope = fit.slope;
    res.fit_residual = fit.residual;
    res.fit_valid = true;
    res.pass = fit.slope >= cfg.tol_slope && fit.residual < cfg.tol_scaling_residual;
    res.metrics = {{"slope", res.slope}, {"fit_residual", res.fit_residual}};
    return res;
}

// ---------------------------------------------------------------------------
// Profile optimizer
// ---------------------------------------------------------------------------

struct OptimizeResult {
    geometry::FourierSeries h_star;
    std::vector<double> trace;  // objective value per accepted iterate
    double constraint_violation = 0.0;
    double bound_violation = 0.0;
    double curvature_correlation = 0.0;
    int iterations = 0;
    bool converged = false;
    bool pass = false;
    std::vector<std::pair<std::string, double>> metrics;
};

namespace detail {

// composite 4-point Gauss of g(t) |gamma'(t)| over the boundary
template <class G>
double boundary_quad(const geometry::ClosedCurve& curve, G&& g, int panels) {
    const GaussRule& q = gauss01(4);
    double total = 0.0;
    for (int p = 0; p < panels; ++p)
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            const double t = (p + q.nodes[k]) / panels;
            total += g(t) * curve.d1(t).norm() * q.weights[k] / panels;
        }
    return total;
}

// discrete Fourier projection of nodal samples onto <= modes coefficients
inline geometry::FourierSeries fit_modes(const std::vector<double>& v, int modes) {
    const int n = static_cast<int>(v.size());
    geometry::FourierSeries out;
    out.a.assign(modes, 0.0);
    out.b.assign(modes, 0.0);
    for (int i = 0; i < n; ++i) out.c0 += v[i] / n;
    for (int k = 1; k <= modes; ++k)
        for (int i = 0; i < n; ++i) {
            const double w = kTwoPi * k * i / n;
            out.a[k - 1] += 2.0 * v[i] * std::cos(w) / n;
            out.b[k - 1] += 2.0 * v[i] * std::sin(w) / n;
        }
    return out;
}

}  // namespace detail

inline OptimizeResult optimize_profile(const StudyConfig& cfg) {
    require(cfg.kind == StudyKind::optimize, errc::config, "optimize_profile: wrong study kind");
    require(static_cast<bool>(cfg.f), errc::config, "optimize_profile: no source term");
    require(cfg.h_min > 0.0, errc::config, "optimize_profile: h_min must be positive");
    require(cfg.opt_eps >= 0.0, errc::config, "optimize_profile: eps must be nonnegative");

    const int quad_panels = std::max(256, 8 * cfg.opt_modes);
    const double length =
        detail::boundary_quad(cfg.curve, [](double) { return 1.0; }, quad_panels);
    require(cfg.mass > cfg.h_min * length, errc::infeasible,
            "optimize_profile: mass below the h_min floor times the boundary length");

    const auto mass_of = [&](const geometry::FourierSeries& s) {
        return detail::boundary_quad(cfg.curve, [&](double t) { return s.eval(t); },
                                     quad_panels);
    };

    // mass shift, then pointwise clamp at the quadrature nodes re-projected
    // onto the mode budget, repeated until both hold; the mode budget cannot
    // always represent a clamped profile (the refit rings below the floor
    // again), so the last round instead blends toward the feasible constant —
    // mass-preserving, enforces the floor exactly, and leaves already-feasible
    // profiles untouched, which the line search needs to terminate
    const double c0_feasible = cfg.mass / length;
    const auto project = [&](geometry::FourierSeries s) {
        for (int round = 0; round < 10; ++round) {
            s.c0 += (cfg.mass - mass_of(s)) / length;
            double mn = s.c0;
            const int n = quad_panels * 4;
            std::vector<double> nodes(n);
            for (int i = 0; i < n; ++i) {
                nodes[i] = s.eval(static_cast<double>(i) / n);
                mn = std::min(mn, nodes[i]);
            }
            if (mn >= cfg.h_min - 1e-12) return s;
            if (round == 9) {
                const double lam = (c0_feasible - cfg.h_min) / (c0_feasible - mn);
                s.c0 = c0_feasible + lam * (s.c0 - c0_feasible);
                for (double& v : s.a) v *= lam;
                for (double& v : s.b) v *= lam;
                return s;
            }
            for (double& v : nodes) v = std::max(v, cfg.h_min);
            s = detail::fit_modes(nodes, cfg.opt_modes);
        }
        return s;
    };

    // the interior triangulation depends only on the curve, so one mesh
    // serves every profile candidate
    meshing::MeshParams p;
    p.n_b = cfg.n_b_base;
    p.m = cfg.m;
    const auto probe_geom = cfg.geometry_at(std::max(cfg.opt_eps, 1e-3));
    const auto imesh = meshing::build_interior_mesh(probe_geom, p);

    const auto objective = [&](const geometry::FourierSeries& s) {
        geometry::BoundaryField hb(s);
        require(hb.min() > 0.0, errc::infeasible, "optimize_profile: profile became nonpositive");
        const auto u0 = solver::solve_limit(imesh, hb, cfg.beta, cfg.f, 1, cfg.solver_tol);
        const double f0 = energy::energy_F0(u0, hb, cfg.beta, cfg.f);
        if (cfg.opt_eps == 0.0) return f0;
        const double f1 = energy::first_order(
            [&](double t) { return solver::trace_interp(u0, t); }, cfg.curve, hb, cfg.beta,
            imesh.n_b);
        return f0 + cfg.opt_eps * f1;
    };

    // start from the constant feasible profile
    geometry::FourierSeries cur;
    cur.a.assign(cfg.opt_modes, 0.0);
    cur.b.assign(cfg.opt_modes, 0.0);
    cur.c0 = cfg.mass / length;
    cur = project(std::move(cur));

    // the mass is linear in the coefficients; its gradient spans the
    // constraint normal that descent steps must stay orthogonal to
    const int n_coef = 1 + 2 * cfg.opt_modes;
    std::vector<double> normal(n_coef, 0.0);
    normal[0] = length;
    for (int k = 1; k <= cfg.opt_modes; ++k) {
        normal[k] = detail::boundary_quad(
            cfg.curve, [&](double t) { return std::cos(kTwoPi * k * t); }, quad_panels);
        normal[cfg.opt_modes + k] = detail::boundary_quad(
            cfg.curve, [&](double t) { return std::sin(kTwoPi * k * t); }, quad_panels);
    }
    double normal2 = 0.0;
    for (double v : normal) normal2 += v * v;

    const auto coef = [&](geometry::FourierSeries& s, int j) -> double& {
        if (j == 0) return s.c0;
        if (j <= cfg.opt_modes) return s.a[j - 1];
        return s.b[j - cfg.opt_modes - 1];
    };

    OptimizeResult res;
    double g_cur = objective(cur);
    res.trace.push_back(g_cur);

    double step = cfg.opt_step0;
    for (int iter = 0; iter < cfg.opt_max_iters; ++iter) {
        res.iterations = iter + 1;

        // central differences in every Fourier coefficient of h
        std::vector<double> grad(n_coef, 0.0);
        parallel_for(grad.size(), cfg.threads, [&](std::size_t j) {
            const double delta = cfg.opt_fd_step;
            geometry::FourierSeries plus = cur, minus = cur;
            coef(plus, static_cast<int>(j)) += delta;
            coef(minus, static_cast<int>(j)) -= delta;
            grad[j] = (objective(plus) - objective(minus)) / (2.0 * delta);
        });

        // project onto the mass-preserving tangent space
        double gn = 0.0;
        for (int j = 0; j < n_coef; ++j) gn += grad[j] * normal[j];
        for (int j = 0; j < n_coef; ++j) grad[j] -= gn / normal2 * normal[j];

        double gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        gnorm = std::sqrt(gnorm);
        if (gnorm == 0.0) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        for (int halving = 0; halving <= 20; ++halving) {
            geometry::FourierSeries cand = cur;
            for (int j = 0; j < n_coef; ++j) coef(cand, j) -= step * grad[j];
            cand = project(std::move(cand));
            const double g_cand = objective(cand);
            if (g_cand <= g_cur) {
                const double rel =
                    std::abs(g_cur - g_cand) / std::max(1.0, std::abs(g_cur));
                if (rel < cfg.opt_tol) {
                    // the best available step no longer improves meaningfully;
                    // stop without taking it
                    res.converged = true;
                    accepted = true;
                    break;
                }
                cur = std::move(cand);
                g_cur = g_cand;
                res.trace.push_back(g_cur);
                accepted = true;
                break;
            }
            if (std::abs(g_cand - g_cur) / std::max(1.0, std::abs(g_cur)) < cfg.opt_tol) {
                // flat to solver precision: nothing left to gain
                res.converged = true;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        require(accepted, errc::solver,
                "optimize_profile: 20 step halvings without a decrease");
        if (res.converged) break;
        step = std::min(step * 1.5, cfg.opt_step0);
    }

    res.h_star = cur;
    res.constraint_violation = std::abs(mass_of(cur) - cfg.mass) / std::abs(cfg.mass);
    {
        geometry::BoundaryField hb(cur);
        res.bound_violation = std::max(0.0, cfg.h_min - hb.min());
    }

    // conjecture exhibit: correlation between the optimal profile and the
    // boundary curvature
    {
        const int n = 512;
        double sh = 0, sk = 0, shh = 0, skk = 0, shk = 0;
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / n;
            const double hv = cur.eval(t);
            const double kv = cfg.curve.frame(t).curvature;
            sh += hv;
            sk += kv;
            shh += hv * hv;
            skk += kv * kv;
            shk += hv * kv;
        }
        const double cov = shk / n - sh / n * sk / n;
        const double vh = shh / n - sh / n * sh / n;
        const double vk = skk / n - sk / n * sk / n;
        res.curvature_correlation = (vh > 1e-18 && vk > 1e-18)
                                        ? cov / std::sqrt(vh * vk)
                                        : 0.0;
    }

    bool monotone = true;
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        monotone = monotone && res.trace[i] <= res.trace[i - 1];
    res.pass = monotone && res.constraint_violation < 1e-8;
    res.metrics = {{"objective", g_cur},
                   {"iterations", static_cast<double>(res.iterations)},
                   {"constraint_violation", res.constraint_violation},
                   {"bound_violation", res.bound_violation},
                   {"curvature_correlation", res.curvature_correlation},
                   {"converged", res.converged ? 1.0 : 0.0}};
    return res;
}

}  // namespace layerlab::experiments
