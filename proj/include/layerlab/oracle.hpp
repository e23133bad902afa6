#pragma once

// Closed-form radial solutions on a ball of radius R in dimension n >= 2,
// constant profile h and constant source c. Both the thin-layer problem and
// its Robin limit reduce to one-dimensional ODEs with explicit coefficients;
// these are the independent ground truth the 2D pipeline is tested against.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "layerlab/common.hpp"
#include "layerlab/report.hpp"

namespace layerlab::oracle {

struct RadialConfig {
    int n = 2;        // ambient dimension
    double R = 1.0;   // ball radius
    double h = 0.2;   // constant layer profile
    double beta = 1.0;
    double c = 1.0;   // source f == c

    void validate() const {
        require(n >= 2, errc::config, "radial oracle: dimension must be >= 2");
        require(R > 0.0, errc::config, "radial oracle: radius must be positive");
        require(h > 0.0, errc::config, "radial oracle: profile must be positive");
        require(beta > 0.0, errc::config, "radial oracle: beta must be positive");
    }
};

// Fundamental solution factor of the radial Laplacian: Phi' = r^(1-n).
inline double radial_phi(int n, double r) {
    return (n == 2) ? std::log(r) : std::pow(r, 2.0 - n) / (2.0 - n);
}

inline double radial_phi_d1(int n, double r) { return std::pow(r, 1.0 - n); }

// u = A - c r^2/(2n) inside the ball, B + D*Phi_n(r) across the layer.
struct RadialSolution {
    RadialConfig cfg;
    double eps = 0.0;
    double A = 0.0, B = 0.0, D = 0.0;

    double inner(double r) const { return A - cfg.c * r * r / (2.0 * cfg.n); }
    double layer(double r) const { return B + D * radial_phi(cfg.n, r); }
    double eval(double r) const { return r <= cfg.R ? inner(r) : layer(r); }

    double inner_d1(double r) const { return -cfg.c * r / cfg.n; }
    double layer_d1(double r) const { return D * radial_phi_d1(cfg.n, r); }

    double outer_radius() const { return cfg.R + eps * cfg.h; }
};

inline RadialSolution radial_solution(const RadialConfig& cfg, double eps) {
    cfg.validate();
    require(eps > 0.0 && eps * cfg.h < cfg.R, errc::config,
            "radial oracle: need 0 < eps and eps*h < R");
    RadialSolution sol;
    sol.cfg = cfg;
    sol.eps = eps;
    const double n = cfg.n, R = cfg.R, c = cfg.c, beta = cfg.beta;
    const double Rout = R + eps * cfg.h;
    // flux jump at R: -cR/n = eps * D * R^(1-n)
    sol.D = -c * std::pow(R, n) / (n * eps);
    // Robin at the outer sphere: eps*D*Rout^(1-n) + beta*(B + D*Phi(Rout)) = 0
    sol.B = -(eps * sol.D * radial_phi_d1(cfg.n, Rout)) / beta - sol.D * radial_phi(cfg.n, Rout);
    // continuity at R
    sol.A = sol.B + sol.D * radial_phi(cfg.n, R) + c * R * R / (2.0 * n);
    return sol;
}

// Limit problem: u0 = A0 - c r^2/(2n) with Robin closure
// -cR/n + beta/(1+beta*h) * u0(R) = 0.
struct RadialLimit {
    RadialConfig cfg;
    double A0 = 0.0;

    double eval(double r) const { return A0 - cfg.c * r * r / (2.0 * cfg.n); }
    double d1(double r) const { return -cfg.c * r / cfg.n; }
    double boundary_value() const { return eval(cfg.R); }
};

inline RadialLimit radial_limit(const RadialConfig& cfg) {
    cfg.validate();
    RadialLimit lim;
    lim.cfg = cfg;
    const double u0R = cfg.c * cfg.R * (1.0 + cfg.beta * cfg.h) / (cfg.n * cfg.beta);
    lim.A0 = u0R + cfg.c * cfg.R * cfg.R / (2.0 * cfg.n);
    return lim;
}

namespace detail {

// integral of g(r) r^(n-1) dr over [a, b], 32-point Gauss
template <class G>
double radial_quad(int n, double a, double b, G&& g) {
    const GaussRule& q = gauss01(32);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double r = a + (b - a) * q.nodes[i];
        s += q.weights[i] * g(r) * std::pow(r, n - 1);
    }
    return (b - a) * s;
}

inline double sphere_area_unit(int n) {
    // |S^(n-1)|: 2pi (n=2), 4pi (n=3), general via recursion omega_n = 2pi/(n-2)*omega_(n-2)
    if (n == 2) return kTwoPi;
    if (n == 3) return 2.0 * kTwoPi;
    return kTwoPi / (n - 2) * sphere_area_unit(n - 2);
}

}  // namespace detail

inline EnergyReport radial_energy_report(const RadialConfig& cfg, double eps) {
    const RadialSolution u = radial_solution(cfg, eps);
    const RadialLimit u0 = radial_limit(cfg);
    const double n = cfg.n, R = cfg.R, c = cfg.c, beta = cfg.beta;
    const double Rout = u.outer_radius();
    const double omega = detail::sphere_area_unit(cfg.n);

    const double grad_in =
        detail::radial_quad(cfg.n, 0.0, R, [&](double r) { return c * r / n * (c * r / n); });
    const double grad_layer = detail::radial_quad(
        cfg.n, R, Rout, [&](double r) { return u.layer_d1(r) * u.layer_d1(r); });
    const double load_u =
        detail::radial_quad(cfg.n, 0.0, R, [&](double r) { return u.inner(r); });
    const double trace_out = u.layer(Rout);

    EnergyReport rep;
    rep.eps = eps;
    rep.f_eps = omega * (grad_in + eps * grad_layer +
                         beta * trace_out * trace_out * std::pow(Rout, n - 1.0) - 2.0 * c * load_u);
    rep.h1_bound_quantity =
        omega * (grad_in + eps * grad_layer + beta * trace_out * trace_out * std::pow(Rout, n - 1.0));

    const double load_u0 =
        detail::radial_quad(cfg.n, 0.0, R, [&](double r) { return u0.eval(r); });
    const double u0R = u0.boundary_value();
    rep.f0 = omega * (grad_in + beta / (1.0 + beta * cfg.h) * u0R * u0R * std::pow(R, n - 1.0) -
                      2.0 * c * load_u0);

    const double H = (n - 1.0) / R;
    rep.f1 = beta * omega * std::pow(R, n - 1.0) * H * cfg.h * (2.0 + beta * cfg.h) /
             (2.0 * (1.0 + beta * cfg.h) * (1.0 + beta * cfg.h)) * u0R * u0R;
    rep.delta = (rep.f_eps - rep.f0) / eps;
    rep.g_eps = rep.f0 + eps * rep.f1;
    rep.tangential_layer_energy = 0.0;  // radial fields have none
    return rep;
}

inline RateTable radial_rate_table(const RadialConfig& cfg, const std::vector<double>& eps_list) {
    require(eps_list.size() >= 2, errc::config, "rate table needs at least two eps values");
    RateTable table;
    std::vector<double> eps_sorted(eps_list);
    std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());
    std::vector<double> deltas;
    for (double e : eps_sorted) {
        table.rows.push_back(radial_energy_report(cfg, e));
        deltas.push_back(table.rows.back().delta);
    }
    table.richardson = richardson(eps_sorted, deltas);
    return table;
}

}  // namespace layerlab::oracle
