#pragma once

// Differential geometry of a closed planar curve and its outward tubular
// neighborhood: curvature frames, metric projection, the layer-stretching
// map and its Jacobians, and fiber-aligned quadrature over thin layers.
//
// Everything here is exact up to quadrature: curves are truncated Fourier
// series, so derivatives are spectral and curvature carries no mesh error.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "layerlab/common.hpp"

namespace layerlab::geometry {

// ---------------------------------------------------------------------------
// Fourier series on the periodic unit interval
// ---------------------------------------------------------------------------

// f(t) = c0 + sum_k a[k-1] cos(2*pi*k*t) + b[k-1] sin(2*pi*k*t)
struct FourierSeries {
    double c0 = 0.0;
    std::vector<double> a;  // cosine coefficients, mode 1..K
    std::vector<double> b;  // sine coefficients, mode 1..K

    std::size_t modes() const { return std::max(a.size(), b.size()); }

    double eval(double t) const {
        double v = c0;
        const std::size_t K = modes();
        for (std::size_t k = 1; k <= K; ++k) {
            const double w = kTwoPi * static_cast<double>(k) * t;
            if (k <= a.size() && a[k - 1] != 0.0) v += a[k - 1] * std::cos(w);
            if (k <= b.size() && b[k - 1] != 0.0) v += b[k - 1] * std::sin(w);
        }
        return v;
    }

    // d/dt
    double d1(double t) const {
        double v = 0.0;
        const std::size_t K = modes();
        for (std::size_t k = 1; k <= K; ++k) {
            const double om = kTwoPi * static_cast<double>(k);
            const double w = om * t;
            if (k <= a.size() && a[k - 1] != 0.0) v -= om * a[k - 1] * std::sin(w);
            if (k <= b.size() && b[k - 1] != 0.0) v += om * b[k - 1] * std::cos(w);
        }
        return v;
    }

    // d^2/dt^2
    double d2(double t) const {
        double v = 0.0;
        const std::size_t K = modes();
        for (std::size_t k = 1; k <= K; ++k) {
            const double om = kTwoPi * static_cast<double>(k);
            const double w = om * t;
            if (k <= a.size() && a[k - 1] != 0.0) v -= om * om * a[k - 1] * std::cos(w);
            if (k <= b.size() && b[k - 1] != 0.0) v -= om * om * b[k - 1] * std::sin(w);
        }
        return v;
    }

    // t -> 1 - t flips the sign of every sine coefficient.
    void reverse_orientation() {
        for (double& c : b) c = -c;
    }
};

// Series for t -> f(t + phi): the same function sampled with a rotated origin.
inline FourierSeries phase_shift(const FourierSeries& f, double phi) {
    FourierSeries out;
    out.c0 = f.c0;
    const std::size_t K = f.modes();
    out.a.assign(K, 0.0);
    out.b.assign(K, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
        const double ak = k <= f.a.size() ? f.a[k - 1] : 0.0;
        const double bk = k <= f.b.size() ? f.b[k - 1] : 0.0;
        const double w = kTwoPi * static_cast<double>(k) * phi;
        out.a[k - 1] = ak * std::cos(w) + bk * std::sin(w);
        out.b[k - 1] = -ak * std::sin(w) + bk * std::cos(w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Closed curve
// ---------------------------------------------------------------------------

struct CurveFrame {
    Vec2 point;
    Vec2 tangent;   // unit
    Vec2 normal;    // unit, outward
    double speed;      // |gamma'(t)|
    double curvature;  // signed; circle of radius R traversed CCW has k = 1/R
};

class ClosedCurve {
public:
    ClosedCurve(FourierSeries x, FourierSeries y) : x_(std::move(x)), y_(std::move(y)) {
        validate_and_orient();
        build_tables();
    }

    static ClosedCurve circle(double radius) {
        require(radius > 0.0, errc::invalid_curve, "circle radius must be positive");
        FourierSeries x, y;
        x.a = {radius};
        y.b = {radius};
        return ClosedCurve(std::move(x), std::move(y));
    }

    static ClosedCurve ellipse(double ax, double ay) {
        require(ax > 0.0 && ay > 0.0, errc::invalid_curve, "ellipse semi-axes must be positive");
        FourierSeries x, y;
        x.a = {ax};
        y.b = {ay};
        return ClosedCurve(std::move(x), std::move(y));
    }

    Vec2 eval(double t) const { return {x_.eval(t), y_.eval(t)}; }
    Vec2 d1(double t) const { return {x_.d1(t), y_.d1(t)}; }
    Vec2 d2(double t) const { return {x_.d2(t), y_.d2(t)}; }

    CurveFrame frame(double t) const {
        const Vec2 p = eval(t);
        const Vec2 g1 = d1(t);
        const Vec2 g2 = d2(t);
        const double sp = g1.norm();
        require(sp > 1e-12 * (1.0 + diameter_), errc::invalid_curve,
                "degenerate parametrization: |gamma'| ~ 0");
        const Vec2 tau = g1 / sp;
        // CCW orientation puts the outward normal at (tau.y, -tau.x).
        const Vec2 nu{tau.y, -tau.x};
        const double k = cross(g1, g2) / (sp * sp * sp);
        return {p, tau, nu, sp, k};
    }

    std::size_t modes() const { return std::max<std::size_t>(1, std::max(x_.modes(), y_.modes())); }
    double length() const { return arc_s_.back(); }
    double diameter() const { return diameter_; }
    double k_min() const { return k_min_; }
    double k_max() const { return k_max_; }
    double k_max_abs() const { return std::max(std::abs(k_min_), std::abs(k_max_)); }

    // Largest outward offset before 1 + d*k can vanish somewhere (infinite for
    // convex curves).
    double focal_bound() const {
        return k_min_ < 0.0 ? 1.0 / (-k_min_) : std::numeric_limits<double>::infinity();
    }

    // Cumulative arc length. Table-accelerated, Gauss-corrected within a cell.
    double arclength(double t) const {
        t = wrap01(t);
        const std::size_t n = arc_t_.size() - 1;
        const auto i = static_cast<std::size_t>(std::min(t * static_cast<double>(n),
                                                         static_cast<double>(n - 1)));
        double s = arc_s_[i];
        const double a = arc_t_[i];
        if (t > a) {
            const GaussRule& q = gauss01(8);
            for (std::size_t j = 0; j < q.nodes.size(); ++j)
                s += (t - a) * q.weights[j] * d1(a + (t - a) * q.nodes[j]).norm();
        }
        return s;
    }

    // Inverse of arclength(), by table bracket + bisection/Newton mix.
    double param_at_arclength(double s) const {
        const double L = length();
        s -= L * std::floor(s / L);
        auto it = std::upper_bound(arc_s_.begin(), arc_s_.end(), s);
        std::size_t i = std::min(static_cast<std::size_t>(std::distance(arc_s_.begin(), it)),
                                 arc_s_.size() - 1);
        if (i > 0) --i;
        double lo = arc_t_[i], hi = arc_t_[std::min(i + 1, arc_t_.size() - 1)];
        if (hi <= lo) hi = lo + 1.0 / static_cast<double>(arc_t_.size() - 1);
        double t = 0.5 * (lo + hi);
        for (int iter = 0; iter < 60; ++iter) {
            const double g = arclength(t) - s;
            if (std::abs(g) < 1e-13 * (1.0 + L)) break;
            const double sp = d1(t).norm();
            double step = -g / sp;
            double tn = t + step;
            if (tn <= lo || tn >= hi) {  // fall back to bisection inside the bracket
                if (g > 0.0) hi = t; else lo = t;
                tn = 0.5 * (lo + hi);
            } else {
                if (g > 0.0) hi = t; else lo = t;
            }
            t = tn;
        }
        return wrap01(t);
    }

private:
    void validate_and_orient() {
        require(x_.modes() + y_.modes() > 0, errc::invalid_curve, "curve has no Fourier modes");

        constexpr int kDense = 4096;
        // Signed area by the shoelace integral; trapezoid is spectrally exact here.
        double area2 = 0.0;
        for (int i = 0; i < kDense; ++i) {
            const double t = static_cast<double>(i) / kDense;
            area2 += cross(eval(t), d1(t));
        }
        area2 /= kDense;
        require(std::abs(area2) > 1e-14, errc::invalid_curve, "curve encloses no area");
        if (area2 < 0.0) {  // normalize to counterclockwise so nu is outward
            x_.reverse_orientation();
            y_.reverse_orientation();
        }

        double lo_x = std::numeric_limits<double>::max(), hi_x = -lo_x;
        double lo_y = lo_x, hi_y = hi_x;
        std::vector<Vec2> pts(kDense);
        for (int i = 0; i < kDense; ++i) {
            const double t = static_cast<double>(i) / kDense;
            pts[i] = eval(t);
            lo_x = std::min(lo_x, pts[i].x); hi_x = std::max(hi_x, pts[i].x);
            lo_y = std::min(lo_y, pts[i].y); hi_y = std::max(hi_y, pts[i].y);
        }
        diameter_ = std::hypot(hi_x - lo_x, hi_y - lo_y);
        require(diameter_ > 0.0, errc::invalid_curve, "curve is a single point");

        for (int i = 0; i < kDense; ++i) {
            const double t = static_cast<double>(i) / kDense;
            require(d1(t).norm() > 1e-10 * diameter_, errc::invalid_curve,
                    "curve is not immersed: |gamma'| vanishes");
        }

        // Simplicity: samples far apart in parameter must be far apart in space.
        constexpr int kSimple = 1024;
        const double geom_tol = 1e-9 * diameter_;
        for (int i = 0; i < kSimple; ++i) {
            const Vec2 pi = pts[static_cast<std::size_t>(i) * (kDense / kSimple)];
            for (int j = i + 1; j < kSimple; ++j) {
                const double dt = wrap_dist(static_cast<double>(i) / kSimple,
                                            static_cast<double>(j) / kSimple);
                if (dt < 0.01) continue;
                const Vec2 pj = pts[static_cast<std::size_t>(j) * (kDense / kSimple)];
                require((pi - pj).norm() > geom_tol, errc::invalid_curve,
                        "curve self-intersects");
            }
        }

        k_min_ = std::numeric_limits<double>::max();
        k_max_ = -k_min_;
        for (int i = 0; i < kDense; ++i) {
            const double k = frame_curvature(static_cast<double>(i) / kDense);
            k_min_ = std::min(k_min_, k);
            k_max_ = std::max(k_max_, k);
        }
    }

    double frame_curvature(double t) const {
        const Vec2 g1 = d1(t);
        const double sp = g1.norm();
        return cross(g1, d2(t)) / (sp * sp * sp);
    }

    void build_tables() {
        constexpr std::size_t kCells = 4096;
        arc_t_.resize(kCells + 1);
        arc_s_.resize(kCells + 1);
        arc_s_[0] = 0.0;
        const GaussRule& q = gauss01(8);
        for (std::size_t i = 0; i < kCells; ++i) {
            const double a = static_cast<double>(i) / kCells;
            const double b = static_cast<double>(i + 1) / kCells;
            arc_t_[i] = a;
            double ds = 0.0;
            for (std::size_t j = 0; j < q.nodes.size(); ++j)
                ds += q.weights[j] * d1(a + (b - a) * q.nodes[j]).norm();
            arc_s_[i + 1] = arc_s_[i] + (b - a) * ds;
        }
        arc_t_[kCells] = 1.0;
    }

    FourierSeries x_, y_;
    double diameter_ = 0.0;
    double k_min_ = 0.0, k_max_ = 0.0;
    std::vector<double> arc_t_, arc_s_;
};

// ---------------------------------------------------------------------------
// Scalar field on the boundary (profile h, traces); extended to the tube as a
// constant along each normal ray, which makes "grad h . nu = 0" exact.
// ---------------------------------------------------------------------------

class BoundaryField {
public:
    explicit BoundaryField(FourierSeries f) : f_(std::move(f)) { scan_range(); }

    static BoundaryField constant(double c) {
        FourierSeries f;
        f.c0 = c;
        return BoundaryField(std::move(f));
    }

    double eval(double t) const { return f_.eval(t); }
    double d1(double t) const { return f_.d1(t); }
    double min() const { return min_; }
    double max() const { return max_; }
    const FourierSeries& series() const { return f_; }

private:
    void scan_range() {
        const std::size_t n = std::max<std::size_t>(4096, 128 * std::max<std::size_t>(1, f_.modes()));
        min_ = std::numeric_limits<double>::max();
        max_ = -min_;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = f_.eval(static_cast<double>(i) / static_cast<double>(n));
            min_ = std::min(min_, v);
            max_ = std::max(max_, v);
        }
    }

    FourierSeries f_;
    double min_ = 0.0, max_ = 0.0;
};

// ---------------------------------------------------------------------------
// Layer geometry: curve + profile + scalars, with focal / thickness guards
// ---------------------------------------------------------------------------

struct TubularCoords {
    double t;  // boundary parameter
    double d;  // normal distance, >= 0
};

// Curvature of the offset point x = sigma + d*nu0: k/(1 + d*k).
inline double shifted_curvature(double k0, double d) {
    const double denom = 1.0 + d * k0;
    if (denom <= 0.0) {
        std::ostringstream os;
        os << "focal crossing: 1 + d*k = " << denom << " at d = " << d
           << " (focal bound " << (k0 < 0.0 ? 1.0 / -k0 : std::numeric_limits<double>::infinity())
           << ")";
        fail(errc::focal_crossing, os.str());
    }
    return k0 / denom;
}

class LayerGeometry {
public:
    LayerGeometry(ClosedCurve curve, BoundaryField h, double eps, double beta, double d0)
        : curve_(std::move(curve)), h_(std::move(h)), eps_(eps), beta_(beta), d0_(d0) {
        check_guards();
    }

    const ClosedCurve& curve() const { return curve_; }
    const BoundaryField& h() const { return h_; }
    double eps() const { return eps_; }
    double beta() const { return beta_; }
    double d0() const { return d0_; }

    // |grad h| on the boundary: arc-length derivative, since the normal
    // extension contributes nothing.
    double grad_h_norm(double t) const { return std::abs(h_.d1(t)) / curve_.d1(t).norm(); }

    LayerGeometry with_eps(double eps) const { return {curve_, h_, eps, beta_, d0_}; }
    LayerGeometry with_profile(BoundaryField h) const { return {curve_, std::move(h), eps_, beta_, d0_}; }

private:
    void check_guards() {
        std::ostringstream os;
        const double focal = curve_.focal_bound();
        if (!(h_.min() > 0.0)) {
            os << "layer profile must be positive everywhere (min h = " << h_.min() << ")";
            fail(errc::guard_violation, os.str());
        }
        if (!(beta_ > 0.0)) fail(errc::guard_violation, "beta must be positive");
        if (!(eps_ > 0.0 && eps_ <= 1.0)) fail(errc::guard_violation, "eps must lie in (0, 1]");
        if (!(d0_ > 0.0)) fail(errc::guard_violation, "tubular radius d0 must be positive");
        if (!(eps_ * h_.max() < d0_)) {
            os << "layer thickness exceeds tubular radius: eps*max h = " << eps_ * h_.max()
               << " >= d0 = " << d0_ << " (computed focal bound " << focal << ")";
            fail(errc::guard_violation, os.str());
        }
        if (!(d0_ < focal)) {
            os << "tubular radius d0 = " << d0_ << " reaches the focal set"
               << " (computed focal bound " << focal << ")";
            fail(errc::guard_violation, os.str());
        }
        // 1 + d*k > 0 up to the reference-layer thickness h(t) (covers eps*h too).
        constexpr int n = 2048;
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / n;
            const double k = curve_.frame(t).curvature;
            if (k < 0.0 && 1.0 + h_.eval(t) * k <= 0.0) {
                os << "offset up to h crosses the focal set at t = " << t
                   << " (computed focal bound " << 1.0 / -k << ", h = " << h_.eval(t) << ")";
                fail(errc::guard_violation, os.str());
            }
        }
    }

    ClosedCurve curve_;
    BoundaryField h_;
    double eps_, beta_, d0_;
};

// ---------------------------------------------------------------------------
// Metric projection onto the curve
// ---------------------------------------------------------------------------

// Nearest-point coordinates (t, d) of x in the outward tube. Dense scan
// seeds Newton on the stationarity condition (x - gamma(t)) . gamma'(t) = 0.
inline TubularCoords project(const LayerGeometry& geom, Vec2 x) {
    const ClosedCurve& c = geom.curve();
    const auto scan_n = std::max<std::size_t>(128, 4 * c.modes());

    std::vector<double> dist2(scan_n);
    for (std::size_t i = 0; i < scan_n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(scan_n);
        dist2[i] = (x - c.eval(t)).norm2();
    }

    struct Candidate {
        double t;
        double dist;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < scan_n; ++i) {
        const double prev = dist2[(i + scan_n - 1) % scan_n];
        const double next = dist2[(i + 1) % scan_n];
        if (dist2[i] > prev || dist2[i] > next) continue;
        // Newton refinement within this scan cell.
        double t = static_cast<double>(i) / static_cast<double>(scan_n);
        for (int iter = 0; iter < 30; ++iter) {
            const Vec2 r = x - c.eval(t);
            const Vec2 g1 = c.d1(t);
            const double g = dot(r, g1);
            const double dg = -g1.norm2() + dot(r, c.d2(t));
            if (dg == 0.0) break;
            const double step = -g / dg;
            t += step;
            if (std::abs(step) <= 1e-12) break;
        }
        t = wrap01(t);
        const double dist = (x - c.eval(t)).norm();
        bool dup = false;
        for (const auto& cd : cands)
            if (wrap_dist(cd.t, t) < 1e-9) { dup = true; break; }
        if (!dup) cands.push_back({t, dist});
    }
    require(!cands.empty(), errc::non_unique_projection, "projection scan found no minimum");

    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
    const Candidate best = cands.front();
    const double scale = 1.0 + best.dist;
    for (std::size_t i = 1; i < cands.size(); ++i) {
        if (wrap_dist(cands[i].t, best.t) <= 1e-6) continue;
        if (cands[i].dist - best.dist <= 1e-9 * scale) {
            std::ostringstream os;
            os << "ambiguous projection: parameters " << best.t << " and " << cands[i].t
               << " are equidistant from (" << x.x << ", " << x.y << ")";
            fail(errc::non_unique_projection, os.str());
        }
        break;  // candidates are distance-sorted; farther ones cannot tie
    }

    const CurveFrame fr = c.frame(best.t);
    const double signed_d = dot(x - fr.point, fr.normal);
    const double tol = 1e-10 * (1.0 + c.diameter());
    if (signed_d < -tol) {
        std::ostringstream os;
        os << "point (" << x.x << ", " << x.y << ") lies inside the domain";
        fail(errc::out_of_tube, os.str());
    }
    const double d = std::max(signed_d, 0.0);
    if (d >= geom.d0()) {
        std::ostringstream os;
        os << "point (" << x.x << ", " << x.y << ") is beyond the tubular radius: d = " << d
           << " >= d0 = " << geom.d0();
        fail(errc::out_of_tube, os.str());
    }
    return {best.t, d};
}

// ---------------------------------------------------------------------------
// Layer stretching  Psi_eps(z) = sigma(z) + eps d(z) nu0(z)
// ---------------------------------------------------------------------------

enum class StretchDirection { forward, inverse };

inline Vec2 stretch(const LayerGeometry& geom, StretchDirection dir, Vec2 z) {
    const TubularCoords tc = project(geom, z);
    const double h = geom.h().eval(tc.t);
    const double slack = 1e-8 * (1.0 + h);
    double d_new = 0.0;
    if (dir == StretchDirection::forward) {
        require(tc.d <= h + slack, errc::out_of_tube,
                "stretch(forward): point lies outside the reference layer");
        d_new = geom.eps() * std::min(tc.d, h);
    } else {
        const double dr = tc.d / geom.eps();
        require(dr <= h + slack, errc::out_of_tube,
                "stretch(inverse): point lies outside the thin layer");
        d_new = std::min(dr, h);
    }
    const CurveFrame fr = geom.curve().frame(tc.t);
    return fr.point + fr.normal * d_new;
}

// ---------------------------------------------------------------------------
// Jacobians of the stretching (2D: a single curvature factor)
// ---------------------------------------------------------------------------

struct Jacobians {
    double J_eps;  // (1 + eps d k) / (1 + d k)
    double J0;     // 1 / (1 + d k)
    double Jtau0;  // J0 / sqrt(1 + |grad h|^2)
};

inline Jacobians jacobians_at(const LayerGeometry& geom, double eps, double t, double d) {
    const double k = geom.curve().frame(t).curvature;
    const double denom = 1.0 + d * k;
    if (denom <= 0.0) {
        std::ostringstream os;
        os << "focal crossing in Jacobian: 1 + d*k = " << denom << " (computed focal bound "
           << geom.curve().focal_bound() << ")";
        fail(errc::focal_crossing, os.str());
    }
    const double J_eps = (1.0 + eps * d * k) / denom;
    const double J0 = 1.0 / denom;
    const double gh = geom.grad_h_norm(t);
    return {J_eps, J0, J0 / std::sqrt(1.0 + gh * gh)};
}

inline Jacobians jacobians(const LayerGeometry& geom, double eps, Vec2 z) {
    const TubularCoords tc = project(geom, z);
    return jacobians_at(geom, eps, tc.t, tc.d);
}

// ---------------------------------------------------------------------------
// Fiber-aligned quadrature over the layer and its outer boundary
// ---------------------------------------------------------------------------

struct FiberQuadrature {
    int panels_per_mode = 4;  // boundary panels per Fourier mode
    int min_panels = 16;
    int boundary_points = 4;  // Gauss points per boundary panel
    int fiber_points = 8;     // Gauss points across each fiber

    FiberQuadrature refined() const {
        return {2 * panels_per_mode, 2 * min_panels, boundary_points, 2 * fiber_points};
    }

    int panel_count(const ClosedCurve& c) const {
        return std::max(min_panels, panels_per_mode * static_cast<int>(c.modes()));
    }
};

enum class FiberTarget { layer_volume, outer_surface, reference_layer };

// Integrand receives (t, d, x) with x = gamma(t) + d*nu0(t); the extra
// parameters make pulled-back integrands (Jacobian weights, profiles in the
// fiber variable) cheap — no projection step per quadrature point.
template <class G>
double fiber_integral_param(const LayerGeometry& geom, double eps, G&& g, FiberTarget target,
                            const FiberQuadrature& quad = {}) {
    const ClosedCurve& c = geom.curve();
    const int panels = quad.panel_count(c);
    const GaussRule& qb = gauss01(quad.boundary_points);
    const GaussRule& qf = gauss01(quad.fiber_points);

    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double t0 = static_cast<double>(p) / panels;
        const double wt_panel = 1.0 / panels;
        double panel_sum = 0.0;
        for (std::size_t i = 0; i < qb.nodes.size(); ++i) {
            const double t = t0 + wt_panel * qb.nodes[i];
            const CurveFrame fr = c.frame(t);
            const double h = geom.h().eval(t);
            double v = 0.0;
            switch (target) {
                case FiberTarget::outer_surface: {
                    const double d = eps * h;
                    const double gh = geom.grad_h_norm(t);
                    const double w = (1.0 + d * fr.curvature) * std::sqrt(1.0 + eps * eps * gh * gh);
                    v = g(t, d, fr.point + fr.normal * d) * w;
                    break;
                }
                case FiberTarget::layer_volume:
                case FiberTarget::reference_layer: {
                    const double depth = (target == FiberTarget::layer_volume) ? eps * h : h;
                    for (std::size_t j = 0; j < qf.nodes.size(); ++j) {
                        const double d = depth * qf.nodes[j];
                        v += qf.weights[j] * g(t, d, fr.point + fr.normal * d) *
                             (1.0 + d * fr.curvature);
                    }
                    v *= depth;
                    break;
                }
            }
            panel_sum += qb.weights[i] * v * fr.speed;
        }
        total += wt_panel * panel_sum;
    }
    return total;
}

// Spec-shaped entry point: integrand of the physical point only.
template <class G>
double fiber_integral(const LayerGeometry& geom, double eps, G&& g, FiberTarget target,
                      const FiberQuadrature& quad = {}) {
    return fiber_integral_param(
        geom, eps, [&g](double, double, Vec2 x) { return g(x); }, target, quad);
}

// Plain boundary integral over the curve itself: integral of g(t, x) ds.
template <class G>
double boundary_integral(const ClosedCurve& c, G&& g, const FiberQuadrature& quad = {}) {
    const int panels = quad.panel_count(c);
    const GaussRule& qb = gauss01(quad.boundary_points);
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double t0 = static_cast<double>(p) / panels;
        const double wt_panel = 1.0 / panels;
        double panel_sum = 0.0;
        for (std::size_t i = 0; i < qb.nodes.size(); ++i) {
            const double t = t0 + wt_panel * qb.nodes[i];
            panel_sum += qb.weights[i] * g(t, c.eval(t)) * c.d1(t).norm();
        }
        total += wt_panel * panel_sum;
    }
    return total;
}

}  // namespace layerlab::geometry
