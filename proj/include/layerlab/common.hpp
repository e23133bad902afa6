#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace layerlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.dot(b); }
inline double cross(Vec2 a, Vec2 b) { return a.cross(b); }

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

enum class errc {
    invalid_curve,
    out_of_tube,
    non_unique_projection,
    focal_crossing,
    guard_violation,
    mesh_quality,
    point_location,
    config,
    infeasible,
    solver,
    io,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

// Wraps a periodic parameter into [0, 1).
inline double wrap01(double t) {
    double w = t - std::floor(t);
    return (w >= 1.0) ? 0.0 : w;
}

// Shortest distance between two parameters on the periodic interval.
inline double wrap_dist(double a, double b) {
    double d = std::fabs(wrap01(a) - wrap01(b));
    return std::min(d, 1.0 - d);
}

// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

// Cached rule mapped to [0, 1]. Node-based cache: references stay valid
// across later insertions.
inline const GaussRule& gauss01(int n) {
    thread_local std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        GaussRule r = gauss_legendre(n);
        for (int i = 0; i < n; ++i) {
            r.nodes[i] = 0.5 * (r.nodes[i] + 1.0);
            r.weights[i] *= 0.5;
        }
        it = cache.emplace(n, std::move(r)).first;
    }
    return it->second;
}

// Least-squares line y = slope*x + intercept; residual is the RMS misfit.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    require(n == ys.size() && n >= 2, errc::config, "fit_line: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

inline LineFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        require(xs[i] > 0 && ys[i] > 0, errc::config, "fit_loglog: positive data required");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return fit_line(lx, ly);
}

// One-term Richardson extrapolation v(eps) = L + c*eps from the two smallest eps.
inline double richardson(const std::vector<double>& eps, const std::vector<double>& vals) {
    const std::size_t n = eps.size();
    require(n == vals.size() && n >= 2, errc::config, "richardson: need >= 2 points");
    double e1 = eps[n - 2], e2 = eps[n - 1];
    double v1 = vals[n - 2], v2 = vals[n - 1];
    return (e1 * v2 - e2 * v1) / (e1 - e2);
}

// Deterministic chunked parallel map: chunk layout is independent of the
// thread budget so floating-point reduction order never changes.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int tid = 0; tid < threads; ++tid) {
        pool.emplace_back([&, tid]() {
            for (std::size_t i = tid; i < n; i += static_cast<std::size_t>(threads)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace layerlab
