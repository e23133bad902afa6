#pragma once

// Declarative key = value study configs (parse, validate, echo) and the
// CSV/atomic-file plumbing used by the command-line driver.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "layerlab/experiments.hpp"
#include "layerlab/oracle.hpp"

namespace layerlab::io {

// ---------------------------------------------------------------------------
// Run configuration: every key a config file may set, defaults materialized
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string study;  // oracle|solve|rates|stretch|scaling|optimize

    // geometry
    std::string curve = "circle";  // circle|ellipse|fourier
    double radius = 1.0;
    double ax = 2.0, ay = 1.0;
    std::vector<double> curve_x_a, curve_x_b, curve_y_a, curve_y_b;

    // layer profile h = h0 + sum a_k cos(2 pi k t) + b_k sin(2 pi k t)
    double h = 0.2;
    std::vector<double> h_a, h_b;

    double beta = 1.0;
    double d0 = 0.5;
    std::string source = "one";  // zero|one|x|y
    std::vector<double> eps;
    int dim = 2;  // ambient dimension of the radial oracle

    // discretization and runtime
    int n_b = 128;
    int n_b_cap = 512;
    int m = 4;
    int threads = 1;
    double solver_tol = 1e-10;
    int profile_n_t = 256;
    int profile_n_s = 16;

    // verdict gates
    double tol_final_gap = 0.05;
    double tol_fit_refusal = 0.5;
    double tol_slope = 0.8;
    double tol_scaling_residual = 0.2;
    double tol_plateau = 0.1;

    // optimizer
    double mass = 0.0;
    double h_min = 0.05;
    double opt_eps = 0.1;
    int opt_modes = 8;
    int opt_max_iters = 200;
    double opt_step0 = 0.25;
    double opt_fd_step = 1e-5;
    double opt_tol = 1e-8;

    std::string out = ".";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] inline void bad(const std::string& where, const std::string& what) {
    fail(errc::config, where + ": " + what);
}

inline double parse_double(const std::string& where, std::string_view v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        bad(where, "expected a number, got '" + std::string(v) + "'");
    return out;
}

inline int parse_int(const std::string& where, std::string_view v) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        bad(where, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

inline std::vector<double> parse_list(const std::string& where, std::string_view v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const std::size_t comma = v.find(',', start);
        const auto item = trim(v.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start));
        out.push_back(parse_double(where, item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += g17(v[i]);
    }
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parse + schema validation (everything here raises errc::config)
// ---------------------------------------------------------------------------

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::config, "cannot open config file: " + path);

    RunConfig rc;
    std::string line;
    int lineno = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        if (const auto hash = sv.find('#'); hash != std::string_view::npos)
            sv = sv.substr(0, hash);
        sv = detail::trim(sv);
        if (sv.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);

        const auto eq = sv.find('=');
        if (eq == std::string_view::npos) detail::bad(where, "expected 'key = value'");
        const std::string key(detail::trim(sv.substr(0, eq)));
        const auto val = detail::trim(sv.substr(eq + 1));
        if (key.empty()) detail::bad(where, "empty key");
        for (const auto& k : seen)
            if (k == key) detail::bad(where, "duplicate key '" + key + "'");
        seen.push_back(key);
        const std::string wk = where + ": key '" + key + "'";

        if (key == "study") rc.study = std::string(val);
        else if (key == "curve") rc.curve = std::string(val);
        else if (key == "radius") rc.radius = detail::parse_double(wk, val);
        else if (key == "ax") rc.ax = detail::parse_double(wk, val);
        else if (key == "ay") rc.ay = detail::parse_double(wk, val);
        else if (key == "curve_x_a") rc.curve_x_a = detail::parse_list(wk, val);
        else if (key == "curve_x_b") rc.curve_x_b = detail::parse_list(wk, val);
        else if (key == "curve_y_a") rc.curve_y_a = detail::parse_list(wk, val);
        else if (key == "curve_y_b") rc.curve_y_b = detail::parse_list(wk, val);
        else if (key == "h") rc.h = detail::parse_double(wk, val);
        else if (key == "h_a") rc.h_a = detail::parse_list(wk, val);
        else if (key == "h_b") rc.h_b = detail::parse_list(wk, val);
        else if (key == "beta") rc.beta = detail::parse_double(wk, val);
        else if (key == "d0") rc.d0 = detail::parse_double(wk, val);
        else if (key == "source") rc.source = std::string(val);
        else if (key == "eps") rc.eps = detail::parse_list(wk, val);
        else if (key == "dim") rc.dim = detail::parse_int(wk, val);
        else if (key == "n_b") rc.n_b = detail::parse_int(wk, val);
        else if (key == "n_b_cap") rc.n_b_cap = detail::parse_int(wk, val);
        else if (key == "m") rc.m = detail::parse_int(wk, val);
        else if (key == "threads") rc.threads = detail::parse_int(wk, val);
        else if (key == "solver_tol") rc.solver_tol = detail::parse_double(wk, val);
        else if (key == "profile_n_t") rc.profile_n_t = detail::parse_int(wk, val);
        else if (key == "profile_n_s") rc.profile_n_s = detail::parse_int(wk, val);
        else if (key == "tol_final_gap") rc.tol_final_gap = detail::parse_double(wk, val);
        else if (key == "tol_fit_refusal") rc.tol_fit_refusal = detail::parse_double(wk, val);
        else if (key == "tol_slope") rc.tol_slope = detail::parse_double(wk, val);
        else if (key == "tol_scaling_residual")
            rc.tol_scaling_residual = detail::parse_double(wk, val);
        else if (key == "tol_plateau") rc.tol_plateau = detail::parse_double(wk, val);
        else if (key == "mass") rc.mass = detail::parse_double(wk, val);
        else if (key == "h_min") rc.h_min = detail::parse_double(wk, val);
        else if (key == "opt_eps") rc.opt_eps = detail::parse_double(wk, val);
        else if (key == "opt_modes") rc.opt_modes = detail::parse_int(wk, val);
        else if (key == "opt_max_iters") rc.opt_max_iters = detail::parse_int(wk, val);
        else if (key == "opt_step0") rc.opt_step0 = detail::parse_double(wk, val);
        else if (key == "opt_fd_step") rc.opt_fd_step = detail::parse_double(wk, val);
        else if (key == "opt_tol") rc.opt_tol = detail::parse_double(wk, val);
        else if (key == "out") rc.out = std::string(val);
        else detail::bad(where, "unknown key '" + key + "'");
    }
    return rc;
}

// Schema checks that need the whole document (the per-key parse above only
// validates lexical shape). Raises errc::config; geometry guards are not
// checked here — they surface from LayerGeometry with their own error class.
inline void validate_schema(const RunConfig& rc) {
    const auto is_one_of = [](const std::string& v, std::initializer_list<const char*> opts) {
        for (const char* o : opts)
            if (v == o) return true;
        return false;
    };
    if (!is_one_of(rc.study, {"oracle", "solve", "rates", "stretch", "scaling", "optimize"}))
        fail(errc::config, "key 'study': unknown study '" + rc.study + "'");
    if (!is_one_of(rc.curve, {"circle", "ellipse", "fourier"}))
        fail(errc::config, "key 'curve': unknown curve kind '" + rc.curve + "'");
    if (!is_one_of(rc.source, {"zero", "one", "x", "y"}))
        fail(errc::config, "key 'source': unknown source '" + rc.source + "'");
    if (rc.curve == "circle" && !(rc.radius > 0.0))
        fail(errc::config, "key 'radius': must be positive");
    if (rc.curve == "ellipse" && !(rc.ax > 0.0 && rc.ay > 0.0))
        fail(errc::config, "keys 'ax'/'ay': must be positive");
    if (rc.curve == "fourier" && rc.curve_x_a.empty() && rc.curve_x_b.empty() &&
        rc.curve_y_a.empty() && rc.curve_y_b.empty())
        fail(errc::config, "curve = fourier needs curve_x_*/curve_y_* coefficients");
    if (rc.eps.empty()) fail(errc::config, "key 'eps': list must not be empty");
    for (std::size_t i = 1; i < rc.eps.size(); ++i)
        if (!(rc.eps[i] < rc.eps[i - 1]))
            fail(errc::config, "key 'eps': list must be strictly decreasing");
    if (rc.study == "solve" && rc.eps.size() != 1)
        fail(errc::config, "study 'solve' expects a single eps");
    if (rc.study == "oracle") {
        if (rc.curve != "circle")
            fail(errc::config, "study 'oracle' is radial: set curve = circle");
        if (rc.source != "one")
            fail(errc::config, "study 'oracle' needs the constant source: set source = one");
        if (!rc.h_a.empty() || !rc.h_b.empty())
            fail(errc::config, "study 'oracle' needs a constant profile (no h_a/h_b)");
        if (rc.dim < 2) fail(errc::config, "key 'dim': must be >= 2");
    }
    if (rc.study == "optimize" && !(rc.mass > 0.0))
        fail(errc::config, "study 'optimize' needs key 'mass' > 0");
    if (rc.n_b < 16) fail(errc::config, "key 'n_b': must be >= 16");
    if (rc.n_b_cap < rc.n_b) fail(errc::config, "key 'n_b_cap': must be >= n_b");
    if (rc.m < 2) fail(errc::config, "key 'm': must be >= 2");
    if (rc.threads < 1) fail(errc::config, "key 'threads': must be >= 1");
    if (!(rc.solver_tol > 0.0)) fail(errc::config, "key 'solver_tol': must be positive");
    if (rc.profile_n_t < 8 || rc.profile_n_s < 2)
        fail(errc::config, "keys 'profile_n_t'/'profile_n_s': too coarse");
    if (rc.opt_modes < 1 || rc.opt_max_iters < 1 || !(rc.opt_step0 > 0.0) ||
        !(rc.opt_fd_step > 0.0) || !(rc.opt_tol > 0.0) || !(rc.h_min > 0.0))
        fail(errc::config, "optimizer keys must be positive");
}

// Canonical echo: every key, fixed order, %.17g values. Reparsing the echo
// reproduces the same RunConfig byte-for-byte.
inline std::string echo_config(const RunConfig& rc) {
    using detail::g17;
    using detail::join;
    std::ostringstream os;
    os << "study = " << rc.study << "\n";
    os << "curve = " << rc.curve << "\n";
    os << "radius = " << g17(rc.radius) << "\n";
    os << "ax = " << g17(rc.ax) << "\n";
    os << "ay = " << g17(rc.ay) << "\n";
    os << "curve_x_a = " << join(rc.curve_x_a) << "\n";
    os << "curve_x_b = " << join(rc.curve_x_b) << "\n";
    os << "curve_y_a = " << join(rc.curve_y_a) << "\n";
    os << "curve_y_b = " << join(rc.curve_y_b) << "\n";
    os << "h = " << g17(rc.h) << "\n";
    os << "h_a = " << join(rc.h_a) << "\n";
    os << "h_b = " << join(rc.h_b) << "\n";
    os << "beta = " << g17(rc.beta) << "\n";
    os << "d0 = " << g17(rc.d0) << "\n";
    os << "source = " << rc.source << "\n";
    os << "eps = " << join(rc.eps) << "\n";
    os << "dim = " << rc.dim << "\n";
    os << "n_b = " << rc.n_b << "\n";
    os << "n_b_cap = " << rc.n_b_cap << "\n";
    os << "m = " << rc.m << "\n";
    os << "threads = " << rc.threads << "\n";
    os << "solver_tol = " << g17(rc.solver_tol) << "\n";
    os << "profile_n_t = " << rc.profile_n_t << "\n";
    os << "profile_n_s = " << rc.profile_n_s << "\n";
    os << "tol_final_gap = " << g17(rc.tol_final_gap) << "\n";
    os << "tol_fit_refusal = " << g17(rc.tol_fit_refusal) << "\n";
    os << "tol_slope = " << g17(rc.tol_slope) << "\n";
    os << "tol_scaling_residual = " << g17(rc.tol_scaling_residual) << "\n";
    os << "tol_plateau = " << g17(rc.tol_plateau) << "\n";
    os << "mass = " << g17(rc.mass) << "\n";
    os << "h_min = " << g17(rc.h_min) << "\n";
    os << "opt_eps = " << g17(rc.opt_eps) << "\n";
    os << "opt_modes = " << rc.opt_modes << "\n";
    os << "opt_max_iters = " << rc.opt_max_iters << "\n";
    os << "opt_step0 = " << g17(rc.opt_step0) << "\n";
    os << "opt_fd_step = " << g17(rc.opt_fd_step) << "\n";
    os << "opt_tol = " << g17(rc.opt_tol) << "\n";
    os << "out = " << rc.out << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// RunConfig -> domain objects
// ---------------------------------------------------------------------------

inline geometry::ClosedCurve make_curve(const RunConfig& rc) {
    if (rc.curve == "circle") return geometry::ClosedCurve::circle(rc.radius);
    if (rc.curve == "ellipse") return geometry::ClosedCurve::ellipse(rc.ax, rc.ay);
    geometry::FourierSeries x, y;
    x.a = rc.curve_x_a;
    x.b = rc.curve_x_b;
    y.a = rc.curve_y_a;
    y.b = rc.curve_y_b;
    return geometry::ClosedCurve(std::move(x), std::move(y));
}

inline geometry::BoundaryField make_profile(const RunConfig& rc) {
    geometry::FourierSeries s;
    s.c0 = rc.h;
    s.a = rc.h_a;
    s.b = rc.h_b;
    return geometry::BoundaryField(std::move(s));
}

inline solver::SourceFn make_source(const RunConfig& rc) {
    if (rc.source == "zero") return [](Vec2) { return 0.0; };
    if (rc.source == "one") return [](Vec2) { return 1.0; };
    if (rc.source == "x") return [](Vec2 p) { return p.x; };
    return [](Vec2 p) { return p.y; };
}

inline experiments::StudyConfig make_study_config(const RunConfig& rc) {
    experiments::StudyConfig cfg(make_curve(rc), make_profile(rc));
    cfg.beta = rc.beta;
    cfg.d0 = rc.d0;
    cfg.f = make_source(rc);
    cfg.eps_list = rc.eps;
    cfg.n_b_base = rc.n_b;
    cfg.n_b_cap = rc.n_b_cap;
    cfg.m = rc.m;
    cfg.threads = rc.threads;
    cfg.solver_tol = rc.solver_tol;
    cfg.profile_n_t = rc.profile_n_t;
    cfg.profile_n_s = rc.profile_n_s;
    cfg.tol_final_gap = rc.tol_final_gap;
    cfg.tol_fit_refusal = rc.tol_fit_refusal;
    cfg.tol_slope = rc.tol_slope;
    cfg.tol_scaling_residual = rc.tol_scaling_residual;
    cfg.tol_plateau = rc.tol_plateau;
    cfg.mass = rc.mass;
    cfg.h_min = rc.h_min;
    cfg.opt_eps = rc.opt_eps;
    cfg.opt_modes = rc.opt_modes;
    cfg.opt_max_iters = rc.opt_max_iters;
    cfg.opt_step0 = rc.opt_step0;
    cfg.opt_fd_step = rc.opt_fd_step;
    cfg.opt_tol = rc.opt_tol;
    if (rc.study == "rates") cfg.kind = experiments::StudyKind::rates;
    if (rc.study == "stretch") cfg.kind = experiments::StudyKind::stretch;
    if (rc.study == "scaling") cfg.kind = experiments::StudyKind::scaling;
    if (rc.study == "optimize") cfg.kind = experiments::StudyKind::optimize;
    return cfg;
}

// ---------------------------------------------------------------------------
// Output files: atomic writes and the per-study CSV payloads
// ---------------------------------------------------------------------------

// Temp-then-rename so a failed run never leaves a partial file behind.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::io, "cannot open for writing: " + tmp.string());
        out << content;
        if (!out.flush()) fail(errc::io, "short write: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) fail(errc::io, "rename failed: " + path.string() + " (" + ec.message() + ")");
}

inline std::string oracle_csv(const RateTable& table) {
    using detail::g17;
    std::string s = "# schema: oracle-table v1\n# columns: eps,f_eps,f0,delta,f1,err\n";
    for (const auto& r : table.rows)
        s += g17(r.eps) + "," + g17(r.f_eps) + "," + g17(r.f0) + "," + g17(r.delta) + "," +
             g17(r.f1) + "," + g17(std::abs(r.delta - r.f1)) + "\n";
    return s;
}

inline std::string rates_csv(const experiments::StudyResult& res,
                             const std::vector<double>& eps) {
    using detail::g17;
    std::string s = "# schema: rates v1\n# columns: eps,n_b,m,f_eps,f0,delta,f1,err\n";
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& r = res.records[i].report;
        s += g17(eps[i]) + "," + std::to_string(r.n_b) + "," + std::to_string(r.m) + "," +
             g17(r.f_eps) + "," + g17(r.f0) + "," + g17(r.delta) + "," + g17(r.f1) + "," +
             g17(res.records[i].value) + "\n";
    }
    return s;
}

inline std::string stretch_csv(const experiments::StudyResult& res,
                               const std::vector<double>& eps) {
    using detail::g17;
    std::string s = "# schema: stretch v1\n# columns: eps,n_b,m,distance,control\n";
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& rec = res.records[i];
        s += g17(eps[i]) + "," + std::to_string(rec.report.n_b) + "," +
             std::to_string(rec.report.m) + "," + g17(rec.value) + "," + g17(rec.control) +
             "\n";
    }
    return s;
}

inline std::string scaling_csv(const experiments::StudyResult& res,
                               const std::vector<double>& eps) {
    using detail::g17;
    std::string s = "# schema: scaling v1\n# columns: eps,n_b,m,tangential_energy,ratio\n";
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& rec = res.records[i];
        s += g17(eps[i]) + "," + std::to_string(rec.report.n_b) + "," +
             std::to_string(rec.report.m) + "," + g17(rec.value) + "," + g17(rec.control) +
             "\n";
    }
    return s;
}

inline std::string trace_csv(const experiments::OptimizeResult& res) {
    using detail::g17;
    std::string s = "# schema: optimize-trace v1\n# columns: iter,objective\n";
    for (std::size_t i = 0; i < res.trace.size(); ++i)
        s += std::to_string(i) + "," + g17(res.trace[i]) + "\n";
    return s;
}

inline std::string profile_csv(const geometry::FourierSeries& h_star, int samples = 512) {
    using detail::g17;
    std::string s = "# schema: profile v1\n# columns: t,h\n";
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        s += g17(t) + "," + g17(h_star.eval(t)) + "\n";
    }
    return s;
}

inline std::string field_csv(const solver::ScalarField& u) {
    using detail::g17;
    std::string s = "# schema: field v1\n# columns: vertex,x,y,value\n";
    for (std::size_t v = 0; v < u.values.size(); ++v)
        s += std::to_string(v) + "," + g17(u.mesh->vertices[v].x) + "," +
             g17(u.mesh->vertices[v].y) + "," + g17(u.values[v]) + "\n";
    return s;
}

inline std::string reference_field_csv(const solver::ReferenceLayerField& f) {
    using detail::g17;
    std::string s = "# schema: reference-field v1\n# columns: t,s,value\n";
    for (int it = 0; it < f.n_t; ++it)
        for (int js = 0; js <= f.n_s; ++js)
            s += g17(static_cast<double>(it) / f.n_t) + "," +
                 g17(static_cast<double>(js) / f.n_s) + "," + g17(f.at(it, js)) + "\n";
    return s;
}

}  // namespace layerlab::io
