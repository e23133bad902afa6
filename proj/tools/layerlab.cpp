// Command-line driver: parse a study config, run the requested study, write
// CSV tables and a JSON verdict, and map outcomes onto documented exit codes:
//   0 verdict pass        1 verdict fail
//   2 schema violation    3 geometry/feasibility guard    4 runtime failure

#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "layerlab/io.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace layerlab;

constexpr int kPass = 0, kFail = 1, kSchema = 2, kGuard = 3, kRuntime = 4;

json metrics_json(const std::vector<std::pair<std::string, double>>& metrics) {
    json m = json::object();
    for (const auto& [k, v] : metrics) m[k] = v;
    return m;
}

void write_verdict(const io::RunConfig& rc, bool pass,
                   const std::vector<std::pair<std::string, double>>& metrics) {
    json j;
    j["study"] = rc.study;
    j["pass"] = pass;
    j["metrics"] = metrics_json(metrics);
    io::write_text_atomic(fs::path(rc.out) / "verdict.json", j.dump(2) + "\n");
}

int run_oracle(const io::RunConfig& rc) {
    oracle::RadialConfig oc;
    oc.n = rc.dim;
    oc.R = rc.radius;
    oc.h = rc.h;
    oc.beta = rc.beta;
    oc.c = 1.0;
    const RateTable table = oracle::radial_rate_table(oc, rc.eps);

    bool decreasing = true;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        decreasing = decreasing && std::abs(table.rows[i].delta - table.rows[i].f1) <
                                       std::abs(table.rows[i - 1].delta - table.rows[i - 1].f1);
    const auto& last = table.rows.back();
    io::write_text_atomic(fs::path(rc.out) / "oracle.csv", io::oracle_csv(table));
    write_verdict(rc, decreasing,
                  {{"richardson", table.richardson},
                   {"f1", last.f1},
                   {"final_err", std::abs(last.delta - last.f1)}});
    std::printf("oracle: %s (richardson=%.8g, f1=%.8g)\n", decreasing ? "pass" : "FAIL",
                table.richardson, last.f1);
    return decreasing ? kPass : kFail;
}

int run_solve(const io::RunConfig& rc) {
    const auto cfg = io::make_study_config(rc);
    const double eps = rc.eps.front();
    const auto geom = cfg.geometry_at(eps);
    meshing::MeshParams p;
    p.n_b = rc.n_b;
    p.m = rc.m;
    const auto mesh = meshing::build_mesh(geom, eps, p);
    const auto u =
        solver::solve_diffraction(mesh, geom, eps, rc.beta, cfg.f, rc.threads, rc.solver_tol);
    const double f_eps = energy::energy_F_eps(u, eps, rc.beta, cfg.f);
    const double load = energy::load_product(u, cfg.f, /*interior_only=*/true);
    const double identity_rel =
        std::abs(f_eps + load) / std::max(1.0, std::abs(f_eps));
    const auto prof = solver::pullback(u, rc.profile_n_t, rc.profile_n_s);
    const EnergyReport rep =
        energy::fem_energy_report(geom, cfg.f, p, rc.threads, rc.solver_tol);

    json report;
    report["eps"] = rep.eps;
    report["n_b"] = rep.n_b;
    report["m"] = rep.m;
    report["f_eps"] = rep.f_eps;
    report["f0"] = rep.f0;
    report["delta"] = rep.delta;
    report["f1"] = rep.f1;
    report["g_eps"] = rep.g_eps;
    report["tangential_layer_energy"] = rep.tangential_layer_energy;
    report["h1_bound_quantity"] = rep.h1_bound_quantity;
    report["identity_residual_rel"] = identity_rel;

    io::write_text_atomic(fs::path(rc.out) / "solution.csv", io::field_csv(u));
    io::write_text_atomic(fs::path(rc.out) / "profile.csv", io::reference_field_csv(prof));
    io::write_text_atomic(fs::path(rc.out) / "report.json", report.dump(2) + "\n");

    const bool pass = identity_rel <= 1e-8;
    write_verdict(rc, pass,
                  {{"f_eps", rep.f_eps},
                   {"delta", rep.delta},
                   {"f1", rep.f1},
                   {"identity_residual_rel", identity_rel}});
    std::printf("solve: %s (F_eps=%.8g, identity=%.3g)\n", pass ? "pass" : "FAIL", rep.f_eps,
                identity_rel);
    return pass ? kPass : kFail;
}

int run_study(const io::RunConfig& rc) {
    const auto cfg = io::make_study_config(rc);
    if (rc.study == "optimize") {
        const auto res = experiments::optimize_profile(cfg);
        io::write_text_atomic(fs::path(rc.out) / "trace.csv", io::trace_csv(res));
        io::write_text_atomic(fs::path(rc.out) / "h_star.csv", io::profile_csv(res.h_star));
        std::vector<std::pair<std::string, double>> metrics = res.metrics;
        metrics.emplace_back("iterations", res.iterations);
        metrics.emplace_back("converged", res.converged ? 1.0 : 0.0);
        write_verdict(rc, res.pass, metrics);
        std::printf("optimize: %s (iters=%d, violation=%.3g, correlation=%.4f)\n",
                    res.pass ? "pass" : "FAIL", res.iterations, res.constraint_violation,
                    res.curvature_correlation);
        return res.pass ? kPass : kFail;
    }

    experiments::StudyResult res;
    std::string csv;
    if (rc.study == "rates") {
        res = experiments::rate_study(cfg);
        csv = io::rates_csv(res, rc.eps);
    } else if (rc.study == "stretch") {
        res = experiments::stretch_convergence_study(cfg);
        csv = io::stretch_csv(res, rc.eps);
    } else {
        res = experiments::scaling_study(cfg);
        csv = io::scaling_csv(res, rc.eps);
    }
    io::write_text_atomic(fs::path(rc.out) / (rc.study + ".csv"), csv);
    write_verdict(rc, res.pass, res.metrics);
    std::printf("%s: %s", rc.study.c_str(), res.pass ? "pass" : "FAIL");
    for (const auto& [k, v] : res.metrics) std::printf(" %s=%.6g", k.c_str(), v);
    std::printf("\n");
    return res.pass ? kPass : kFail;
}

int dispatch(const std::string& subcommand, const std::string& config_path,
             const std::string& out_override, int threads_override, bool echo) {
    io::RunConfig rc = io::parse_config(config_path);
    if (rc.study.empty()) rc.study = subcommand;
    if (rc.study != subcommand)
        fail(errc::config, "config declares study '" + rc.study + "' but subcommand is '" +
                               subcommand + "'");
    io::validate_schema(rc);
    if (!out_override.empty()) rc.out = out_override;
    if (threads_override > 0) rc.threads = threads_override;

    if (echo) {
        std::fputs(io::echo_config(rc).c_str(), stdout);
        return kPass;
    }
    if (rc.study == "oracle") return run_oracle(rc);
    if (rc.study == "solve") return run_solve(rc);
    return run_study(rc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"layerlab: thin-layer thermal insulation studies"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    int threads_override = 0;
    bool echo = false;
    for (const char* name : {"oracle", "solve", "rates", "stretch", "scaling", "optimize"}) {
        auto* cmd = app.add_subcommand(name);
        cmd->add_option("--config", config_path, "study config file")->required();
        cmd->add_option("--out", out_override, "output directory (overrides config)");
        cmd->add_option("--threads", threads_override, "thread budget (overrides config)");
        cmd->add_flag("--echo-config", echo, "print the materialized config and exit");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kSchema;
    }

    try {
        return dispatch(app.get_subcommands().front()->get_name(), config_path, out_override,
                        threads_override, echo);
    } catch (const Error& e) {
        std::fprintf(stderr, "layerlab: error: %s\n", e.what());
        switch (e.code()) {
            case errc::config:
            case errc::invalid_curve:
                return kSchema;
            case errc::guard_violation:
            case errc::focal_crossing:
            case errc::out_of_tube:
            case errc::non_unique_projection:
            case errc::infeasible:
                return kGuard;
            default:
                return kRuntime;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "layerlab: error: %s\n", e.what());
        return kRuntime;
    }
}
