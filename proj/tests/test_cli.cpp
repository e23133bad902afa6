#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "layerlab/io.hpp"

// End-to-end checks of the command-line driver: exit codes, file outputs,
// config echo round-trips, and re-run determinism.

namespace fs = std::filesystem;

namespace {

const fs::path kWorkdir = fs::path(LAYERLAB_TEST_TMPDIR) / "cli";

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(LAYERLAB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = kWorkdir / name;
    std::ofstream out(p);
    out << body;
    return p;
}

const std::string kRatesDisk =
    "study = rates\n"
    "curve = circle\n"
    "radius = 1.0\n"
    "h = 0.2\n"
    "beta = 1.0\n"
    "d0 = 0.5\n"
    "source = one\n"
    "eps = 0.2, 0.1, 0.05\n";

}  // namespace

TEST_CASE("cli contract") {
    fs::remove_all(kWorkdir);
    fs::create_directories(kWorkdir);

    SECTION("passing study: exit 0, schema-tagged CSV, verdict JSON") {
        const auto cfg = write_config("rates.cfg", kRatesDisk);
        const auto out = kWorkdir / "rates_out";
        const int rc =
            run_cli("rates --config " + cfg.string() + " --out " + out.string(),
                    kWorkdir / "rates.log");
        CHECK(rc == 0);
        const std::string csv = slurp(out / "rates.csv");
        CHECK(csv.rfind("# schema: rates v1\n", 0) == 0);
        const std::string verdict = slurp(out / "verdict.json");
        CHECK(verdict.find("\"pass\": true") != std::string::npos);
        CHECK(verdict.find("\"study\": \"rates\"") != std::string::npos);
        CHECK(verdict.find("richardson_delta") != std::string::npos);
    }

    SECTION("re-runs are byte-identical, also across thread budgets") {
        const auto cfg = write_config("rates.cfg", kRatesDisk);
        const auto out1 = kWorkdir / "det1";
        const auto out2 = kWorkdir / "det2";
        REQUIRE(run_cli("rates --config " + cfg.string() + " --out " + out1.string(),
                        kWorkdir / "det1.log") == 0);
        REQUIRE(run_cli("rates --config " + cfg.string() + " --out " + out2.string() +
                            " --threads 2",
                        kWorkdir / "det2.log") == 0);
        CHECK(slurp(out1 / "rates.csv") == slurp(out2 / "rates.csv"));
        CHECK(slurp(out1 / "verdict.json") == slurp(out2 / "verdict.json"));
    }

    SECTION("verdict failure exits 1 but still writes outputs") {
        const auto cfg =
            write_config("strict.cfg", kRatesDisk + "tol_final_gap = 1e-12\n");
        const auto out = kWorkdir / "strict_out";
        const int rc =
            run_cli("rates --config " + cfg.string() + " --out " + out.string(),
                    kWorkdir / "strict.log");
        CHECK(rc == 1);
        CHECK(fs::exists(out / "rates.csv"));
        CHECK(slurp(out / "verdict.json").find("\"pass\": false") != std::string::npos);
    }

    SECTION("schema violations exit 2 with key diagnostics") {
        const auto bad_key = write_config("bad_key.cfg", kRatesDisk + "frobnicate = 1\n");
        CHECK(run_cli("rates --config " + bad_key.string(), kWorkdir / "bk.log") == 2);
        const std::string log = slurp(kWorkdir / "bk.log");
        CHECK(log.find("bad_key.cfg:9") != std::string::npos);
        CHECK(log.find("frobnicate") != std::string::npos);

        const auto bad_order =
            write_config("bad_order.cfg", "study = rates\neps = 0.1, 0.2\n");
        CHECK(run_cli("rates --config " + bad_order.string(), kWorkdir / "bo.log") == 2);

        const auto mismatch = write_config("mismatch.cfg", kRatesDisk);
        CHECK(run_cli("scaling --config " + mismatch.string(), kWorkdir / "mm.log") == 2);

        CHECK(run_cli("rates --config " + (kWorkdir / "missing.cfg").string(),
                      kWorkdir / "mi.log") == 2);
    }

    SECTION("geometry guards exit 3 and name the focal bound") {
        const auto cfg = write_config(
            "guard.cfg",
            "study = rates\ncurve = circle\nh = 0.5\nd0 = 0.05\neps = 0.2, 0.1, 0.05\n");
        CHECK(run_cli("rates --config " + cfg.string(), kWorkdir / "guard.log") == 3);
        CHECK(slurp(kWorkdir / "guard.log").find("focal bound") != std::string::npos);
    }

    SECTION("echo round-trip is byte-stable") {
        const auto cfg = write_config("echo.cfg", kRatesDisk);
        REQUIRE(run_cli("rates --config " + cfg.string() + " --echo-config",
                        kWorkdir / "echo1.cfg") == 0);
        REQUIRE(run_cli("rates --config " + (kWorkdir / "echo1.cfg").string() +
                            " --echo-config",
                        kWorkdir / "echo2.cfg") == 0);
        CHECK(slurp(kWorkdir / "echo1.cfg") == slurp(kWorkdir / "echo2.cfg"));
        // and the echo carries the documented defaults
        const std::string echo = slurp(kWorkdir / "echo1.cfg");
        CHECK(echo.find("n_b = 128") != std::string::npos);
        CHECK(echo.find("m = 4") != std::string::npos);
        CHECK(echo.find("solver_tol = 1e-10") != std::string::npos);
    }

    SECTION("solve writes field exports and the energy report") {
        const auto cfg = write_config("solve.cfg",
                                      "study = solve\ncurve = circle\nh = 0.2\nd0 = 0.5\n"
                                      "source = one\neps = 0.05\nn_b = 64\n");
        const auto out = kWorkdir / "solve_out";
        CHECK(run_cli("solve --config " + cfg.string() + " --out " + out.string(),
                      kWorkdir / "solve.log") == 0);
        CHECK(slurp(out / "solution.csv").rfind("# schema: field v1\n", 0) == 0);
        CHECK(slurp(out / "profile.csv").rfind("# schema: reference-field v1\n", 0) == 0);
        const std::string report = slurp(out / "report.json");
        CHECK(report.find("identity_residual_rel") != std::string::npos);
        CHECK(report.find("h1_bound_quantity") != std::string::npos);
    }

    SECTION("optimize writes the trace and the recovered profile") {
        const auto cfg = write_config(
            "opt.cfg",
            "study = optimize\ncurve = circle\nh = 0.2\nd0 = 0.5\nsource = one\n"
            "eps = 0.1\nmass = 1.2566370614359172\nh_min = 0.05\n");
        const auto out = kWorkdir / "opt_out";
        CHECK(run_cli("optimize --config " + cfg.string() + " --out " + out.string(),
                      kWorkdir / "opt.log") == 0);
        CHECK(slurp(out / "trace.csv").rfind("# schema: optimize-trace v1\n", 0) == 0);
        CHECK(slurp(out / "h_star.csv").rfind("# schema: profile v1\n", 0) == 0);
    }
}

TEST_CASE("config parse and echo round-trip in process") {
    fs::create_directories(kWorkdir);
    const fs::path p = kWorkdir / "roundtrip.cfg";
    {
        std::ofstream out(p);
        out << "study = scaling\ncurve = ellipse\nax = 2\nay = 1\nd0 = 0.45\n"
            << "h = 0.2\nh_a = 0.05, -0.01\neps = 0.2, 0.1\nn_b = 512\n"
            << "tol_slope = 0.8\nout = somewhere/else\n";
    }
    const auto rc = layerlab::io::parse_config(p.string());
    layerlab::io::validate_schema(rc);
    CHECK(rc.study == "scaling");
    CHECK(rc.h_a == std::vector<double>{0.05, -0.01});
    CHECK(rc.out == "somewhere/else");

    const std::string echo = layerlab::io::echo_config(rc);
    const fs::path p2 = kWorkdir / "roundtrip_echo.cfg";
    { std::ofstream out(p2); out << echo; }
    const auto rc2 = layerlab::io::parse_config(p2.string());
    CHECK(layerlab::io::echo_config(rc2) == echo);
}
