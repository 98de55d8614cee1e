// Configuration parsing, checkpoint round trips, artifact schemas, and the
// command-line binary's exit-code contract (exercised through std::system).

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tamedns/checkpoint.hpp"
#include "tamedns/config.hpp"
#include "tamedns/experiment.hpp"
#include "tamedns/integrator.hpp"
#include "tamedns/output.hpp"
#include "tamedns/scenarios.hpp"

using namespace tamedns;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tamedns_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(TAMEDNS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

SimConfig quick_cfg(const fs::path& out) {
    SimConfig cfg;
    cfg.grid_size = 8;
    cfg.t_end = 0.05;
    cfg.sample_interval = 0.025;
    cfg.dt_max = 5e-3;
    cfg.scenario.name = "taylor_green";
    cfg.scenario.amplitude = 1.0;
    cfg.output_dir = out.string();
    return cfg;
}

}  // namespace

TEST_CASE("config defaults and file parsing") {
    const SimConfig def = parse_config("");
    CHECK(def.grid_size == 32);
    CHECK(def.nu == 1.0);
    CHECK(def.taming_enabled);
    CHECK(def.experiment == "run");

    const fs::path dir = fresh_dir("cfg");
    {
        std::ofstream f(dir / "a.cfg");
        f << "# comment line\n"
          << "grid.size = 16\n"
          << "physics.nu = 0.25\n"
          << "\n"
          << "taming.N = 4   \n"
          << "scenario.name = random_spectrum\n"
          << "scenario.seed = 42\n"
          << "experiment.n_values = 1, 2, 8\n"
          << "experiment.region = 0, 3.1, 0, 6.2, 1, 2\n";
    }
    const SimConfig cfg = parse_config((dir / "a.cfg").string());
    CHECK(cfg.grid_size == 16);
    CHECK(cfg.nu == 0.25);
    CHECK(cfg.taming_n == 4.0);
    CHECK(cfg.scenario.name == "random_spectrum");
    CHECK(cfg.scenario.seed == 42);
    REQUIRE(cfg.n_values.size() == 3);
    CHECK(cfg.n_values[2] == 8.0);
    CHECK(cfg.region.bounds[1] == 3.1);

    // overrides win over the file
    const SimConfig ov =
        parse_config((dir / "a.cfg").string(), {"physics.nu=2.0", "grid.size=8"});
    CHECK(ov.nu == 2.0);
    CHECK(ov.grid_size == 8);
}

TEST_CASE("config rejections carry the offending key") {
    const fs::path dir = fresh_dir("cfgbad");
    {
        std::ofstream f(dir / "bad.cfg");
        f << "grid.sizes = 16\n";
    }
    try {
        parse_config((dir / "bad.cfg").string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("grid.sizes") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config("", {"physics.nu=abc"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"taming.enabled=maybe"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"no_equals_sign"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"grid.size=17"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"time.cfl=1.5"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"time.dt_min=1", "time.dt_max=0.5"}),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("", {"scenario.name=vortex"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"experiment.kind=sweep"}), ConfigError);
    CHECK_THROWS_AS(
        parse_config("", {"experiment.kind=sweep_taming",
                          "experiment.n_values=4,2"}),
        ConfigError);
    CHECK_THROWS_AS(parse_config("", {"experiment.region=1,2,3"}), ConfigError);
    CHECK_THROWS_AS(parse_config("", {"forcing.kind=steady", "forcing.mode=40"}),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("/no/such/file.cfg"), ConfigError);
}

TEST_CASE("17-digit formatting round-trips doubles") {
    const double probes[] = {0.1,     1.0 / 3.0, 3.141592653589793, 1e-300,
                             -2.5e17, 5e-324,    -0.0,              1234.5678901234567};
    for (double x : probes) {
        const std::string s = fmt17(x);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(std::memcmp(&back, &x, sizeof x) == 0);
    }
}

TEST_CASE("timeseries row schema is stable") {
    DiagnosticsSample s;
    s.t = 0.5;
    s.h0sq = 0.25;
    s.h1sq = 2.0;
    s.h2sq = 4.0;
    s.grad_sq = 1.5;
    s.sup_u = 3.0;
    s.taming_dissipation = 0.0;
    s.forcing_power = 0.0;
    s.activation = true;
    CHECK(std::string(timeseries_header()) ==
          "t,h0sq,h1sq,h2sq,grad_sq,sup_u,taming_dissipation,forcing_power,activation");
    CHECK(timeseries_row(s) == "0.5,0.25,2,4,1.5,3,0,0,1");

    s.h0sq = 1.0 / 3.0;
    s.activation = false;
    const std::string row = timeseries_row(s);
    const size_t a = row.find(',');
    const size_t b = row.find(',', a + 1);
    const double back = std::strtod(row.substr(a + 1, b - a - 1).c_str(), nullptr);
    CHECK(back == 1.0 / 3.0);

    const fs::path dir = fresh_dir("csv");
    write_timeseries_csv((dir / "t.csv").string(), {s, s});
    const std::string text = slurp(dir / "t.csv");
    CHECK(text == std::string(timeseries_header()) + "\n" + row + "\n" + row + "\n");
}

TEST_CASE("checkpoint round trip is bit exact") {
    GridSpec g(16);
    Scenario sc;
    sc.name = "random_spectrum";
    sc.amplitude = 3.0;
    sc.seed = 11;

    Checkpoint ck;
    ck.state.t = 0.375;
    ck.state.step_count = 123;
    ck.state.u = make_initial(sc, g);
    ck.nu = 0.75;
    ck.taming_n = 2.0;
    ck.taming_enabled = true;

    const fs::path dir = fresh_dir("ckpt");
    const std::string path = (dir / "state.tns").string();
    save_checkpoint(path, ck);

    const Checkpoint back = load_checkpoint(path);
    CHECK(back.state.t == ck.state.t);
    CHECK(back.state.step_count == 123);
    CHECK(back.nu == 0.75);
    CHECK(back.taming_n == 2.0);
    CHECK(back.taming_enabled);
    REQUIRE(back.state.u.grid.size == 16);
    CHECK(back.state.u.divfree);
    for (int j = 0; j < 3; ++j)
        for (size_t i = 0; i < ck.state.u.c[j].size(); ++i)
            CHECK(back.state.u.c[j][i] == ck.state.u.c[j][i]);
}

TEST_CASE("checkpoint loader rejects damaged files") {
    GridSpec g(8);
    Scenario sc;
    sc.name = "taylor_green";
    Checkpoint ck;
    ck.state.u = make_initial(sc, g);

    const fs::path dir = fresh_dir("ckptbad");
    const std::string path = (dir / "state.tns").string();
    save_checkpoint(path, ck);
    const std::string bytes = slurp(path);

    SECTION("truncated payload") {
        std::ofstream out(dir / "trunc.tns", std::ios::binary);
        out.write(bytes.data(), static_cast<long>(bytes.size() - 48));
        out.close();
        CHECK_THROWS_AS(load_checkpoint((dir / "trunc.tns").string()), ConfigError);
    }
    SECTION("trailing garbage") {
        std::ofstream out(dir / "trail.tns", std::ios::binary);
        out.write(bytes.data(), static_cast<long>(bytes.size()));
        const double extra = 1.0;
        out.write(reinterpret_cast<const char*>(&extra), sizeof extra);
        out.close();
        CHECK_THROWS_AS(load_checkpoint((dir / "trail.tns").string()), ConfigError);
    }
    SECTION("header tampering") {
        std::string mod = bytes;
        const size_t pos = mod.find("tamedns-ckpt-1");
        REQUIRE(pos != std::string::npos);
        mod[pos + 13] = '7';
        std::ofstream out(dir / "hdr.tns", std::ios::binary);
        out.write(mod.data(), static_cast<long>(mod.size()));
        out.close();
        CHECK_THROWS_AS(load_checkpoint((dir / "hdr.tns").string()), ConfigError);
    }
    SECTION("symmetry violation in the payload") {
        std::string mod = bytes;
        // flip the sign of the first sizeable coefficient; its conjugate
        // partner elsewhere in the payload no longer matches
        const size_t payload = mod.find('\n') + 1;
        size_t target = 0;
        for (size_t off = payload; off + 8 <= mod.size(); off += 8) {
            double v;
            std::memcpy(&v, mod.data() + off, 8);
            if (std::abs(v) > 0.1) {
                target = off + 7;  // big-end byte of the little-endian double
                break;
            }
        }
        REQUIRE(target != 0);
        mod[target] ^= static_cast<char>(0x80);
        std::ofstream out(dir / "herm.tns", std::ios::binary);
        out.write(mod.data(), static_cast<long>(mod.size()));
        out.close();
        bool caught = false;
        try {
            load_checkpoint((dir / "herm.tns").string());
        } catch (const ConfigError&) {
            caught = true;
        }
        CHECK(caught);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_checkpoint((dir / "nope.tns").string()), ConfigError);
    }
}

TEST_CASE("run experiment writes schema-complete artifacts deterministically") {
    const fs::path dir = fresh_dir("runexp");
    SimConfig cfg = quick_cfg(dir);

    const ExperimentResult r1 = run_experiment(cfg);
    CHECK(r1.exit_code == 0);
    const std::string csv1 = slurp(dir / "run" / "timeseries.csv");
    const std::string json1 = slurp(dir / "run" / "summary.json");

    // schema: header + one row per sample (0, 0.025, 0.05)
    CHECK(csv1.rfind("t,h0sq,", 0) == 0);
    CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 4);

    const auto doc = nlohmann::json::parse(json1);
    CHECK(doc.at("config").at("grid_size") == 8);
    CHECK(doc.at("config").at("scenario") == "taylor_green");
    const auto& sum = doc.at("summary");
    CHECK(sum.at("final_t").get<double>() == 0.05);
    CHECK(sum.at("steps").get<long>() >= 10);
    CHECK(sum.at("l2_bound_ok").get<bool>());
    CHECK(sum.at("h0_monotone").get<bool>());
    CHECK(sum.contains("agmon_ratio_max"));
    // step-resolution trapezoid floor at dt_max = 5e-3 sits near 2e-5
    CHECK(sum.at("energy_residual_max").get<double>() < 1e-4);
    // unactivated taming at amplitude 1, N = 1 on a decaying flow
    CHECK(sum.at("first_activation_time").is_null() ==
          (sum.at("activation_measure").get<double>() == 0.0));

    // byte-identical rerun
    fs::remove_all(dir);
    const ExperimentResult r2 = run_experiment(cfg);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(dir / "run" / "timeseries.csv") == csv1);
    CHECK(slurp(dir / "run" / "summary.json") == json1);
}

TEST_CASE("output root environment variable re-roots artifact paths") {
    const fs::path dir = fresh_dir("rooted");
    SimConfig cfg = quick_cfg(dir);
    cfg.output_dir = "nested/out";

    setenv("TAMEDNS_OUTPUT_ROOT", dir.c_str(), 1);
    const ExperimentResult r = run_experiment(cfg);
    unsetenv("TAMEDNS_OUTPUT_ROOT");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "nested" / "out" / "run" / "summary.json"));
}

TEST_CASE("blow-up produces a failure report and partial series") {
    const fs::path dir = fresh_dir("blow");
    SimConfig cfg = quick_cfg(dir);
    cfg.grid_size = 16;
    cfg.scenario.name = "shear_mode";
    cfg.scenario.amplitude = 50.0;
    cfg.dt_min = 1e-2;
    cfg.dt_max = 0.5;
    cfg.t_end = 1.0;
    cfg.sample_interval = 0.1;

    const ExperimentResult r = run_experiment(cfg);
    CHECK(r.exit_code == 3);
    const auto doc = nlohmann::json::parse(slurp(dir / "run" / "failure.json"));
    CHECK(doc.at("failure").at("kind") == "blow_up");
    CHECK(doc.at("failure").at("t").get<double>() == 0.0);
    const std::string csv = slurp(dir / "run" / "timeseries.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + t=0 row
    CHECK_FALSE(fs::exists(dir / "run" / "summary.json"));
}

TEST_CASE("resume experiment continues a checkpointed run") {
    const fs::path dir = fresh_dir("resume");
    SimConfig cfg = quick_cfg(dir);
    cfg.checkpoint_stride = 1;

    REQUIRE(run_experiment(cfg).exit_code == 0);
    const fs::path ck = dir / "run" / "ckpt_000001.tns";  // sample at t = 0.025
    REQUIRE(fs::exists(ck));
    REQUIRE(fs::exists(dir / "run" / "ckpt_000002.tns"));

    SimConfig rcfg = cfg;
    rcfg.checkpoint_stride = 0;
    const ExperimentResult r = experiment_resume(rcfg, ck.string());
    CHECK(r.exit_code == 0);

    // final rows agree bitwise: the resumed trajectory replays the original
    auto last_line = [](const std::string& text) {
        const size_t end = text.find_last_not_of('\n');
        const size_t start = text.rfind('\n', end);
        return text.substr(start + 1, end - start);
    };
    CHECK(last_line(slurp(dir / "resumed" / "timeseries.csv")) ==
          last_line(slurp(dir / "run" / "timeseries.csv")));

    // guards
    SimConfig wrong = rcfg;
    wrong.nu = 2.0;
    CHECK_THROWS_AS(experiment_resume(wrong, ck.string()), ConfigError);
    wrong = rcfg;
    wrong.grid_size = 16;
    CHECK_THROWS_AS(experiment_resume(wrong, ck.string()), ConfigError);
    wrong = rcfg;
    wrong.t_end = 0.01;
    CHECK_THROWS_AS(experiment_resume(wrong, ck.string()), ConfigError);
}

TEST_CASE("taming profile table export and contract check") {
    const fs::path dir = fresh_dir("gn");
    const std::string csv = (dir / "gn.csv").string();
    CHECK(check_gn(1.0, 1.0, 11.0, 401, csv));

    const std::string text = slurp(csv);
    CHECK(text.rfind("r,g,g_prime,lower_bound_slack", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 402);

    CHECK_THROWS_AS(check_gn(1.0, 1.0, 11.0, 1, csv), ConfigError);
    CHECK_THROWS_AS(check_gn(1.0, 5.0, 2.0, 100, csv), ConfigError);
}

TEST_CASE("command-line interface exit codes") {
    const fs::path dir = fresh_dir("cli");

    SECTION("successful run returns 0 and writes artifacts") {
        const int rc = run_cli(
            "run -s grid.size=8 -s time.t_end=0.05 -s time.sample_interval=0.025"
            " -s time.dt_max=5e-3 -s scenario.name=taylor_green -s output.dir=" +
            (dir / "a").string());
        CHECK(rc == 0);
        CHECK(fs::exists(dir / "a" / "run" / "summary.json"));
    }
    SECTION("unknown key returns 2") {
        CHECK(run_cli("run -s bogus.key=1") == 2);
    }
    SECTION("invalid value returns 2") {
        CHECK(run_cli("run -s time.cfl=7") == 2);
    }
    SECTION("blow-up returns 3") {
        const int rc = run_cli(
            "run -s grid.size=16 -s scenario.name=shear_mode"
            " -s scenario.amplitude=50 -s time.dt_min=1e-2 -s time.t_end=1"
            " -s output.dir=" +
            (dir / "b").string());
        CHECK(rc == 3);
    }
    SECTION("taming table check returns 0 and writes the table") {
        const int rc = run_cli("check-gn --nu 1 --taming-n 2 --samples 101 -o " +
                               (dir / "gn.csv").string());
        CHECK(rc == 0);
        CHECK(fs::exists(dir / "gn.csv"));
    }
    SECTION("resume through the CLI") {
        const std::string base =
            " -s grid.size=8 -s time.t_end=0.05 -s time.sample_interval=0.025"
            " -s time.dt_max=5e-3 -s scenario.name=taylor_green";
        REQUIRE(run_cli("run" + base + " -s output.checkpoint_stride=1 -s output.dir=" +
                        (dir / "c").string()) == 0);
        const int rc = run_cli("resume" + base + " --checkpoint " +
                               (dir / "c" / "run" / "ckpt_000001.tns").string() +
                               " -s output.dir=" + (dir / "c").string());
        CHECK(rc == 0);
        CHECK(fs::exists(dir / "c" / "resumed" / "summary.json"));
    }
    SECTION("missing required option returns 2") {
        CHECK(run_cli("resume") == 2);
    }
}
