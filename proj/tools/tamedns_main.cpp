// Command-line driver. Subcommands:
//   run               single simulation
//   sweep-taming      one run per taming level, plus an untamed reference
//   sweep-resolution  one run per grid size, fixed time step
//   compare           tamed vs untamed trajectory distance over a region
//   check-gn          taming-profile contract check + CSV table
//   resume            continue a run from a checkpoint
// Exit codes: 0 success, 2 configuration error, 3 blow-up, 4 check failure.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tamedns/tamedns.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path,
                    "key = value configuration file");
    cmd->add_option("-s,--set", args.overrides,
                    "override, key=value (repeatable; applied after the file)");
}

int dispatch(const CommonArgs& args, const std::string& kind,
             const std::string& checkpoint) {
    tamedns::SimConfig cfg = tamedns::parse_config(args.config_path, args.overrides);
    cfg.experiment = kind == "resume" ? std::string("run") : kind;
    cfg.validate();
    tamedns::ExperimentResult res;
    if (kind == "resume")
        res = tamedns::experiment_resume(cfg, checkpoint);
    else
        res = tamedns::run_experiment(cfg);
    std::cout << "artifacts written to " << res.output_dir << "\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tamed Navier-Stokes pseudo-spectral simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_n_args, sweep_m_args, compare_args, resume_args;
    std::string checkpoint_path;
    double gn_nu = 1.0, gn_n = 1.0, gn_rmax = 0.0;
    int gn_samples = 10001;
    std::string gn_out = "gn_profile.csv";

    CLI::App* c_run = app.add_subcommand("run", "single simulation");
    add_common(c_run, run_args);

    CLI::App* c_sn = app.add_subcommand("sweep-taming",
                                        "sweep over taming levels N");
    add_common(c_sn, sweep_n_args);

    CLI::App* c_sm = app.add_subcommand("sweep-resolution",
                                        "sweep over grid resolutions");
    add_common(c_sm, sweep_m_args);

    CLI::App* c_cmp = app.add_subcommand("compare",
                                         "tamed vs untamed trajectory distance");
    add_common(c_cmp, compare_args);

    CLI::App* c_gn = app.add_subcommand("check-gn",
                                        "taming profile contract check + CSV");
    c_gn->add_option("--nu", gn_nu, "viscosity")->check(CLI::PositiveNumber);
    c_gn->add_option("--taming-n", gn_n, "taming level N")
        ->check(CLI::NonNegativeNumber);
    c_gn->add_option("--r-max", gn_rmax, "table range [0, r_max] (default N + 10)");
    c_gn->add_option("--samples", gn_samples, "number of table rows");
    c_gn->add_option("-o,--out", gn_out, "output CSV path");

    CLI::App* c_res = app.add_subcommand("resume", "continue from a checkpoint");
    add_common(c_res, resume_args);
    c_res->add_option("--checkpoint", checkpoint_path, "checkpoint file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_run->parsed()) return dispatch(run_args, "run", "");
        if (c_sn->parsed()) return dispatch(sweep_n_args, "sweep_taming", "");
        if (c_sm->parsed()) return dispatch(sweep_m_args, "sweep_resolution", "");
        if (c_cmp->parsed()) return dispatch(compare_args, "compare", "");
        if (c_res->parsed()) return dispatch(resume_args, "resume", checkpoint_path);
        if (c_gn->parsed()) {
            if (gn_rmax <= 0.0) gn_rmax = gn_n + 10.0;
            const bool ok = tamedns::check_gn(gn_nu, gn_n, gn_rmax, gn_samples, gn_out);
            std::cout << (ok ? "taming profile contract: ok"
                             : "taming profile contract: VIOLATED")
                      << " (table: " << gn_out << ")\n";
            return ok ? 0 : 4;
        }
    } catch (const tamedns::BlowupError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const tamedns::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
