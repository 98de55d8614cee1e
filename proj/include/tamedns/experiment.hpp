#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "tamedns/analysis.hpp"
#include "tamedns/checkpoint.hpp"
#include "tamedns/config.hpp"
#include "tamedns/integrator.hpp"
#include "tamedns/output.hpp"
#include "tamedns/scenarios.hpp"

namespace tamedns {

// Output root: config's output.dir, optionally re-rooted under the
// TAMEDNS_OUTPUT_ROOT environment variable.
inline std::string resolve_output_dir(const SimConfig& cfg) {
    const char* root = std::getenv("TAMEDNS_OUTPUT_ROOT");
    if (root && *root)
        return (std::filesystem::path(root) / cfg.output_dir).string();
    return cfg.output_dir;
}

struct ExperimentResult {
    int exit_code = 0;  // 0 ok, 3 blow-up, 4 check failure
    std::string output_dir;
};

namespace detail {

inline std::string label_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

// Runs one configured simulation into `dir`: streams timeseries.csv row by
// row (so partial output survives a blow-up), writes summary.json on
// success or failure.json on blow-up (then rethrows).
inline RunRecord execute_run(const SimConfig& cfg, const std::string& dir,
                             bool store_fields, bool store_pressure,
                             const TimeState* resume_from = nullptr) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    const GridSpec grid = resume_from ? resume_from->u.grid : cfg.grid();
    const TamingProfile profile(cfg.nu, cfg.taming_n, cfg.taming_enabled);

    std::ofstream csv(dir + "/timeseries.csv");
    if (!csv) throw ConfigError("cannot open for writing: " + dir + "/timeseries.csv");
    csv << timeseries_header() << '\n';

    RunOptions opts;
    opts.store_fields = store_fields;
    opts.store_pressure = store_pressure;
    opts.sample_sink = [&csv](const DiagnosticsSample& s) {
        csv << timeseries_row(s) << '\n';
        csv.flush();
    };
    long ckpt_counter = 0;
    opts.checkpoint_stride = cfg.checkpoint_stride;
    if (cfg.checkpoint_stride > 0) {
        opts.checkpoint_sink = [&](const TimeState& st) {
            Checkpoint ck;
            ck.state = st;
            ck.nu = cfg.nu;
            ck.taming_n = cfg.taming_n;
            ck.taming_enabled = cfg.taming_enabled;
            char name[64];
            std::snprintf(name, sizeof(name), "ckpt_%06ld.tns", ++ckpt_counter);
            save_checkpoint(dir + "/" + name, ck);
        };
    }

    try {
        RunRecord rec;
        if (resume_from) {
            rec = run_resumed(*resume_from, cfg.nu, profile, cfg.forcing, cfg.t_end,
                              cfg.sample_interval, cfg.step_policy(), opts);
        } else {
            const SpectralVelocity u0 = make_initial(cfg.scenario, grid);
            rec = run(u0, cfg.nu, profile, cfg.forcing, cfg.t_end,
                      cfg.sample_interval, cfg.step_policy(), opts);
        }
        write_summary_json(dir + "/summary.json", cfg, rec.summary);
        return rec;
    } catch (const BlowupError& e) {
        csv.flush();
        write_failure_json(dir + "/failure.json", cfg, e);
        throw;
    }
}

}  // namespace detail

// ---- experiment kinds -------------------------------------------------

inline ExperimentResult experiment_run(const SimConfig& cfg) {
    ExperimentResult res;
    res.output_dir = resolve_output_dir(cfg);
    try {
        detail::execute_run(cfg, res.output_dir + "/run", cfg.store_fields, false);
    } catch (const BlowupError&) {
        res.exit_code = 3;
    }
    return res;
}

inline ExperimentResult experiment_sweep_taming(const SimConfig& cfg) {
    namespace fs = std::filesystem;
    ExperimentResult res;
    res.output_dir = resolve_output_dir(cfg);
    fs::create_directories(res.output_dir);

    SimConfig member = cfg;

    // untamed reference for trajectory distances
    member.taming_enabled = false;
    RunRecord ref;
    try {
        ref = detail::execute_run(member, res.output_dir + "/untamed", true, false);
    } catch (const BlowupError&) {
        res.exit_code = 3;
        return res;
    }

    std::vector<std::pair<double, RunSummary>> by_n;
    std::vector<double> activation, distances;
    for (double n : cfg.n_values) {
        member.taming_enabled = true;
        member.taming_n = n;
        RunRecord rec;
        try {
            rec = detail::execute_run(member,
                                      res.output_dir + "/N_" + detail::label_number(n),
                                      true, false);
        } catch (const BlowupError&) {
            res.exit_code = 3;
            return res;
        }
        by_n.emplace_back(n, rec.summary);
        activation.push_back(rec.summary.activation_measure);
        distances.push_back(compare_runs(rec, ref));
    }

    // activation measure must not increase with N (one sample of slack)
    bool act_ok = true;
    for (size_t i = 1; i < activation.size(); ++i)
        act_ok = act_ok &&
                 activation[i] <= activation[i - 1] + cfg.sample_interval + 1e-12;
    bool dist_ok = true;
    for (size_t i = 1; i < distances.size(); ++i)
        dist_ok = dist_ok && distances[i] <= distances[i - 1] + 1e-12;

    bool growth_ok = true;
    GrowthReport h1, h2, l2h1;
    const bool have_growth = by_n.size() >= 3;
    if (have_growth) {
        h1 = verify_h1_growth(by_n);
        h2 = verify_h2_growth(by_n);
        l2h1 = verify_l2h1_bound(by_n);
        growth_ok = h1.ok && h2.ok && l2h1.ok;
    }

    std::ofstream out(res.output_dir + "/sweep.json");
    if (!out) throw ConfigError("cannot open for writing: sweep.json");
    detail::JsonWriter w(out);
    w.begin_object();
    w.field("experiment", "sweep_taming");
    w.key("n_values");
    w.begin_array();
    for (double n : cfg.n_values) w.value(n);
    w.end_array();
    w.key("runs");
    w.begin_array();
    for (const auto& [n, s] : by_n) {
        w.begin_object();
        w.field("taming_n", n);
        w.key("summary");
        detail::emit_summary(w, s);
        w.end_object();
    }
    w.end_array();
    w.key("activation_measures");
    w.begin_array();
    for (double a : activation) w.value(a);
    w.end_array();
    w.field("activation_non_increasing", act_ok);
    w.key("distance_to_untamed");
    w.begin_array();
    for (double d : distances) w.value(d);
    w.end_array();
    w.field("distance_non_increasing", dist_ok);
    auto emit_growth = [&](const char* name, const GrowthReport& rep) {
        w.key(name);
        if (!have_growth) {
            w.null();
            return;
        }
        w.begin_object();
        w.key("ratios");
        w.begin_array();
        for (double r : rep.ratios) w.value(r);
        w.end_array();
        w.field("fitted_exponent", rep.fitted_exponent);
        w.field("slack_factor", rep.slack_factor);
        w.field("ok", rep.ok);
        w.end_object();
    };
    emit_growth("h1_growth", h1);
    emit_growth("h2_growth", h2);
    emit_growth("l2h1_bound", l2h1);
    w.end_object();
    out << '\n';

    if (!(act_ok && dist_ok && growth_ok)) res.exit_code = 4;
    return res;
}

inline ExperimentResult experiment_sweep_resolution(const SimConfig& cfg) {
    namespace fs = std::filesystem;
    ExperimentResult res;
    res.output_dir = resolve_output_dir(cfg);
    fs::create_directories(res.output_dir);

    std::vector<SpectralVelocity> finals;
    std::vector<std::pair<int, RunSummary>> by_m;
    SimConfig member = cfg;
    for (int m : cfg.m_values) {
        member.grid_size = m;
        RunRecord rec;
        try {
            rec = detail::execute_run(member,
                                      res.output_dir + "/M_" + std::to_string(m),
                                      false, false);
        } catch (const BlowupError&) {
            res.exit_code = 3;
            return res;
        }
        finals.push_back(std::move(rec.final_state.u));
        by_m.emplace_back(m, rec.summary);
    }

    std::vector<double> dist;
    for (size_t i = 1; i < finals.size(); ++i)
        dist.push_back(spectral_distance(finals[i - 1], finals[i]));
    bool decreasing = true;
    for (size_t i = 1; i < dist.size(); ++i)
        decreasing = decreasing && dist[i] <= dist[i - 1];

    std::ofstream out(res.output_dir + "/sweep.json");
    if (!out) throw ConfigError("cannot open for writing: sweep.json");
    detail::JsonWriter w(out);
    w.begin_object();
    w.field("experiment", "sweep_resolution");
    w.key("m_values");
    w.begin_array();
    for (int m : cfg.m_values) w.value(m);
    w.end_array();
    w.key("runs");
    w.begin_array();
    for (const auto& [m, s] : by_m) {
        w.begin_object();
        w.field("grid_size", m);
        w.key("summary");
        detail::emit_summary(w, s);
        w.end_object();
    }
    w.end_array();
    w.key("successive_distances");
    w.begin_array();
    for (double d : dist) w.value(d);
    w.end_array();
    w.field("distances_decreasing", decreasing);
    w.end_object();
    out << '\n';

    if (!decreasing) res.exit_code = 4;
    return res;
}

inline ExperimentResult experiment_compare(const SimConfig& cfg) {
    namespace fs = std::filesystem;
    ExperimentResult res;
    res.output_dir = resolve_output_dir(cfg);
    fs::create_directories(res.output_dir);

    SimConfig member = cfg;
    member.taming_enabled = true;
    RunRecord tamed;
    RunRecord untamed;
    try {
        tamed = detail::execute_run(member, res.output_dir + "/tamed", true, false);
        member.taming_enabled = false;
        untamed = detail::execute_run(member, res.output_dir + "/untamed", true, false);
    } catch (const BlowupError&) {
        res.exit_code = 3;
        return res;
    }

    const double distance = compare_runs(tamed, untamed, cfg.region);
    double max_taming = 0.0;
    for (const auto& s : tamed.samples)
        max_taming = std::max(max_taming, s.taming_dissipation);

    std::ofstream out(res.output_dir + "/compare.json");
    if (!out) throw ConfigError("cannot open for writing: compare.json");
    detail::JsonWriter w(out);
    w.begin_object();
    w.field("experiment", "compare");
    w.field("taming_n", cfg.taming_n);
    w.key("region");
    w.begin_array();
    for (double b : cfg.region.bounds) w.value(b);
    w.end_array();
    w.field("distance", distance);
    w.field("max_taming_dissipation", max_taming);
    w.end_object();
    out << '\n';
    return res;
}

inline ExperimentResult experiment_resume(const SimConfig& cfg,
                                          const std::string& checkpoint_path) {
    ExperimentResult res;
    res.output_dir = resolve_output_dir(cfg);
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    if (ck.state.u.grid.size != cfg.grid_size)
        throw ConfigError("resume: checkpoint grid size " +
                          std::to_string(ck.state.u.grid.size) +
                          " does not match config " + std::to_string(cfg.grid_size));
    if (ck.nu != cfg.nu)
        throw ConfigError("resume: checkpoint nu does not match config");
    if (ck.taming_n != cfg.taming_n || ck.taming_enabled != cfg.taming_enabled)
        throw ConfigError("resume: checkpoint taming parameters do not match config");
    if (ck.state.t >= cfg.t_end)
        throw ConfigError("resume: checkpoint time is already past time.t_end");
    try {
        detail::execute_run(cfg, res.output_dir + "/resumed", cfg.store_fields, false,
                            &ck.state);
    } catch (const BlowupError&) {
        res.exit_code = 3;
    }
    return res;
}

// Taming-profile contract check + CSV table (r, g, g', lower-bound slack).
// Returns false (CLI exit 4) if any sampled point violates the contract.
inline bool check_gn(double nu, double taming_n, double r_max, int samples,
                     const std::string& csv_path) {
    if (samples < 2) throw ConfigError("check-gn: need at least 2 samples");
    if (!(r_max > taming_n + 1.0))
        throw ConfigError("check-gn: r_max must exceed N + 1");
    const TamingProfile profile(nu, taming_n, true);

    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot open for writing: " + csv_path);
    out << "r,g,g_prime,lower_bound_slack\n";

    bool ok = true;
    double prev_g = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double r = r_max * static_cast<double>(i) / (samples - 1);
        const double g = profile.eval_g(r);
        const double gp = profile.eval_g_prime(r);
        const double slack = profile.lower_bound_slack(r);
        out << fmt17(r) << ',' << fmt17(g) << ',' << fmt17(gp) << ',' << fmt17(slack)
            << '\n';
        if (r <= taming_n && g != 0.0) ok = false;
        if (r >= taming_n + 1.0 && std::abs(g - (r - taming_n - 0.5) / nu) > 1e-12)
            ok = false;
        if (gp < 0.0 || gp > 1.0 / nu + 1e-12) ok = false;
        if (slack < -1e-10) ok = false;
        if (i > 0 && g < prev_g - 1e-12) ok = false;
        prev_g = g;
    }
    return ok;
}

inline ExperimentResult run_experiment(const SimConfig& cfg) {
    cfg.validate();
    if (cfg.experiment == "run") return experiment_run(cfg);
    if (cfg.experiment == "sweep_taming") return experiment_sweep_taming(cfg);
    if (cfg.experiment == "sweep_resolution") return experiment_sweep_resolution(cfg);
    return experiment_compare(cfg);
}

}  // namespace tamedns
