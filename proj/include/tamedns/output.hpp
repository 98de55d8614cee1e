#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tamedns/config.hpp"
#include "tamedns/diagnostics.hpp"
#include "tamedns/grid.hpp"

namespace tamedns {

// All floating-point output goes through this: 17 significant digits, enough
// to round-trip any double exactly, and deterministic across reruns.
inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += ch;
        }
    }
    return out;
}

// Minimal deterministic JSON writer: fixed key order, %.17g numbers, no
// stray whitespace. (A general-purpose serializer would re-format numbers
// with shortest-round-trip rules, which breaks the 17-digit contract.)
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}

    void begin_object() { sep(); os_ << '{'; fresh_ = true; tight_ = true; }
    void end_object() { os_ << '}'; fresh_ = false; tight_ = false; }
    void begin_array() { sep(); os_ << '['; fresh_ = true; tight_ = true; }
    void end_array() { os_ << ']'; fresh_ = false; tight_ = false; }

    void key(const std::string& k) {
        sep();
        os_ << '"' << json_escape(k) << "\":";
        tight_ = true;
    }

    void value(double x) { sep(); os_ << fmt17(x); }
    void value(long x) { sep(); os_ << x; }
    void value(int x) { sep(); os_ << x; }
    void value(bool b) { sep(); os_ << (b ? "true" : "false"); }
    void value(const std::string& s) { sep(); os_ << '"' << json_escape(s) << '"'; }
    void value(const char* s) { value(std::string(s)); }
    void null() { sep(); os_ << "null"; }
    void value(const std::optional<double>& x) {
        if (x) value(*x);
        else null();
    }
    void value(const std::optional<bool>& x) {
        if (x) value(*x);
        else null();
    }

    template <typename T>
    void field(const std::string& k, const T& v) {
        key(k);
        value(v);
    }

private:
    void sep() {
        // consuming the key/opener slot also marks the container non-empty
        if (tight_) { tight_ = false; fresh_ = false; return; }
        if (!fresh_) os_ << ',';
        fresh_ = false;
    }

    std::ostream& os_;
    bool fresh_ = true;
    bool tight_ = false;
};

}  // namespace detail

inline const char* timeseries_header() {
    return "t,h0sq,h1sq,h2sq,grad_sq,sup_u,taming_dissipation,forcing_power,activation";
}

inline std::string timeseries_row(const DiagnosticsSample& s) {
    std::string out;
    out += fmt17(s.t);
    out += ',';
    out += fmt17(s.h0sq);
    out += ',';
    out += fmt17(s.h1sq);
    out += ',';
    out += fmt17(s.h2sq);
    out += ',';
    out += fmt17(s.grad_sq);
    out += ',';
    out += fmt17(s.sup_u);
    out += ',';
    out += fmt17(s.taming_dissipation);
    out += ',';
    out += fmt17(s.forcing_power);
    out += ',';
    out += s.activation ? '1' : '0';
    return out;
}

inline void write_timeseries_csv(const std::string& path,
                                 const std::vector<DiagnosticsSample>& samples) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << timeseries_header() << '\n';
    for (const auto& s : samples) out << timeseries_row(s) << '\n';
}

namespace detail {

inline void emit_config(JsonWriter& w, const SimConfig& cfg) {
    w.key("config");
    w.begin_object();
    w.field("grid_size", cfg.grid_size);
    w.field("nu", cfg.nu);
    w.field("taming_enabled", cfg.taming_enabled);
    w.field("taming_n", cfg.taming_n);
    w.field("t_end", cfg.t_end);
    w.field("cfl", cfg.cfl);
    w.field("dt_max", cfg.dt_max);
    w.field("dt_min", cfg.dt_min);
    w.field("sample_interval", cfg.sample_interval);
    w.field("scenario", cfg.scenario.name);
    w.field("scenario_amplitude", cfg.scenario.amplitude);
    w.field("scenario_k0", cfg.scenario.k0);
    w.field("scenario_seed", static_cast<long>(cfg.scenario.seed));
    w.field("forcing_kind", cfg.forcing.kind);
    w.field("forcing_amplitude", cfg.forcing.amplitude);
    w.field("forcing_mode", cfg.forcing.mode);
    w.field("forcing_omega", cfg.forcing.omega);
    w.end_object();
}

inline void emit_summary(JsonWriter& w, const RunSummary& s) {
    w.begin_object();
    w.field("initial_h0sq", s.initial_h0sq);
    w.field("final_h0sq", s.final_h0sq);
    w.field("final_t", s.final_t);
    w.field("steps", s.steps);
    w.field("sup_h0sq", s.sup_h0sq);
    w.field("sup_h1sq", s.sup_h1sq);
    w.field("sup_h2sq", s.sup_h2sq);
    w.field("sup_grad_sq", s.sup_grad_sq);
    w.field("sup_u_max", s.sup_u_max);
    w.field("int_h1sq", s.int_h1sq);
    w.field("int_h2sq", s.int_h2sq);
    w.field("int_f_h0norm", s.int_f_h0norm);
    w.field("int_viscous", s.int_viscous);
    w.field("int_taming", s.int_taming);
    w.field("int_forcing", s.int_forcing);
    w.field("energy_residual_max", s.energy_residual_max);
    w.field("energy_residual_absolute", s.energy_residual_absolute);
    w.field("activation_measure", s.activation_measure);
    w.field("first_activation_time", s.first_activation_time);
    w.field("agmon_ratio_max", s.agmon_ratio_max);
    w.field("l2_bound_ok", s.l2_bound_ok);
    w.field("l2_bound_worst_slack", s.l2_bound_worst_slack);
    w.field("h0_monotone", s.h0_monotone);
    w.end_object();
}

}  // namespace detail

inline void write_summary_json(const std::string& path, const SimConfig& cfg,
                               const RunSummary& s) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    detail::JsonWriter w(out);
    w.begin_object();
    detail::emit_config(w, cfg);
    w.key("summary");
    detail::emit_summary(w, s);
    w.end_object();
    out << '\n';
}

inline void write_failure_json(const std::string& path, const SimConfig& cfg,
                               const BlowupError& e) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    detail::JsonWriter w(out);
    w.begin_object();
    detail::emit_config(w, cfg);
    w.key("failure");
    w.begin_object();
    w.field("kind", "blow_up");
    w.field("t", e.t());
    w.field("sup_u", e.sup_u());
    w.field("message", std::string(e.what()));
    w.end_object();
    w.end_object();
    out << '\n';
}

}  // namespace tamedns
