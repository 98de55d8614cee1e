#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "tamedns/diagnostics.hpp"
#include "tamedns/dynamics.hpp"
#include "tamedns/field.hpp"
#include "tamedns/forcing.hpp"
#include "tamedns/grid.hpp"
#include "tamedns/taming.hpp"

namespace tamedns {

struct TimeState {
    double t = 0.0;
    long step_count = 0;
    SpectralVelocity u;
};

struct StepPolicy {
    double cfl = 0.5;      // dt <= cfl * dx / sup|u|
    double dt_max = 1e-2;
    double dt_min = 1e-9;  // CFL pushing dt below this is treated as blow-up

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 1.0))
            throw ConfigError("time.cfl must lie in (0, 1]");
        if (!(dt_max > 0.0)) throw ConfigError("time.dt_max must be positive");
        if (!(dt_min >= 0.0 && dt_min <= dt_max))
            throw ConfigError("time.dt_min must lie in [0, dt_max]");
    }
};

namespace detail {

// exp(-nu |k|^2 s) as a per-mode multiplier table
inline std::vector<double> heat_factor(const GridSpec& g, double nu, double s) {
    std::vector<double> e(g.n_spec(), 1.0);
    for_each_mode(g, [&](long idx, int k1, int k2, int k3, double) {
        const double ksq = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
        e[idx] = std::exp(-nu * ksq * s);
    });
    return e;
}

inline void apply_factor(SpectralVelocity& v, const std::vector<double>& e) {
    for (int j = 0; j < 3; ++j)
        for (size_t i = 0; i < v.c[j].size(); ++i) v.c[j][i] *= e[i];
}

inline SpectralVelocity with_factor(const SpectralVelocity& v,
                                    const std::vector<double>& e) {
    SpectralVelocity out = v;
    apply_factor(out, e);
    return out;
}

}  // namespace detail

// One integrating-factor RK4 step of size dt. The viscous semigroup
// exp(-nu |k|^2 s) is applied exactly; the classical RK4 tableau acts on the
// transformed variable v = exp(nu |k|^2 (t - t_n)) u-hat, which works out to
//
//   k1 = F(u_n, t)
//   k2 = F(E2 (u_n + dt/2 k1), t + dt/2)
//   k3 = F(E2 u_n + dt/2 k2,   t + dt/2)
//   k4 = F(E1 u_n + dt E2 k3,  t + dt)
//   u_{n+1} = E1 u_n + dt/6 (E1 k1 + 2 E2 (k2 + k3) + k4)
//
// with E1 = exp(-nu |k|^2 dt), E2 = exp(-nu |k|^2 dt/2) and F the non-viscous
// right-hand side. No factor with positive exponent ever appears, and a state
// on which F vanishes decays exactly by E1 per step.
inline void step(TimeState& state, double dt, double nu, const TamingProfile& profile,
                 const Forcing& forcing, const SpectralVelocity* forcing_pattern) {
    if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
    const GridSpec& g = state.u.grid;
    const auto e1 = detail::heat_factor(g, nu, dt);
    const auto e2 = detail::heat_factor(g, nu, 0.5 * dt);
    const double t = state.t;
    const double amp = forcing.amplitude;

    auto F = [&](const SpectralVelocity& v, double tt) {
        return nonlinear_rhs(v, profile, forcing_pattern,
                             amp * forcing.time_factor(tt));
    };

    const SpectralVelocity k1 = F(state.u, t);

    SpectralVelocity arg = state.u;
    add_scaled(arg, k1, 0.5 * dt);
    detail::apply_factor(arg, e2);
    const SpectralVelocity k2 = F(arg, t + 0.5 * dt);

    arg = detail::with_factor(state.u, e2);
    add_scaled(arg, k2, 0.5 * dt);
    const SpectralVelocity k3 = F(arg, t + 0.5 * dt);

    arg = detail::with_factor(state.u, e1);
    {
        SpectralVelocity k3e = detail::with_factor(k3, e2);
        add_scaled(arg, k3e, dt);
    }
    const SpectralVelocity k4 = F(arg, t + dt);

    SpectralVelocity next = detail::with_factor(state.u, e1);
    {
        SpectralVelocity acc = detail::with_factor(k1, e1);
        add_scaled(next, acc, dt / 6.0);
        acc = k2;
        add_scaled(acc, k3, 1.0);
        detail::apply_factor(acc, e2);
        add_scaled(next, acc, dt / 3.0);
        add_scaled(next, k4, dt / 6.0);
    }
    next.divfree = true;
    state.u = std::move(next);
    state.t = t + dt;
    state.step_count += 1;
}

// ---- full run with CFL control, sampling, and budget accumulation ---------

struct RunOptions {
    bool store_fields = false;    // keep the spectral velocity at each sample
    bool store_pressure = false;  // keep the recovered pressure at each sample
    int checkpoint_stride = 0;    // checkpoint every k-th sample (0 = never)
    std::function<void(const TimeState&)> checkpoint_sink;
    std::function<void(const DiagnosticsSample&)> sample_sink;  // flushed pre-blow-up
};

struct RunRecord {
    std::vector<DiagnosticsSample> samples;
    std::vector<SpectralVelocity> fields;
    std::vector<ScalarSpectralField> pressures;
    TimeState final_state;
    RunSummary summary;

    // context echoed for analysis passes
    double nu = 1.0;
    double taming_n = 0.0;
    bool taming_enabled = true;
    double t_end = 0.0;
    double sample_interval = 0.0;
};

namespace detail {

// everything the accumulators and samples need about one visited state
struct StateDiag {
    double sup = 0.0;
    double h0sq = 0.0, h1sq = 0.0, h2sq = 0.0, grad_sq = 0.0, lap_sq = 0.0;
    double taming_diss = 0.0;
    double forcing_power = 0.0;
    double f_norm = 0.0;
};

inline StateDiag eval_state(const SpectralVelocity& u, double t,
                            const TamingProfile& profile, const Forcing& forcing,
                            const SpectralVelocity* forcing_pattern) {
    StateDiag d;
    const GridSpec& g = u.grid;

    const PhysVector up = to_physical(u);
    const long n = g.n_phys();
    double sup_sq = 0.0;
    double tam = 0.0;
    if (profile.enabled()) {
        PhysScalar r(n);
        for (long x = 0; x < n; ++x) {
            const double m =
                up[0][x] * up[0][x] + up[1][x] * up[1][x] + up[2][x] * up[2][x];
            r[x] = m;
            sup_sq = std::max(sup_sq, m);
        }
        const PhysScalar gv = profile.eval_g_field(r);
        for (long x = 0; x < n; ++x) tam += gv[x] * r[x];
    } else {
        for (long x = 0; x < n; ++x) {
            const double m =
                up[0][x] * up[0][x] + up[1][x] * up[1][x] + up[2][x] * up[2][x];
            sup_sq = std::max(sup_sq, m);
        }
    }
    const double vol = two_pi * two_pi * two_pi;
    d.sup = std::sqrt(sup_sq);
    d.taming_diss = vol * tam / static_cast<double>(n);

    for_each_mode(g, [&](long idx, int k1, int k2, int k3, double w) {
        if (w == 0.0) return;
        const double ksq = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
        const double mag = std::norm(u.c[0][idx]) + std::norm(u.c[1][idx]) +
                           std::norm(u.c[2][idx]);
        const double wm = w * mag;
        d.h0sq += wm;
        d.h1sq += (1.0 + ksq) * wm;
        d.h2sq += (1.0 + ksq) * (1.0 + ksq) * wm;
        d.grad_sq += ksq * wm;
        d.lap_sq += ksq * ksq * wm;
    });
    d.h0sq *= vol;
    d.h1sq *= vol;
    d.h2sq *= vol;
    d.grad_sq *= vol;
    d.lap_sq *= vol;

    if (forcing_pattern && !forcing.is_zero()) {
        d.f_norm = forcing.h0_norm(t);
        d.forcing_power = forcing.amplitude * forcing.time_factor(t) *
                          l2_inner(*forcing_pattern, u);
    }
    return d;
}

}  // namespace detail

inline RunSummary summarize(const std::vector<DiagnosticsSample>& samples, double nu,
                            bool forcing_zero, double taming_n);

// Advances the given state to t_end, emitting a DiagnosticsSample at the
// start time, at every multiple of sample_interval, and at t_end. dt follows
// min(dt_max, cfl dx / sup|u|), clipped (without a blow-up check) to land
// exactly on sample times; a CFL-driven dt below dt_min raises BlowupError
// after flushing all samples through RunOptions::sample_sink. The cumulative
// budget integrals start at zero from the start time.
inline RunRecord run_resumed(const TimeState& start, double nu,
                             const TamingProfile& profile, const Forcing& forcing,
                             double t_end, double sample_interval,
                             const StepPolicy& policy, const RunOptions& opts = {}) {
    policy.validate();
    if (nu <= 0.0) throw ConfigError("run: nu must be positive");
    if (t_end < start.t) throw ConfigError("run: t_end must be >= the start time");
    if (!(sample_interval > 0.0))
        throw ConfigError("run: sample_interval must be positive");

    const GridSpec& g = start.u.grid;
    RunRecord rec;
    rec.nu = nu;
    rec.taming_n = profile.N();
    rec.taming_enabled = profile.enabled();
    rec.t_end = t_end;
    rec.sample_interval = sample_interval;

    TimeState state = start;

    const SpectralVelocity fpat = forcing.pattern(g);
    const SpectralVelocity* fp = forcing.is_zero() ? nullptr : &fpat;

    double cum_viscous = 0.0, cum_taming = 0.0, cum_forcing = 0.0;
    double cum_f_norm = 0.0, cum_h1sq = 0.0, cum_h2sq = 0.0;

    detail::StateDiag diag =
        detail::eval_state(state.u, state.t, profile, forcing, fp);

    auto emit = [&](long sample_index) {
        DiagnosticsSample s;
        s.t = state.t;
        s.h0sq = diag.h0sq;
        s.h1sq = diag.h1sq;
        s.h2sq = diag.h2sq;
        s.grad_sq = diag.grad_sq;
        s.sup_u = diag.sup;
        s.taming_dissipation = diag.taming_diss;
        s.forcing_power = diag.forcing_power;
        s.activation = diag.sup * diag.sup >= profile.N();
        s.lap_sq = diag.lap_sq;
        s.cums_valid = true;
        s.cum_viscous = cum_viscous;
        s.cum_taming = cum_taming;
        s.cum_forcing = cum_forcing;
        s.cum_f_norm = cum_f_norm;
        s.cum_h1sq = cum_h1sq;
        s.cum_h2sq = cum_h2sq;
        rec.samples.push_back(s);
        if (opts.sample_sink) opts.sample_sink(s);
        if (opts.store_fields) rec.fields.push_back(state.u);
        if (opts.store_pressure) rec.pressures.push_back(recover_pressure(state.u, profile));
        if (opts.checkpoint_stride > 0 && opts.checkpoint_sink && sample_index > 0 &&
            sample_index % opts.checkpoint_stride == 0)
            opts.checkpoint_sink(state);
    };

    emit(0);

    // first sample-interval multiple strictly past the start time
    long next_sample =
        static_cast<long>(std::floor(state.t / sample_interval +
                                     1e-9 * std::max(1.0, state.t))) + 1;
    const double dx = g.spacing();
    while (state.t < t_end - 1e-12 * std::max(1.0, t_end)) {
        const double target = std::min(next_sample * sample_interval, t_end);
        const double dt_cfl = policy.cfl * dx / (diag.sup + 1e-12);
        double dt = std::min(policy.dt_max, dt_cfl);
        if (dt < policy.dt_min)
            throw BlowupError(state.t, diag.sup, dt, policy.dt_min);
        bool hit_target = false;
        if (state.t + dt >= target - 1e-12 * std::max(1.0, target)) {
            dt = target - state.t;
            hit_target = true;
        }

        const detail::StateDiag prev = diag;
        step(state, dt, nu, profile, forcing, fp);
        if (hit_target) state.t = target;
        diag = detail::eval_state(state.u, state.t, profile, forcing, fp);

        cum_viscous += 0.5 * dt * nu * (prev.grad_sq + diag.grad_sq);
        cum_taming += 0.5 * dt * (prev.taming_diss + diag.taming_diss);
        cum_forcing += 0.5 * dt * (prev.forcing_power + diag.forcing_power);
        cum_f_norm += 0.5 * dt * (prev.f_norm + diag.f_norm);
        cum_h1sq += 0.5 * dt * (prev.h1sq + diag.h1sq);
        cum_h2sq += 0.5 * dt * (prev.h2sq + diag.h2sq);

        if (hit_target) {
            const bool at_interval =
                std::abs(target - next_sample * sample_interval) <=
                1e-9 * std::max(1.0, target);
            emit(next_sample);
            if (at_interval) next_sample += 1;
        }
    }

    rec.final_state = std::move(state);
    rec.summary = summarize(rec.samples, nu, forcing.is_zero(), profile.N());
    rec.summary.steps = rec.final_state.step_count;
    return rec;
}

inline RunRecord run(const SpectralVelocity& u0, double nu,
                     const TamingProfile& profile, const Forcing& forcing,
                     double t_end, double sample_interval, const StepPolicy& policy,
                     const RunOptions& opts = {}) {
    if (t_end < 0.0) throw ConfigError("run: t_end must be >= 0");
    TimeState start;
    start.u = u0;
    return run_resumed(start, nu, profile, forcing, t_end, sample_interval, policy,
                       opts);
}

// assembles the per-run summary from an emitted sample series
inline RunSummary summarize(const std::vector<DiagnosticsSample>& samples, double nu,
                            bool forcing_zero, double taming_n) {
    if (samples.empty()) throw ConfigError("summarize: no samples");
    RunSummary s;
    s.initial_h0sq = samples.front().h0sq;
    s.final_h0sq = samples.back().h0sq;
    s.final_t = samples.back().t;
    for (const auto& d : samples) {
        s.sup_h0sq = std::max(s.sup_h0sq, d.h0sq);
        s.sup_h1sq = std::max(s.sup_h1sq, d.h1sq);
        s.sup_h2sq = std::max(s.sup_h2sq, d.h2sq);
        s.sup_grad_sq = std::max(s.sup_grad_sq, d.grad_sq);
        s.sup_u_max = std::max(s.sup_u_max, d.sup_u);
    }
    const auto& last = samples.back();
    if (last.cums_valid) {
        s.int_h1sq = last.cum_h1sq;
        s.int_h2sq = last.cum_h2sq;
        s.int_f_h0norm = last.cum_f_norm;
        s.int_viscous = last.cum_viscous;
        s.int_taming = last.cum_taming;
        s.int_forcing = last.cum_forcing;
    }
    const EnergyResidual er = energy_budget_residual(samples, nu);
    s.energy_residual_max = er.value;
    s.energy_residual_absolute = er.absolute;
    s.activation_measure = activation_measure(samples, taming_n);
    s.first_activation_time = first_activation(samples, taming_n);
    s.agmon_ratio_max = agmon_ratio(samples);
    const L2BoundReport lb = verify_l2_bound(samples);
    s.l2_bound_ok = lb.ok;
    s.l2_bound_worst_slack = lb.worst_slack;
    if (forcing_zero) s.h0_monotone = h0_norm_monotone(samples);
    return s;
}

}  // namespace tamedns
