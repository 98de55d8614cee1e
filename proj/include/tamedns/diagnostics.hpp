#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tamedns/grid.hpp"

namespace tamedns {

// One row of the run time series. The first nine fields are the serialized
// schema (timeseries.csv). The cum_* fields are running time integrals
// accumulated by the integrator with trapezoid quadrature at *step*
// resolution, so budget checks are limited by the stepper, not by the
// sampling cadence; cums_valid marks them as populated.
struct DiagnosticsSample {
    double t = 0.0;
    double h0sq = 0.0;     // ||u||^2_{H^0}
    double h1sq = 0.0;     // ||u||^2_{H^1}
    double h2sq = 0.0;     // ||u||^2_{H^2}
    double grad_sq = 0.0;  // ||grad u||^2_{L^2}
    double sup_u = 0.0;    // max_x |u(x)| on the grid
    double taming_dissipation = 0.0;  // integral g(|u|^2)|u|^2 dx
    double forcing_power = 0.0;       // <f(t), u(t)>
    bool activation = false;          // sup_u^2 >= N

    double lap_sq = 0.0;  // ||Laplacian u||^2_{L^2}
    bool cums_valid = false;
    double cum_viscous = 0.0;  // int_0^t nu ||grad u||^2
    double cum_taming = 0.0;   // int_0^t taming_dissipation
    double cum_forcing = 0.0;  // int_0^t <f, u>
    double cum_f_norm = 0.0;   // int_0^t ||f||_{H^0}
    double cum_h1sq = 0.0;     // int_0^t ||u||^2_{H^1}
    double cum_h2sq = 0.0;     // int_0^t ||u||^2_{H^2}
};

struct RunSummary {
    double initial_h0sq = 0.0;
    double final_h0sq = 0.0;
    double final_t = 0.0;
    long steps = 0;

    double sup_h0sq = 0.0;
    double sup_h1sq = 0.0;
    double sup_h2sq = 0.0;
    double sup_grad_sq = 0.0;
    double sup_u_max = 0.0;

    double int_h1sq = 0.0;
    double int_h2sq = 0.0;
    double int_f_h0norm = 0.0;
    double int_viscous = 0.0;
    double int_taming = 0.0;
    double int_forcing = 0.0;

    double energy_residual_max = 0.0;
    bool energy_residual_absolute = false;

    double activation_measure = 0.0;
    std::optional<double> first_activation_time;
    std::optional<double> agmon_ratio_max;

    bool l2_bound_ok = true;
    double l2_bound_worst_slack = 0.0;
    std::optional<bool> h0_monotone;  // evaluated only for unforced runs
};

// ---- energy budget -----------------------------------------------------

struct EnergyResidual {
    double value = 0.0;    // max_t |R(t)|, relative to ||u0||^2 unless absolute
    bool absolute = false; // set when the initial energy is (numerically) zero
};

// R(t) = ||u(t)||^2 + 2 int_0^t (nu ||grad u||^2 + taming) - ||u0||^2
//        - 2 int_0^t <f, u>.
// Uses the step-resolution cumulative integrals when the samples carry them;
// otherwise falls back to trapezoid quadrature over the samples themselves.
inline EnergyResidual energy_budget_residual(const std::vector<DiagnosticsSample>& s,
                                             double nu) {
    if (s.empty()) throw ConfigError("energy_budget_residual: no samples");
    const double base = s.front().h0sq;
    EnergyResidual out;
    out.absolute = base < 1e-30;
    bool cums = true;
    for (const auto& smp : s) cums = cums && smp.cums_valid;

    double worst = 0.0;
    double iv = 0.0, it = 0.0, ifo = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (cums) {
            iv = s[i].cum_viscous;
            it = s[i].cum_taming;
            ifo = s[i].cum_forcing;
        } else if (i > 0) {
            const double h = s[i].t - s[i - 1].t;
            iv += 0.5 * h * (nu * s[i].grad_sq + nu * s[i - 1].grad_sq);
            it += 0.5 * h * (s[i].taming_dissipation + s[i - 1].taming_dissipation);
            ifo += 0.5 * h * (s[i].forcing_power + s[i - 1].forcing_power);
        }
        const double r = s[i].h0sq + 2.0 * (iv + it) - base - 2.0 * ifo;
        worst = std::max(worst, std::abs(r));
    }
    out.value = out.absolute ? worst : worst / base;
    return out;
}

// ---- a priori bound checks ----------------------------------------------

struct L2BoundReport {
    bool ok = true;
    // min over samples of ||u0|| + int_0^t ||f|| - ||u(t)||; negative means
    // the bound is violated by that much
    double worst_slack = 0.0;
};

// Checks ||u(t)|| <= ||u0|| + int_0^t ||f||. The forcing integral comes from
// the samples' cum_f_norm unless an explicit series (aligned with samples) is
// given.
inline L2BoundReport verify_l2_bound(const std::vector<DiagnosticsSample>& s,
                                     const std::vector<double>* f_norm_integral = nullptr,
                                     double rel_tol = 1e-7) {
    if (s.empty()) throw ConfigError("verify_l2_bound: no samples");
    if (f_norm_integral && f_norm_integral->size() != s.size())
        throw ConfigError("verify_l2_bound: forcing integral series misaligned");
    const double n0 = std::sqrt(s.front().h0sq);
    L2BoundReport out;
    double worst = std::numeric_limits<double>::infinity();
    double scale = n0;
    for (size_t i = 0; i < s.size(); ++i) {
        const double fi = f_norm_integral ? (*f_norm_integral)[i] : s[i].cum_f_norm;
        const double slack = n0 + fi - std::sqrt(s[i].h0sq);
        worst = std::min(worst, slack);
        scale = std::max(scale, n0 + fi);
    }
    out.worst_slack = worst;
    out.ok = worst >= -rel_tol * std::max(scale, 1e-300);
    return out;
}

// For unforced runs: H^0 norm non-increasing along the samples, within
// rel_tol of the initial norm.
inline bool h0_norm_monotone(const std::vector<DiagnosticsSample>& s,
                             double rel_tol = 1e-7) {
    if (s.empty()) throw ConfigError("h0_norm_monotone: no samples");
    const double tol = rel_tol * std::sqrt(s.front().h0sq);
    for (size_t i = 1; i < s.size(); ++i)
        if (std::sqrt(s[i].h0sq) > std::sqrt(s[i - 1].h0sq) + tol) return false;
    return true;
}

// ---- activation and Agmon ratio ------------------------------------------

// Lebesgue measure of {t in [0,T] : sup|u|^2 >= N}, trapezoid weights on the
// sample indicator; lies in [0, T].
inline double activation_measure(const std::vector<DiagnosticsSample>& s, double N) {
    if (s.empty()) throw ConfigError("activation_measure: no samples");
    double acc = 0.0;
    for (size_t i = 1; i < s.size(); ++i) {
        const double a = s[i - 1].sup_u * s[i - 1].sup_u >= N ? 1.0 : 0.0;
        const double b = s[i].sup_u * s[i].sup_u >= N ? 1.0 : 0.0;
        acc += 0.5 * (a + b) * (s[i].t - s[i - 1].t);
    }
    return acc;
}

inline std::optional<double> first_activation(const std::vector<DiagnosticsSample>& s,
                                              double N) {
    for (const auto& smp : s)
        if (smp.sup_u * smp.sup_u >= N) return smp.t;
    return std::nullopt;
}

// max over samples of sup|u|^2 / (||grad u|| ||Lap u||); the interpolation
// inequality says this is bounded (1/(2 pi) on the whole space; measured, not
// asserted, here). Samples with vanishing denominator are skipped.
inline std::optional<double> agmon_ratio(const std::vector<DiagnosticsSample>& s) {
    std::optional<double> best;
    for (const auto& smp : s) {
        const double den = std::sqrt(smp.grad_sq * smp.lap_sq);
        if (den < 1e-300) continue;
        const double r = smp.sup_u * smp.sup_u / den;
        if (!best || r > *best) best = r;
    }
    return best;
}

// ---- localized test function ----------------------------------------------

// Space-time test function for the local energy identity:
//   phi(t, x) = A f(q_t) f(q_x),   f(q) = (1-q)^4 for q < 1, else 0,
//   q_t = ((t-t0)/rho_t)^2,  q_x = |d(x)|^2 / rho_x^2,
// with d(x) the periodic displacement from the center (components in
// [-pi, pi)). phi >= 0, is C^3 across the support boundary, and its support
// must sit strictly inside (0, T) x torus (rho_x < pi).
struct BumpFunction {
    double t0 = 0.5;
    std::array<double, 3> x0 = {3.141592653589793, 3.141592653589793,
                                3.141592653589793};
    double rho_t = 0.25;
    double rho_x = 2.0;
    double amplitude = 1.0;

    void validate(double t_end) const {
        if (rho_t <= 0.0 || rho_x <= 0.0 || amplitude <= 0.0)
            throw ConfigError("bump: radii and amplitude must be positive");
        if (!(t0 - rho_t > 0.0 && t0 + rho_t < t_end))
            throw ConfigError("bump: time support must lie strictly inside (0, T)");
        if (rho_x >= 3.141592653589793)
            throw ConfigError("bump: spatial radius must be < pi");
    }

    static double f(double q) {
        if (q >= 1.0) return 0.0;
        const double w = 1.0 - q;
        return w * w * w * w;
    }
    static double fp(double q) {
        if (q >= 1.0) return 0.0;
        const double w = 1.0 - q;
        return -4.0 * w * w * w;
    }
    static double fpp(double q) {
        if (q >= 1.0) return 0.0;
        const double w = 1.0 - q;
        return 12.0 * w * w;
    }

    std::array<double, 3> displacement(const std::array<double, 3>& x) const {
        std::array<double, 3> d;
        for (int i = 0; i < 3; ++i) d[i] = std::remainder(x[i] - x0[i], two_pi);
        return d;
    }

    double value(double t, const std::array<double, 3>& x) const {
        const double qt = (t - t0) * (t - t0) / (rho_t * rho_t);
        const auto d = displacement(x);
        const double qx = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (rho_x * rho_x);
        return amplitude * f(qt) * f(qx);
    }

    double dt(double t, const std::array<double, 3>& x) const {
        const double qt = (t - t0) * (t - t0) / (rho_t * rho_t);
        const auto d = displacement(x);
        const double qx = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (rho_x * rho_x);
        return amplitude * fp(qt) * (2.0 * (t - t0) / (rho_t * rho_t)) * f(qx);
    }

    std::array<double, 3> grad(double t, const std::array<double, 3>& x) const {
        const double qt = (t - t0) * (t - t0) / (rho_t * rho_t);
        const auto d = displacement(x);
        const double qx = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (rho_x * rho_x);
        const double s = amplitude * f(qt) * fp(qx) * 2.0 / (rho_x * rho_x);
        return {s * d[0], s * d[1], s * d[2]};
    }

    double laplacian(double t, const std::array<double, 3>& x) const {
        const double qt = (t - t0) * (t - t0) / (rho_t * rho_t);
        const auto d = displacement(x);
        const double dsq = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        const double qx = dsq / (rho_x * rho_x);
        return amplitude * f(qt) *
               (fpp(qx) * 4.0 * dsq / (rho_x * rho_x * rho_x * rho_x) +
                fp(qx) * 6.0 / (rho_x * rho_x));
    }
};

// ---- cross-run growth checks ----------------------------------------------

struct GrowthReport {
    std::vector<double> n_values;
    std::vector<double> ratios;
    double fitted_exponent = 0.0;
    double slack_factor = 2.0;
    bool ok = false;
};

namespace detail {

inline void require_sweep(const std::vector<std::pair<double, RunSummary>>& runs,
                          const char* who) {
    if (runs.size() < 3)
        throw ConfigError(std::string(who) + ": needs at least 3 taming levels");
    for (size_t i = 1; i < runs.size(); ++i)
        if (!(runs[i].first > runs[i - 1].first))
            throw ConfigError(std::string(who) +
                              ": taming levels must be strictly increasing");
}

// least-squares slope of log(y) against log(x)
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    const double den = n * sxx - sx * sx;
    if (n < 2 || std::abs(den) < 1e-30) return 0.0;
    return (n * sxy - sx * sy) / den;
}

template <typename Lhs, typename Scale>
inline GrowthReport growth_report(const std::vector<std::pair<double, RunSummary>>& runs,
                                  double slack, Lhs&& lhs, Scale&& scl, const char* who) {
    require_sweep(runs, who);
    GrowthReport rep;
    rep.slack_factor = slack;
    std::vector<double> raw;
    for (const auto& [n, s] : runs) {
        rep.n_values.push_back(n);
        raw.push_back(lhs(s));
        rep.ratios.push_back(lhs(s) / scl(n));
    }
    std::vector<double> scales;
    for (double n : rep.n_values) scales.push_back(scl(n));
    rep.fitted_exponent = log_log_slope(scales, raw);
    rep.ok = true;
    for (double r : rep.ratios) rep.ok = rep.ok && r <= slack * rep.ratios.front();
    return rep;
}

}  // namespace detail

// [sup_t ||u||^2_{H^1} + int_0^T ||u||^2_{H^2}] / (1 + N) bounded across the
// sweep by slack * (value at the smallest N)
inline GrowthReport verify_h1_growth(const std::vector<std::pair<double, RunSummary>>& runs,
                                     double slack = 2.0) {
    return detail::growth_report(
        runs, slack, [](const RunSummary& s) { return s.sup_h1sq + s.int_h2sq; },
        [](double n) { return 1.0 + n; }, "verify_h1_growth");
}

// sup_t ||u||^2_{H^2} / (1 + N^2) bounded the same way
inline GrowthReport verify_h2_growth(const std::vector<std::pair<double, RunSummary>>& runs,
                                     double slack = 2.0) {
    return detail::growth_report(
        runs, slack, [](const RunSummary& s) { return s.sup_h2sq; },
        [](double n) { return 1.0 + n * n; }, "verify_h2_growth");
}

// [sup_t ||u||^2_{H^0} + int_0^T ||u||^2_{H^1}] / (||u0||^2 + (int ||f||)^2):
// the N-independent bound; checked against slack * (value at the smallest N).
inline GrowthReport verify_l2h1_bound(const std::vector<std::pair<double, RunSummary>>& runs,
                                      double slack = 2.0) {
    return detail::growth_report(
        runs, slack,
        [](const RunSummary& s) {
            const double denom =
                s.initial_h0sq + s.int_f_h0norm * s.int_f_h0norm;
            return (s.sup_h0sq + s.int_h1sq) / std::max(denom, 1e-300);
        },
        [](double) { return 1.0; }, "verify_l2h1_bound");
}

}  // namespace tamedns
