#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "tamedns/field.hpp"
#include "tamedns/grid.hpp"

namespace tamedns {

namespace detail {

// C-infinity bump machinery: sigma(x) = exp(-1/x) for x > 0, else 0, and the
// standard smooth step theta(s) = sigma(s) / (sigma(s) + sigma(1-s)), which
// rises from 0 to 1 on [0,1] with all derivatives vanishing at both ends and
// the symmetry theta(s) + theta(1-s) = 1 (so theta(1/2) = 1/2 exactly and
// integral_0^1 theta = 1/2).
inline double sigma_bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

inline double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = sigma_bump(s);
    const double b = sigma_bump(1.0 - s);
    return a / (a + b);
}

// 16-point Gauss-Legendre rule on [-1,1]
inline constexpr std::array<double, 8> gl16_x = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr std::array<double, 8> gl16_w = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

inline double integrate_step(double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int q = 0; q < 8; ++q) {
        acc += gl16_w[q] * (smooth_step(c - h * gl16_x[q]) +
                            smooth_step(c + h * gl16_x[q]));
    }
    return acc * h;
}

}  // namespace detail

// Smooth taming profile g(r), r = |u|^2:
//
//   g(r) = 0                     for r <= N
//   g(r) = Theta(r - N) / nu     for N < r < N + 1, Theta(x) = int_0^x theta
//   g(r) = (r - N - 1/2) / nu    for r >= N + 1
//
// The pieces join with all derivatives matched (theta is flat at 0 and 1 and
// int_0^1 theta = 1/2), so g is C-infinity, g' = theta(r-N)/nu lies in
// [0, 1/nu], and Theta(x) >= x - 1/2 gives the global lower bound
// g(r) >= (r - N - 1/2) / nu (with equality beyond N + 1).
//
// Theta is precomputed on a 4096-node table over [0,1] by per-panel
// Gauss-Legendre quadrature and evaluated with cubic Hermite interpolation
// (node derivatives are theta itself); interpolation error is far below
// 1e-12 at this resolution.
class TamingProfile {
public:
    static constexpr int table_nodes = 4096;

    TamingProfile(double nu, double N, bool enabled = true)
        : nu_(nu), N_(N), enabled_(enabled) {
        if (nu <= 0.0) throw ConfigError("taming profile: nu must be positive");
        if (N < 0.0) throw ConfigError("taming profile: N must be >= 0");
        build_table();
    }

    double nu() const { return nu_; }
    double N() const { return N_; }
    bool enabled() const { return enabled_; }

    double eval_g(double r) const {
        if (r < 0.0) throw ConfigError("eval_g: argument must be >= 0");
        if (!enabled_ || r <= N_) return 0.0;
        if (r >= N_ + 1.0) return (r - N_ - 0.5) / nu_;
        return theta_integral(r - N_) / nu_;
    }

    double eval_g_prime(double r) const {
        if (r < 0.0) throw ConfigError("eval_g_prime: argument must be >= 0");
        if (!enabled_ || r <= N_) return 0.0;
        if (r >= N_ + 1.0) return 1.0 / nu_;
        return detail::smooth_step(r - N_) / nu_;
    }

    // g(r) - (r - N - 1/2)/nu; nonnegative everywhere, zero beyond N + 1
    double lower_bound_slack(double r) const {
        return eval_g(r) - (r - N_ - 0.5) / nu_;
    }

    // Applies g pointwise to a field of squared magnitudes. Round-off from the
    // transforms can leave tiny negative entries; those clamp to zero, while a
    // substantially negative entry means the caller passed something that is
    // not a squared magnitude.
    PhysScalar eval_g_field(const PhysScalar& r) const {
        PhysScalar out(r.size());
        const double floor_tol = -1e-8 * (1.0 + N_);
        for (size_t i = 0; i < r.size(); ++i) {
            double x = r[i];
            if (x < 0.0) {
                if (x < floor_tol)
                    throw ConfigError("eval_g_field: entry is negative beyond round-off");
                x = 0.0;
            }
            out[i] = eval_g(x);
        }
        return out;
    }

private:
    void build_table() {
        theta_int_.resize(table_nodes);
        theta_val_.resize(table_nodes);
        const double h = 1.0 / (table_nodes - 1);
        theta_int_[0] = 0.0;
        theta_val_[0] = 0.0;
        for (int i = 1; i < table_nodes; ++i) {
            const double lo = (i - 1) * h;
            const double hi = i * h;
            theta_int_[i] = theta_int_[i - 1] + detail::integrate_step(lo, hi);
            theta_val_[i] = detail::smooth_step(hi);
        }
    }

    // Theta(x) for x in [0,1], cubic Hermite between table nodes
    double theta_integral(double x) const {
        const double h = 1.0 / (table_nodes - 1);
        double u = x / h;
        int i = static_cast<int>(u);
        if (i < 0) i = 0;
        if (i > table_nodes - 2) i = table_nodes - 2;
        const double t = u - i;
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double h00 = 1.0 - 3.0 * t2 + 2.0 * t3;
        const double h10 = t - 2.0 * t2 + t3;
        const double h01 = 3.0 * t2 - 2.0 * t3;
        const double h11 = t3 - t2;
        return theta_int_[i] * h00 + h * theta_val_[i] * h10 +
               theta_int_[i + 1] * h01 + h * theta_val_[i + 1] * h11;
    }

    double nu_;
    double N_;
    bool enabled_;
    std::vector<double> theta_int_;
    std::vector<double> theta_val_;
};

}  // namespace tamedns
