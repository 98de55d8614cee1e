#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "tamedns/field.hpp"
#include "tamedns/forcing.hpp"
#include "tamedns/grid.hpp"

namespace tamedns {

// Deterministic standard normals: Box-Muller over the (standardized)
// mt19937_64 stream, so a given seed produces the same field on every
// platform.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        const double u1 = to_unit(eng_());
        const double u2 = to_unit(eng_());
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = two_pi * u2;
        spare_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

private:
    // top 53 bits -> (0, 1], so log() stays finite
    static double to_unit(std::uint64_t x) {
        return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
    }

    std::mt19937_64 eng_;
    bool have_ = false;
    double spare_ = 0.0;
};

// Initial-data families:
//   taylor_green     u0 = a (sin x cos y cos z, -cos x sin y cos z, 0)
//                    ||u0||^2_{H^0} = 2 a^2 pi^3
//   shear_mode       u0 = (a sin y, 0, 0); exact solution of the full system
//                    while a^2 stays below the taming threshold:
//                    u(t) = exp(-nu t) u0 (the nonlinear terms vanish on it)
//   random_spectrum  solenoidal Gaussian field with spectral shape
//                    |k|^4 exp(-2|k|^2/k0^2) on the alias-free modes,
//                    rescaled so ||u0||_{H^0} = amplitude
struct Scenario {
    std::string name = "taylor_green";
    double amplitude = 1.0;
    double k0 = 4.0;
    std::uint64_t seed = 1;

    void validate() const {
        if (name != "taylor_green" && name != "shear_mode" &&
            name != "random_spectrum")
            throw ConfigError(
                "scenario.name must be taylor_green|shear_mode|random_spectrum, "
                "got '" + name + "'");
        if (name == "random_spectrum" && k0 <= 0.0)
            throw ConfigError("scenario.k0 must be positive");
    }
};

namespace detail {

inline SpectralVelocity taylor_green_field(const GridSpec& g, double a) {
    PhysVector u;
    for (auto& comp : u) comp.assign(g.n_phys(), 0.0);
    const double h = g.spacing();
    for (int i = 0; i < g.size; ++i) {
        const double x = i * h;
        for (int j = 0; j < g.size; ++j) {
            const double y = j * h;
            for (int l = 0; l < g.size; ++l) {
                const double z = l * h;
                const long idx = g.phys_index(i, j, l);
                u[0][idx] = a * std::sin(x) * std::cos(y) * std::cos(z);
                u[1][idx] = -a * std::cos(x) * std::sin(y) * std::cos(z);
            }
        }
    }
    return from_physical(g, u);
}

inline SpectralVelocity shear_field(const GridSpec& g, double a) {
    SpectralVelocity v(g);
    // a sin(y) on component 0
    v.c[0][g.spec_index(0, 1, 0)] = Complex(0.0, -0.5 * a);
    v.c[0][g.spec_index(0, g.size - 1, 0)] = Complex(0.0, 0.5 * a);
    return v;
}

inline SpectralVelocity random_spectrum_field(const GridSpec& g, const Scenario& sc) {
    SpectralVelocity v(g);
    GaussianRng rng(sc.seed);
    const int kd = g.dealias_bound();
    for_each_mode(g, [&](long idx, int k1, int k2, int k3, double) {
        const double ksq = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
        if (ksq == 0.0) return;
        if (std::abs(k1) > kd || std::abs(k2) > kd || k3 > kd) return;
        const double kk = std::sqrt(ksq);
        const double shape =
            std::sqrt(std::pow(kk, 4.0) * std::exp(-2.0 * ksq / (sc.k0 * sc.k0)));
        for (int j = 0; j < 3; ++j) {
            const double re = rng.next();
            const double im = rng.next();
            v.c[j][idx] = shape * Complex(re, im);
        }
    });
    symmetrize_hermitian(v);
    v = leray_project(std::move(v));
    const double norm = std::sqrt(sobolev_norm_sq(v, 0));
    if (norm == 0.0) throw ConfigError("random_spectrum produced a zero field");
    scale(v, sc.amplitude / norm);
    return v;
}

}  // namespace detail

// Builds the scenario's initial velocity: divergence-free, Hermitian,
// supported on alias-free modes.
inline SpectralVelocity make_initial(const Scenario& sc, const GridSpec& g) {
    sc.validate();
    if (sc.name == "shear_mode") {
        SpectralVelocity v = detail::shear_field(g, sc.amplitude);
        v.divfree = true;  // component 0 only, varying in y: k.v = 0 termwise
        return v;
    }
    if (sc.name == "taylor_green")
        return leray_project(detail::taylor_green_field(g, sc.amplitude));
    return detail::random_spectrum_field(g, sc);
}

inline Forcing make_forcing(const std::string& kind, double amplitude, int mode,
                            double omega) {
    Forcing f;
    f.kind = kind;
    f.amplitude = amplitude;
    f.mode = mode;
    f.omega = omega;
    return f;
}

}  // namespace tamedns
