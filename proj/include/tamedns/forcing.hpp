#pragma once

#include <cmath>
#include <string>

#include "tamedns/field.hpp"
#include "tamedns/grid.hpp"

namespace tamedns {

// External body force. Kinds:
//   none        f = 0
//   steady      f(x)   = amplitude * (sin(mode * y), 0, 0)
//   oscillating f(t,x) = amplitude * cos(omega t) * (sin(mode * y), 0, 0)
// The spatial pattern is a single divergence-free low mode, so the force
// passes unchanged through projection and dealiasing, and both the H0 norm
// and the norm of d_t f are available in closed form.
struct Forcing {
    std::string kind = "none";
    double amplitude = 0.0;
    int mode = 1;
    double omega = 1.0;

    void validate(const GridSpec& grid) const {
        if (kind != "none" && kind != "steady" && kind != "oscillating")
            throw ConfigError("forcing.kind must be none|steady|oscillating, got '" +
                              kind + "'");
        if (kind != "none") {
            if (mode < 1 || mode > grid.dealias_bound())
                throw ConfigError("forcing.mode must lie in [1, " +
                                  std::to_string(grid.dealias_bound()) +
                                  "] for this grid");
            if (kind == "oscillating" && omega <= 0.0)
                throw ConfigError("forcing.omega must be positive");
        }
    }

    bool is_zero() const { return kind == "none" || amplitude == 0.0; }

    double time_factor(double t) const {
        if (is_zero()) return 0.0;
        return kind == "oscillating" ? std::cos(omega * t) : 1.0;
    }

    double time_factor_dt(double t) const {
        if (is_zero() || kind != "oscillating") return 0.0;
        return -omega * std::sin(omega * t);
    }

    // unit-amplitude spatial pattern (time factor and amplitude excluded)
    SpectralVelocity pattern(const GridSpec& grid) const {
        validate(grid);
        SpectralVelocity f(grid);
        f.divfree = true;
        if (is_zero()) return f;
        // sin(m y) = (exp(i m y) - exp(-i m y)) / 2i
        f.c[0][grid.spec_index(0, mode, 0)] = Complex(0.0, -0.5);
        f.c[0][grid.spec_index(0, grid.size - mode, 0)] = Complex(0.0, 0.5);
        return f;
    }

    SpectralVelocity spectral(const GridSpec& grid, double t) const {
        SpectralVelocity f = pattern(grid);
        scale(f, amplitude * time_factor(t));
        return f;
    }

    // ||sin(m y)||_{L^2([0,2pi)^3)} = sqrt(4 pi^3)
    double h0_norm(double t) const {
        if (is_zero()) return 0.0;
        const double pat = std::sqrt(4.0 * std::pow(std::acos(-1.0), 3));
        return std::abs(amplitude * time_factor(t)) * pat;
    }

    double dt_h0_norm(double t) const {
        if (is_zero()) return 0.0;
        const double pat = std::sqrt(4.0 * std::pow(std::acos(-1.0), 3));
        return std::abs(amplitude * time_factor_dt(t)) * pat;
    }
};

}  // namespace tamedns
