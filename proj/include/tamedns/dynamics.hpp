#pragma once

#include <utility>

#include "tamedns/field.hpp"
#include "tamedns/forcing.hpp"
#include "tamedns/grid.hpp"
#include "tamedns/taming.hpp"

namespace tamedns {

// Right-hand-side pieces of the projected momentum equation
//
//   d_t u = nu * Laplacian u - P[(u.grad) u] - P[g(|u|^2) u] + f
//
// as signed contributions: convective = -P[dealias((u.grad)u)],
// taming = -P[dealias(g(|u|^2) u)], forcing = f-hat. The viscous part is
// applied exactly by the integrator's integrating factor and never appears
// here. With these signs <convective, u> vanishes (to round-off) and
// <taming, u> = -integral g(|u|^2)|u|^2 dx <= 0.
struct RhsBreakdown {
    SpectralVelocity convective;
    SpectralVelocity taming;
    SpectralVelocity forcing;
};

namespace detail {

// (u.grad)u on the grid, plus g(|u|^2)u when a profile is given; both are
// returned as raw (un-dealiased, un-projected) physical products so callers
// can choose the filtering (RHS assembly dealises + projects, pressure
// recovery must not).
struct NonlinearProducts {
    PhysVector convective;  // (u.grad)u
    PhysVector taming;      // g(|u|^2) u (empty when profile disabled)
};

inline NonlinearProducts nonlinear_products(const SpectralVelocity& u,
                                            const TamingProfile* profile) {
    const GridSpec& g = u.grid;
    const long n = g.n_phys();
    const PhysVector up = to_physical(u);

    NonlinearProducts out;
    for (auto& comp : out.convective) comp.assign(n, 0.0);

    // accumulate u_i d_i u_j one derivative at a time
    ScalarSpectralField comp_hat(g);
    for (int j = 0; j < 3; ++j) {
        comp_hat.c.assign(u.c[j].begin(), u.c[j].end());
        for (int i = 0; i < 3; ++i) {
            const PhysScalar d = to_physical(spectral_derivative(comp_hat, i));
            for (long x = 0; x < n; ++x) out.convective[j][x] += up[i][x] * d[x];
        }
    }

    if (profile && profile->enabled()) {
        PhysScalar r(n);
        for (long x = 0; x < n; ++x)
            r[x] = up[0][x] * up[0][x] + up[1][x] * up[1][x] + up[2][x] * up[2][x];
        const PhysScalar gv = profile->eval_g_field(r);
        for (auto& comp : out.taming) comp.assign(n, 0.0);
        for (int j = 0; j < 3; ++j)
            for (long x = 0; x < n; ++x) out.taming[j][x] = gv[x] * up[j][x];
    }
    return out;
}

}  // namespace detail

// -P[dealias((u.grad)u)]
inline SpectralVelocity convective_term(const SpectralVelocity& u) {
    auto prod = detail::nonlinear_products(u, nullptr);
    SpectralVelocity c = leray_project(dealias(from_physical(u.grid, prod.convective)));
    scale(c, -1.0);
    c.divfree = true;
    return c;
}

// -P[dealias(g(|u|^2) u)]; identically zero while sup|u|^2 <= N
inline SpectralVelocity taming_term(const SpectralVelocity& u,
                                    const TamingProfile& profile) {
    if (!profile.enabled()) {
        SpectralVelocity z(u.grid);
        z.divfree = true;
        return z;
    }
    auto prod = detail::nonlinear_products(u, &profile);
    SpectralVelocity t = leray_project(dealias(from_physical(u.grid, prod.taming)));
    scale(t, -1.0);
    t.divfree = true;
    return t;
}

// Full non-viscous right-hand side with the pieces broken out.
inline RhsBreakdown rhs(const SpectralVelocity& u, const TamingProfile& profile,
                        const Forcing& forcing, double t) {
    RhsBreakdown out;
    auto prod = detail::nonlinear_products(u, profile.enabled() ? &profile : nullptr);
    out.convective = leray_project(dealias(from_physical(u.grid, prod.convective)));
    scale(out.convective, -1.0);
    if (profile.enabled()) {
        out.taming = leray_project(dealias(from_physical(u.grid, prod.taming)));
        scale(out.taming, -1.0);
    } else {
        out.taming = SpectralVelocity(u.grid);
    }
    out.forcing = forcing.spectral(u.grid, t);
    return out;
}

// Fused total -P[(u.grad)u] - P[g u] + f for the integrator; a cached forcing
// pattern is passed in to avoid rebuilding it per stage.
inline SpectralVelocity nonlinear_rhs(const SpectralVelocity& u,
                                      const TamingProfile& profile,
                                      const SpectralVelocity* forcing_pattern,
                                      double forcing_scale) {
    const GridSpec& g = u.grid;
    auto prod = detail::nonlinear_products(u, profile.enabled() ? &profile : nullptr);
    if (profile.enabled()) {
        for (int j = 0; j < 3; ++j) {
            auto& conv = prod.convective[j];
            const auto& tam = prod.taming[j];
            for (long x = 0; x < g.n_phys(); ++x) conv[x] += tam[x];
        }
    }
    SpectralVelocity total = leray_project(dealias(from_physical(g, prod.convective)));
    scale(total, -1.0);
    if (forcing_pattern && forcing_scale != 0.0)
        add_scaled(total, *forcing_pattern, forcing_scale);
    total.divfree = true;
    return total;
}

// Pressure consistent with the unprojected momentum equation
// d_t u = nu Lap u - w + grad p + f, where w = (u.grad)u + g(|u|^2)u:
// divergence-freeness of d_t u forces Lap p = div w, i.e.
// p-hat(k) = -i (k . w-hat) / |k|^2 with p-hat(0) = 0. The product w is kept
// un-dealiased so the Poisson relation holds exactly in spectral space.
inline ScalarSpectralField recover_pressure(const SpectralVelocity& u,
                                            const TamingProfile& profile) {
    const GridSpec& g = u.grid;
    auto prod = detail::nonlinear_products(u, profile.enabled() ? &profile : nullptr);
    PhysVector w = std::move(prod.convective);
    if (profile.enabled())
        for (int j = 0; j < 3; ++j)
            for (long x = 0; x < g.n_phys(); ++x) w[j][x] += prod.taming[j][x];
    const SpectralVelocity what = from_physical(g, w);

    ScalarSpectralField p(g);
    for_each_mode(g, [&](long idx, int k1, int k2, int k3, double) {
        const double ksq = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
        if (ksq == 0.0) return;
        const Complex kw = double(k1) * what.c[0][idx] + double(k2) * what.c[1][idx] +
                           double(k3) * what.c[2][idx];
        p.c[idx] = Complex(0.0, -1.0) * kw / ksq;
    });
    return p;
}

}  // namespace tamedns
