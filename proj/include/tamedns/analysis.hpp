#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "tamedns/diagnostics.hpp"
#include "tamedns/dynamics.hpp"
#include "tamedns/field.hpp"
#include "tamedns/integrator.hpp"

namespace tamedns {

// Axis-aligned box [lo_i, hi_i) in physical coordinates; the default covers
// the whole torus.
struct Region {
    std::array<double, 6> bounds = {0.0, two_pi, 0.0, two_pi, 0.0, two_pi};

    void validate() const {
        for (int a = 0; a < 3; ++a) {
            const double lo = bounds[2 * a];
            const double hi = bounds[2 * a + 1];
            if (!(lo >= 0.0 && lo < hi && hi <= two_pi + 1e-12))
                throw ConfigError("region: bounds must satisfy 0 <= lo < hi <= 2*pi");
        }
    }

    bool contains(double x, double y, double z) const {
        return x >= bounds[0] && x < bounds[1] && y >= bounds[2] && y < bounds[3] &&
               z >= bounds[4] && z < bounds[5];
    }
};

// Discrete space-time L^2 distance between two sampled runs over a region:
// sqrt( int_0^T sum_{x in region} |u_a - u_b|^2 h^3 dt ), trapezoid in time.
// Both records must store fields on the same grid at the same sample times.
inline double compare_runs(const RunRecord& a, const RunRecord& b,
                           const Region& region = {}) {
    region.validate();
    if (a.fields.empty() || b.fields.empty())
        throw ConfigError("compare_runs: both runs must store fields");
    if (a.fields.size() != b.fields.size())
        throw ConfigError("compare_runs: sample counts differ");
    if (a.fields.front().grid != b.fields.front().grid)
        throw ConfigError("compare_runs: grids differ");
    const GridSpec& g = a.fields.front().grid;
    for (size_t i = 0; i < a.samples.size(); ++i)
        if (std::abs(a.samples[i].t - b.samples[i].t) >
            1e-12 * std::max(1.0, a.samples[i].t))
            throw ConfigError("compare_runs: sample times differ");

    const double h3 = g.spacing() * g.spacing() * g.spacing();
    std::vector<char> mask(g.n_phys(), 1);
    bool full = true;
    for (int i = 0; i < g.size; ++i)
        for (int j = 0; j < g.size; ++j)
            for (int l = 0; l < g.size; ++l) {
                const bool in = region.contains(i * g.spacing(), j * g.spacing(),
                                                l * g.spacing());
                mask[g.phys_index(i, j, l)] = in ? 1 : 0;
                full = full && in;
            }

    std::vector<double> d2(a.fields.size(), 0.0);
    for (size_t s = 0; s < a.fields.size(); ++s) {
        const PhysVector ua = to_physical(a.fields[s]);
        const PhysVector ub = to_physical(b.fields[s]);
        double acc = 0.0;
        for (long x = 0; x < g.n_phys(); ++x) {
            if (!full && !mask[x]) continue;
            for (int j = 0; j < 3; ++j) {
                const double d = ua[j][x] - ub[j][x];
                acc += d * d;
            }
        }
        d2[s] = acc * h3;
    }
    double total = 0.0;
    for (size_t s = 1; s < d2.size(); ++s)
        total += 0.5 * (d2[s] + d2[s - 1]) * (a.samples[s].t - a.samples[s - 1].t);
    return std::sqrt(total);
}

// L^2 distance between final states living on different grids, taken as the
// distance between the trigonometric polynomials they represent (modes
// missing from the coarser grid count with their full coefficient).
inline double spectral_distance(const SpectralVelocity& coarse,
                                const SpectralVelocity& fine) {
    if (coarse.grid.size > fine.grid.size)
        return spectral_distance(fine, coarse);
    const GridSpec& gc = coarse.grid;
    const GridSpec& gf = fine.grid;
    const int kc = gc.max_wave();
    double acc = 0.0;
    for_each_mode(gf, [&](long idx, int k1, int k2, int k3, double w) {
        if (w == 0.0) return;
        Complex cc[3] = {0.0, 0.0, 0.0};
        if (std::abs(k1) <= kc && std::abs(k2) <= kc && k3 <= kc) {
            const int i = k1 >= 0 ? k1 : k1 + gc.size;
            const int j = k2 >= 0 ? k2 : k2 + gc.size;
            const long cidx = gc.spec_index(i, j, k3);
            for (int c = 0; c < 3; ++c) cc[c] = coarse.c[c][cidx];
        }
        for (int c = 0; c < 3; ++c) acc += w * std::norm(fine.c[c][idx] - cc[c]);
    });
    const double vol = two_pi * two_pi * two_pi;
    return std::sqrt(vol * acc);
}

struct LocalEnergyReport {
    double lhs = 0.0;       // 2 nu int int |grad u|^2 phi + 2 int int g |u|^2 phi
    double rhs = 0.0;       // |u|^2 (phi_t + nu lap phi) + 2 (u.f) phi
                            //   + (|u|^2 - 2 p) (u . grad phi)
    double residual = 0.0;  // |lhs - rhs|
    double residual_rel = 0.0;
};

// Evaluates both sides of the localized energy identity against a stored run
// (fields and pressures at every sample). Space integrals are plain grid
// sums; the time integral is trapezoid over the samples, with the bump's
// support strictly inside (0, T) so no boundary terms appear.
inline LocalEnergyReport local_energy_identity(const RunRecord& rec,
                                               const Forcing& forcing,
                                               const BumpFunction& bump) {
    if (rec.fields.size() != rec.samples.size() || rec.fields.empty())
        throw ConfigError("local_energy_identity: run must store fields");
    if (rec.pressures.size() != rec.samples.size())
        throw ConfigError("local_energy_identity: run must store pressures");
    bump.validate(rec.t_end);

    const GridSpec& g = rec.fields.front().grid;
    const long n = g.n_phys();
    const double h3 = g.spacing() * g.spacing() * g.spacing();
    const double nu = rec.nu;
    const TamingProfile profile(nu, rec.taming_n, rec.taming_enabled);

    PhysVector fpat;
    const bool has_f = !forcing.is_zero();
    if (has_f) fpat = to_physical(forcing.pattern(g));

    const size_t ns = rec.samples.size();
    std::vector<double> lhs_t(ns, 0.0), rhs_t(ns, 0.0);
    for (size_t s = 0; s < ns; ++s) {
        const double t = rec.samples[s].t;
        if (std::abs(t - bump.t0) >= bump.rho_t) continue;

        const SpectralVelocity& uh = rec.fields[s];
        const PhysVector u = to_physical(uh);
        const PhysScalar p = to_physical(rec.pressures[s]);

        std::array<PhysScalar, 9> du;
        {
            ScalarSpectralField comp(g);
            for (int j = 0; j < 3; ++j) {
                comp.c.assign(uh.c[j].begin(), uh.c[j].end());
                for (int i = 0; i < 3; ++i)
                    du[3 * j + i] = to_physical(spectral_derivative(comp, i));
            }
        }

        const double ff = has_f ? forcing.amplitude * forcing.time_factor(t) : 0.0;
        double li = 0.0, ri = 0.0;
        for (int i = 0; i < g.size; ++i)
            for (int j = 0; j < g.size; ++j)
                for (int l = 0; l < g.size; ++l) {
                    const std::array<double, 3> x = {i * g.spacing(), j * g.spacing(),
                                                     l * g.spacing()};
                    const double phi = bump.value(t, x);
                    const double phi_t = bump.dt(t, x);
                    const double phi_lap = bump.laplacian(t, x);
                    const auto phi_grad = bump.grad(t, x);
                    if (phi == 0.0 && phi_t == 0.0 && phi_lap == 0.0 &&
                        phi_grad[0] == 0.0 && phi_grad[1] == 0.0 && phi_grad[2] == 0.0)
                        continue;
                    const long idx = g.phys_index(i, j, l);
                    const double usq = u[0][idx] * u[0][idx] + u[1][idx] * u[1][idx] +
                                       u[2][idx] * u[2][idx];
                    double gradsq = 0.0;
                    for (int q = 0; q < 9; ++q) gradsq += du[q][idx] * du[q][idx];
                    const double gval = profile.eval_g(std::max(usq, 0.0));

                    li += (2.0 * nu * gradsq + 2.0 * gval * usq) * phi;

                    const double u_dot_gphi = u[0][idx] * phi_grad[0] +
                                              u[1][idx] * phi_grad[1] +
                                              u[2][idx] * phi_grad[2];
                    double uf = 0.0;
                    if (has_f)
                        uf = ff * (u[0][idx] * fpat[0][idx] + u[1][idx] * fpat[1][idx] +
                                   u[2][idx] * fpat[2][idx]);
                    ri += usq * (phi_t + nu * phi_lap) + 2.0 * uf * phi +
                          (usq - 2.0 * p[idx]) * u_dot_gphi;
                }
        lhs_t[s] = li * h3;
        rhs_t[s] = ri * h3;
    }

    LocalEnergyReport rep;
    for (size_t s = 1; s < ns; ++s) {
        const double dt = rec.samples[s].t - rec.samples[s - 1].t;
        rep.lhs += 0.5 * dt * (lhs_t[s] + lhs_t[s - 1]);
        rep.rhs += 0.5 * dt * (rhs_t[s] + rhs_t[s - 1]);
    }
    rep.residual = std::abs(rep.lhs - rep.rhs);
    rep.residual_rel =
        rep.residual / std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-300});
    return rep;
}

}  // namespace tamedns
