#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "tamedns/fft.hpp"
#include "tamedns/grid.hpp"

namespace tamedns {

using Complex = std::complex<double>;
using PhysScalar = std::vector<double>;                 // M^3 samples
using PhysVector = std::array<std::vector<double>, 3>;  // 3 x M^3 samples

// Scalar field stored as r2c Fourier coefficients (half third axis,
// k3 in 0..M/2). Coefficients follow the synthesis convention
// u(x) = sum_k c(k) exp(i k.x); reality of u(x) is the Hermitian symmetry
// c(-k) = conj(c(k)), which the half-storage makes structural except on the
// k3 = 0 plane.
struct ScalarSpectralField {
    GridSpec grid;
    std::vector<Complex> c;

    ScalarSpectralField() = default;
    explicit ScalarSpectralField(const GridSpec& g) : grid(g), c(g.n_spec(), Complex(0.0)) {}
};

// Divergence-free (after projection) velocity field, three spectral scalars.
struct SpectralVelocity {
    GridSpec grid;
    std::array<std::vector<Complex>, 3> c;
    bool divfree = false;

    SpectralVelocity() = default;
    explicit SpectralVelocity(const GridSpec& g) : grid(g) {
        for (auto& comp : c) comp.assign(g.n_spec(), Complex(0.0));
    }
};

// Visits every stored mode; fn(idx, k1, k2, k3, weight) where weight is the
// Parseval multiplicity of the stored coefficient (1 on the k3 = 0 plane,
// 2 for 0 < k3 < M/2; the Nyquist plane k3 = M/2 is identically zero and
// gets weight 0).
template <typename Fn>
inline void for_each_mode(const GridSpec& g, Fn&& fn) {
    const int m = g.size;
    const int half = m / 2;
    for (int i = 0; i < m; ++i) {
        const int k1 = g.signed_wave(i);
        for (int j = 0; j < m; ++j) {
            const int k2 = g.signed_wave(j);
            long idx = g.spec_index(i, j, 0);
            for (int l = 0; l <= half; ++l, ++idx) {
                const double w = (l == 0) ? 1.0 : (l == half ? 0.0 : 2.0);
                fn(idx, k1, k2, l, w);
            }
        }
    }
}

// ---- transforms ------------------------------------------------------------

inline PhysScalar to_physical(const ScalarSpectralField& f) {
    PhysScalar out(f.grid.n_phys());
    FftEngine::get(f.grid).inverse(f.c.data(), out.data());
    return out;
}

inline ScalarSpectralField from_physical(const GridSpec& g, const PhysScalar& u) {
    if (static_cast<long>(u.size()) != g.n_phys())
        throw ConfigError("from_physical: sample count does not match grid");
    ScalarSpectralField f(g);
    FftEngine::get(g).forward(u.data(), f.c.data());
    return f;
}

inline PhysVector to_physical(const SpectralVelocity& v) {
    PhysVector out;
    const auto& eng = FftEngine::get(v.grid);
    for (int j = 0; j < 3; ++j) {
        out[j].resize(v.grid.n_phys());
        eng.inverse(v.c[j].data(), out[j].data());
    }
    return out;
}

inline SpectralVelocity from_physical(const GridSpec& g, const PhysVector& u) {
    SpectralVelocity v(g);
    const auto& eng = FftEngine::get(g);
    for (int j = 0; j < 3; ++j) {
        if (static_cast<long>(u[j].size()) != g.n_phys())
            throw ConfigError("from_physical: sample count does not match grid");
        eng.forward(u[j].data(), v.c[j].data());
    }
    return v;
}

// ---- algebra ---------------------------------------------------------------

inline void scale(SpectralVelocity& v, double s) {
    for (auto& comp : v.c)
        for (auto& z : comp) z *= s;
}

// a += s * b
inline void add_scaled(SpectralVelocity& a, const SpectralVelocity& b, double s) {
    if (a.grid != b.grid) throw ConfigError("add_scaled: grid mismatch");
    for (int j = 0; j < 3; ++j) {
        const auto& bc = b.c[j];
        auto& ac = a.c[j];
        for (size_t i = 0; i < ac.size(); ++i) ac[i] += s * bc[i];
    }
    a.divfree = a.divfree && b.divfree;
}

// ---- projections and filters ----------------------------------------------

// Leray-Helmholtz projection onto divergence-free fields:
//   P(k) v = v - k (k.v)/|k|^2, identity at k = 0 (constants pass through).
inline SpectralVelocity leray_project(SpectralVelocity v) {
    for_each_mode(v.grid, [&](long idx, int k1, int k2, int k3, double) {
        const double ksq = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
        if (ksq == 0.0) return;
        const Complex kv =
            double(k1) * v.c[0][idx] + double(k2) * v.c[1][idx] + double(k3) * v.c[2][idx];
        const Complex s = kv / ksq;
        v.c[0][idx] -= double(k1) * s;
        v.c[1][idx] -= double(k2) * s;
        v.c[2][idx] -= double(k3) * s;
    });
    v.divfree = true;
    return v;
}

// 2/3-rule low-pass: zero every mode with any |k_i| > floor(M/3).
inline SpectralVelocity dealias(SpectralVelocity v) {
    const int kd = v.grid.dealias_bound();
    for_each_mode(v.grid, [&](long idx, int k1, int k2, int k3, double) {
        if (std::abs(k1) > kd || std::abs(k2) > kd || std::abs(k3) > kd) {
            v.c[0][idx] = 0.0;
            v.c[1][idx] = 0.0;
            v.c[2][idx] = 0.0;
        }
    });
    return v;
}

inline ScalarSpectralField dealias(ScalarSpectralField f) {
    const int kd = f.grid.dealias_bound();
    for_each_mode(f.grid, [&](long idx, int k1, int k2, int k3, double) {
        if (std::abs(k1) > kd || std::abs(k2) > kd || std::abs(k3) > kd) f.c[idx] = 0.0;
    });
    return f;
}

// d/dx_axis as the spectral multiplier i*k_axis
inline ScalarSpectralField spectral_derivative(const ScalarSpectralField& f, int axis) {
    ScalarSpectralField out(f.grid);
    for_each_mode(f.grid, [&](long idx, int k1, int k2, int k3, double) {
        const int k = axis == 0 ? k1 : (axis == 1 ? k2 : k3);
        out.c[idx] = Complex(0.0, double(k)) * f.c[idx];
    });
    return out;
}

// ---- norms and inner products ----------------------------------------------

namespace detail {
template <typename Mult>
inline double weighted_sum_sq(const SpectralVelocity& v, Mult&& mult) {
    double acc = 0.0;
    for_each_mode(v.grid, [&](long idx, int k1, int k2, int k3, double w) {
        if (w == 0.0) return;
        const double ksq = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
        const double mag = std::norm(v.c[0][idx]) + std::norm(v.c[1][idx]) +
                           std::norm(v.c[2][idx]);
        acc += w * mult(ksq) * mag;
    });
    const double vol = two_pi * two_pi * two_pi;
    return vol * acc;
}
}  // namespace detail

// ||v||^2_{H^m} = (2*pi)^3 sum_k (1+|k|^2)^m |c(k)|^2, m >= 0
inline double sobolev_norm_sq(const SpectralVelocity& v, int m) {
    if (m < 0) throw ConfigError("sobolev_norm_sq: order must be >= 0");
    return detail::weighted_sum_sq(v, [m](double ksq) {
        double p = 1.0;
        for (int q = 0; q < m; ++q) p *= (1.0 + ksq);
        return p;
    });
}

// ||grad v||^2_{L^2} = (2*pi)^3 sum_k |k|^2 |c(k)|^2
inline double gradient_norm_sq(const SpectralVelocity& v) {
    return detail::weighted_sum_sq(v, [](double ksq) { return ksq; });
}

// ||Laplacian v||^2_{L^2} = (2*pi)^3 sum_k |k|^4 |c(k)|^2
inline double laplacian_norm_sq(const SpectralVelocity& v) {
    return detail::weighted_sum_sq(v, [](double ksq) { return ksq * ksq; });
}

// L^2 pairing <a, b> = integral a.b dx, via Parseval
inline double l2_inner(const SpectralVelocity& a, const SpectralVelocity& b) {
    if (a.grid != b.grid) throw ConfigError("l2_inner: grid mismatch");
    double acc = 0.0;
    for_each_mode(a.grid, [&](long idx, int, int, int, double w) {
        if (w == 0.0) return;
        double re = 0.0;
        for (int j = 0; j < 3; ++j)
            re += a.c[j][idx].real() * b.c[j][idx].real() +
                  a.c[j][idx].imag() * b.c[j][idx].imag();
        acc += w * re;
    });
    const double vol = two_pi * two_pi * two_pi;
    return vol * acc;
}

// Pointwise maximum of |u(x)| over the collocation grid. This samples the
// trigonometric interpolant at grid points only, so it is the exact sup norm
// of the discrete field up to grid sampling (the true interpolant maximum can
// sit between grid points).
inline double sup_norm(const SpectralVelocity& v) {
    const PhysVector u = to_physical(v);
    double best = 0.0;
    const long n = v.grid.n_phys();
    for (long i = 0; i < n; ++i) {
        const double mag =
            u[0][i] * u[0][i] + u[1][i] * u[1][i] + u[2][i] * u[2][i];
        best = std::max(best, mag);
    }
    return std::sqrt(best);
}

// ---- structural checks -----------------------------------------------------

inline double max_abs_coeff(const SpectralVelocity& v) {
    double best = 0.0;
    for (const auto& comp : v.c)
        for (const auto& z : comp) best = std::max(best, std::abs(z));
    return best;
}

// max_k |k . c(k)|; zero (to round-off) iff the field is divergence-free
inline double divergence_defect(const SpectralVelocity& v) {
    double best = 0.0;
    for_each_mode(v.grid, [&](long idx, int k1, int k2, int k3, double) {
        const Complex kv =
            double(k1) * v.c[0][idx] + double(k2) * v.c[1][idx] + double(k3) * v.c[2][idx];
        best = std::max(best, std::abs(kv));
    });
    return best;
}

namespace detail {
// Largest violation of c(-k) = conj(c(k)) on the k3 = 0 plane plus any
// residue on the (always-zero) Nyquist planes.
inline double hermitian_defect(const GridSpec& g, const std::vector<Complex>& c) {
    const int m = g.size;
    const int half = m / 2;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
        const int in = (m - i) % m;  // index of -k1
        for (int j = 0; j < m; ++j) {
            const int jn = (m - j) % m;
            const Complex a = c[g.spec_index(i, j, 0)];
            if (i == half || j == half) {
                best = std::max(best, std::abs(a));
                continue;
            }
            const Complex b = c[g.spec_index(in, jn, 0)];
            best = std::max(best, std::abs(a - std::conj(b)));
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            best = std::max(best, std::abs(c[g.spec_index(i, j, half)]));
    return best;
}

// Projects onto the Hermitian part: averages the k3 = 0 plane with its
// reflected conjugate and zeroes the Nyquist planes.
inline void symmetrize_hermitian(const GridSpec& g, std::vector<Complex>& c) {
    const int m = g.size;
    const int half = m / 2;
    for (int i = 0; i < m; ++i) {
        const int in = (m - i) % m;
        for (int j = 0; j < m; ++j) {
            const int jn = (m - j) % m;
            const long a = g.spec_index(i, j, 0);
            if (i == half || j == half) {
                c[a] = 0.0;
                continue;
            }
            const long b = g.spec_index(in, jn, 0);
            if (b < a) continue;  // handle each pair once
            const Complex avg = 0.5 * (c[a] + std::conj(c[b]));
            c[a] = avg;
            c[b] = std::conj(avg);
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) c[g.spec_index(i, j, half)] = 0.0;
}
}  // namespace detail

inline double hermitian_defect(const SpectralVelocity& v) {
    double best = 0.0;
    for (const auto& comp : v.c)
        best = std::max(best, detail::hermitian_defect(v.grid, comp));
    return best;
}

inline void symmetrize_hermitian(SpectralVelocity& v) {
    for (auto& comp : v.c) detail::symmetrize_hermitian(v.grid, comp);
}

inline void symmetrize_hermitian(ScalarSpectralField& f) {
    detail::symmetrize_hermitian(f.grid, f.c);
}

}  // namespace tamedns
