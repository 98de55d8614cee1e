#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "tamedns/grid.hpp"

namespace tamedns {

// Thin wrapper around FFTW's 3D r2c/c2r transforms.
//
// Conventions:
//   forward:  c(k) = (1/M^3) * sum_x u(x) exp(-i k.x)   (so c(k) are the
//             coefficients of u(x) = sum_k c(k) exp(i k.x))
//   inverse:  plain FFTW c2r, which is exactly that synthesis sum.
// The forward transform zeroes the Nyquist planes (any k_i = M/2).
//
// Plans are created once per grid size with FFTW_ESTIMATE|FFTW_UNALIGNED
// (deterministic, alignment-agnostic) under a global mutex, then executed
// through the new-array interface, which is safe to call concurrently.
class FftEngine {
public:
    static const FftEngine& get(const GridSpec& grid) {
        static std::mutex mu;
        static std::map<int, std::unique_ptr<FftEngine>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(grid.size);
        if (it == cache.end())
            it = cache.emplace(grid.size,
                               std::unique_ptr<FftEngine>(new FftEngine(grid)))
                     .first;
        return *it->second;
    }

    // physical (M^3 doubles) -> normalized spectral coefficients
    void forward(const double* in, std::complex<double>* out) const {
        const int m = grid_.size;
        std::vector<double> scratch(in, in + grid_.n_phys());
        fftw_execute_dft_r2c(fwd_, scratch.data(),
                             reinterpret_cast<fftw_complex*>(out));
        const double scale = 1.0 / static_cast<double>(grid_.n_phys());
        const int half = m / 2;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < grid_.spec_last(); ++l) {
                    const long idx = grid_.spec_index(i, j, l);
                    if (i == half || j == half || l == half)
                        out[idx] = 0.0;
                    else
                        out[idx] *= scale;
                }
    }

    // spectral coefficients -> physical samples (input left untouched; FFTW's
    // c2r would otherwise destroy it)
    void inverse(const std::complex<double>* in, double* out) const {
        std::vector<std::complex<double>> scratch(in, in + grid_.n_spec());
        fftw_execute_dft_c2r(bwd_,
                             reinterpret_cast<fftw_complex*>(scratch.data()),
                             out);
    }

    const GridSpec& grid() const { return grid_; }

    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;
    ~FftEngine() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

private:
    explicit FftEngine(const GridSpec& grid) : grid_(grid) {
        const int m = grid_.size;
        std::vector<double> r(grid_.n_phys());
        std::vector<std::complex<double>> c(grid_.n_spec());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_r2c_3d(m, m, m, r.data(),
                                    reinterpret_cast<fftw_complex*>(c.data()),
                                    flags);
        bwd_ = fftw_plan_dft_c2r_3d(m, m, m,
                                    reinterpret_cast<fftw_complex*>(c.data()),
                                    r.data(), flags);
        if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
    }

    GridSpec grid_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

}  // namespace tamedns
