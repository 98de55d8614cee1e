#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace tamedns {

// Error raised for invalid configuration or invalid operation preconditions.
// The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the CFL controller drives dt below the configured minimum,
// i.e. the velocity magnitude has grown past what the step policy allows.
// The CLI maps it to exit code 3.
class BlowupError : public std::runtime_error {
public:
    BlowupError(double t, double sup_u, double dt, double dt_min)
        : std::runtime_error("blow-up: CFL time step " + std::to_string(dt) +
                             " fell below dt_min " + std::to_string(dt_min) +
                             " at t=" + std::to_string(t) +
                             " with sup|u|=" + std::to_string(sup_u)),
          t_(t), sup_u_(sup_u) {}
    double t() const { return t_; }
    double sup_u() const { return sup_u_; }

private:
    double t_;
    double sup_u_;
};

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Uniform grid with M points per axis on the periodic box [0, 2*pi)^3.
//
// Fourier side: the retained wavenumbers per axis are {-M/2+1, ..., M/2-1};
// the Nyquist mode k = M/2 carries no phase information for real data and is
// forced to zero by every transform and operator here. Products of fields are
// dealiased by the 2/3 rule: modes with any |k_i| > floor(M/3) are zeroed.
struct GridSpec {
    int size = 32;

    GridSpec() = default;
    explicit GridSpec(int m) : size(m) { validate(); }

    void validate() const {
        if (size < 8 || size % 2 != 0)
            throw ConfigError("grid size must be even and >= 8, got " +
                              std::to_string(size));
    }

    int max_wave() const { return size / 2 - 1; }      // largest retained |k_i|
    int dealias_bound() const { return size / 3; }     // 2/3-rule cutoff
    double spacing() const { return two_pi / size; }

    // physical layout: row-major (i,j,l) -> (i*M + j)*M + l
    long n_phys() const { return static_cast<long>(size) * size * size; }
    // spectral layout (r2c, half third axis): (i*M + j)*(M/2+1) + l
    int spec_last() const { return size / 2 + 1; }
    long n_spec() const { return static_cast<long>(size) * size * spec_last(); }

    // signed wavenumber for a full-length axis index (0..M-1); index M/2 maps
    // to the (always zeroed) Nyquist mode +M/2
    int signed_wave(int idx) const { return idx <= size / 2 ? idx : idx - size; }

    long spec_index(int i, int j, int l) const {
        return (static_cast<long>(i) * size + j) * spec_last() + l;
    }
    long phys_index(int i, int j, int l) const {
        return (static_cast<long>(i) * size + j) * size + l;
    }

    bool operator==(const GridSpec& o) const { return size == o.size; }
    bool operator!=(const GridSpec& o) const { return size != o.size; }
};

}  // namespace tamedns
