#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tamedns/field.hpp"
#include "tamedns/grid.hpp"
#include "tamedns/integrator.hpp"
#include "tamedns/output.hpp"

namespace tamedns {

// Checkpoint layout ("tamedns-ckpt-1"):
//   line 1  JSON header: format tag, grid_size, t, step_count, nu,
//           taming_enabled, taming_n, normalization ("coefficient": the
//           stored numbers are the c(k) of u(x) = sum c(k) exp(i k.x))
//   then    raw little-endian float64 (re, im) pairs, component-major
//           (j = 1..3), k-lexicographic over the full signed cube
//           k1, k2, k3 in {-K..K}, K = M/2 - 1, Hermitian-completed on write.
// The full cube is redundant but makes the byte layout independent of the
// in-memory half-spectrum convention; consistency is re-verified on load.
struct Checkpoint {
    TimeState state;
    double nu = 1.0;
    double taming_n = 1.0;
    bool taming_enabled = true;
};

namespace detail {

inline Complex cube_fetch(const SpectralVelocity& v, int comp, int k1, int k2, int k3) {
    const GridSpec& g = v.grid;
    const bool flip = k3 < 0;
    const int q1 = flip ? -k1 : k1;
    const int q2 = flip ? -k2 : k2;
    const int q3 = flip ? -k3 : k3;
    const int i = q1 >= 0 ? q1 : q1 + g.size;
    const int j = q2 >= 0 ? q2 : q2 + g.size;
    const Complex z = v.c[comp][g.spec_index(i, j, q3)];
    return flip ? std::conj(z) : z;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    const GridSpec& g = ck.state.u.grid;
    const int kmax = g.max_wave();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open checkpoint for writing: " + path);

    out << "{\"format\":\"tamedns-ckpt-1\",\"grid_size\":" << g.size
        << ",\"t\":" << fmt17(ck.state.t) << ",\"step_count\":" << ck.state.step_count
        << ",\"nu\":" << fmt17(ck.nu)
        << ",\"taming_enabled\":" << (ck.taming_enabled ? "true" : "false")
        << ",\"taming_n\":" << fmt17(ck.taming_n)
        << ",\"normalization\":\"coefficient\"}\n";

    std::vector<double> row;
    for (int comp = 0; comp < 3; ++comp)
        for (int k1 = -kmax; k1 <= kmax; ++k1)
            for (int k2 = -kmax; k2 <= kmax; ++k2) {
                row.clear();
                for (int k3 = -kmax; k3 <= kmax; ++k3) {
                    const Complex z = detail::cube_fetch(ck.state.u, comp, k1, k2, k3);
                    row.push_back(z.real());
                    row.push_back(z.imag());
                }
                out.write(reinterpret_cast<const char*>(row.data()),
                          static_cast<std::streamsize>(row.size() * sizeof(double)));
            }
    if (!out) throw ConfigError("failed writing checkpoint: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    std::string header;
    if (!std::getline(in, header))
        throw ConfigError("checkpoint missing header: " + path);

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(header);
    } catch (const std::exception& e) {
        throw ConfigError("checkpoint header is not valid JSON: " + std::string(e.what()));
    }
    if (j.value("format", "") != "tamedns-ckpt-1")
        throw ConfigError("unsupported checkpoint format tag");
    if (j.value("normalization", "") != "coefficient")
        throw ConfigError("unsupported checkpoint normalization");

    Checkpoint ck;
    const GridSpec g(j.at("grid_size").get<int>());
    ck.state.t = j.at("t").get<double>();
    ck.state.step_count = j.at("step_count").get<long>();
    ck.nu = j.at("nu").get<double>();
    ck.taming_n = j.at("taming_n").get<double>();
    ck.taming_enabled = j.at("taming_enabled").get<bool>();
    ck.state.u = SpectralVelocity(g);

    const int kmax = g.max_wave();
    const long side = static_cast<long>(2 * kmax + 1);
    const long cube = side * side * side;
    std::vector<double> buf(static_cast<size_t>(3 * cube) * 2);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!in || in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(double)))
        throw ConfigError("checkpoint truncated: " + path);
    in.peek();
    if (!in.eof()) throw ConfigError("checkpoint has trailing bytes: " + path);

    auto cube_at = [&](int comp, int k1, int k2, int k3) {
        const long idx = ((static_cast<long>(comp) * side + (k1 + kmax)) * side +
                          (k2 + kmax)) * side + (k3 + kmax);
        return Complex(buf[2 * idx], buf[2 * idx + 1]);
    };

    double max_abs = 0.0;
    for (size_t i = 0; i + 1 < buf.size(); i += 2)
        max_abs = std::max(max_abs, std::hypot(buf[i], buf[i + 1]));

    // keep the k3 >= 0 half, then verify the rest is its Hermitian completion
    for (int comp = 0; comp < 3; ++comp)
        for (int k1 = -kmax; k1 <= kmax; ++k1)
            for (int k2 = -kmax; k2 <= kmax; ++k2)
                for (int k3 = 0; k3 <= kmax; ++k3) {
                    const int i = k1 >= 0 ? k1 : k1 + g.size;
                    const int jj = k2 >= 0 ? k2 : k2 + g.size;
                    ck.state.u.c[comp][g.spec_index(i, jj, k3)] =
                        cube_at(comp, k1, k2, k3);
                }
    double defect = hermitian_defect(ck.state.u);
    for (int comp = 0; comp < 3; ++comp)
        for (int k1 = -kmax; k1 <= kmax; ++k1)
            for (int k2 = -kmax; k2 <= kmax; ++k2)
                for (int k3 = -kmax; k3 < 0; ++k3) {
                    const Complex want = detail::cube_fetch(ck.state.u, comp, k1, k2, k3);
                    defect = std::max(defect,
                                      std::abs(cube_at(comp, k1, k2, k3) - want));
                }
    if (defect > 1e-12 * std::max(max_abs, 1e-300))
        throw ConfigError("checkpoint violates Hermitian symmetry");

    symmetrize_hermitian(ck.state.u);
    ck.state.u.divfree = true;
    return ck;
}

}  // namespace tamedns
