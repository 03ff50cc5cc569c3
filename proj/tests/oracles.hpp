#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is written against the definitions directly — per-bit
// loops, direct double loops, literal formulas — sharing no code with the
// implementations under test.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <vector>

namespace oracles {

// Per-bit stream access, little-endian bit order within each byte.
inline int get_bit(const std::vector<std::uint8_t>& bytes, std::uint64_t bit) {
    return (bytes[bit / 8] >> (bit % 8)) & 1;
}

inline void set_bit(std::vector<std::uint8_t>& bytes, std::uint64_t bit, int value) {
    if (value)
        bytes[bit / 8] |= std::uint8_t(1u << (bit % 8));
    else
        bytes[bit / 8] &= std::uint8_t(~(1u << (bit % 8)));
}

inline void write_bits_naive(std::vector<std::uint8_t>& bytes, std::uint64_t offset, int width,
                             std::uint64_t value) {
    for (int k = 0; k < width; ++k) set_bit(bytes, offset + k, int((value >> k) & 1));
}

inline std::uint64_t read_bits_naive(const std::vector<std::uint8_t>& bytes, std::uint64_t offset,
                                     int width) {
    std::uint64_t value = 0;
    for (int k = 0; k < width; ++k)
        value |= std::uint64_t(get_bit(bytes, offset + k)) << k;
    return value;
}

// Quantize by rounding to the enclosing IEEE format and clearing the
// mantissa tail, operating on the bit pattern directly.
inline double quantize_naive(double value, int total_bits) {
    const int exponent_bits = total_bits >= 33 ? 11 : (total_bits >= 17 ? 8 : 5);
    const int mantissa_bits = total_bits - 1 - exponent_bits;
    if (exponent_bits == 11) {
        std::uint64_t bits;
        std::memcpy(&bits, &value, 8);
        const int drop = 52 - mantissa_bits;
        if (std::isfinite(value) && drop > 0) bits &= ~((1ull << drop) - 1);
        std::memcpy(&value, &bits, 8);
        return value;
    }
    if (exponent_bits == 8) {
        float f = static_cast<float>(value);  // nearest-even by the FPU
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        const int drop = 23 - mantissa_bits;
        if (std::isfinite(f) && drop > 0) bits &= ~((1u << drop) - 1);
        std::memcpy(&f, &bits, 4);
        return double(f);
    }
    // binary16 path: round via scalbn arithmetic on normal-range values.
    const bool neg = std::signbit(value);
    double mag = std::abs(value);
    if (mag == 0.0) return value;
    int exp;
    std::frexp(mag, &exp);  // mag = f * 2^exp, f in [0.5, 1)
    // round to 11 significant bits (binary16), nearest even
    const double scale = std::ldexp(1.0, 11 - exp);
    double rounded = std::nearbyint(mag * scale) / scale;
    if (rounded >= 65536.0) return neg ? -INFINITY : INFINITY;
    // then truncate to mantissa_bits significant fractional bits
    std::frexp(rounded, &exp);
    const double tscale = std::ldexp(1.0, mantissa_bits + 1 - exp);
    double truncated = std::floor(rounded * tscale) / tscale;
    return neg ? -truncated : truncated;
}

// --- SPH references --------------------------------------------------------

inline double w(double r, double h) {
    const double q = r / h;
    if (q >= 2.0) return 0.0;
    const double norm = (1.0 / std::numbers::pi) / (h * h * h);
    if (q < 1.0) return norm * (1.0 - 1.5 * q * q + 0.75 * q * q * q);
    const double t = 2.0 - q;
    return norm * 0.25 * t * t * t;
}

inline double dw_dr(double r, double h) {
    const double q = r / h;
    if (q >= 2.0) return 0.0;
    const double norm = (1.0 / std::numbers::pi) / (h * h * h * h);
    if (q < 1.0) return norm * (-3.0 * q + 2.25 * q * q);
    const double t = 2.0 - q;
    return norm * (-0.75 * t * t);
}

struct Particles {
    std::vector<std::array<double, 3>> x, v, a;
    std::vector<double> m, h, u, rho, P, du;
};

// Direct double loop over [begin, begin+len), ascending j, self term kept.
inline void density(Particles& s, std::size_t begin, std::size_t len) {
    for (std::size_t i = begin; i < begin + len; ++i) {
        double acc = 0.0;
        for (std::size_t j = begin; j < begin + len; ++j) {
            const double dx0 = s.x[i][0] - s.x[j][0];
            const double dx1 = s.x[i][1] - s.x[j][1];
            const double dx2 = s.x[i][2] - s.x[j][2];
            const double r = std::sqrt(dx0 * dx0 + dx1 * dx1 + dx2 * dx2);
            acc += s.m[j] * w(r, 0.5 * (s.h[i] + s.h[j]));
        }
        s.rho[i] = acc;
    }
}

// Symmetric pressure force; self pair skipped by index.
inline void force(Particles& s, std::size_t begin, std::size_t len) {
    for (std::size_t i = begin; i < begin + len; ++i) {
        const double Pi_over_rho2 = s.P[i] / (s.rho[i] * s.rho[i]);
        std::array<double, 3> acc = {0, 0, 0};
        double compr = 0.0;
        for (std::size_t j = begin; j < begin + len; ++j) {
            if (j == i) continue;
            const double dx0 = s.x[i][0] - s.x[j][0];
            const double dx1 = s.x[i][1] - s.x[j][1];
            const double dx2 = s.x[i][2] - s.x[j][2];
            const double r = std::sqrt(dx0 * dx0 + dx1 * dx1 + dx2 * dx2);
            double g0 = 0, g1 = 0, g2 = 0;
            if (r != 0.0) {
                const double scale = dw_dr(r, 0.5 * (s.h[i] + s.h[j])) / r;
                g0 = scale * dx0;
                g1 = scale * dx1;
                g2 = scale * dx2;
            }
            const double pf = Pi_over_rho2 + s.P[j] / (s.rho[j] * s.rho[j]);
            acc[0] -= s.m[j] * pf * g0;
            acc[1] -= s.m[j] * pf * g1;
            acc[2] -= s.m[j] * pf * g2;
            compr += s.m[j] * ((s.v[i][0] - s.v[j][0]) * g0 + (s.v[i][1] - s.v[j][1]) * g1 +
                               (s.v[i][2] - s.v[j][2]) * g2);
        }
        s.a[i] = acc;
        s.du[i] = Pi_over_rho2 * compr;
    }
}

}  // namespace oracles
