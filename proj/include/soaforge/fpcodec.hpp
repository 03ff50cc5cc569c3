#pragma once

#include <cstdint>
#include <stdexcept>

// Truncated floating-point storage formats.
//
// A value is stored in the smallest enclosing IEEE format (binary64,
// binary32 or binary16, selected by the total bit budget) with its
// mantissa shortened to fit the requested width.  Encoding rounds to the
// base format with round-to-nearest-even and then drops mantissa bits
// toward zero; decoding zero-extends the mantissa and widens exactly.

namespace soaforge::fpcodec {

struct PrecisionSpec {
    int total_bits;
    int sign_bits;      // always 1
    int exponent_bits;  // 11, 8 or 5
    int mantissa_bits;  // total_bits - 1 - exponent_bits

    static constexpr int kMinTotalBits = 7;
    static constexpr int kMaxTotalBits = 64;

    // Width of the enclosing IEEE format: 64, 32 or 16.
    int base_bits() const { return exponent_bits == 11 ? 64 : exponent_bits == 8 ? 32 : 16; }
    int base_mantissa_bits() const { return base_bits() - 1 - exponent_bits; }
    int exponent_bias() const { return (1 << (exponent_bits - 1)) - 1; }

    bool operator==(const PrecisionSpec&) const = default;
};

struct PackedScalar {
    std::uint64_t bits;  // only the low total_bits are significant
    PrecisionSpec spec;
};

// Maps a total bit budget to its sign/exponent/mantissa split.
// Throws std::invalid_argument outside [7, 64].
PrecisionSpec layout_for(int total_bits);

// Round x to the spec's base IEEE format (round-to-nearest-even, overflow
// saturates to infinity) and truncate the mantissa toward zero.
PackedScalar encode(double x, const PrecisionSpec& spec);
std::uint64_t encode_bits(double x, const PrecisionSpec& spec);

// Exact inverse of the storage mapping: zero-extend the mantissa to the
// base format and widen to binary64.
double decode(const PackedScalar& p);
double decode_bits(std::uint64_t bits, const PrecisionSpec& spec);

// decode(encode(x)).  Idempotent.
double quantize(double x, const PrecisionSpec& spec);

// Bit-level transport between a truncated value and its base IEEE format,
// used by buffer unpack/pack.  Exact inverses: truncate(expand(b)) == b
// for every well-formed b, and expand(truncate(n)) == n whenever n already
// carries a truncated mantissa.
std::uint64_t expand_to_base_bits(std::uint64_t bits, const PrecisionSpec& spec);
std::uint64_t truncate_from_base_bits(std::uint64_t base_bits, const PrecisionSpec& spec);

// Round x to an IEEE format with the given exponent/mantissa widths
// (round-to-nearest-even), returning the raw bits.  Exposed for tests.
std::uint64_t narrow_to_ieee(double x, int exponent_bits, int mantissa_bits);
// Exact widening of raw IEEE bits to binary64.
double widen_from_ieee(std::uint64_t bits, int exponent_bits, int mantissa_bits);

}  // namespace soaforge::fpcodec
