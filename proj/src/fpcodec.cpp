#include "soaforge/fpcodec.hpp"

#include <bit>
#include <string>

namespace soaforge::fpcodec {

namespace {

constexpr std::uint64_t mask(int bits) {
    return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

// Round sig right by `shift` bits with round-to-nearest-even.
std::uint64_t shift_right_rne(std::uint64_t sig, int shift) {
    if (shift <= 0) return sig << -shift;
    if (shift > 64) return 0;
    if (shift == 64) return sig > (std::uint64_t{1} << 63) ? 1 : 0;
    std::uint64_t kept = sig >> shift;
    std::uint64_t rem = sig & mask(shift);
    std::uint64_t half = std::uint64_t{1} << (shift - 1);
    if (rem > half || (rem == half && (kept & 1))) ++kept;
    return kept;
}

}  // namespace

PrecisionSpec layout_for(int total_bits) {
    if (total_bits < PrecisionSpec::kMinTotalBits)
        throw std::invalid_argument("total_bits " + std::to_string(total_bits) +
                                    " below minimum width 7");
    if (total_bits > PrecisionSpec::kMaxTotalBits)
        throw std::invalid_argument("total_bits " + std::to_string(total_bits) +
                                    " above maximum width 64");
    int exponent = total_bits >= 33 ? 11 : total_bits >= 17 ? 8 : 5;
    return PrecisionSpec{total_bits, 1, exponent, total_bits - 1 - exponent};
}

std::uint64_t narrow_to_ieee(double x, int exponent_bits, int mantissa_bits) {
    const std::uint64_t src = std::bit_cast<std::uint64_t>(x);
    if (exponent_bits == 11 && mantissa_bits == 52) return src;

    const std::uint64_t sign = (src >> 63) << (exponent_bits + mantissa_bits);
    const int src_exp = static_cast<int>((src >> 52) & mask(11));
    const std::uint64_t src_man = src & mask(52);
    const int bias = (1 << (exponent_bits - 1)) - 1;
    const int exp_max = (1 << exponent_bits) - 1;

    if (src_exp == 0x7ff) {
        if (src_man == 0) return sign | (std::uint64_t(exp_max) << mantissa_bits);
        // NaN: keep the top payload bits; never let the mantissa collapse
        // to zero, which would read back as infinity.
        std::uint64_t payload = src_man >> (52 - mantissa_bits);
        if (payload == 0) payload = std::uint64_t{1} << (mantissa_bits - 1);
        return sign | (std::uint64_t(exp_max) << mantissa_bits) | payload;
    }

    // Normalise the significand so its leading bit sits at position 52.
    std::uint64_t sig;
    int unbiased;
    if (src_exp == 0) {
        if (src_man == 0) return sign;
        int lead = 63 - std::countl_zero(src_man);
        sig = src_man << (52 - lead);
        unbiased = (1 - 1023) - (52 - lead);
    } else {
        sig = (std::uint64_t{1} << 52) | src_man;
        unbiased = src_exp - 1023;
    }

    int target_exp = unbiased + bias;
    if (target_exp >= exp_max)  // overflow saturates to infinity
        return sign | (std::uint64_t(exp_max) << mantissa_bits);

    if (target_exp >= 1) {
        std::uint64_t rounded = shift_right_rne(sig, 52 - mantissa_bits);
        if (rounded >> (mantissa_bits + 1)) {  // carry out of the mantissa
            rounded >>= 1;
            if (++target_exp >= exp_max)
                return sign | (std::uint64_t(exp_max) << mantissa_bits);
        }
        return sign | (std::uint64_t(target_exp) << mantissa_bits) | (rounded & mask(mantissa_bits));
    }

    // Subnormal in the target format.
    int shift = (52 - mantissa_bits) + (1 - target_exp);
    std::uint64_t rounded = shift_right_rne(sig, shift);
    // rounded == 1<<mantissa_bits re-enters the normal range as exponent 1.
    return sign | rounded;
}

double widen_from_ieee(std::uint64_t bits, int exponent_bits, int mantissa_bits) {
    if (exponent_bits == 11 && mantissa_bits == 52) return std::bit_cast<double>(bits);

    const std::uint64_t sign = (bits >> (exponent_bits + mantissa_bits)) & 1;
    const int exp = static_cast<int>((bits >> mantissa_bits) & mask(exponent_bits));
    const std::uint64_t man = bits & mask(mantissa_bits);
    const int bias = (1 << (exponent_bits - 1)) - 1;
    const int exp_max = (1 << exponent_bits) - 1;

    std::uint64_t out;
    if (exp == exp_max) {
        out = (sign << 63) | (std::uint64_t{0x7ff} << 52) | (man << (52 - mantissa_bits));
    } else if (exp == 0) {
        if (man == 0) {
            out = sign << 63;
        } else {
            int lead = 63 - std::countl_zero(man);
            int unbiased = (1 - bias) - mantissa_bits + lead;
            std::uint64_t dman = (man << (52 - lead)) & mask(52);
            out = (sign << 63) | (std::uint64_t(unbiased + 1023) << 52) | dman;
        }
    } else {
        out = (sign << 63) | (std::uint64_t(exp - bias + 1023) << 52) | (man << (52 - mantissa_bits));
    }
    return std::bit_cast<double>(out);
}

std::uint64_t expand_to_base_bits(std::uint64_t bits, const PrecisionSpec& spec) {
    const int drop = spec.base_mantissa_bits() - spec.mantissa_bits;
    const std::uint64_t sign_exp = bits >> spec.mantissa_bits;
    const std::uint64_t man = bits & mask(spec.mantissa_bits);
    return (sign_exp << spec.base_mantissa_bits()) | (man << drop);
}

std::uint64_t truncate_from_base_bits(std::uint64_t base_bits, const PrecisionSpec& spec) {
    const int base_man = spec.base_mantissa_bits();
    const int drop = base_man - spec.mantissa_bits;
    const std::uint64_t sign_exp = base_bits >> base_man;
    std::uint64_t man = (base_bits & mask(base_man)) >> drop;
    const std::uint64_t exp = sign_exp & mask(spec.exponent_bits);
    if (exp == mask(spec.exponent_bits) && (base_bits & mask(base_man)) != 0 && man == 0)
        man = std::uint64_t{1} << (spec.mantissa_bits - 1);  // NaN must stay NaN
    return (sign_exp << spec.mantissa_bits) | man;
}

std::uint64_t encode_bits(double x, const PrecisionSpec& spec) {
    std::uint64_t base = narrow_to_ieee(x, spec.exponent_bits, spec.base_mantissa_bits());
    return truncate_from_base_bits(base, spec);
}

PackedScalar encode(double x, const PrecisionSpec& spec) {
    return PackedScalar{encode_bits(x, spec), spec};
}

double decode_bits(std::uint64_t bits, const PrecisionSpec& spec) {
    return widen_from_ieee(expand_to_base_bits(bits, spec), spec.exponent_bits,
                           spec.base_mantissa_bits());
}

double decode(const PackedScalar& p) { return decode_bits(p.bits, p.spec); }

double quantize(double x, const PrecisionSpec& spec) {
    return decode_bits(encode_bits(x, spec), spec);
}

}  // namespace soaforge::fpcodec
