#include "soaforge/bitpack.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace soaforge::bitpack {

namespace {

void check_slot(const BitBuffer& buf, std::uint64_t offset, int width) {
    if (width < 1 || width > 64)
        throw std::invalid_argument("bit field width " + std::to_string(width) +
                                    " outside 1..64");
    if (offset + width > buf.length_bits)
        throw std::out_of_range("bit slot [" + std::to_string(offset) + ", " +
                                std::to_string(offset + width) + ") exceeds buffer of " +
                                std::to_string(buf.length_bits) + " bits");
}

}  // namespace

void write_bits(BitBuffer& buf, std::uint64_t offset_bits, int width_bits, std::uint64_t value) {
    check_slot(buf, offset_bits, width_bits);
    if (width_bits < 64 && (value >> width_bits) != 0)
        throw std::invalid_argument("value does not fit in " + std::to_string(width_bits) +
                                    " bits");
    int remaining = width_bits;
    std::uint64_t pos = offset_bits;
    while (remaining > 0) {
        const std::uint64_t byte = pos >> 3;
        const int bit = static_cast<int>(pos & 7);
        const int n = std::min(8 - bit, remaining);
        const std::uint8_t m = static_cast<std::uint8_t>(((1u << n) - 1) << bit);
        buf.bytes[byte] = static_cast<std::uint8_t>(
            (buf.bytes[byte] & ~m) | ((value & ((1u << n) - 1)) << bit));
        value >>= n;
        pos += n;
        remaining -= n;
    }
}

std::uint64_t read_bits(const BitBuffer& buf, std::uint64_t offset_bits, int width_bits) {
    check_slot(buf, offset_bits, width_bits);
    std::uint64_t value = 0;
    int got = 0;
    std::uint64_t pos = offset_bits;
    while (got < width_bits) {
        const std::uint64_t byte = pos >> 3;
        const int bit = static_cast<int>(pos & 7);
        const int n = std::min(8 - bit, width_bits - got);
        const std::uint64_t chunk = (buf.bytes[byte] >> bit) & ((1u << n) - 1);
        value |= chunk << got;
        got += n;
        pos += n;
    }
    return value;
}

void copy_bits(const BitBuffer& src, std::uint64_t src_offset, BitBuffer& dst,
               std::uint64_t dst_offset, std::uint64_t nbits) {
    while (nbits > 0) {
        const int n = static_cast<int>(std::min<std::uint64_t>(nbits, 64));
        write_bits(dst, dst_offset, n, read_bits(src, src_offset, n));
        src_offset += n;
        dst_offset += n;
        nbits -= n;
    }
}

}  // namespace soaforge::bitpack
