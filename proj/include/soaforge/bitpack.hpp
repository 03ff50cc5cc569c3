#pragma once

#include <cstdint>
#include <vector>

// Bit-granular buffer access.  Bit k of the stream lives in byte k>>3 at
// position k&7, so field offsets are plain additions regardless of byte
// alignment.

namespace soaforge::bitpack {

struct BitBuffer {
    std::vector<std::uint8_t> bytes;
    std::uint64_t length_bits = 0;

    BitBuffer() = default;
    explicit BitBuffer(std::uint64_t bits) { resize(bits); }

    void resize(std::uint64_t bits) {
        length_bits = bits;
        bytes.assign((bits + 7) / 8, 0);
    }
};

// Replace exactly width_bits bits at offset_bits with the low bits of value.
// width_bits must be 1..64 and value must fit; the slot must be in bounds.
void write_bits(BitBuffer& buf, std::uint64_t offset_bits, int width_bits, std::uint64_t value);

// Exact inverse of write_bits over the same slot.
std::uint64_t read_bits(const BitBuffer& buf, std::uint64_t offset_bits, int width_bits);

// Copy an arbitrary-length bit range between buffers (or within one).
void copy_bits(const BitBuffer& src, std::uint64_t src_offset, BitBuffer& dst,
               std::uint64_t dst_offset, std::uint64_t nbits);

}  // namespace soaforge::bitpack
