#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "soaforge/bitpack.hpp"
#include "soaforge/schema.hpp"

// Data-transfer operators over packed particle buffers:
//   narrow / widen_merge   project onto a kernel's field set and merge back
//   aos_to_soa / soa_to_aos  layout permutation
//   unpack / pack          truncated storage <-> enclosing IEEE formats
//   move_to                copy between named arenas with byte accounting
//
// All operators except pack of freshly-written native data are lossless
// bit permutations or exact bit expansions.

namespace soaforge::layoutops {

enum class LayoutTag { AoS, SoA };
enum class PrecisionTag { Compressed, Native };
enum class ArenaId { Host, Device };

const char* arena_name(ArenaId id);

// Exact byte accounting plus an analytic latency/bandwidth time model.
struct TransferLedger {
    std::atomic<std::uint64_t> bytes_to_device{0};
    std::atomic<std::uint64_t> bytes_to_host{0};
    std::atomic<std::uint64_t> transfers_to_device{0};
    std::atomic<std::uint64_t> transfers_to_host{0};

    void record(ArenaId to, std::uint64_t bytes) {
        if (to == ArenaId::Device) {
            bytes_to_device.fetch_add(bytes, std::memory_order_relaxed);
            transfers_to_device.fetch_add(1, std::memory_order_relaxed);
        } else {
            bytes_to_host.fetch_add(bytes, std::memory_order_relaxed);
            transfers_to_host.fetch_add(1, std::memory_order_relaxed);
        }
    }

    std::uint64_t total_bytes() const { return bytes_to_device + bytes_to_host; }
    std::uint64_t total_transfers() const { return transfers_to_device + transfers_to_host; }

    // sum over transfers of (latency + bytes / bandwidth)
    double modeled_time_s(double latency_s, double bandwidth_bytes_per_s) const {
        return double(total_transfers()) * latency_s + double(total_bytes()) / bandwidth_bytes_per_s;
    }

    void reset() {
        bytes_to_device = bytes_to_host = 0;
        transfers_to_device = transfers_to_host = 0;
    }
};

struct Arena {
    ArenaId id;
    std::atomic<std::uint64_t> bytes_allocated{0};
};

// The pair of named memory spaces plus the interconnect ledger.  The device
// arena is ordinary host memory under a different id; the ledger is the
// comparison instrument, not a timing claim.
struct Machine {
    Arena host{ArenaId::Host};
    Arena device{ArenaId::Device};
    TransferLedger ledger;

    Arena& arena(ArenaId id) { return id == ArenaId::Host ? host : device; }
};

struct PackedBuffer {
    std::shared_ptr<const schema::RecordSchema> schema_;
    std::uint64_t count = 0;
    LayoutTag layout = LayoutTag::AoS;
    PrecisionTag precision = PrecisionTag::Compressed;
    std::vector<int> subset;  // field indices, declaration order; all fields when full
    bitpack::BitBuffer data;
    ArenaId home = ArenaId::Host;

    bool full_subset() const { return subset.size() == schema_->fields.size(); }
    int width_of(int field_idx) const {
        const auto& f = schema_->fields[field_idx];
        return precision == PrecisionTag::Compressed ? f.stored_width() : f.native_width();
    }
    // Sum of arity * width over the subset.
    std::uint64_t record_bits() const;
    std::uint64_t total_bits() const { return record_bits() * count; }
    std::uint64_t total_bytes() const { return (total_bits() + 7) / 8; }

    // Bit offset of lane `lane` of subset position `pos` in record `rec`.
    std::uint64_t lane_offset(int pos, std::uint64_t rec, int lane) const;
    int subset_pos(int field_idx) const;  // -1 if not present
};

// Zero-initialised buffer over the full field set.
PackedBuffer make_buffer(std::shared_ptr<const schema::RecordSchema> schema, std::uint64_t count,
                         LayoutTag layout, PrecisionTag precision, ArenaId home, Machine& machine);

// N: project onto reads ∪ writes of the access set.  Requires a full subset.
PackedBuffer narrow(const PackedBuffer& buf, const schema::KernelAccessSet& access);
void narrow_into(const PackedBuffer& buf, const schema::KernelAccessSet& access,
                 PackedBuffer& dst);

// N^T: overwrite the access set's write fields of `original` from `narrowed`.
void widen_merge(const PackedBuffer& narrowed, PackedBuffer& original,
                 const schema::KernelAccessSet& access);

// C: pure bit-slot permutations; exact inverses of each other.
PackedBuffer aos_to_soa(const PackedBuffer& buf);
PackedBuffer soa_to_aos(const PackedBuffer& buf);
void aos_to_soa_into(const PackedBuffer& buf, PackedBuffer& dst);
void soa_to_aos_into(const PackedBuffer& buf, PackedBuffer& dst);

// U / U^T: expand truncated fields to their enclosing IEEE widths and back.
PackedBuffer unpack(const PackedBuffer& buf);
PackedBuffer pack(const PackedBuffer& buf);
void unpack_into(const PackedBuffer& buf, PackedBuffer& dst);
void pack_into(const PackedBuffer& buf, PackedBuffer& dst);

// M: byte-identical copy into the other arena; the ledger records
// ceil(length_bits / 8) bytes.
PackedBuffer move_to(const PackedBuffer& buf, ArenaId to, Machine& machine);
void move_into(const PackedBuffer& buf, ArenaId to, Machine& machine, PackedBuffer& dst);

}  // namespace soaforge::layoutops
