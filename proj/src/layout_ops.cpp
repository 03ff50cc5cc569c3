#include "soaforge/layout_ops.hpp"

#include <algorithm>
#include <stdexcept>

namespace soaforge::layoutops {

using bitpack::read_bits;
using bitpack::write_bits;

const char* arena_name(ArenaId id) { return id == ArenaId::Host ? "host" : "device"; }

std::uint64_t PackedBuffer::record_bits() const {
    std::uint64_t bits = 0;
    for (int idx : subset) bits += std::uint64_t(schema_->fields[idx].arity) * width_of(idx);
    return bits;
}

int PackedBuffer::subset_pos(int field_idx) const {
    for (size_t i = 0; i < subset.size(); ++i)
        if (subset[i] == field_idx) return static_cast<int>(i);
    return -1;
}

std::uint64_t PackedBuffer::lane_offset(int pos, std::uint64_t rec, int lane) const {
    const int field_idx = subset[pos];
    const int width = width_of(field_idx);
    if (layout == LayoutTag::AoS) {
        std::uint64_t prefix = 0;
        for (int p = 0; p < pos; ++p)
            prefix += std::uint64_t(schema_->fields[subset[p]].arity) * width_of(subset[p]);
        return rec * record_bits() + prefix +
               std::uint64_t(lane) * width;
    }
    std::uint64_t stream_base = 0;
    for (int p = 0; p < pos; ++p)
        stream_base += count * std::uint64_t(schema_->fields[subset[p]].arity) * width_of(subset[p]);
    return stream_base + (rec * std::uint64_t(schema_->fields[field_idx].arity) + lane) * width;
}

namespace {

std::vector<int> full_subset_of(const schema::RecordSchema& s) {
    std::vector<int> v(s.fields.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    return v;
}

void configure(PackedBuffer& dst, const PackedBuffer& like, LayoutTag layout,
               PrecisionTag precision, std::vector<int> subset, ArenaId home) {
    dst.schema_ = like.schema_;
    dst.count = like.count;
    dst.layout = layout;
    dst.precision = precision;
    dst.subset = std::move(subset);
    dst.home = home;
    dst.data.resize(dst.total_bits());
}

// Iterate lanes of one subset field in record order, calling fn(src_off, dst_off).
template <typename Fn>
void for_each_lane_pair(const PackedBuffer& a, int pos_a, const PackedBuffer& b, int pos_b,
                        Fn&& fn) {
    const int arity = a.schema_->fields[a.subset[pos_a]].arity;
    for (std::uint64_t rec = 0; rec < a.count; ++rec)
        for (int lane = 0; lane < arity; ++lane)
            fn(a.lane_offset(pos_a, rec, lane), b.lane_offset(pos_b, rec, lane));
}

}  // namespace

PackedBuffer make_buffer(std::shared_ptr<const schema::RecordSchema> schema, std::uint64_t count,
                         LayoutTag layout, PrecisionTag precision, ArenaId home, Machine& machine) {
    PackedBuffer buf;
    buf.schema_ = std::move(schema);
    buf.count = count;
    buf.layout = layout;
    buf.precision = precision;
    buf.subset = full_subset_of(*buf.schema_);
    buf.home = home;
    buf.data.resize(buf.total_bits());
    machine.arena(home).bytes_allocated.fetch_add(buf.total_bytes(), std::memory_order_relaxed);
    return buf;
}

void narrow_into(const PackedBuffer& buf, const schema::KernelAccessSet& access,
                 PackedBuffer& dst) {
    if (!buf.full_subset())
        throw std::invalid_argument("narrow requires a buffer over the full field set");
    schema::check_access_set(*buf.schema_, access);

    // reads ∪ writes, in declaration order
    std::vector<int> subset;
    for (size_t i = 0; i < buf.schema_->fields.size(); ++i) {
        const std::string& n = buf.schema_->fields[i].name;
        auto in = [&](const std::vector<std::string>& v) {
            return std::find(v.begin(), v.end(), n) != v.end();
        };
        if (in(access.reads) || in(access.writes)) subset.push_back(static_cast<int>(i));
    }

    configure(dst, buf, buf.layout, buf.precision, subset, buf.home);
    for (size_t pos = 0; pos < dst.subset.size(); ++pos) {
        const int src_pos = buf.subset_pos(dst.subset[pos]);
        const int width = buf.width_of(dst.subset[pos]);
        for_each_lane_pair(dst, static_cast<int>(pos), buf, src_pos,
                           [&](std::uint64_t dst_off, std::uint64_t src_off) {
                               write_bits(dst.data, dst_off, width,
                                          read_bits(buf.data, src_off, width));
                           });
    }
}

PackedBuffer narrow(const PackedBuffer& buf, const schema::KernelAccessSet& access) {
    PackedBuffer dst;
    narrow_into(buf, access, dst);
    return dst;
}

void widen_merge(const PackedBuffer& narrowed, PackedBuffer& original,
                 const schema::KernelAccessSet& access) {
    if (narrowed.schema_.get() != original.schema_.get() &&
        narrowed.schema_->record_bits != original.schema_->record_bits)
        throw std::invalid_argument("widen_merge: schema mismatch");
    if (narrowed.count != original.count)
        throw std::invalid_argument("widen_merge: record count mismatch");
    if (narrowed.precision != original.precision || narrowed.layout != original.layout)
        throw std::invalid_argument("widen_merge: layout/precision tag mismatch");

    for (const auto& name : access.writes) {
        const int field_idx = original.schema_->field_index(name);
        if (field_idx < 0)
            throw std::invalid_argument("widen_merge: unknown write field '" + name + "'");
        const int src_pos = narrowed.subset_pos(field_idx);
        const int dst_pos = original.subset_pos(field_idx);
        if (src_pos < 0 || dst_pos < 0)
            throw std::invalid_argument("widen_merge: field '" + name +
                                        "' missing from a buffer subset");
        const int width = original.width_of(field_idx);
        for_each_lane_pair(narrowed, src_pos, original, dst_pos,
                           [&](std::uint64_t src_off, std::uint64_t dst_off) {
                               write_bits(original.data, dst_off, width,
                                          read_bits(narrowed.data, src_off, width));
                           });
    }
}

namespace {

void convert_layout(const PackedBuffer& buf, PackedBuffer& dst, LayoutTag from, LayoutTag to) {
    if (buf.layout != from)
        throw std::invalid_argument("layout conversion applied to a buffer with the wrong tag");
    configure(dst, buf, to, buf.precision, buf.subset, buf.home);
    for (size_t pos = 0; pos < buf.subset.size(); ++pos) {
        const int width = buf.width_of(buf.subset[pos]);
        for_each_lane_pair(buf, static_cast<int>(pos), dst, static_cast<int>(pos),
                           [&](std::uint64_t src_off, std::uint64_t dst_off) {
                               write_bits(dst.data, dst_off, width,
                                          read_bits(buf.data, src_off, width));
                           });
    }
}

void convert_precision(const PackedBuffer& buf, PackedBuffer& dst, PrecisionTag from,
                       PrecisionTag to) {
    if (buf.precision != from)
        throw std::invalid_argument("precision conversion applied to a buffer with the wrong tag");
    configure(dst, buf, buf.layout, to, buf.subset, buf.home);
    for (size_t pos = 0; pos < buf.subset.size(); ++pos) {
        const auto& field = buf.schema_->fields[buf.subset[pos]];
        const int src_width = buf.width_of(buf.subset[pos]);
        const int dst_width = dst.width_of(buf.subset[pos]);
        if (!field.is_float() || src_width == dst_width) {
            for_each_lane_pair(buf, static_cast<int>(pos), dst, static_cast<int>(pos),
                               [&](std::uint64_t src_off, std::uint64_t dst_off) {
                                   write_bits(dst.data, dst_off, dst_width,
                                              read_bits(buf.data, src_off, src_width));
                               });
            continue;
        }
        const auto spec = fpcodec::layout_for(field.stored_width());
        for_each_lane_pair(buf, static_cast<int>(pos), dst, static_cast<int>(pos),
                           [&](std::uint64_t src_off, std::uint64_t dst_off) {
                               std::uint64_t v = read_bits(buf.data, src_off, src_width);
                               v = to == PrecisionTag::Native
                                       ? fpcodec::expand_to_base_bits(v, spec)
                                       : fpcodec::truncate_from_base_bits(v, spec);
                               write_bits(dst.data, dst_off, dst_width, v);
                           });
    }
}

}  // namespace

void aos_to_soa_into(const PackedBuffer& buf, PackedBuffer& dst) {
    convert_layout(buf, dst, LayoutTag::AoS, LayoutTag::SoA);
}

void soa_to_aos_into(const PackedBuffer& buf, PackedBuffer& dst) {
    convert_layout(buf, dst, LayoutTag::SoA, LayoutTag::AoS);
}

PackedBuffer aos_to_soa(const PackedBuffer& buf) {
    PackedBuffer dst;
    aos_to_soa_into(buf, dst);
    return dst;
}

PackedBuffer soa_to_aos(const PackedBuffer& buf) {
    PackedBuffer dst;
    soa_to_aos_into(buf, dst);
    return dst;
}

void unpack_into(const PackedBuffer& buf, PackedBuffer& dst) {
    convert_precision(buf, dst, PrecisionTag::Compressed, PrecisionTag::Native);
}

void pack_into(const PackedBuffer& buf, PackedBuffer& dst) {
    convert_precision(buf, dst, PrecisionTag::Native, PrecisionTag::Compressed);
}

PackedBuffer unpack(const PackedBuffer& buf) {
    PackedBuffer dst;
    unpack_into(buf, dst);
    return dst;
}

PackedBuffer pack(const PackedBuffer& buf) {
    PackedBuffer dst;
    pack_into(buf, dst);
    return dst;
}

void move_into(const PackedBuffer& buf, ArenaId to, Machine& machine, PackedBuffer& dst) {
    if (buf.home == to)
        throw std::invalid_argument(std::string("move: buffer already resides in the ") +
                                    arena_name(to) + " arena");
    dst.schema_ = buf.schema_;
    dst.count = buf.count;
    dst.layout = buf.layout;
    dst.precision = buf.precision;
    dst.subset = buf.subset;
    dst.home = to;
    dst.data = buf.data;
    machine.arena(to).bytes_allocated.fetch_add(dst.total_bytes(), std::memory_order_relaxed);
    machine.ledger.record(to, dst.total_bytes());
}

PackedBuffer move_to(const PackedBuffer& buf, ArenaId to, Machine& machine) {
    PackedBuffer dst;
    move_into(buf, to, machine, dst);
    return dst;
}

}  // namespace soaforge::layoutops
