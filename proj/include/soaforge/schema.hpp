#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "soaforge/fpcodec.hpp"

// Record-schema DSL and packed layout computation.
//
//   schema particle {
//     field x : f64 x3;
//     field rho : f32 @truncate(16);   # comments run to end of line
//   }
//   kernel density reads x, m, h writes rho;
//
// Layouts are padding-free: each field occupies exactly its stored width,
// at the running prefix-sum offset in declaration order.

namespace soaforge::schema {

enum class BaseKind { F32, F64, I64 };

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_)
        : std::runtime_error(std::to_string(line_) + ":" + std::to_string(column_) + ": " + msg),
          line(line_), column(column_) {}
};

struct FieldDecl {
    std::string name;
    BaseKind base = BaseKind::F32;
    int arity = 1;                  // 1 or 3
    std::optional<int> truncation;  // total stored bits, floating bases only

    bool is_float() const { return base != BaseKind::I64; }
    int base_width() const { return base == BaseKind::F32 ? 32 : 64; }
    // Width of one stored lane: the truncated width if requested, else the
    // declared base width.
    int stored_width() const { return truncation ? *truncation : base_width(); }
    // Width of one lane after unpacking: the enclosing IEEE format of the
    // stored width for floats, the base width otherwise.
    int native_width() const {
        if (!is_float()) return base_width();
        return fpcodec::layout_for(stored_width()).base_bits();
    }
};

struct FieldSlot {
    std::uint64_t offset_bits = 0;
    int width_bits = 0;  // per lane; vector lanes are consecutive
};

struct RecordSchema {
    std::string name;
    std::vector<FieldDecl> fields;
    std::vector<FieldSlot> slots;   // parallel to fields, stored-width layout
    std::uint64_t record_bits = 0;  // sum of arity * stored width

    int field_index(std::string_view field_name) const;  // -1 if absent
    const FieldDecl& field(std::string_view field_name) const;
};

struct KernelAccessSet {
    std::string kernel;
    std::vector<std::string> reads;
    std::vector<std::string> writes;
};

struct SchemaFile {
    RecordSchema schema;
    std::vector<KernelAccessSet> kernels;
};

// Fill slots/record_bits from the field declarations.
void compute_layout(RecordSchema& schema);

RecordSchema parse_schema(std::string_view text);
std::vector<KernelAccessSet> parse_access_sets(std::string_view text);
// One pass over a file that may contain one schema block plus kernel lines.
SchemaFile parse_file(std::string_view text);
SchemaFile load_file(const std::string& path);

// Pretty-printer; parse(print(s)) reproduces s exactly.
std::string print_schema(const RecordSchema& schema);
std::string print_access_sets(const std::vector<KernelAccessSet>& sets);

// Rewrites every floating field not named in `exclude` to @truncate(total_bits).
RecordSchema with_uniform_precision(const RecordSchema& schema, int total_bits,
                                    const std::vector<std::string>& exclude = {});

// Validates that every name in the access set exists in the schema.
void check_access_set(const RecordSchema& schema, const KernelAccessSet& set);

}  // namespace soaforge::schema
