#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "soaforge/sph.hpp"

// Operator compositions over a particle population: the CPU variants, the
// device-side conversion variants and the host-side conversion variants,
// each runnable in in-place mode (one round trip per timestep) or
// streaming mode (per-kernel narrowed transfers).  The hybrid composition
// that ships narrowed AoS and converts on the device is deliberately not a
// member of the enumeration.

namespace soaforge::pipelines {

enum class Variant {
    CpuBaseline,       // f directly on compressed AoS
    CpuUnpack,         // N^T U^T . f . U N
    CpuSoA,            // C N^T U^T . f . U N C
    DevNative,         // M . f . M
    DevUnpack,         // M . (N^T U^T . f . U N on device) . M
    DevSoA,            // M . (C N^T U^T . f . U N C on device) . M
    HostUnpackStream,  // N^T U^T . M . f . M . U N  (conversion on host)
    HostSoAStream,     // C N^T U^T . M . f . M . U N C  (conversion on host)
};

inline constexpr Variant kAllVariants[] = {
    Variant::CpuBaseline, Variant::CpuUnpack,  Variant::CpuSoA,
    Variant::DevNative,   Variant::DevUnpack,  Variant::DevSoA,
    Variant::HostUnpackStream, Variant::HostSoAStream,
};

enum class Mode { InPlace, Streaming };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);
const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);
bool is_cpu_variant(Variant v);

struct PhaseTimes {
    double convert_s = 0;
    double move_s = 0;
    double compute_s = 0;
    double merge_s = 0;
    double total() const { return convert_s + move_s + compute_s + merge_s; }
};

struct RunMetrics {
    PhaseTimes phases;
    std::map<std::string, double> kernel_compute_s;
    std::uint64_t bytes_to_device = 0;
    std::uint64_t bytes_to_host = 0;
    std::uint64_t transfers = 0;
    std::uint64_t conversions = 0;  // executed conversion preambles
    double modeled_transfer_s = 0;
    std::uint64_t checksum = 0;  // over the final compressed AoS bytes
};

struct PipelineConfig {
    Variant variant = Variant::CpuBaseline;
    Mode mode = Mode::InPlace;
    std::vector<sph::KernelId> kernels = {sph::KernelId::Density, sph::KernelId::Force,
                                          sph::KernelId::Kick, sph::KernelId::Drift};
    sph::Writeback writeback = sph::Writeback::Deferred;
    bool hoist = true;
    sph::KernelParams params;
    std::uint64_t buffer_size = sph::kNeighborBufferSize;
    int threads = 1;
    double latency_s = 5e-6;
    double bandwidth_bytes_per_s = 64e9;
};

// `variant=<name> mode=<inplace|streaming> kernels=<comma list> order=<comma list>`
// Unknown keys are rejected; `order`, when given, overrides `kernels`.
PipelineConfig parse_pipeline_config(const std::string& text, const PipelineConfig& defaults = {});

// FNV-1a over the buffer bytes and bit length.
std::uint64_t checksum(const layoutops::PackedBuffer& buf);

// Runs the variant's whole-timestep composition over `state` (a compressed
// AoS host buffer covering the full field set), mutating it in place.
RunMetrics run_variant(layoutops::PackedBuffer& state,
                       const std::vector<schema::KernelAccessSet>& access_sets,
                       const PipelineConfig& config, layoutops::Machine& machine);

// One-way transferred bytes for a single streamed kernel invocation,
// derived purely from schema arithmetic (no run needed).
std::uint64_t streamed_bytes_one_way(const schema::RecordSchema& schema,
                                     const schema::KernelAccessSet& set, std::uint64_t count,
                                     Variant variant);
// One-way bytes for the in-place transfer of the full field set.
std::uint64_t inplace_bytes_one_way(const schema::RecordSchema& schema, std::uint64_t count,
                                    Variant variant);

}  // namespace soaforge::pipelines
