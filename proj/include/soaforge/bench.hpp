#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "soaforge/pipelines.hpp"

// Batch drivers behind the CLI subcommands: conversion-placement and
// kernel benchmarks, the whole-pipeline benchmark, the mantissa-truncation
// error study, and the self-check battery.  Wall-clock columns are
// report-only; every asserted column derives from schema arithmetic.

namespace soaforge::bench {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    std::string schema_path;  // empty selects the built-in particle schema
    std::string ic_csv_path;  // optional id,x0,x1,x2,v0,v1,v2,u,m,h rows
    std::uint64_t particles = 4096;
    std::uint64_t buffer_size = sph::kNeighborBufferSize;
    std::uint64_t seed = 42;
    std::vector<int> precision_sweep;  // empty -> per-command default
    std::vector<pipelines::Variant> variants{std::begin(pipelines::kAllVariants),
                                            std::end(pipelines::kAllVariants)};
    std::vector<pipelines::Mode> modes = {pipelines::Mode::InPlace, pipelines::Mode::Streaming};
    std::vector<sph::KernelId> kernels = {sph::KernelId::Density, sph::KernelId::Force,
                                          sph::KernelId::Kick, sph::KernelId::Drift};
    sph::Writeback writeback = sph::Writeback::Deferred;
    double latency_s = 5e-6;             // synthetic PCIe-class placeholder
    double bandwidth_bytes_per_s = 64e9;
    int threads = 0;  // 0 -> hardware concurrency
    double dt = 1e-3;
    std::string out_path;  // CSV destination; empty -> stdout only
    bool fault = false;    // inject a corruption to exercise validate
    bool dump = false;     // hex-dump the first neighbour buffer
};

void validate_config(const RunConfig& config);

schema::SchemaFile effective_schema(const RunConfig& config);

// Each command returns the full CSV text (leading "# soaforge v..." line).
std::string cmd_bench_transform(const RunConfig& config);
std::string cmd_bench_kernels(const RunConfig& config);
std::string cmd_bench_pipeline(const RunConfig& config);
std::string cmd_study_truncation(const RunConfig& config);

// Runs the invariant battery, printing one PASS/FAIL line per check.
// Returns 0 when everything passed.
int cmd_validate(const RunConfig& config, std::ostream& report);

// Writes csv to config.out_path when set; always echoes to `echo`.
void write_output(const RunConfig& config, const std::string& csv, std::ostream& echo);

// 16 bytes per line, lower-case hex.
std::string hex_dump(const bitpack::BitBuffer& data);

// Truncation-study row, exposed for the acceptance suite.
struct TruncationPoint {
    int total_bits;
    double rmse_rel;
    double max_rel;
};
std::vector<TruncationPoint> truncation_study(const RunConfig& config,
                                              const std::vector<int>& sweep);

inline const std::vector<int>& default_truncation_sweep() {
    static const std::vector<int> sweep = {64, 56, 48, 40, 34, 33, 32, 24, 17, 16, 12};
    return sweep;
}

}  // namespace soaforge::bench
