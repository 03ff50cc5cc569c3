// Command-line front end.  Talks to the library exclusively through the C
// interface in soaforge/soaforge.h.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "soaforge/soaforge.h"

namespace {

struct Options {
    std::string schema_path;
    std::string ic_csv_path;
    std::int64_t particles = 4096;
    std::int64_t buffer_size = 64;
    std::int64_t seed = 42;
    std::int64_t threads = 0;
    std::vector<int> precision;
    std::string variants;
    std::string modes;
    std::string kernels;
    std::string writeback;
    double dt = 1e-3;
    double latency = 5e-6;
    double bandwidth = 64e9;
    std::string out_path;
    bool fault = false;
    bool dump = false;
};

void add_common_options(CLI::App& cmd, Options& opt) {
    cmd.add_option("--schema", opt.schema_path, "schema file (default: built-in particle schema)");
    cmd.add_option("--ic-csv", opt.ic_csv_path, "initial conditions CSV (id,x0..x2,v0..v2,u,m,h)");
    cmd.add_option("--particles", opt.particles, "particle count")->check(CLI::PositiveNumber);
    cmd.add_option("--buffer-size", opt.buffer_size, "neighbour buffer size")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--seed", opt.seed, "random seed")->check(CLI::NonNegativeNumber);
    cmd.add_option("--threads", opt.threads, "worker threads (0 = hardware)")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--precision", opt.precision, "total-bit widths to sweep (7..64)");
    cmd.add_option("--variant", opt.variants, "comma list of pipeline variants");
    cmd.add_option("--mode", opt.modes, "comma list of modes (inplace,streaming)");
    cmd.add_option("--kernels", opt.kernels, "comma list of kernels to run");
    cmd.add_option("--writeback", opt.writeback, "writeback policy (deferred|per-access)");
    cmd.add_option("--dt", opt.dt, "timestep for kick/drift");
    cmd.add_option("--latency", opt.latency, "modeled per-transfer latency in seconds");
    cmd.add_option("--bandwidth", opt.bandwidth, "modeled interconnect bandwidth in bytes/s");
    cmd.add_option("--out", opt.out_path, "write output to this file as well as stdout");
}

int die(const char* what) {
    std::fprintf(stderr, "error: %s: %s\n", what, sf_last_error());
    return 2;
}

int apply(sf_config* config, const Options& opt) {
    auto set_s = [&](const char* key, const std::string& value) {
        return value.empty() ? SF_OK : sf_config_set_string(config, key, value.c_str());
    };
    if (set_s("schema", opt.schema_path) != SF_OK) return die("--schema");
    if (set_s("ic-csv", opt.ic_csv_path) != SF_OK) return die("--ic-csv");
    if (set_s("variants", opt.variants) != SF_OK) return die("--variant");
    if (set_s("modes", opt.modes) != SF_OK) return die("--mode");
    if (set_s("kernels", opt.kernels) != SF_OK) return die("--kernels");
    if (set_s("writeback", opt.writeback) != SF_OK) return die("--writeback");
    if (set_s("out", opt.out_path) != SF_OK) return die("--out");
    if (!opt.precision.empty()) {
        std::string list;
        for (int p : opt.precision) list += (list.empty() ? "" : ",") + std::to_string(p);
        if (sf_config_set_string(config, "precision", list.c_str()) != SF_OK)
            return die("--precision");
    }
    if (sf_config_set_int(config, "particles", opt.particles) != SF_OK) return die("--particles");
    if (sf_config_set_int(config, "buffer-size", opt.buffer_size) != SF_OK)
        return die("--buffer-size");
    if (sf_config_set_int(config, "seed", opt.seed) != SF_OK) return die("--seed");
    if (sf_config_set_int(config, "threads", opt.threads) != SF_OK) return die("--threads");
    if (sf_config_set_int(config, "fault", opt.fault ? 1 : 0) != SF_OK) return die("--fault");
    if (sf_config_set_int(config, "dump", opt.dump ? 1 : 0) != SF_OK) return die("--dump");
    if (sf_config_set_double(config, "dt", opt.dt) != SF_OK) return die("--dt");
    if (sf_config_set_double(config, "latency", opt.latency) != SF_OK) return die("--latency");
    if (sf_config_set_double(config, "bandwidth", opt.bandwidth) != SF_OK)
        return die("--bandwidth");
    return 0;
}

int run(const Options& opt, sf_status (*command)(sf_config*, const char**), bool is_validate) {
    sf_config* config = nullptr;
    if (sf_config_create(&config) != SF_OK) return die("config");
    struct Guard {
        sf_config* c;
        ~Guard() { sf_config_destroy(c); }
    } guard{config};
    if (const int rc = apply(config, opt)) return rc;
    const char* text = nullptr;
    const sf_status status = command(config, &text);
    if (text) std::fputs(text, stdout);
    if (status == SF_OK) return 0;
    if (is_validate && status == SF_CHECK_FAILED) return 1;
    return die("run");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"packed-layout precision and transfer benchmark"};
    app.set_version_flag("--version", std::string(sf_version()));
    app.require_subcommand(1);

    Options opt;

    CLI::App* bench = app.add_subcommand("bench", "timing and byte-accounting benchmarks");
    bench->require_subcommand(1);
    CLI::App* transform =
        bench->add_subcommand("transform", "conversion placement: host vs device arena");
    CLI::App* kernels = bench->add_subcommand("kernels", "per-kernel AoS vs SoA compute timing");
    CLI::App* pipeline = bench->add_subcommand("pipeline", "whole-timestep variant comparison");
    CLI::App* study = app.add_subcommand("study", "error studies");
    study->require_subcommand(1);
    CLI::App* truncation =
        study->add_subcommand("truncation", "acceleration error versus storage width");
    CLI::App* validate = app.add_subcommand("validate", "run the invariant battery");
    validate->add_flag("--fault", opt.fault, "inject a bit flip to demonstrate detection");
    validate->add_flag("--dump", opt.dump, "hex-dump the first neighbour buffer");

    for (CLI::App* cmd : {transform, kernels, pipeline, truncation, validate})
        add_common_options(*cmd, opt);

    CLI11_PARSE(app, argc, argv);

    if (transform->parsed()) return run(opt, sf_run_bench_transform, false);
    if (kernels->parsed()) return run(opt, sf_run_bench_kernels, false);
    if (pipeline->parsed()) return run(opt, sf_run_bench_pipeline, false);
    if (truncation->parsed()) return run(opt, sf_run_study_truncation, false);
    if (validate->parsed()) return run(opt, sf_run_validate, true);
    return 2;
}
