#include "soaforge/soaforge.h"

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "soaforge/bench.hpp"

using namespace soaforge;

namespace {

thread_local std::string g_last_error;

sf_status fail(sf_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
sf_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const schema::ParseError& e) {
        return fail(SF_PARSE_ERROR, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SF_INVALID_ARG, e.what());
    } catch (const std::exception& e) {
        return fail(SF_ERROR, e.what());
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

}  // namespace

struct sf_schema {
    schema::SchemaFile file;
    std::string printed;
};

struct sf_config {
    bench::RunConfig run;
    std::string last_text;
};

extern "C" {

const char* sf_version(void) { return bench::kVersion; }

const char* sf_last_error(void) { return g_last_error.c_str(); }

sf_status sf_layout_for(int total_bits, int* sign_bits, int* exponent_bits, int* mantissa_bits) {
    if (!sign_bits || !exponent_bits || !mantissa_bits)
        return fail(SF_INVALID_ARG, "null output pointer");
    return guarded([&] {
        const auto spec = fpcodec::layout_for(total_bits);
        *sign_bits = spec.sign_bits;
        *exponent_bits = spec.exponent_bits;
        *mantissa_bits = spec.mantissa_bits;
        return SF_OK;
    });
}

sf_status sf_quantize(double value, int total_bits, double* out) {
    if (!out) return fail(SF_INVALID_ARG, "null output pointer");
    return guarded([&] {
        *out = fpcodec::quantize(value, fpcodec::layout_for(total_bits));
        return SF_OK;
    });
}

sf_status sf_schema_parse(const char* text, sf_schema** out) {
    if (!text || !out) return fail(SF_INVALID_ARG, "null argument");
    return guarded([&] {
        auto handle = std::make_unique<sf_schema>();
        handle->file = schema::parse_file(text);
        *out = handle.release();
        return SF_OK;
    });
}

void sf_schema_destroy(sf_schema* schema) { delete schema; }

sf_status sf_schema_record_bits(const sf_schema* schema, uint64_t* out) {
    if (!schema || !out) return fail(SF_INVALID_ARG, "null argument");
    *out = schema->file.schema.record_bits;
    return SF_OK;
}

sf_status sf_schema_field_count(const sf_schema* schema, int* out) {
    if (!schema || !out) return fail(SF_INVALID_ARG, "null argument");
    *out = static_cast<int>(schema->file.schema.fields.size());
    return SF_OK;
}

sf_status sf_schema_print(sf_schema* handle, const char** out) {
    if (!handle || !out) return fail(SF_INVALID_ARG, "null argument");
    return guarded([&] {
        handle->printed = schema::print_schema(handle->file.schema) +
                          schema::print_access_sets(handle->file.kernels);
        *out = handle->printed.c_str();
        return SF_OK;
    });
}

sf_status sf_config_create(sf_config** out) {
    if (!out) return fail(SF_INVALID_ARG, "null argument");
    *out = new sf_config();
    return SF_OK;
}

void sf_config_destroy(sf_config* config) { delete config; }

sf_status sf_config_set_string(sf_config* config, const char* key, const char* value) {
    if (!config || !key || !value) return fail(SF_INVALID_ARG, "null argument");
    return guarded([&]() -> sf_status {
        const std::string k = key;
        const std::string v = value;
        auto& run = config->run;
        if (k == "schema") {
            run.schema_path = v;
        } else if (k == "ic-csv") {
            run.ic_csv_path = v;
        } else if (k == "out") {
            run.out_path = v;
        } else if (k == "variants") {
            run.variants.clear();
            for (const auto& name : split_list(v))
                run.variants.push_back(pipelines::variant_from_name(name));
        } else if (k == "modes") {
            run.modes.clear();
            for (const auto& name : split_list(v))
                run.modes.push_back(pipelines::mode_from_name(name));
        } else if (k == "kernels") {
            run.kernels.clear();
            for (const auto& name : split_list(v))
                run.kernels.push_back(sph::kernel_from_name(name));
        } else if (k == "writeback") {
            if (v == "deferred")
                run.writeback = sph::Writeback::Deferred;
            else if (v == "per-access")
                run.writeback = sph::Writeback::PerAccess;
            else
                return fail(SF_INVALID_ARG, "unknown writeback policy: " + v);
        } else if (k == "precision") {
            run.precision_sweep.clear();
            for (const auto& item : split_list(v)) run.precision_sweep.push_back(std::stoi(item));
        } else {
            return fail(SF_INVALID_ARG, "unknown string key: " + k);
        }
        return SF_OK;
    });
}

sf_status sf_config_set_int(sf_config* config, const char* key, int64_t value) {
    if (!config || !key) return fail(SF_INVALID_ARG, "null argument");
    const std::string k = key;
    auto& run = config->run;
    if (k == "particles" && value > 0)
        run.particles = static_cast<uint64_t>(value);
    else if (k == "buffer-size" && value > 0)
        run.buffer_size = static_cast<uint64_t>(value);
    else if (k == "seed" && value >= 0)
        run.seed = static_cast<uint64_t>(value);
    else if (k == "threads" && value >= 0)
        run.threads = static_cast<int>(value);
    else if (k == "fault")
        run.fault = value != 0;
    else if (k == "dump")
        run.dump = value != 0;
    else
        return fail(SF_INVALID_ARG, "unknown integer key or bad value: " + k);
    return SF_OK;
}

sf_status sf_config_set_double(sf_config* config, const char* key, double value) {
    if (!config || !key) return fail(SF_INVALID_ARG, "null argument");
    const std::string k = key;
    auto& run = config->run;
    if (k == "dt")
        run.dt = value;
    else if (k == "latency" && value >= 0)
        run.latency_s = value;
    else if (k == "bandwidth" && value > 0)
        run.bandwidth_bytes_per_s = value;
    else
        return fail(SF_INVALID_ARG, "unknown real key or bad value: " + k);
    return SF_OK;
}

namespace {

sf_status run_command(sf_config* config, const char** out_text,
                      std::string (*command)(const bench::RunConfig&)) {
    if (!config || !out_text) return fail(SF_INVALID_ARG, "null argument");
    return guarded([&] {
        config->last_text = command(config->run);
        std::ostringstream sink;
        bench::write_output(config->run, config->last_text, sink);
        *out_text = config->last_text.c_str();
        return SF_OK;
    });
}

}  // namespace

sf_status sf_run_bench_transform(sf_config* config, const char** out_text) {
    return run_command(config, out_text, bench::cmd_bench_transform);
}

sf_status sf_run_bench_kernels(sf_config* config, const char** out_text) {
    return run_command(config, out_text, bench::cmd_bench_kernels);
}

sf_status sf_run_bench_pipeline(sf_config* config, const char** out_text) {
    return run_command(config, out_text, bench::cmd_bench_pipeline);
}

sf_status sf_run_study_truncation(sf_config* config, const char** out_text) {
    return run_command(config, out_text, bench::cmd_study_truncation);
}

sf_status sf_run_validate(sf_config* config, const char** out_text) {
    if (!config || !out_text) return fail(SF_INVALID_ARG, "null argument");
    int rc = 0;
    const sf_status status = guarded([&] {
        std::ostringstream report;
        rc = bench::cmd_validate(config->run, report);
        config->last_text = report.str();
        std::ostringstream sink;
        bench::write_output(config->run, config->last_text, sink);
        *out_text = config->last_text.c_str();
        return SF_OK;
    });
    if (status != SF_OK) return status;
    return rc == 0 ? SF_OK : fail(SF_CHECK_FAILED, "one or more validation checks failed");
}

}  // extern "C"
