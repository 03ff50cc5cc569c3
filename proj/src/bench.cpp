#include "soaforge/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace soaforge::bench {

using layoutops::ArenaId;
using layoutops::LayoutTag;
using layoutops::Machine;
using layoutops::PackedBuffer;
using layoutops::PrecisionTag;
using pipelines::Mode;
using pipelines::Variant;
using schema::KernelAccessSet;
using schema::RecordSchema;
using sph::BufferView;
using sph::KernelId;
using sph::ParticleSoA;

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double timed_s(Fn&& fn) {
    const auto t0 = Clock::now();
    fn();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int effective_threads(const RunConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string csv_header() { return std::string("# soaforge v") + kVersion + "\n"; }

struct Population {
    std::shared_ptr<const RecordSchema> schema;
    std::vector<KernelAccessSet> sets;
    ParticleSoA initial;
};

// precision == 0 keeps the schema's declared storage widths.
Population make_population(const RunConfig& cfg, int precision) {
    validate_config(cfg);
    schema::SchemaFile file = effective_schema(cfg);
    RecordSchema rs = precision > 0
                          ? schema::with_uniform_precision(file.schema, precision, {"x"})
                          : file.schema;
    Population pop;
    pop.schema = std::make_shared<RecordSchema>(std::move(rs));
    pop.sets = file.kernels;
    sph::KernelParams params;
    params.dt = cfg.dt;
    pop.initial = cfg.ic_csv_path.empty()
                      ? sph::random_initial_conditions(cfg.particles, cfg.seed, params)
                      : sph::load_initial_conditions_csv(cfg.ic_csv_path, params);
    if (pop.initial.size() != cfg.particles && cfg.ic_csv_path.empty())
        throw std::runtime_error("initial condition count mismatch");
    return pop;
}

PackedBuffer make_state(const Population& pop, Machine& machine) {
    PackedBuffer state = layoutops::make_buffer(pop.schema, pop.initial.size(), LayoutTag::AoS,
                                                PrecisionTag::Compressed, ArenaId::Host, machine);
    BufferView view(state);
    sph::store_state(pop.initial, view);
    return state;
}

const KernelAccessSet& find_set(const std::vector<KernelAccessSet>& sets, KernelId k) {
    const char* name = sph::kernel_name(k);
    for (const auto& s : sets)
        if (s.kernel == name) return s;
    throw std::invalid_argument(std::string("no access set declared for kernel '") + name + "'");
}

KernelAccessSet full_access_set(const RecordSchema& rs) {
    KernelAccessSet set;
    set.kernel = "full";
    for (const auto& f : rs.fields) set.reads.push_back(f.name);
    return set;
}

// ---------------------------------------------------------------------------
// Naive reference kernels: plain double arrays, direct double loops.  Used
// by the validate battery; the unit-test suites carry their own copy.

double ref_w(double r, double h) {
    const double q = r / h;
    if (q >= 2.0) return 0.0;
    const double norm = (1.0 / std::numbers::pi) / (h * h * h);
    if (q < 1.0) return norm * (1.0 - 1.5 * q * q + 0.75 * q * q * q);
    const double t = 2.0 - q;
    return norm * 0.25 * t * t * t;
}

double ref_dw_dr(double r, double h) {
    const double q = r / h;
    if (q >= 2.0) return 0.0;
    const double norm = (1.0 / std::numbers::pi) / (h * h * h * h);
    if (q < 1.0) return norm * (-3.0 * q + 2.25 * q * q);
    const double t = 2.0 - q;
    return norm * (-0.75 * t * t);
}

void ref_density(ParticleSoA& s, std::uint64_t begin, std::uint64_t len) {
    for (std::uint64_t i = begin; i < begin + len; ++i) {
        const double xi0 = s.x[i][0], xi1 = s.x[i][1], xi2 = s.x[i][2];
        const double hi = s.h[i];
        double acc = 0.0;
        for (std::uint64_t j = begin; j < begin + len; ++j) {
            const double dx0 = xi0 - s.x[j][0];
            const double dx1 = xi1 - s.x[j][1];
            const double dx2 = xi2 - s.x[j][2];
            const double r = std::sqrt(dx0 * dx0 + dx1 * dx1 + dx2 * dx2);
            const double hij = 0.5 * (hi + s.h[j]);
            acc += s.m[j] * ref_w(r, hij);
        }
        s.rho[i] = acc;
    }
}

void ref_force(ParticleSoA& s, std::uint64_t begin, std::uint64_t len) {
    std::vector<std::array<double, 3>> a_new(s.size());
    std::vector<double> du_new(s.size());
    for (std::uint64_t i = begin; i < begin + len; ++i) {
        const double Pi_over_rho2 = s.P[i] / (s.rho[i] * s.rho[i]);
        std::array<double, 3> a_acc = {0.0, 0.0, 0.0};
        double compr = 0.0;
        for (std::uint64_t j = begin; j < begin + len; ++j) {
            if (j == i) continue;
            const double dx0 = s.x[i][0] - s.x[j][0];
            const double dx1 = s.x[i][1] - s.x[j][1];
            const double dx2 = s.x[i][2] - s.x[j][2];
            const double hij = 0.5 * (s.h[i] + s.h[j]);
            const double r = std::sqrt(dx0 * dx0 + dx1 * dx1 + dx2 * dx2);
            double gw0 = 0.0, gw1 = 0.0, gw2 = 0.0;
            if (r != 0.0) {
                const double scale = ref_dw_dr(r, hij) / r;
                gw0 = scale * dx0;
                gw1 = scale * dx1;
                gw2 = scale * dx2;
            }
            const double mj = s.m[j];
            const double pf = Pi_over_rho2 + s.P[j] / (s.rho[j] * s.rho[j]);
            a_acc[0] -= mj * pf * gw0;
            a_acc[1] -= mj * pf * gw1;
            a_acc[2] -= mj * pf * gw2;
            const double dv0 = s.v[i][0] - s.v[j][0];
            const double dv1 = s.v[i][1] - s.v[j][1];
            const double dv2 = s.v[i][2] - s.v[j][2];
            compr += mj * (dv0 * gw0 + dv1 * gw1 + dv2 * gw2);
        }
        a_new[i] = a_acc;
        du_new[i] = Pi_over_rho2 * compr;
    }
    for (std::uint64_t i = begin; i < begin + len; ++i) {
        s.a[i] = a_new[i];
        s.du[i] = du_new[i];
    }
}

}  // namespace

void validate_config(const RunConfig& cfg) {
    if (cfg.buffer_size == 0 || cfg.particles % cfg.buffer_size != 0)
        throw std::invalid_argument("buffer size must divide the particle count");
    for (int t : cfg.precision_sweep)
        if (t < 7 || t > 64)
            throw std::invalid_argument("precision sweep value " + std::to_string(t) +
                                        " outside 7..64");
    if (!(cfg.latency_s >= 0) || !(cfg.bandwidth_bytes_per_s > 0))
        throw std::invalid_argument("interconnect model requires latency >= 0 and bandwidth > 0");
}

schema::SchemaFile effective_schema(const RunConfig& cfg) {
    if (cfg.schema_path.empty()) return schema::parse_file(sph::default_schema_text());
    return schema::load_file(cfg.schema_path);
}

std::string hex_dump(const bitpack::BitBuffer& data) {
    std::ostringstream out;
    char byte[4];
    for (size_t i = 0; i < data.bytes.size(); ++i) {
        std::snprintf(byte, sizeof byte, "%02x", data.bytes[i]);
        out << byte;
        out << ((i % 16 == 15 || i + 1 == data.bytes.size()) ? '\n' : ' ');
    }
    return out.str();
}

void write_output(const RunConfig& cfg, const std::string& csv, std::ostream& echo) {
    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path);
        if (!out) throw std::runtime_error("cannot write output file: " + cfg.out_path);
        out << csv;
        if (!out) throw std::runtime_error("error writing output file: " + cfg.out_path);
    }
    echo << csv;
}

std::string cmd_bench_transform(const RunConfig& cfg) {
    std::vector<int> sweep = cfg.precision_sweep.empty() ? std::vector<int>{64, 32, 16}
                                                         : cfg.precision_sweep;
    std::ostringstream out;
    out << csv_header()
        << "kernel,placement,precision,particles,convert_s,bytes_moved,modeled_transfer_s,ratio\n";
    for (int precision : sweep) {
        Population pop = make_population(cfg, precision);
        std::vector<KernelAccessSet> sets;
        sets.push_back(full_access_set(*pop.schema));
        for (KernelId k : cfg.kernels) sets.push_back(find_set(pop.sets, k));

        for (const auto& set : sets) {
            // Host placement: U . N . C on the host, ship the converted streams.
            Machine mh;
            PackedBuffer state_h = make_state(pop, mh);
            PackedBuffer narrowed, native, streams;
            const double host_convert = timed_s([&] {
                layoutops::narrow_into(state_h, set, narrowed);
                layoutops::unpack_into(narrowed, native);
                layoutops::aos_to_soa_into(native, streams);
            });
            layoutops::move_to(streams, ArenaId::Device, mh);
            const std::uint64_t host_bytes = mh.ledger.bytes_to_device;
            const double host_model = mh.ledger.modeled_time_s(cfg.latency_s,
                                                               cfg.bandwidth_bytes_per_s);

            // Device placement: ship everything, convert in the device arena.
            Machine md;
            PackedBuffer state_d = make_state(pop, md);
            PackedBuffer on_dev = layoutops::move_to(state_d, ArenaId::Device, md);
            PackedBuffer dn, dnat, dstreams;
            const double dev_convert = timed_s([&] {
                layoutops::narrow_into(on_dev, set, dn);
                layoutops::unpack_into(dn, dnat);
                layoutops::aos_to_soa_into(dnat, dstreams);
            });
            const std::uint64_t dev_bytes = md.ledger.bytes_to_device;
            const double dev_model = md.ledger.modeled_time_s(cfg.latency_s,
                                                              cfg.bandwidth_bytes_per_s);

            const double ratio =
                (host_convert + host_model) / (dev_convert + dev_model);
            auto row = [&](const char* placement, double convert, std::uint64_t bytes,
                           double model) {
                out << set.kernel << ',' << placement << ',' << precision << ',' << cfg.particles
                    << ',' << convert << ',' << bytes << ',' << model << ',' << ratio << '\n';
            };
            row("host", host_convert, host_bytes, host_model);
            row("device", dev_convert, dev_bytes, dev_model);
        }
    }
    return out.str();
}

std::string cmd_bench_kernels(const RunConfig& cfg) {
    std::vector<int> sweep = cfg.precision_sweep.empty() ? std::vector<int>{64, 32, 16}
                                                         : cfg.precision_sweep;
    const int threads = effective_threads(cfg);
    std::ostringstream out;
    out << csv_header()
        << "kernel,layout,precision,particles,compute_s,speedup_vs_aos,checksum\n";
    sph::KernelParams params;
    params.dt = cfg.dt;
    for (int precision : sweep) {
        Population pop = make_population(cfg, precision);
        Machine machine;
        PackedBuffer state = make_state(pop, machine);
        const PackedBuffer native = layoutops::unpack(state);
        const PackedBuffer streams = layoutops::aos_to_soa(native);
        for (KernelId k : cfg.kernels) {
            PackedBuffer aos_buf = native;
            double aos_time;
            {
                BufferView view(aos_buf);
                aos_time = timed_s([&] {
                    sph::run_kernel_chunked(k, view, cfg.buffer_size, params, cfg.writeback,
                                            threads);
                });
            }
            const std::uint64_t aos_sum = pipelines::checksum(layoutops::pack(aos_buf));

            PackedBuffer soa_buf = streams;
            double soa_time;
            {
                BufferView view(soa_buf);
                soa_time = timed_s([&] {
                    sph::run_kernel_chunked(k, view, cfg.buffer_size, params, cfg.writeback,
                                            threads);
                });
            }
            const std::uint64_t soa_sum =
                pipelines::checksum(layoutops::pack(layoutops::soa_to_aos(soa_buf)));

            out << sph::kernel_name(k) << ",aos," << precision << ',' << cfg.particles << ','
                << aos_time << ",1," << aos_sum << '\n';
            out << sph::kernel_name(k) << ",soa," << precision << ',' << cfg.particles << ','
                << soa_time << ',' << (soa_time > 0 ? aos_time / soa_time : 0.0) << ',' << soa_sum
                << '\n';
        }
    }
    return out.str();
}

std::string cmd_bench_pipeline(const RunConfig& cfg) {
    std::vector<int> sweep = cfg.precision_sweep.empty() ? std::vector<int>{64, 32, 16}
                                                         : cfg.precision_sweep;
    std::ostringstream out;
    out << csv_header()
        << "variant,mode,precision,particles,total_s,convert_s,move_s,compute_s,merge_s,"
           "bytes_to_device,bytes_to_host,modeled_transfer_s,"
           "share_density,share_force,share_kick,share_drift,checksum\n";
    for (int precision : sweep) {
        Population pop = make_population(cfg, precision);
        for (Variant v : cfg.variants) {
            for (Mode mode : cfg.modes) {
                Machine machine;
                PackedBuffer state = make_state(pop, machine);
                pipelines::PipelineConfig pc;
                pc.variant = v;
                pc.mode = mode;
                pc.kernels = cfg.kernels;
                pc.writeback = cfg.writeback;
                pc.params.dt = cfg.dt;
                pc.buffer_size = cfg.buffer_size;
                pc.threads = effective_threads(cfg);
                pc.latency_s = cfg.latency_s;
                pc.bandwidth_bytes_per_s = cfg.bandwidth_bytes_per_s;
                const pipelines::RunMetrics m =
                    pipelines::run_variant(state, pop.sets, pc, machine);
                auto share = [&](const char* kernel) {
                    auto it = m.kernel_compute_s.find(kernel);
                    if (it == m.kernel_compute_s.end() || m.phases.compute_s <= 0) return 0.0;
                    return it->second / m.phases.compute_s;
                };
                out << pipelines::variant_name(v) << ',' << pipelines::mode_name(mode) << ','
                    << precision << ',' << cfg.particles << ',' << m.phases.total() << ','
                    << m.phases.convert_s << ',' << m.phases.move_s << ',' << m.phases.compute_s
                    << ',' << m.phases.merge_s << ',' << m.bytes_to_device << ','
                    << m.bytes_to_host << ',' << m.modeled_transfer_s << ',' << share("density")
                    << ',' << share("force") << ',' << share("kick") << ',' << share("drift")
                    << ',' << m.checksum << '\n';
            }
        }
    }
    return out.str();
}

std::vector<TruncationPoint> truncation_study(const RunConfig& cfg, const std::vector<int>& sweep) {
    for (int t : sweep)
        if (t < 7 || t > 64)
            throw std::invalid_argument("sweep value " + std::to_string(t) + " outside 7..64");
    const int threads = effective_threads(cfg);
    sph::KernelParams params;
    params.dt = cfg.dt;

    auto run_once = [&](int precision) {
        Population pop = make_population(cfg, precision);
        Machine machine;
        PackedBuffer state = make_state(pop, machine);
        BufferView view(state);
        sph::run_kernel_chunked(KernelId::Density, view, cfg.buffer_size, params, cfg.writeback,
                                threads);
        sph::run_kernel_chunked(KernelId::Force, view, cfg.buffer_size, params, cfg.writeback,
                                threads);
        return sph::load_state(view);
    };

    const ParticleSoA reference = run_once(64);
    double norm = 0.0;
    for (std::uint64_t i = 0; i < reference.size(); ++i)
        norm += std::sqrt(reference.a[i][0] * reference.a[i][0] +
                          reference.a[i][1] * reference.a[i][1] +
                          reference.a[i][2] * reference.a[i][2]);
    norm /= double(reference.size());

    std::vector<TruncationPoint> points;
    for (int precision : sweep) {
        const ParticleSoA s = run_once(precision);
        double sum_sq = 0.0, max_err = 0.0;
        for (std::uint64_t i = 0; i < s.size(); ++i) {
            const double e0 = s.a[i][0] - reference.a[i][0];
            const double e1 = s.a[i][1] - reference.a[i][1];
            const double e2 = s.a[i][2] - reference.a[i][2];
            const double err = std::sqrt(e0 * e0 + e1 * e1 + e2 * e2);
            sum_sq += err * err;
            max_err = std::max(max_err, err);
        }
        const double rmse = std::sqrt(sum_sq / double(s.size()));
        points.push_back({precision, rmse / norm, max_err / norm});
    }
    return points;
}

std::string cmd_study_truncation(const RunConfig& cfg) {
    const std::vector<int>& sweep =
        cfg.precision_sweep.empty() ? default_truncation_sweep() : cfg.precision_sweep;
    const auto points = truncation_study(cfg, sweep);
    std::ostringstream out;
    out.precision(17);
    out << csv_header() << "total_bits,rmse_rel,max_rel\n";
    for (const auto& p : points)
        out << p.total_bits << ',' << p.rmse_rel << ',' << p.max_rel << '\n';
    return out.str();
}

int cmd_validate(const RunConfig& cfg, std::ostream& report) {
    validate_config(cfg);
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        report << (ok ? "PASS " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };

    // fpcodec round trips and frozen values
    {
        bool ok = true;
        ok &= fpcodec::quantize(std::numbers::pi, fpcodec::layout_for(17)) == 3.140625;
        ok &= fpcodec::quantize(std::numbers::pi, fpcodec::layout_for(32)) == 3.1415927410125732;
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> val(-1e4, 1e4);
        std::uniform_int_distribution<int> width(7, 64);
        for (int i = 0; i < 1000 && ok; ++i) {
            const auto spec = fpcodec::layout_for(width(rng));
            const double q = fpcodec::quantize(val(rng), spec);
            ok &= fpcodec::quantize(q, spec) == q;
        }
        check("fpcodec-quantize", ok);
    }

    // bitpack write/read round trip and locality
    {
        bool ok = true;
        std::mt19937_64 rng(cfg.seed + 1);
        bitpack::BitBuffer buf(4096);
        for (auto& b : buf.bytes) b = static_cast<std::uint8_t>(rng());
        for (int i = 0; i < 1000 && ok; ++i) {
            const int width = 1 + int(rng() % 64);
            const std::uint64_t offset = rng() % (buf.length_bits - width);
            const std::uint64_t value = width == 64 ? rng() : rng() & ((1ull << width) - 1);
            auto before = buf.bytes;
            bitpack::write_bits(buf, offset, width, value);
            ok &= bitpack::read_bits(buf, offset, width) == value;
            bitpack::write_bits(buf, offset, width,
                                bitpack::read_bits(buf, offset, width));  // idempotent
            for (std::uint64_t bit = 0; bit < buf.length_bits && ok; ++bit) {
                if (bit >= offset && bit < offset + width) continue;
                ok &= ((buf.bytes[bit >> 3] >> (bit & 7)) & 1) ==
                      ((before[bit >> 3] >> (bit & 7)) & 1);
            }
        }
        check("bitpack-roundtrip", ok);
    }

    // lossless operator identities over the active schema
    {
        RunConfig small = cfg;
        small.particles = std::min<std::uint64_t>(cfg.particles, 256);
        small.particles -= small.particles % small.buffer_size;
        if (small.particles == 0) small.particles = small.buffer_size;
        Population pop = make_population(small, 0);
        Machine machine;
        PackedBuffer state = make_state(pop, machine);
        bool ok = true;
        const PackedBuffer round = layoutops::soa_to_aos(layoutops::aos_to_soa(state));
        ok &= round.data.bytes == state.data.bytes;
        const PackedBuffer packed = layoutops::pack(layoutops::unpack(state));
        ok &= packed.data.bytes == state.data.bytes;
        KernelAccessSet all = full_access_set(*pop.schema);  // empty write set
        PackedBuffer narrowed = layoutops::narrow(state, all);
        ok &= narrowed.data.bytes == state.data.bytes;
        PackedBuffer merged = state;
        layoutops::widen_merge(narrowed, merged, all);
        ok &= merged.data.bytes == state.data.bytes;
        check("lossless-identities", ok);
    }

    // oracle equivalence in native binary64 storage
    bool conservation_ok = true;
    {
        RunConfig wide = cfg;
        wide.particles = std::min<std::uint64_t>(cfg.particles, 512);
        wide.particles -= wide.particles % wide.buffer_size;
        if (wide.particles == 0) wide.particles = wide.buffer_size;
        Population pop = make_population(wide, 64);
        pop.schema = std::make_shared<RecordSchema>(
            schema::with_uniform_precision(*pop.schema, 64));  // positions too
        Machine machine;
        PackedBuffer state = make_state(pop, machine);
        BufferView view(state);
        sph::KernelParams params;
        params.dt = cfg.dt;
        sph::run_kernel_chunked(KernelId::Density, view, wide.buffer_size, params,
                                sph::Writeback::Deferred, 1);
        sph::run_kernel_chunked(KernelId::Force, view, wide.buffer_size, params,
                                sph::Writeback::Deferred, 1);
        const ParticleSoA got = sph::load_state(view);

        ParticleSoA ref = pop.initial;
        for (std::uint64_t c = 0; c < wide.particles / wide.buffer_size; ++c) {
            ref_density(ref, c * wide.buffer_size, wide.buffer_size);
            ref_force(ref, c * wide.buffer_size, wide.buffer_size);
        }
        bool ok = true;
        for (std::uint64_t i = 0; i < got.size(); ++i) {
            ok &= got.rho[i] == ref.rho[i];
            ok &= got.du[i] == ref.du[i];
            for (int lane = 0; lane < 3; ++lane) ok &= got.a[i][lane] == ref.a[i][lane];
        }
        check("oracle-equivalence", ok);

        for (std::uint64_t c = 0; c < wide.particles / wide.buffer_size; ++c) {
            double net[3] = {0, 0, 0};
            double scale = 0;
            for (std::uint64_t i = c * wide.buffer_size; i < (c + 1) * wide.buffer_size; ++i) {
                const double mag = std::sqrt(got.a[i][0] * got.a[i][0] +
                                             got.a[i][1] * got.a[i][1] +
                                             got.a[i][2] * got.a[i][2]);
                scale += std::abs(got.m[i]) * mag;
                for (int lane = 0; lane < 3; ++lane) net[lane] += got.m[i] * got.a[i][lane];
            }
            const double mom = std::sqrt(net[0] * net[0] + net[1] * net[1] + net[2] * net[2]);
            conservation_ok &= mom <= 1e-12 * scale;
        }
        check("momentum-conservation", conservation_ok);
    }

    // smoothing kernel normalisation by Simpson quadrature
    {
        const double h = 1.0;
        const int n = 4096;  // even
        const double dr = 2.0 * h / n;
        double integral = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double r = i * dr;
            const double f = 4.0 * std::numbers::pi * sph::w(r, h) * r * r;
            integral += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
        }
        integral *= dr / 3.0;
        check("kernel-normalization", std::abs(integral - 1.0) <= 1e-6);
    }

    // cross-variant checksums
    {
        RunConfig small = cfg;
        small.particles = std::min<std::uint64_t>(cfg.particles, 256);
        small.particles -= small.particles % small.buffer_size;
        if (small.particles == 0) small.particles = small.buffer_size;
        Population pop = make_population(small, 0);
        std::uint64_t expected = 0;
        bool first = true;
        bool ok = true;
        for (Variant v : pipelines::kAllVariants) {
            for (Mode mode : {Mode::InPlace, Mode::Streaming}) {
                Machine machine;
                PackedBuffer state = make_state(pop, machine);
                pipelines::PipelineConfig pc;
                pc.variant = v;
                pc.mode = mode;
                pc.params.dt = cfg.dt;
                pc.buffer_size = small.buffer_size;
                pc.threads = effective_threads(cfg);
                pipelines::run_variant(state, pop.sets, pc, machine);
                if (cfg.fault && v == Variant::DevSoA && mode == Mode::Streaming)
                    state.data.bytes[0] ^= 0x01;  // injected corruption
                const std::uint64_t sum = pipelines::checksum(state);
                if (first) {
                    expected = sum;
                    first = false;
                } else {
                    ok &= sum == expected;
                }
            }
        }
        check("cross-variant-checksums", ok);

        if (cfg.dump) {
            Machine machine;
            PackedBuffer state = make_state(pop, machine);
            bitpack::BitBuffer head;
            const std::uint64_t bits =
                std::min<std::uint64_t>(state.data.length_bits,
                                        small.buffer_size * state.record_bits());
            head.resize(bits);
            bitpack::copy_bits(state.data, 0, head, 0, bits);
            report << hex_dump(head);
        }
    }

    return failures == 0 ? 0 : 1;
}

}  // namespace soaforge::bench
