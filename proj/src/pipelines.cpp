#include "soaforge/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

namespace soaforge::pipelines {

using layoutops::ArenaId;
using layoutops::LayoutTag;
using layoutops::Machine;
using layoutops::PackedBuffer;
using layoutops::PrecisionTag;
using schema::KernelAccessSet;
using sph::BufferView;
using sph::KernelId;

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::CpuBaseline: return "cpu-baseline";
        case Variant::CpuUnpack: return "cpu-unpack";
        case Variant::CpuSoA: return "cpu-soa";
        case Variant::DevNative: return "dev-native";
        case Variant::DevUnpack: return "dev-unpack";
        case Variant::DevSoA: return "dev-soa";
        case Variant::HostUnpackStream: return "host-unpack-stream";
        case Variant::HostSoAStream: return "host-soa-stream";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    for (Variant v : kAllVariants)
        if (name == variant_name(v)) return v;
    throw std::invalid_argument("unknown pipeline variant '" + name + "'");
}

const char* mode_name(Mode m) { return m == Mode::InPlace ? "inplace" : "streaming"; }

Mode mode_from_name(const std::string& name) {
    if (name == "inplace") return Mode::InPlace;
    if (name == "streaming") return Mode::Streaming;
    throw std::invalid_argument("unknown execution mode '" + name + "'");
}

bool is_cpu_variant(Variant v) {
    return v == Variant::CpuBaseline || v == Variant::CpuUnpack || v == Variant::CpuSoA;
}

std::uint64_t checksum(const layoutops::PackedBuffer& buf) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&](std::uint8_t byte) {
        h ^= byte;
        h *= 0x100000001b3ull;
    };
    for (std::uint8_t b : buf.data.bytes) mix(b);
    for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(buf.data.length_bits >> (8 * i)));
    return h;
}

PipelineConfig parse_pipeline_config(const std::string& text, const PipelineConfig& defaults) {
    PipelineConfig cfg = defaults;
    std::istringstream in(text);
    std::string item;
    auto parse_kernels = [](const std::string& list) {
        std::vector<KernelId> kernels;
        std::istringstream ss(list);
        std::string name;
        while (std::getline(ss, name, ','))
            if (!name.empty()) kernels.push_back(sph::kernel_from_name(name));
        return kernels;
    };
    while (in >> item) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("pipeline config entries must be key=value: " + item);
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "variant")
            cfg.variant = variant_from_name(value);
        else if (key == "mode")
            cfg.mode = mode_from_name(value);
        else if (key == "kernels" || key == "order")
            cfg.kernels = parse_kernels(value);
        else
            throw std::invalid_argument("unknown pipeline config key '" + key + "'");
    }
    return cfg;
}

namespace {

enum class Conv { None, Unpack, UnpackSoA };

Conv conv_of(Variant v) {
    switch (v) {
        case Variant::CpuBaseline:
        case Variant::DevNative: return Conv::None;
        case Variant::CpuUnpack:
        case Variant::DevUnpack:
        case Variant::HostUnpackStream: return Conv::Unpack;
        case Variant::CpuSoA:
        case Variant::DevSoA:
        case Variant::HostSoAStream: return Conv::UnpackSoA;
    }
    return Conv::None;
}

bool is_host_variant(Variant v) {
    return v == Variant::HostUnpackStream || v == Variant::HostSoAStream;
}

class Run {
public:
    Run(PackedBuffer& state, const std::vector<KernelAccessSet>& sets, const PipelineConfig& cfg,
        Machine& machine)
        : state_(state), sets_(sets), cfg_(cfg), machine_(machine) {}

    RunMetrics execute();

private:
    using Clock = std::chrono::steady_clock;

    template <typename Fn>
    void timed(double& slot, Fn&& fn) {
        const auto t0 = Clock::now();
        fn();
        slot += std::chrono::duration<double>(Clock::now() - t0).count();
    }

    PackedBuffer& pool(const std::string& key) { return pool_[key]; }

    const KernelAccessSet& set_for(KernelId k) const {
        const char* name = sph::kernel_name(k);
        for (const auto& s : sets_)
            if (s.kernel == name) return s;
        throw std::invalid_argument(std::string("no access set declared for kernel '") + name +
                                    "'");
    }

    void compute(PackedBuffer& buf, KernelId k) {
        BufferView view(buf);
        double t = 0;
        timed(t, [&] {
            sph::run_kernel_chunked(k, view, cfg_.buffer_size, cfg_.params, cfg_.writeback,
                                    cfg_.threads);
        });
        metrics_.phases.compute_s += t;
        metrics_.kernel_compute_s[sph::kernel_name(k)] += t;
    }

    // Preamble over a compressed AoS buffer: N, U and optionally C.
    // Returns the buffer the kernel consumes.
    PackedBuffer& preamble(PackedBuffer& src, const KernelAccessSet& set, KernelId k) {
        const std::string tag = set.kernel;
        PackedBuffer& narrowed = pool("narrow:" + tag);
        PackedBuffer& native = pool("native:" + tag);
        timed(metrics_.phases.convert_s, [&] {
            layoutops::narrow_into(src, set, narrowed);
            layoutops::unpack_into(narrowed, native);
            ++metrics_.conversions;
        });
        if (conv_of(cfg_.variant) != Conv::UnpackSoA) {
            maybe_redo_unhoisted(narrowed, k);
            return native;
        }
        PackedBuffer& streams = pool("soa:" + tag);
        timed(metrics_.phases.convert_s, [&] { layoutops::aos_to_soa_into(native, streams); });
        maybe_redo_unhoisted(narrowed, k);
        return streams;
    }

    void epilogue(PackedBuffer& computed, const KernelAccessSet& set, PackedBuffer& dst) {
        const std::string tag = set.kernel;
        PackedBuffer* aos = &computed;
        if (conv_of(cfg_.variant) == Conv::UnpackSoA) {
            PackedBuffer& back = pool("soa_back:" + tag);
            timed(metrics_.phases.convert_s, [&] { layoutops::soa_to_aos_into(computed, back); });
            aos = &back;
        }
        PackedBuffer& packed = pool("packed:" + tag);
        timed(metrics_.phases.convert_s, [&] { layoutops::pack_into(*aos, packed); });
        timed(metrics_.phases.merge_s, [&] { layoutops::widen_merge(packed, dst, set); });
    }

    // Without hoisting, the inner-loop view of a quadratic kernel is
    // rebuilt once per outer iteration; the results are identical, only
    // the conversion count (and cost) grows.
    void maybe_redo_unhoisted(const PackedBuffer& compressed_aos, KernelId k) {
        if (cfg_.hoist || !sph::is_quadratic(k)) return;
        timed(metrics_.phases.convert_s, [&] {
            const std::uint64_t bs = cfg_.buffer_size;
            PackedBuffer& slice = pool("unhoist_slice");
            PackedBuffer& scratch = pool("unhoist_native");
            for (std::uint64_t chunk = 0; chunk < compressed_aos.count / bs; ++chunk) {
                slice.schema_ = compressed_aos.schema_;
                slice.count = bs;
                slice.layout = compressed_aos.layout;
                slice.precision = compressed_aos.precision;
                slice.subset = compressed_aos.subset;
                slice.home = compressed_aos.home;
                slice.data.resize(slice.total_bits());
                bitpack::copy_bits(compressed_aos.data, chunk * bs * slice.record_bits(),
                                   slice.data, 0, bs * slice.record_bits());
                for (std::uint64_t i = 0; i < bs; ++i) {
                    layoutops::unpack_into(slice, scratch);
                    if (conv_of(cfg_.variant) == Conv::UnpackSoA) {
                        PackedBuffer& streams = pool("unhoist_soa");
                        layoutops::aos_to_soa_into(scratch, streams);
                    }
                    ++metrics_.conversions;
                }
            }
        });
    }

    void run_cpu() {
        for (KernelId k : cfg_.kernels) {
            if (conv_of(cfg_.variant) == Conv::None) {
                compute(state_, k);
                continue;
            }
            const KernelAccessSet& set = set_for(k);
            PackedBuffer& cb = preamble(state_, set, k);
            compute(cb, k);
            epilogue(cb, set, state_);
        }
    }

    void run_dev_inplace() {
        PackedBuffer& dev_state = pool("dev_state");
        timed(metrics_.phases.move_s,
              [&] { layoutops::move_into(state_, ArenaId::Device, machine_, dev_state); });
        for (KernelId k : cfg_.kernels) {
            if (conv_of(cfg_.variant) == Conv::None) {
                compute(dev_state, k);
                continue;
            }
            const KernelAccessSet& set = set_for(k);
            PackedBuffer& cb = preamble(dev_state, set, k);
            compute(cb, k);
            epilogue(cb, set, dev_state);
        }
        PackedBuffer& back = pool("host_state");
        timed(metrics_.phases.move_s,
              [&] { layoutops::move_into(dev_state, ArenaId::Host, machine_, back); });
        state_.data = std::move(back.data);
    }

    void run_dev_streaming() {
        for (KernelId k : cfg_.kernels) {
            const KernelAccessSet& set = set_for(k);
            const std::string tag = set.kernel;
            PackedBuffer& narrowed = pool("narrow:" + tag);
            timed(metrics_.phases.convert_s,
                  [&] { layoutops::narrow_into(state_, set, narrowed); });
            PackedBuffer& moved = pool("dev:" + tag);
            timed(metrics_.phases.move_s,
                  [&] { layoutops::move_into(narrowed, ArenaId::Device, machine_, moved); });

            PackedBuffer* result = &moved;
            if (conv_of(cfg_.variant) == Conv::None) {
                compute(moved, k);
            } else {
                PackedBuffer& native = pool("native:" + tag);
                timed(metrics_.phases.convert_s, [&] {
                    layoutops::unpack_into(moved, native);
                    ++metrics_.conversions;
                });
                PackedBuffer* cb = &native;
                if (conv_of(cfg_.variant) == Conv::UnpackSoA) {
                    PackedBuffer& streams = pool("soa:" + tag);
                    timed(metrics_.phases.convert_s,
                          [&] { layoutops::aos_to_soa_into(native, streams); });
                    cb = &streams;
                }
                maybe_redo_unhoisted(moved, k);
                compute(*cb, k);
                if (conv_of(cfg_.variant) == Conv::UnpackSoA) {
                    PackedBuffer& back_aos = pool("soa_back:" + tag);
                    timed(metrics_.phases.convert_s,
                          [&] { layoutops::soa_to_aos_into(*cb, back_aos); });
                    cb = &back_aos;
                }
                PackedBuffer& packed = pool("packed:" + tag);
                timed(metrics_.phases.convert_s, [&] { layoutops::pack_into(*cb, packed); });
                result = &packed;
            }

            PackedBuffer& back = pool("back:" + tag);
            timed(metrics_.phases.move_s,
                  [&] { layoutops::move_into(*result, ArenaId::Host, machine_, back); });
            timed(metrics_.phases.merge_s, [&] { layoutops::widen_merge(back, state_, set); });
        }
    }

    void run_host_inplace() {
        PackedBuffer& native = pool("native_full");
        timed(metrics_.phases.convert_s, [&] {
            layoutops::unpack_into(state_, native);
            ++metrics_.conversions;
        });
        PackedBuffer* shipped = &native;
        if (conv_of(cfg_.variant) == Conv::UnpackSoA) {
            PackedBuffer& streams = pool("soa_full");
            timed(metrics_.phases.convert_s, [&] { layoutops::aos_to_soa_into(native, streams); });
            shipped = &streams;
        }
        PackedBuffer& dev = pool("dev_state");
        timed(metrics_.phases.move_s,
              [&] { layoutops::move_into(*shipped, ArenaId::Device, machine_, dev); });
        for (KernelId k : cfg_.kernels) {
            maybe_redo_unhoisted(state_, k);
            compute(dev, k);
        }
        PackedBuffer& back = pool("host_native");
        timed(metrics_.phases.move_s,
              [&] { layoutops::move_into(dev, ArenaId::Host, machine_, back); });
        PackedBuffer* aos = &back;
        if (conv_of(cfg_.variant) == Conv::UnpackSoA) {
            PackedBuffer& aos_back = pool("aos_back");
            timed(metrics_.phases.convert_s, [&] { layoutops::soa_to_aos_into(back, aos_back); });
            aos = &aos_back;
        }
        PackedBuffer& packed = pool("packed_full");
        timed(metrics_.phases.convert_s, [&] { layoutops::pack_into(*aos, packed); });
        timed(metrics_.phases.merge_s, [&] { state_.data = std::move(packed.data); });
    }

    void run_host_streaming() {
        for (KernelId k : cfg_.kernels) {
            const KernelAccessSet& set = set_for(k);
            const std::string tag = set.kernel;
            PackedBuffer& narrowed = pool("narrow:" + tag);
            PackedBuffer& native = pool("native:" + tag);
            timed(metrics_.phases.convert_s, [&] {
                layoutops::narrow_into(state_, set, narrowed);
                layoutops::unpack_into(narrowed, native);
                ++metrics_.conversions;
            });
            PackedBuffer* shipped = &native;
            if (conv_of(cfg_.variant) == Conv::UnpackSoA) {
                PackedBuffer& streams = pool("soa:" + tag);
                timed(metrics_.phases.convert_s,
                      [&] { layoutops::aos_to_soa_into(native, streams); });
                shipped = &streams;
            }
            maybe_redo_unhoisted(narrowed, k);
            PackedBuffer& dev = pool("dev:" + tag);
            timed(metrics_.phases.move_s,
                  [&] { layoutops::move_into(*shipped, ArenaId::Device, machine_, dev); });
            compute(dev, k);
            PackedBuffer& back = pool("back:" + tag);
            timed(metrics_.phases.move_s,
                  [&] { layoutops::move_into(dev, ArenaId::Host, machine_, back); });
            PackedBuffer* aos = &back;
            if (conv_of(cfg_.variant) == Conv::UnpackSoA) {
                PackedBuffer& aos_back = pool("aos_back:" + tag);
                timed(metrics_.phases.convert_s,
                      [&] { layoutops::soa_to_aos_into(back, aos_back); });
                aos = &aos_back;
            }
            PackedBuffer& packed = pool("packed:" + tag);
            timed(metrics_.phases.convert_s, [&] { layoutops::pack_into(*aos, packed); });
            timed(metrics_.phases.merge_s, [&] { layoutops::widen_merge(packed, state_, set); });
        }
    }

    PackedBuffer& state_;
    const std::vector<KernelAccessSet>& sets_;
    const PipelineConfig& cfg_;
    Machine& machine_;
    RunMetrics metrics_;
    std::map<std::string, PackedBuffer> pool_;
};

RunMetrics Run::execute() {
    if (state_.layout != LayoutTag::AoS || state_.precision != PrecisionTag::Compressed ||
        !state_.full_subset() || state_.home != ArenaId::Host)
        throw std::invalid_argument(
            "run_variant expects a compressed AoS host buffer over the full field set");
    if (cfg_.buffer_size == 0 || state_.count % cfg_.buffer_size != 0)
        throw std::invalid_argument("buffer size must divide the particle count");

    const std::uint64_t d0 = machine_.ledger.bytes_to_device;
    const std::uint64_t h0 = machine_.ledger.bytes_to_host;
    const std::uint64_t t0 = machine_.ledger.total_transfers();

    if (is_cpu_variant(cfg_.variant))  // execution mode has no effect on-host
        run_cpu();
    else if (!is_host_variant(cfg_.variant))
        cfg_.mode == Mode::InPlace ? run_dev_inplace() : run_dev_streaming();
    else
        cfg_.mode == Mode::InPlace ? run_host_inplace() : run_host_streaming();

    metrics_.bytes_to_device = machine_.ledger.bytes_to_device - d0;
    metrics_.bytes_to_host = machine_.ledger.bytes_to_host - h0;
    metrics_.transfers = machine_.ledger.total_transfers() - t0;
    metrics_.modeled_transfer_s =
        double(metrics_.transfers) * cfg_.latency_s +
        double(metrics_.bytes_to_device + metrics_.bytes_to_host) / cfg_.bandwidth_bytes_per_s;
    metrics_.checksum = checksum(state_);
    return metrics_;
}

}  // namespace

RunMetrics run_variant(layoutops::PackedBuffer& state,
                       const std::vector<schema::KernelAccessSet>& access_sets,
                       const PipelineConfig& config, layoutops::Machine& machine) {
    return Run(state, access_sets, config, machine).execute();
}

namespace {

std::uint64_t subset_bits(const schema::RecordSchema& s, const std::vector<std::string>* reads,
                          const std::vector<std::string>* writes, bool native_widths) {
    std::uint64_t bits = 0;
    for (const auto& f : s.fields) {
        bool used = reads == nullptr;
        auto in = [&](const std::vector<std::string>& v) {
            return std::find(v.begin(), v.end(), f.name) != v.end();
        };
        if (!used) used = in(*reads) || (writes && in(*writes));
        if (!used) continue;
        bits += std::uint64_t(f.arity) * (native_widths ? f.native_width() : f.stored_width());
    }
    return bits;
}

}  // namespace

std::uint64_t streamed_bytes_one_way(const schema::RecordSchema& s,
                                     const schema::KernelAccessSet& set, std::uint64_t count,
                                     Variant variant) {
    if (is_cpu_variant(variant)) return 0;
    const bool native = is_host_variant(variant);  // host variants ship expanded data
    return (count * subset_bits(s, &set.reads, &set.writes, native) + 7) / 8;
}

std::uint64_t inplace_bytes_one_way(const schema::RecordSchema& s, std::uint64_t count,
                                    Variant variant) {
    if (is_cpu_variant(variant)) return 0;
    const bool native = is_host_variant(variant);
    return (count * subset_bits(s, nullptr, nullptr, native) + 7) / 8;
}

}  // namespace soaforge::pipelines
