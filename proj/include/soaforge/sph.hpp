#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "soaforge/layout_ops.hpp"

// The SPH workload: cubic-spline smoothing kernel, the quadratic density
// and force kernels, the linear kick and drift kernels, executable over
// any packed view (AoS or SoA, compressed or native).

namespace soaforge::sph {

inline constexpr double kGamma = 5.0 / 3.0;
inline constexpr int kNeighborBufferSize = 64;

// Cubic spline (M4), support radius 2h, 3D normalisation 1/pi.
double w(double r, double h);
double dw_dr(double r, double h);
std::array<double, 3> grad_w(const std::array<double, 3>& r_vec, double h);

// P = (gamma-1) rho u,  cs = sqrt(gamma P / rho).  rho must be positive.
struct EosResult {
    double pressure;
    double sound_speed;
};
EosResult eos(double rho, double u, double gamma = kGamma);

enum class KernelId { Density, Force, Kick, Drift, Identity };
const char* kernel_name(KernelId id);
KernelId kernel_from_name(const std::string& name);
bool is_quadratic(KernelId id);

enum class Writeback { Deferred, PerAccess };

// Scalar access to one subset field of a PackedBuffer, with cached offsets.
// Reads decode the stored (or native) representation to binary64; writes
// quantize through the same representation.
class BufferView {
public:
    explicit BufferView(layoutops::PackedBuffer& buf);

    layoutops::PackedBuffer& buffer() { return *buf_; }
    const layoutops::PackedBuffer& buffer() const { return *buf_; }
    std::uint64_t count() const { return buf_->count; }

    int field(const std::string& name) const;  // -1 if absent from the subset
    int require(const std::string& name) const;

    double get(int field_idx, std::uint64_t rec, int lane = 0) const;
    void set(int field_idx, std::uint64_t rec, int lane, double value);
    std::int64_t get_int(int field_idx, std::uint64_t rec) const;
    void set_int(int field_idx, std::uint64_t rec, std::int64_t value);

private:
    struct FieldInfo {
        int width = 0;
        int arity = 1;
        bool is_float = true;
        bool native = false;
        fpcodec::PrecisionSpec store_spec{};  // of the stored width; writes
                                              // always truncate through it
        std::uint64_t aos_prefix = 0;  // bit offset within the record
        std::uint64_t soa_base = 0;    // bit offset of the field stream
    };

    std::uint64_t offset(const FieldInfo& f, std::uint64_t rec, int lane) const {
        return buf_->layout == layoutops::LayoutTag::AoS
                   ? rec * record_bits_ + f.aos_prefix + std::uint64_t(lane) * f.width
                   : f.soa_base + (rec * std::uint64_t(f.arity) + lane) * f.width;
    }

    layoutops::PackedBuffer* buf_;
    std::uint64_t record_bits_ = 0;
    std::vector<FieldInfo> fields_;  // parallel to buf_->subset
    std::vector<int> by_schema_idx_;
};

// Resolved field handles for the particle schema.
struct ParticleFields {
    int x, v, u, m, h, rho, P, cs, a, du;
    static ParticleFields resolve(const BufferView& view, KernelId kernel);
};

struct KernelParams {
    double dt = 1e-3;
    double gamma = kGamma;
};

// Runs one kernel over records [begin, begin+len) of view_i, with neighbour
// contributions drawn from the same range of view_j (quadratic kernels only).
// Iteration order is ascending index; deferred writeback stores each written
// field once, per-access writeback quantizes the accumulator through the
// storage format after every neighbour contribution.
void run_kernel(KernelId kernel, BufferView& view_i, const BufferView& view_j,
                std::uint64_t begin, std::uint64_t len, const KernelParams& params,
                Writeback writeback);

// Whole-buffer convenience used by tests; chunks into 64-record neighbour
// buffers internally.
void run_kernel_chunked(KernelId kernel, BufferView& view, std::uint64_t buffer_size,
                        const KernelParams& params, Writeback writeback, int threads = 1);

// Plain binary64 particle state used for initial conditions and oracles.
struct ParticleSoA {
    std::vector<std::array<double, 3>> x, v, a;
    std::vector<double> u, m, h, rho, P, cs, du, dt;
    std::vector<std::int64_t> id;
    std::uint64_t size() const { return x.size(); }
    void resize(std::uint64_t n);
};

// Uniform random positions in the unit box, fixed seed; rho seeded at 1 and
// P, cs from the equation of state.
ParticleSoA random_initial_conditions(std::uint64_t count, std::uint64_t seed,
                                      const KernelParams& params = {});

// CSV rows: id,x0,x1,x2,v0,v1,v2,u,m,h
ParticleSoA load_initial_conditions_csv(const std::string& path, const KernelParams& params = {});

// Write the binary64 state through a view (values quantize per the view's
// storage formats).  Fields absent from the schema are skipped by name.
void store_state(const ParticleSoA& state, BufferView& view);

// Read a view back into plain binary64 state; absent fields stay zero.
ParticleSoA load_state(const BufferView& view);

const char* default_schema_text();

}  // namespace soaforge::sph
