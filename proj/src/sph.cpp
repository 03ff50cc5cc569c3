#include "soaforge/sph.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace soaforge::sph {

namespace {
constexpr double kSigma3D = 1.0 / std::numbers::pi;
}

double w(double r, double h) {
    const double q = r / h;
    if (q >= 2.0) return 0.0;
    const double norm = kSigma3D / (h * h * h);
    if (q < 1.0) return norm * (1.0 - 1.5 * q * q + 0.75 * q * q * q);
    const double t = 2.0 - q;
    return norm * 0.25 * t * t * t;
}

double dw_dr(double r, double h) {
    const double q = r / h;
    if (q >= 2.0) return 0.0;
    const double norm = kSigma3D / (h * h * h * h);
    if (q < 1.0) return norm * (-3.0 * q + 2.25 * q * q);
    const double t = 2.0 - q;
    return norm * (-0.75 * t * t);
}

std::array<double, 3> grad_w(const std::array<double, 3>& r_vec, double h) {
    const double r = std::sqrt(r_vec[0] * r_vec[0] + r_vec[1] * r_vec[1] + r_vec[2] * r_vec[2]);
    if (r == 0.0) return {0.0, 0.0, 0.0};
    const double s = dw_dr(r, h) / r;
    return {s * r_vec[0], s * r_vec[1], s * r_vec[2]};
}

EosResult eos(double rho, double u, double gamma) {
    if (!(rho > 0.0)) throw std::domain_error("eos: non-positive density");
    const double P = (gamma - 1.0) * rho * u;
    return {P, std::sqrt(gamma * P / rho)};
}

const char* kernel_name(KernelId id) {
    switch (id) {
        case KernelId::Density: return "density";
        case KernelId::Force: return "force";
        case KernelId::Kick: return "kick";
        case KernelId::Drift: return "drift";
        case KernelId::Identity: return "identity";
    }
    return "?";
}

KernelId kernel_from_name(const std::string& name) {
    for (KernelId id : {KernelId::Density, KernelId::Force, KernelId::Kick, KernelId::Drift,
                        KernelId::Identity})
        if (name == kernel_name(id)) return id;
    throw std::invalid_argument("unknown kernel '" + name + "'");
}

bool is_quadratic(KernelId id) { return id == KernelId::Density || id == KernelId::Force; }

BufferView::BufferView(layoutops::PackedBuffer& buf) : buf_(&buf) {
    record_bits_ = buf.record_bits();
    by_schema_idx_.assign(buf.schema_->fields.size(), -1);
    std::uint64_t aos_prefix = 0;
    std::uint64_t soa_base = 0;
    for (size_t pos = 0; pos < buf.subset.size(); ++pos) {
        const int idx = buf.subset[pos];
        const auto& decl = buf.schema_->fields[idx];
        FieldInfo info;
        info.width = buf.width_of(idx);
        info.arity = decl.arity;
        info.is_float = decl.is_float();
        info.native = buf.precision == layoutops::PrecisionTag::Native;
        if (info.is_float) info.store_spec = fpcodec::layout_for(decl.stored_width());
        info.aos_prefix = aos_prefix;
        info.soa_base = soa_base;
        aos_prefix += std::uint64_t(decl.arity) * info.width;
        soa_base += buf.count * std::uint64_t(decl.arity) * info.width;
        by_schema_idx_[idx] = static_cast<int>(pos);
        fields_.push_back(info);
    }
}

int BufferView::field(const std::string& name) const {
    const int idx = buf_->schema_->field_index(name);
    return idx < 0 ? -1 : by_schema_idx_[idx];
}

int BufferView::require(const std::string& name) const {
    const int pos = field(name);
    if (pos < 0)
        throw std::invalid_argument("field '" + name + "' is not present in the buffer view");
    return pos;
}

double BufferView::get(int field_idx, std::uint64_t rec, int lane) const {
    const FieldInfo& f = fields_[field_idx];
    const std::uint64_t bits = bitpack::read_bits(buf_->data, offset(f, rec, lane), f.width);
    if (!f.is_float) return static_cast<double>(static_cast<std::int64_t>(bits));
    // A native lane already holds expanded base-format bits.
    if (f.native)
        return fpcodec::widen_from_ieee(bits, f.store_spec.exponent_bits,
                                        f.store_spec.base_mantissa_bits());
    return fpcodec::decode_bits(bits, f.store_spec);
}

void BufferView::set(int field_idx, std::uint64_t rec, int lane, double value) {
    const FieldInfo& f = fields_[field_idx];
    std::uint64_t bits;
    if (f.is_float) {
        // Stores always truncate through the stored format, so a native
        // buffer never carries more precision than its packed counterpart.
        bits = fpcodec::encode_bits(value, f.store_spec);
        if (f.native) bits = fpcodec::expand_to_base_bits(bits, f.store_spec);
    } else {
        bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(value));
    }
    bitpack::write_bits(buf_->data, offset(f, rec, lane), f.width, bits);
}

std::int64_t BufferView::get_int(int field_idx, std::uint64_t rec) const {
    const FieldInfo& f = fields_[field_idx];
    return static_cast<std::int64_t>(bitpack::read_bits(buf_->data, offset(f, rec, 0), f.width));
}

void BufferView::set_int(int field_idx, std::uint64_t rec, std::int64_t value) {
    const FieldInfo& f = fields_[field_idx];
    bitpack::write_bits(buf_->data, offset(f, rec, 0), f.width, static_cast<std::uint64_t>(value));
}

ParticleFields ParticleFields::resolve(const BufferView& view, KernelId kernel) {
    ParticleFields f{-1, -1, -1, -1, -1, -1, -1, -1, -1, -1};
    switch (kernel) {
        case KernelId::Density:
            f.x = view.require("x");
            f.m = view.require("m");
            f.h = view.require("h");
            f.rho = view.require("rho");
            break;
        case KernelId::Force:
            f.x = view.require("x");
            f.v = view.require("v");
            f.m = view.require("m");
            f.h = view.require("h");
            f.rho = view.require("rho");
            f.P = view.require("P");
            f.a = view.require("a");
            f.du = view.require("du");
            break;
        case KernelId::Kick:
            f.v = view.require("v");
            f.u = view.require("u");
            f.a = view.require("a");
            f.du = view.require("du");
            break;
        case KernelId::Drift:
            f.x = view.require("x");
            f.v = view.require("v");
            break;
        case KernelId::Identity:
            f.x = view.require("x");
            break;
    }
    return f;
}

namespace {

void density_kernel(BufferView& vi, const BufferView& vj, std::uint64_t begin, std::uint64_t len,
                    Writeback wb) {
    const ParticleFields fi = ParticleFields::resolve(vi, KernelId::Density);
    const ParticleFields fj = ParticleFields::resolve(vj, KernelId::Density);
    for (std::uint64_t i = begin; i < begin + len; ++i) {
        const double xi0 = vi.get(fi.x, i, 0), xi1 = vi.get(fi.x, i, 1), xi2 = vi.get(fi.x, i, 2);
        const double hi = vi.get(fi.h, i);
        double acc = 0.0;
        if (wb == Writeback::PerAccess) vi.set(fi.rho, i, 0, acc);
        for (std::uint64_t j = begin; j < begin + len; ++j) {  // self-term included
            const double dx0 = xi0 - vj.get(fj.x, j, 0);
            const double dx1 = xi1 - vj.get(fj.x, j, 1);
            const double dx2 = xi2 - vj.get(fj.x, j, 2);
            const double r = std::sqrt(dx0 * dx0 + dx1 * dx1 + dx2 * dx2);
            const double hij = 0.5 * (hi + vj.get(fj.h, j));
            acc += vj.get(fj.m, j) * w(r, hij);
            if (wb == Writeback::PerAccess) {
                vi.set(fi.rho, i, 0, acc);
                acc = vi.get(fi.rho, i);
            }
        }
        if (wb == Writeback::Deferred) vi.set(fi.rho, i, 0, acc);
    }
}

void force_kernel(BufferView& vi, const BufferView& vj, std::uint64_t begin, std::uint64_t len,
                  Writeback wb) {
    const ParticleFields fi = ParticleFields::resolve(vi, KernelId::Force);
    const ParticleFields fj = ParticleFields::resolve(vj, KernelId::Force);
    for (std::uint64_t i = begin; i < begin + len; ++i) {
        const std::array<double, 3> xi = {vi.get(fi.x, i, 0), vi.get(fi.x, i, 1),
                                          vi.get(fi.x, i, 2)};
        const std::array<double, 3> ui = {vi.get(fi.v, i, 0), vi.get(fi.v, i, 1),
                                          vi.get(fi.v, i, 2)};
        const double hi = vi.get(fi.h, i);
        const double rho_i = vi.get(fi.rho, i);
        if (rho_i == 0.0) throw std::domain_error("force: degenerate state, rho == 0");
        const double Pi_over_rho2 = vi.get(fi.P, i) / (rho_i * rho_i);

        std::array<double, 3> a_acc = {0.0, 0.0, 0.0};
        double compr_acc = 0.0;  // sum m_j (v_i - v_j) . grad W
        auto flush = [&](bool store_all) {
            if (!store_all) return;
            for (int lane = 0; lane < 3; ++lane) {
                vi.set(fi.a, i, lane, a_acc[lane]);
                a_acc[lane] = vi.get(fi.a, i, lane);
            }
            vi.set(fi.du, i, 0, Pi_over_rho2 * compr_acc);
        };
        for (std::uint64_t j = begin; j < begin + len; ++j) {
            if (j == i) continue;  // self-term excluded; grad_w(0) = 0 anyway
            const std::array<double, 3> dx = {xi[0] - vj.get(fj.x, j, 0),
                                              xi[1] - vj.get(fj.x, j, 1),
                                              xi[2] - vj.get(fj.x, j, 2)};
            const double hij = 0.5 * (hi + vj.get(fj.h, j));
            const std::array<double, 3> gw = grad_w(dx, hij);
            const double mj = vj.get(fj.m, j);
            const double rho_j = vj.get(fj.rho, j);
            if (rho_j == 0.0) throw std::domain_error("force: degenerate state, rho == 0");
            const double pressure_factor = Pi_over_rho2 + vj.get(fj.P, j) / (rho_j * rho_j);
            for (int lane = 0; lane < 3; ++lane) a_acc[lane] -= mj * pressure_factor * gw[lane];
            const std::array<double, 3> dv = {ui[0] - vj.get(fj.v, j, 0),
                                              ui[1] - vj.get(fj.v, j, 1),
                                              ui[2] - vj.get(fj.v, j, 2)};
            compr_acc += mj * (dv[0] * gw[0] + dv[1] * gw[1] + dv[2] * gw[2]);
            flush(wb == Writeback::PerAccess);
        }
        flush(true);
    }
}

void kick_kernel(BufferView& view, std::uint64_t begin, std::uint64_t len,
                 const KernelParams& params) {
    const ParticleFields f = ParticleFields::resolve(view, KernelId::Kick);
    for (std::uint64_t i = begin; i < begin + len; ++i) {
        for (int lane = 0; lane < 3; ++lane)
            view.set(f.v, i, lane, view.get(f.v, i, lane) + view.get(f.a, i, lane) * params.dt);
        const double u = view.get(f.u, i) + view.get(f.du, i) * params.dt;
        view.set(f.u, i, 0, u < 0.0 ? 0.0 : u);
    }
}

void drift_kernel(BufferView& view, std::uint64_t begin, std::uint64_t len,
                  const KernelParams& params) {
    const ParticleFields f = ParticleFields::resolve(view, KernelId::Drift);
    for (std::uint64_t i = begin; i < begin + len; ++i)
        for (int lane = 0; lane < 3; ++lane)
            view.set(f.x, i, lane, view.get(f.x, i, lane) + view.get(f.v, i, lane) * params.dt);
}

void identity_kernel(BufferView& view, std::uint64_t begin, std::uint64_t len) {
    const ParticleFields f = ParticleFields::resolve(view, KernelId::Identity);
    for (std::uint64_t i = begin; i < begin + len; ++i)
        for (int lane = 0; lane < 3; ++lane) view.set(f.x, i, lane, view.get(f.x, i, lane));
}

}  // namespace

void run_kernel(KernelId kernel, BufferView& view_i, const BufferView& view_j,
                std::uint64_t begin, std::uint64_t len, const KernelParams& params,
                Writeback writeback) {
    switch (kernel) {
        case KernelId::Density: density_kernel(view_i, view_j, begin, len, writeback); break;
        case KernelId::Force: force_kernel(view_i, view_j, begin, len, writeback); break;
        case KernelId::Kick: kick_kernel(view_i, begin, len, params); break;
        case KernelId::Drift: drift_kernel(view_i, begin, len, params); break;
        case KernelId::Identity: identity_kernel(view_i, begin, len); break;
    }
}

void run_kernel_chunked(KernelId kernel, BufferView& view, std::uint64_t buffer_size,
                        const KernelParams& params, Writeback writeback, int threads) {
    const std::uint64_t n = view.count();
    if (buffer_size == 0 || n % buffer_size != 0)
        throw std::invalid_argument("buffer size must divide the particle count");
    const std::uint64_t chunks = n / buffer_size;
    auto work = [&](std::uint64_t first, std::uint64_t last) {
        for (std::uint64_t c = first; c < last; ++c)
            run_kernel(kernel, view, view, c * buffer_size, buffer_size, params, writeback);
    };
    if (threads <= 1 || chunks <= 1) {
        work(0, chunks);
        return;
    }
    const std::uint64_t nthreads = std::min<std::uint64_t>(threads, chunks);
    std::vector<std::thread> pool;
    for (std::uint64_t t = 0; t < nthreads; ++t) {
        const std::uint64_t first = chunks * t / nthreads;
        const std::uint64_t last = chunks * (t + 1) / nthreads;
        pool.emplace_back(work, first, last);
    }
    for (auto& th : pool) th.join();
}

void ParticleSoA::resize(std::uint64_t n) {
    x.resize(n);
    v.resize(n);
    a.resize(n);
    u.resize(n);
    m.resize(n);
    h.resize(n);
    rho.resize(n);
    P.resize(n);
    cs.resize(n);
    du.resize(n);
    dt.resize(n);
    id.resize(n);
}

ParticleSoA random_initial_conditions(std::uint64_t count, std::uint64_t seed,
                                      const KernelParams& params) {
    ParticleSoA s;
    s.resize(count);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::uniform_real_distribution<double> energy(0.5, 1.5);
    for (std::uint64_t i = 0; i < count; ++i) {
        for (int lane = 0; lane < 3; ++lane) s.x[i][lane] = unit(rng);
        for (int lane = 0; lane < 3; ++lane) s.v[i][lane] = sym(rng);
        s.u[i] = energy(rng);
        s.m[i] = 1.0 / kNeighborBufferSize;
        s.h[i] = 0.5;
        s.rho[i] = 1.0;
        const EosResult e = eos(s.rho[i], s.u[i], params.gamma);
        s.P[i] = e.pressure;
        s.cs[i] = e.sound_speed;
        s.a[i] = {0.0, 0.0, 0.0};
        s.du[i] = 0.0;
        s.dt[i] = params.dt;
        s.id[i] = static_cast<std::int64_t>(i);
    }
    return s;
}

ParticleSoA load_initial_conditions_csv(const std::string& path, const KernelParams& params) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open initial conditions file: " + path);
    ParticleSoA s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find_first_not_of(" \t") != std::string::npos && line.rfind("id", 0) == 0)
            continue;  // header row
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 10)
            throw std::runtime_error("initial conditions row must have 10 columns: " + line);
        const std::uint64_t i = s.size();
        s.resize(i + 1);
        s.id[i] = static_cast<std::int64_t>(vals[0]);
        s.x[i] = {vals[1], vals[2], vals[3]};
        s.v[i] = {vals[4], vals[5], vals[6]};
        s.u[i] = vals[7];
        s.m[i] = vals[8];
        s.h[i] = vals[9];
        s.rho[i] = 1.0;
        const EosResult e = eos(s.rho[i], s.u[i], params.gamma);
        s.P[i] = e.pressure;
        s.cs[i] = e.sound_speed;
        s.a[i] = {0.0, 0.0, 0.0};
        s.du[i] = 0.0;
        s.dt[i] = params.dt;
    }
    return s;
}

void store_state(const ParticleSoA& state, BufferView& view) {
    struct Vec {
        const char* name;
        const std::vector<std::array<double, 3>>* data;
    };
    struct Scalar {
        const char* name;
        const std::vector<double>* data;
    };
    const Vec vecs[] = {{"x", &state.x}, {"v", &state.v}, {"a", &state.a}};
    const Scalar scalars[] = {{"u", &state.u},   {"m", &state.m},   {"h", &state.h},
                              {"rho", &state.rho}, {"P", &state.P}, {"cs", &state.cs},
                              {"du", &state.du},  {"dt", &state.dt}};
    for (const auto& vec : vecs) {
        const int pos = view.field(vec.name);
        if (pos < 0) continue;
        for (std::uint64_t i = 0; i < state.size(); ++i)
            for (int lane = 0; lane < 3; ++lane) view.set(pos, i, lane, (*vec.data)[i][lane]);
    }
    for (const auto& sc : scalars) {
        const int pos = view.field(sc.name);
        if (pos < 0) continue;
        for (std::uint64_t i = 0; i < state.size(); ++i) view.set(pos, i, 0, (*sc.data)[i]);
    }
    const int id_pos = view.field("id");
    if (id_pos >= 0)
        for (std::uint64_t i = 0; i < state.size(); ++i) view.set_int(id_pos, i, state.id[i]);
}

ParticleSoA load_state(const BufferView& view) {
    ParticleSoA s;
    s.resize(view.count());
    struct Vec {
        const char* name;
        std::vector<std::array<double, 3>>* data;
    };
    struct Scalar {
        const char* name;
        std::vector<double>* data;
    };
    const Vec vecs[] = {{"x", &s.x}, {"v", &s.v}, {"a", &s.a}};
    const Scalar scalars[] = {{"u", &s.u},     {"m", &s.m},   {"h", &s.h},  {"rho", &s.rho},
                              {"P", &s.P},     {"cs", &s.cs}, {"du", &s.du}, {"dt", &s.dt}};
    for (const auto& vec : vecs) {
        const int pos = view.field(vec.name);
        if (pos < 0) continue;
        for (std::uint64_t i = 0; i < s.size(); ++i)
            for (int lane = 0; lane < 3; ++lane) (*vec.data)[i][lane] = view.get(pos, i, lane);
    }
    for (const auto& sc : scalars) {
        const int pos = view.field(sc.name);
        if (pos < 0) continue;
        for (std::uint64_t i = 0; i < s.size(); ++i) (*sc.data)[i] = view.get(pos, i);
    }
    const int id_pos = view.field("id");
    if (id_pos >= 0)
        for (std::uint64_t i = 0; i < s.size(); ++i) s.id[i] = view.get_int(id_pos, i);
    return s;
}

const char* default_schema_text() {
    return R"(# SWIFT-style particle record; positions stay binary64, the rest binary32.
schema particle {
  field x : f64 x3;
  field id : i64;
  field v : f32 x3;
  field u : f32;
  field m : f32;
  field h : f32;
  field rho : f32;
  field P : f32;
  field cs : f32;
  field a : f32 x3;
  field du : f32;
  field dt : f32;
}
kernel density reads x, m, h writes rho;
kernel force reads x, v, m, h, rho, P, cs writes a, du;
kernel kick reads v, u, a, du writes v, u;
kernel drift reads x, v writes x;
kernel identity reads x writes x;
)";
}

}  // namespace soaforge::sph
