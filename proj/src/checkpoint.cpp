#include "entroscale/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "entroscale/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

namespace entroscale::diffusion {
namespace {

constexpr char kMagic[8] = {'E', 'N', 'T', 'R', 'O', 'T', 'O', 'Y'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
    std::ofstream out;

    explicit Writer(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw Error(ErrorCode::IoError, "cannot open checkpoint for writing: " + path);
    }
    void bytes(const void* p, std::size_t n) { out.write(static_cast<const char*>(p), n); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
};

struct Reader {
    std::vector<char> buf;
    std::size_t pos = 0;

    explicit Reader(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::IoError, "cannot open checkpoint: " + path);
        buf.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    void bytes(void* p, std::size_t n) {
        if (pos + n > buf.size())
            throw Error(ErrorCode::CheckpointError, "checkpoint file truncated");
        std::memcpy(p, buf.data() + pos, n);
        pos += n;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        bytes(&v, 4);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, 8);
        return v;
    }
    double f64() {
        double v;
        bytes(&v, 8);
        return v;
    }
};

} // namespace

void save_checkpoint(const std::string& path, const TrainState& state) {
    const DenoiserConfig& cfg = state.params.cfg;
    Writer w(path);
    w.bytes(kMagic, 8);
    w.u32(kVersion);
    w.u32(std::uint32_t(cfg.patch));
    w.u32(std::uint32_t(cfg.d_model));
    w.u32(std::uint32_t(cfg.d_key));
    w.u32(std::uint32_t(cfg.d_ff));
    w.u32(std::uint32_t(cfg.n_layers));
    w.u32(std::uint32_t(cfg.d_sin));
    w.u32(std::uint32_t(state.sched.steps));
    w.f64(state.sched.betas.empty() ? 0.0 : state.sched.betas.front());
    w.f64(state.sched.betas.empty() ? 0.0 : state.sched.betas.back());
    w.u64(state.step);
    w.u64(state.train_token_count);

    const auto& sites = state.params.site_train_tokens;
    w.u32(std::uint32_t(sites.size()));
    for (std::size_t t : sites) w.u64(t);

    std::vector<std::pair<const double*, std::size_t>> tensors;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes;
    const DenoiserParams& p = state.params;
    auto shape_of = [&](const Matrix& m) {
        shapes.emplace_back(std::uint32_t(m.rows()), std::uint32_t(m.cols()));
    };
    auto shape_vec = [&](const std::vector<double>& v) {
        shapes.emplace_back(1u, std::uint32_t(v.size()));
    };
    shape_of(p.w_embed);
    shape_vec(p.b_embed);
    shape_of(p.w_time);
    shape_vec(p.b_time);
    for (const LayerParams& lp : p.layers) {
        shape_of(lp.wq);
        shape_of(lp.wk);
        shape_of(lp.wv);
        shape_of(lp.wo);
        shape_of(lp.w1);
        shape_vec(lp.b1);
        shape_of(lp.w2);
        shape_vec(lp.b2);
    }
    shape_of(p.w_head);
    shape_vec(p.b_head);
    p.for_each_span([&](const double* d, std::size_t n) { tensors.emplace_back(d, n); });

    w.u32(std::uint32_t(shapes.size()));
    for (auto [r, c] : shapes) {
        w.u32(r);
        w.u32(c);
    }
    for (auto [d, n] : tensors) w.bytes(d, n * sizeof(double));
    w.out.flush();
    if (!w.out) throw Error(ErrorCode::IoError, "failed writing checkpoint: " + path);
}

TrainState load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw Error(ErrorCode::CheckpointError, "bad checkpoint magic");
    std::uint32_t version = r.u32();
    if (version != kVersion)
        throw Error(ErrorCode::CheckpointError,
                    "unsupported checkpoint version " + std::to_string(version));

    DenoiserConfig cfg;
    cfg.patch = r.u32();
    cfg.d_model = r.u32();
    cfg.d_key = r.u32();
    cfg.d_ff = r.u32();
    cfg.n_layers = r.u32();
    cfg.d_sin = r.u32();
    std::uint32_t steps = r.u32();
    double beta_start = r.f64();
    double beta_end = r.f64();

    TrainState state;
    try {
        state.sched = make_schedule(steps, beta_start, beta_end);
        state.params = DenoiserParams::zeros(cfg);
    } catch (const Error&) {
        throw Error(ErrorCode::CheckpointError, "checkpoint carries invalid hyperparameters");
    }
    state.step = r.u64();
    state.train_token_count = r.u64();

    std::uint32_t n_sites = r.u32();
    if (n_sites != cfg.n_layers)
        throw Error(ErrorCode::CheckpointError, "site count disagrees with layer count");
    state.params.site_train_tokens.resize(n_sites);
    for (std::uint32_t i = 0; i < n_sites; ++i) state.params.site_train_tokens[i] = r.u64();

    // Shapes must match what the architecture dictates, tensor by tensor.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> expected;
    const DenoiserParams& p = state.params;
    auto expect_mat = [&](const Matrix& m) {
        expected.emplace_back(std::uint32_t(m.rows()), std::uint32_t(m.cols()));
    };
    auto expect_vec = [&](const std::vector<double>& v) {
        expected.emplace_back(1u, std::uint32_t(v.size()));
    };
    expect_mat(p.w_embed);
    expect_vec(p.b_embed);
    expect_mat(p.w_time);
    expect_vec(p.b_time);
    for (const LayerParams& lp : p.layers) {
        expect_mat(lp.wq);
        expect_mat(lp.wk);
        expect_mat(lp.wv);
        expect_mat(lp.wo);
        expect_mat(lp.w1);
        expect_vec(lp.b1);
        expect_mat(lp.w2);
        expect_vec(lp.b2);
    }
    expect_mat(p.w_head);
    expect_vec(p.b_head);

    std::uint32_t tensor_count = r.u32();
    if (tensor_count != expected.size())
        throw Error(ErrorCode::CheckpointError, "tensor count disagrees with architecture");
    for (auto [er, ec] : expected) {
        std::uint32_t rr = r.u32(), rc = r.u32();
        if (rr != er || rc != ec)
            throw Error(ErrorCode::CheckpointError, "tensor shape disagrees with architecture");
    }
    state.params.for_each_span(
        [&](double* d, std::size_t n) { r.bytes(d, n * sizeof(double)); });
    if (r.pos != r.buf.size())
        throw Error(ErrorCode::CheckpointError, "trailing bytes after checkpoint payload");

    state.velocity.assign(state.params.param_count(), 0.0);
    return state;
}

} // namespace entroscale::diffusion
