#include "entroscale/toy_diffusion.hpp"

#include <cmath>

#include "entroscale/error.hpp"

namespace entroscale::diffusion {

namespace {

using attention::ScalePolicy;

std::vector<double> time_features(std::size_t t, std::size_t d_sin) {
    std::vector<double> f(d_sin);
    std::size_t half = d_sin / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double angle = double(t) / std::pow(10000.0, double(i) / double(half));
        f[2 * i] = std::sin(angle);
        f[2 * i + 1] = std::cos(angle);
    }
    return f;
}

Matrix tokenize(const Matrix& img, std::size_t patch) {
    std::size_t gr = img.rows() / patch, gc = img.cols() / patch;
    Matrix tokens(gr * gc, patch * patch);
    for (std::size_t pr = 0; pr < gr; ++pr)
        for (std::size_t pc = 0; pc < gc; ++pc) {
            double* row = tokens.row_ptr(pr * gc + pc);
            for (std::size_t iy = 0; iy < patch; ++iy)
                for (std::size_t ix = 0; ix < patch; ++ix)
                    row[iy * patch + ix] = img(pr * patch + iy, pc * patch + ix);
        }
    return tokens;
}

Matrix untokenize(const Matrix& tokens, std::size_t patch, std::size_t h, std::size_t w) {
    std::size_t gc = w / patch;
    Matrix img(h, w);
    for (std::size_t tok = 0; tok < tokens.rows(); ++tok) {
        std::size_t pr = tok / gc, pc = tok % gc;
        const double* row = tokens.row_ptr(tok);
        for (std::size_t iy = 0; iy < patch; ++iy)
            for (std::size_t ix = 0; ix < patch; ++ix)
                img(pr * patch + iy, pc * patch + ix) = row[iy * patch + ix];
    }
    return img;
}

void add_bias_rows(Matrix& m, const std::vector<double>& b) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* row = m.row_ptr(i);
        for (std::size_t j = 0; j < m.cols(); ++j) row[j] += b[j];
    }
}

std::vector<double> colsum(const Matrix& m) {
    std::vector<double> s(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* row = m.row_ptr(i);
        for (std::size_t j = 0; j < m.cols(); ++j) s[j] += row[j];
    }
    return s;
}

void add_into(Matrix& dst, const Matrix& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double std_dev, RngStream& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = std_dev * rng.next_gaussian();
    return m;
}

struct LayerCache {
    Matrix h_in, q, k, v, a, c, h_mid, u, g;
};

struct ForwardCache {
    Matrix tokens;
    std::vector<double> tf;
    std::vector<LayerCache> layers;
    Matrix h_out;
};

double site_lambda(const DenoiserParams& params, std::size_t layer, std::size_t n_tokens,
                   ScalePolicy::Kind kind) {
    if (kind == ScalePolicy::Kind::EntropyPreserving) {
        std::size_t t = layer < params.site_train_tokens.size() ? params.site_train_tokens[layer] : 0;
        return attention::scale_factor(ScalePolicy::entropy_preserving(t), n_tokens,
                                       params.cfg.d_key);
    }
    return attention::scale_factor(ScalePolicy::fixed(), n_tokens, params.cfg.d_key);
}

Matrix forward_cached(const DenoiserParams& params, const Matrix& x_t, std::size_t t,
                      ScalePolicy::Kind kind, EntropyTrace* trace, ForwardCache* cache) {
    const DenoiserConfig& cfg = params.cfg;
    if (cfg.patch == 0 || x_t.rows() % cfg.patch != 0 || x_t.cols() % cfg.patch != 0 ||
        x_t.rows() < cfg.patch || x_t.cols() < cfg.patch)
        throw Error(ErrorCode::IncompatibleResolution,
                    "image dimensions are not a multiple of the patch size");
    if (!x_t.all_finite()) throw Error(ErrorCode::NonFiniteInput, "non-finite denoiser input");

    Matrix tokens = tokenize(x_t, cfg.patch);
    std::size_t n = tokens.rows();

    std::vector<double> tf = time_features(t, cfg.d_sin);
    std::vector<double> trow = matvec_t(params.w_time, tf);
    for (std::size_t j = 0; j < cfg.d_model; ++j) trow[j] += params.b_time[j];

    Matrix h = matmul(tokens, params.w_embed);
    add_bias_rows(h, params.b_embed);
    add_bias_rows(h, trow);

    if (cache) {
        cache->tokens = tokens;
        cache->tf = tf;
        cache->layers.resize(params.layers.size());
    }

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const LayerParams& lp = params.layers[l];
        double lambda = site_lambda(params, l, n, kind);

        Matrix q = matmul(h, lp.wq);
        Matrix k = matmul(h, lp.wk);
        Matrix v = matmul(h, lp.wv);
        auto map = attention::attention_map(q, k, lambda);
        if (trace) {
            EntropyRecord rec;
            rec.timestep = t;
            rec.layer_id = l;
            rec.n_tokens = n;
            rec.policy = kind;
            rec.mean_entropy = attention::row_entropy(map).mean;
            trace->push_back(rec);
        }
        Matrix c = matmul(map.weights, v);
        Matrix h_mid = matmul(c, lp.wo);
        add_into(h_mid, h);

        Matrix u = matmul(h_mid, lp.w1);
        add_bias_rows(u, lp.b1);
        Matrix g(u.rows(), u.cols());
        for (std::size_t i = 0; i < u.size(); ++i) g.data()[i] = std::tanh(u.data()[i]);
        Matrix h_next = matmul(g, lp.w2);
        add_bias_rows(h_next, lp.b2);
        add_into(h_next, h_mid);

        if (cache) {
            LayerCache& lc = cache->layers[l];
            lc.h_in = std::move(h);
            lc.q = std::move(q);
            lc.k = std::move(k);
            lc.v = std::move(v);
            lc.a = std::move(map.weights);
            lc.c = std::move(c);
            lc.h_mid = std::move(h_mid);
            lc.u = std::move(u);
            lc.g = std::move(g);
        }
        h = std::move(h_next);
    }

    Matrix y = matmul(h, params.w_head);
    add_bias_rows(y, params.b_head);
    if (cache) cache->h_out = std::move(h);
    return untokenize(y, cfg.patch, x_t.rows(), x_t.cols());
}

// dS from dA through a row-softmax: ds = a * (da - <da, a>).
void softmax_backward_rows(const Matrix& a, Matrix& da) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        double* drow = da.row_ptr(i);
        double inner = dot(drow, arow, a.cols());
        for (std::size_t j = 0; j < a.cols(); ++j) drow[j] = arow[j] * (drow[j] - inner);
    }
}

void accumulate_backward(const DenoiserParams& params, const ForwardCache& cache,
                         const Matrix& d_eps_hat, ScalePolicy::Kind kind,
                         DenoiserParams& grad) {
    const DenoiserConfig& cfg = params.cfg;
    std::size_t n = cache.tokens.rows();
    Matrix dy = tokenize(d_eps_hat, cfg.patch);

    add_into(grad.w_head, matmul_at(cache.h_out, dy));
    std::vector<double> dbh = colsum(dy);
    for (std::size_t j = 0; j < dbh.size(); ++j) grad.b_head[j] += dbh[j];

    Matrix dh = matmul_bt(dy, params.w_head);

    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const LayerParams& lp = params.layers[l];
        const LayerCache& lc = cache.layers[l];
        LayerParams& gl = grad.layers[l];
        double lambda = site_lambda(params, l, n, kind);

        // MLP block (residual): dh covers both branches.
        Matrix dg = matmul_bt(dh, lp.w2);
        add_into(gl.w2, matmul_at(lc.g, dh));
        std::vector<double> db2 = colsum(dh);
        for (std::size_t j = 0; j < db2.size(); ++j) gl.b2[j] += db2[j];
        for (std::size_t i = 0; i < dg.size(); ++i) {
            double gv = lc.g.data()[i];
            dg.data()[i] *= 1.0 - gv * gv; // du
        }
        add_into(gl.w1, matmul_at(lc.h_mid, dg));
        std::vector<double> db1 = colsum(dg);
        for (std::size_t j = 0; j < db1.size(); ++j) gl.b1[j] += db1[j];
        Matrix dh_mid = matmul_bt(dg, lp.w1);
        add_into(dh_mid, dh);

        // attention block (residual)
        Matrix dc = matmul_bt(dh_mid, lp.wo);
        add_into(gl.wo, matmul_at(lc.c, dh_mid));
        Matrix da = matmul_bt(dc, lc.v);
        Matrix dv = matmul_at(lc.a, dc);
        softmax_backward_rows(lc.a, da); // now holds dS
        Matrix dq = matmul(da, lc.k);
        Matrix dk = matmul_at(da, lc.q);
        for (std::size_t i = 0; i < dq.size(); ++i) dq.data()[i] *= lambda;
        for (std::size_t i = 0; i < dk.size(); ++i) dk.data()[i] *= lambda;

        add_into(gl.wq, matmul_at(lc.h_in, dq));
        add_into(gl.wk, matmul_at(lc.h_in, dk));
        add_into(gl.wv, matmul_at(lc.h_in, dv));

        Matrix dh_in = matmul_bt(dq, lp.wq);
        add_into(dh_in, matmul_bt(dk, lp.wk));
        add_into(dh_in, matmul_bt(dv, lp.wv));
        add_into(dh_in, dh_mid);
        dh = std::move(dh_in);
    }

    add_into(grad.w_embed, matmul_at(cache.tokens, dh));
    std::vector<double> dtrow = colsum(dh);
    for (std::size_t j = 0; j < cfg.d_model; ++j) {
        grad.b_embed[j] += dtrow[j];
        grad.b_time[j] += dtrow[j];
    }
    for (std::size_t i = 0; i < cfg.d_sin; ++i)
        for (std::size_t j = 0; j < cfg.d_model; ++j)
            grad.w_time(i, j) += cache.tf[i] * dtrow[j];
}

} // namespace

DiffusionSchedule make_schedule(std::size_t steps, double beta_start, double beta_end) {
    if (steps < 2) throw Error(ErrorCode::InvalidRange, "schedule needs at least two steps");
    if (!(beta_start > 0.0) || !(beta_end >= beta_start) || !(beta_end < 1.0))
        throw Error(ErrorCode::InvalidRange, "betas must satisfy 0 < start <= end < 1");
    DiffusionSchedule s;
    s.steps = steps;
    s.betas.resize(steps);
    s.alphas.resize(steps);
    s.alpha_bars.resize(steps);
    double abar = 1.0;
    for (std::size_t i = 0; i < steps; ++i) {
        s.betas[i] = beta_start + (beta_end - beta_start) * double(i) / double(steps - 1);
        s.alphas[i] = 1.0 - s.betas[i];
        abar *= s.alphas[i];
        s.alpha_bars[i] = abar;
    }
    return s;
}

Matrix forward_noise(const Matrix& x0, std::size_t t, const Matrix& eps,
                     const DiffusionSchedule& sched) {
    if (!x0.same_shape(eps))
        throw Error(ErrorCode::ShapeMismatch, "noise shape disagrees with image shape");
    if (t >= sched.steps) throw Error(ErrorCode::StepOutOfRange, "timestep beyond schedule");
    double a = std::sqrt(sched.alpha_bars[t]);
    double b = std::sqrt(1.0 - sched.alpha_bars[t]);
    Matrix out(x0.rows(), x0.cols());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = a * x0.data()[i] + b * eps.data()[i];
    return out;
}

DenoiserParams DenoiserParams::zeros(const DenoiserConfig& cfg) {
    DenoiserParams p;
    p.cfg = cfg;
    std::size_t pd = cfg.patch_dim();
    p.w_embed = Matrix(pd, cfg.d_model);
    p.b_embed.assign(cfg.d_model, 0.0);
    p.w_time = Matrix(cfg.d_sin, cfg.d_model);
    p.b_time.assign(cfg.d_model, 0.0);
    p.layers.resize(cfg.n_layers);
    for (LayerParams& lp : p.layers) {
        lp.wq = Matrix(cfg.d_model, cfg.d_key);
        lp.wk = Matrix(cfg.d_model, cfg.d_key);
        lp.wv = Matrix(cfg.d_model, cfg.d_key);
        lp.wo = Matrix(cfg.d_key, cfg.d_model);
        lp.w1 = Matrix(cfg.d_model, cfg.d_ff);
        lp.b1.assign(cfg.d_ff, 0.0);
        lp.w2 = Matrix(cfg.d_ff, cfg.d_model);
        lp.b2.assign(cfg.d_model, 0.0);
    }
    p.w_head = Matrix(cfg.d_model, pd);
    p.b_head.assign(pd, 0.0);
    p.site_train_tokens.assign(cfg.n_layers, 0);
    return p;
}

DenoiserParams DenoiserParams::random_init(const DenoiserConfig& cfg, RngStream& rng) {
    DenoiserParams p = zeros(cfg);
    std::size_t pd = cfg.patch_dim();
    p.w_embed = gaussian_matrix(pd, cfg.d_model, 1.0 / std::sqrt(double(pd)), rng);
    p.w_time = gaussian_matrix(cfg.d_sin, cfg.d_model, 1.0 / std::sqrt(double(cfg.d_sin)), rng);
    for (LayerParams& lp : p.layers) {
        double sm = 1.0 / std::sqrt(double(cfg.d_model));
        lp.wq = gaussian_matrix(cfg.d_model, cfg.d_key, sm, rng);
        lp.wk = gaussian_matrix(cfg.d_model, cfg.d_key, sm, rng);
        lp.wv = gaussian_matrix(cfg.d_model, cfg.d_key, sm, rng);
        lp.wo = gaussian_matrix(cfg.d_key, cfg.d_model, 1.0 / std::sqrt(double(cfg.d_key)), rng);
        lp.w1 = gaussian_matrix(cfg.d_model, cfg.d_ff, sm, rng);
        lp.w2 = gaussian_matrix(cfg.d_ff, cfg.d_model, 1.0 / std::sqrt(double(cfg.d_ff)), rng);
    }
    p.w_head = gaussian_matrix(cfg.d_model, pd, 1.0 / std::sqrt(double(cfg.d_model)), rng);
    return p;
}

void DenoiserParams::for_each_span(const std::function<void(double*, std::size_t)>& fn) {
    fn(w_embed.data(), w_embed.size());
    fn(b_embed.data(), b_embed.size());
    fn(w_time.data(), w_time.size());
    fn(b_time.data(), b_time.size());
    for (LayerParams& lp : layers) {
        fn(lp.wq.data(), lp.wq.size());
        fn(lp.wk.data(), lp.wk.size());
        fn(lp.wv.data(), lp.wv.size());
        fn(lp.wo.data(), lp.wo.size());
        fn(lp.w1.data(), lp.w1.size());
        fn(lp.b1.data(), lp.b1.size());
        fn(lp.w2.data(), lp.w2.size());
        fn(lp.b2.data(), lp.b2.size());
    }
    fn(w_head.data(), w_head.size());
    fn(b_head.data(), b_head.size());
}

void DenoiserParams::for_each_span(
    const std::function<void(const double*, std::size_t)>& fn) const {
    const_cast<DenoiserParams*>(this)->for_each_span(
        [&](double* p, std::size_t n) { fn(p, n); });
}

std::size_t DenoiserParams::param_count() const {
    std::size_t total = 0;
    for_each_span([&](const double*, std::size_t n) { total += n; });
    return total;
}

std::vector<double> DenoiserParams::to_flat() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for_each_span([&](const double* p, std::size_t n) { flat.insert(flat.end(), p, p + n); });
    return flat;
}

void DenoiserParams::from_flat(const std::vector<double>& flat) {
    if (flat.size() != param_count())
        throw Error(ErrorCode::ShapeMismatch, "flat parameter length disagrees with architecture");
    std::size_t off = 0;
    for_each_span([&](double* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) p[i] = flat[off + i];
        off += n;
    });
}

Matrix denoise_predict(const DenoiserParams& params, const Matrix& x_t, std::size_t t,
                       ScalePolicy::Kind policy, EntropyTrace* trace) {
    return forward_cached(params, x_t, t, policy, trace, nullptr);
}

LossGrad loss_and_grad_batch(const DenoiserParams& params, const std::vector<Matrix>& x0s,
                             const std::vector<std::size_t>& ts, const std::vector<Matrix>& epss,
                             const DiffusionSchedule& sched, ScalePolicy::Kind policy) {
    if (x0s.empty()) throw Error(ErrorCode::InvalidRange, "empty batch");
    if (ts.size() != x0s.size() || epss.size() != x0s.size())
        throw Error(ErrorCode::LengthMismatch, "batch component counts disagree");

    LossGrad out;
    out.grad = DenoiserParams::zeros(params.cfg);
    double loss = 0.0;
    std::size_t batch = x0s.size();
    for (std::size_t b = 0; b < batch; ++b) {
        const Matrix& x0 = x0s[b];
        const Matrix& eps = epss[b];
        Matrix x_t = forward_noise(x0, ts[b], eps, sched);
        ForwardCache cache;
        Matrix eps_hat;
        try {
            eps_hat = forward_cached(params, x_t, ts[b], policy, nullptr, &cache);
        } catch (const Error& e) {
            // Diverged weights surface as non-finite activations mid-network;
            // at the loss level that IS a non-finite loss.
            if (e.code() == ErrorCode::NonFiniteInput)
                throw Error(ErrorCode::NonFiniteLoss, "loss diverged (non-finite activations)");
            throw;
        }

        std::size_t pixels = x0.size();
        double inv = 1.0 / double(batch * pixels);
        Matrix d_eps_hat(x0.rows(), x0.cols());
        for (std::size_t i = 0; i < pixels; ++i) {
            double r = eps_hat.data()[i] - eps.data()[i];
            loss += r * r * inv;
            d_eps_hat.data()[i] = 2.0 * r * inv;
        }
        accumulate_backward(params, cache, d_eps_hat, policy, out.grad);
    }
    if (!std::isfinite(loss)) throw Error(ErrorCode::NonFiniteLoss, "loss diverged");
    out.loss = loss;
    return out;
}

LossGrad loss_and_grad(const DenoiserParams& params, const std::vector<Matrix>& x0s,
                       RngStream& rng, const DiffusionSchedule& sched,
                       ScalePolicy::Kind policy) {
    if (x0s.empty()) throw Error(ErrorCode::InvalidRange, "empty batch");
    std::vector<std::size_t> ts(x0s.size());
    std::vector<Matrix> epss(x0s.size());
    for (std::size_t b = 0; b < x0s.size(); ++b) {
        std::size_t t = std::size_t(rng.next_uniform() * double(sched.steps));
        ts[b] = t >= sched.steps ? sched.steps - 1 : t;
        Matrix eps(x0s[b].rows(), x0s[b].cols());
        for (std::size_t i = 0; i < eps.size(); ++i) eps.data()[i] = rng.next_gaussian();
        epss[b] = std::move(eps);
    }
    return loss_and_grad_batch(params, x0s, ts, epss, sched, policy);
}

Matrix two_blob_image(std::size_t size, RngStream& rng) {
    double lo = 1.5, hi = double(size) - 1.5;
    Matrix img(size, size);
    for (int blob = 0; blob < 2; ++blob) {
        double amp = 0.6 + 0.4 * rng.next_uniform();
        double sigma = 0.8 + 0.6 * rng.next_uniform();
        double cx = lo + (hi - lo) * rng.next_uniform();
        double cy = lo + (hi - lo) * rng.next_uniform();
        double inv2s2 = 1.0 / (2.0 * sigma * sigma);
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x) {
                double dx = double(x) - cx, dy = double(y) - cy;
                img(y, x) += amp * std::exp(-(dx * dx + dy * dy) * inv2s2);
            }
    }
    for (std::size_t i = 0; i < img.size(); ++i) {
        double v = img.data()[i];
        img.data()[i] = 2.0 * (v > 1.0 ? 1.0 : v) - 1.0;
    }
    return img;
}

TrainState train(const TrainConfig& config, const DataGenerator& datagen, const RngStream& rng) {
    if (config.train_steps > 0 && config.batch < 1)
        throw Error(ErrorCode::InvalidRange, "batch must be >= 1");
    if (config.image_size % config.net.patch != 0)
        throw Error(ErrorCode::IncompatibleResolution,
                    "training image size is not a multiple of the patch size");

    TrainState state;
    state.sched = make_schedule(config.diff_steps, config.beta_start, config.beta_end);
    RngStream init_stream = rng.split(0);
    state.params = DenoiserParams::random_init(config.net, init_stream);

    std::size_t grid = config.image_size / config.net.patch;
    state.train_token_count = grid * grid;
    state.params.site_train_tokens.assign(config.net.n_layers, state.train_token_count);

    state.velocity.assign(state.params.param_count(), 0.0);
    state.loss_history.reserve(config.train_steps);

    for (std::size_t s = 0; s < config.train_steps; ++s) {
        RngStream step_stream = rng.split(s + 1);
        std::vector<Matrix> x0s(config.batch);
        std::vector<std::size_t> ts(config.batch);
        std::vector<Matrix> epss(config.batch);
        for (std::size_t b = 0; b < config.batch; ++b) {
            RngStream img_stream = step_stream.split(2 * b);
            x0s[b] = datagen(img_stream);
            RngStream noise_stream = step_stream.split(2 * b + 1);
            std::size_t t = std::size_t(noise_stream.next_uniform() * double(state.sched.steps));
            ts[b] = t >= state.sched.steps ? state.sched.steps - 1 : t;
            Matrix eps(x0s[b].rows(), x0s[b].cols());
            for (std::size_t i = 0; i < eps.size(); ++i) eps.data()[i] = noise_stream.next_gaussian();
            epss[b] = std::move(eps);
        }

        LossGrad lg;
        try {
            lg = loss_and_grad_batch(state.params, x0s, ts, epss, state.sched,
                                     attention::ScalePolicy::Kind::Fixed);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NonFiniteLoss) {
                state.aborted = true;
                break;
            }
            throw;
        }
        state.loss_history.push_back(lg.loss);

        std::vector<double> grad_flat = lg.grad.to_flat();
        for (std::size_t i = 0; i < grad_flat.size(); ++i)
            state.velocity[i] = config.momentum * state.velocity[i] + grad_flat[i];
        std::size_t off = 0;
        state.params.for_each_span([&](double* p, std::size_t n) {
            for (std::size_t i = 0; i < n; ++i) p[i] -= config.lr * state.velocity[off + i];
            off += n;
        });
        state.step = s + 1;
    }
    return state;
}

SampleResult sample(const TrainState& state, std::size_t height, std::size_t width,
                    ScalePolicy::Kind policy, RngStream& rng) {
    std::size_t patch = state.params.cfg.patch;
    if (height < patch || width < patch || height % patch != 0 || width % patch != 0)
        throw Error(ErrorCode::IncompatibleResolution,
                    "requested resolution is not a multiple of the patch size");

    SampleResult res;
    Matrix x(height, width);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.next_gaussian();

    const DiffusionSchedule& sched = state.sched;
    for (std::size_t step = sched.steps; step-- > 0;) {
        Matrix eps_hat = denoise_predict(state.params, x, step, policy, &res.trace);
        double coef = sched.betas[step] / std::sqrt(1.0 - sched.alpha_bars[step]);
        double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alphas[step]);
        for (std::size_t i = 0; i < x.size(); ++i)
            x.data()[i] = (x.data()[i] - coef * eps_hat.data()[i]) * inv_sqrt_alpha;
        if (step > 0) {
            double noise_scale = std::sqrt(sched.betas[step]);
            for (std::size_t i = 0; i < x.size(); ++i)
                x.data()[i] += noise_scale * rng.next_gaussian();
        }
    }
    res.image = std::move(x);
    return res;
}

} // namespace entroscale::diffusion
