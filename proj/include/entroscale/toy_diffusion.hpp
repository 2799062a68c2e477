#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "entroscale/attention.hpp"
#include "entroscale/matrix.hpp"
#include "entroscale/rng.hpp"

namespace entroscale::diffusion {

struct DiffusionSchedule {
    std::size_t steps = 0;
    std::vector<double> betas;
    std::vector<double> alphas;     // 1 - beta
    std::vector<double> alpha_bars; // running products
};

// Linear beta schedule; 0 < beta_start <= beta_end < 1, steps >= 2.
DiffusionSchedule make_schedule(std::size_t steps, double beta_start, double beta_end);

// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
Matrix forward_noise(const Matrix& x0, std::size_t t, const Matrix& eps,
                     const DiffusionSchedule& sched);

struct DenoiserConfig {
    std::size_t patch = 2;
    std::size_t d_model = 32;
    std::size_t d_key = 16;
    std::size_t d_ff = 64;
    std::size_t n_layers = 2;
    std::size_t d_sin = 16; // sinusoidal time-feature width, even

    std::size_t patch_dim() const { return patch * patch; }
};

struct LayerParams {
    Matrix wq, wk, wv; // d_model x d_key
    Matrix wo;         // d_key x d_model
    Matrix w1;         // d_model x d_ff
    std::vector<double> b1;
    Matrix w2; // d_ff x d_model
    std::vector<double> b2;
};

// Patch-token transformer denoiser: embed + sinusoidal time embedding, then
// n_layers of (self-attention, tanh MLP), both residual, then a linear head
// back to patch pixels. No normalization layers at this scale.
struct DenoiserParams {
    DenoiserConfig cfg;
    Matrix w_embed; // patch_dim x d_model
    std::vector<double> b_embed;
    Matrix w_time; // d_sin x d_model
    std::vector<double> b_time;
    std::vector<LayerParams> layers;
    Matrix w_head; // d_model x patch_dim
    std::vector<double> b_head;
    // Token count each attention site saw during training; 0 until trained.
    std::vector<std::size_t> site_train_tokens;

    static DenoiserParams zeros(const DenoiserConfig& cfg);
    // Gaussian entries, std 1/sqrt(fan_in), biases zero; draw order is the
    // flatten order below.
    static DenoiserParams random_init(const DenoiserConfig& cfg, RngStream& rng);

    std::size_t param_count() const;
    // Flatten order: w_embed, b_embed, w_time, b_time, per layer
    // [wq, wk, wv, wo, w1, b1, w2, b2], w_head, b_head; matrices row-major.
    std::vector<double> to_flat() const;
    void from_flat(const std::vector<double>& flat);

    // Visits every parameter tensor as a (pointer, length) span, in flatten
    // order. Shared by the optimizer, flattening and the checkpoint writer.
    void for_each_span(const std::function<void(double*, std::size_t)>& fn);
    void for_each_span(const std::function<void(const double*, std::size_t)>& fn) const;
};

struct EntropyRecord {
    std::size_t timestep = 0;
    std::size_t layer_id = 0;
    std::size_t n_tokens = 0;
    attention::ScalePolicy::Kind policy = attention::ScalePolicy::Kind::Fixed;
    double mean_entropy = 0.0;
};

using EntropyTrace = std::vector<EntropyRecord>;

// Full denoiser forward pass. Each attention site gets its own lambda:
// Fixed uses 1/sqrt(d_key); the entropy-preserving variant reads the site's
// recorded training token count. Appends one record per site to trace.
Matrix denoise_predict(const DenoiserParams& params, const Matrix& x_t, std::size_t t,
                       attention::ScalePolicy::Kind policy, EntropyTrace* trace = nullptr);

struct LossGrad {
    double loss = 0.0;
    DenoiserParams grad; // same shapes as params
};

// Deterministic core: timesteps and noises are explicit inputs, so finite
// differences and oracle-injection tests can pin them.
LossGrad loss_and_grad_batch(const DenoiserParams& params, const std::vector<Matrix>& x0s,
                             const std::vector<std::size_t>& ts, const std::vector<Matrix>& epss,
                             const DiffusionSchedule& sched,
                             attention::ScalePolicy::Kind policy);

// Draws one timestep and one noise image per example from rng (batch order),
// then defers to the deterministic core.
LossGrad loss_and_grad(const DenoiserParams& params, const std::vector<Matrix>& x0s,
                       RngStream& rng, const DiffusionSchedule& sched,
                       attention::ScalePolicy::Kind policy);

struct TrainConfig {
    std::size_t image_size = 8;
    std::size_t train_steps = 500;
    std::size_t batch = 16;
    double lr = 0.01;
    double momentum = 0.9;
    std::size_t diff_steps = 200;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    DenoiserConfig net;
};

struct TrainState {
    DenoiserParams params;
    DiffusionSchedule sched;
    std::size_t step = 0;
    std::size_t train_token_count = 0; // T, fixed at training start
    std::vector<double> velocity;      // momentum buffer, flatten order
    std::vector<double> loss_history;
    bool aborted = false; // a non-finite loss stops the loop, state kept
};

using DataGenerator = std::function<Matrix(RngStream&)>;

// Momentum SGD over the epsilon-prediction MSE. Step s draws its batch from
// rng.split(s + 1); rng.split(0) initializes the weights.
TrainState train(const TrainConfig& config, const DataGenerator& datagen, const RngStream& rng);

// Sum of two Gaussian blobs with random position/amplitude/width, mapped to
// [-1, 1]. The standing synthetic dataset.
Matrix two_blob_image(std::size_t size, RngStream& rng);

struct SampleResult {
    Matrix image;
    EntropyTrace trace; // one record per (timestep, attention site)
};

// Ancestral sampling from pure noise. The draw order never depends on the
// policy, so coinciding lambdas give bitwise-identical trajectories.
SampleResult sample(const TrainState& state, std::size_t height, std::size_t width,
                    attention::ScalePolicy::Kind policy, RngStream& rng);

} // namespace entroscale::diffusion
