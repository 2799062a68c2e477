#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "entroscale/attention.hpp"
#include "entroscale/fitting.hpp"
#include "entroscale/matrix.hpp"
#include "entroscale/rng.hpp"

namespace entroscale::theory {

// Tokens x ~ N(mu_x, sigma_x) projected to keys by w_k.
struct GaussianTokenModel {
    std::vector<double> mu_x; // length d
    Matrix sigma_x;           // d x d PSD
    Matrix w_k;               // d x d_r
};

struct KeyDistribution {
    std::vector<double> mu_k; // length d_r
    Matrix sigma_k;           // d_r x d_r
};

// mu_k = mu_x W, sigma_k = W^T sigma_x W.
KeyDistribution key_distribution(const GaussianTokenModel& model);

// Moments of the scalar score y = lambda * q_i . k for k ~ KeyDistribution.
struct RowMoments {
    double mu = 0.0;
    double sigma2 = 0.0; // clamped to >= 0
};

RowMoments row_moments(std::span<const double> q_i, double lambda, const KeyDistribution& kd);

struct ExpMoments {
    double e_exp = 0.0;  // E[e^y]
    double e_yexp = 0.0; // E[y e^y]
};

// Closed form: E[e^y] = exp(mu + sigma2/2), E[y e^y] = (mu + sigma2) E[e^y].
// Throws Overflow once the exponent passes 700 instead of producing Inf.
ExpMoments gaussian_exp_moments(const RowMoments& m);

// Same two integrals by adaptive quadrature over mu +/- 12 sigma (tolerance
// 1e-10). Deliberately never touches the closed form so it can referee it.
ExpMoments gaussian_exp_moments_quadrature(const RowMoments& m);

// H(row) = ln N + ln(mean_j e^{y_j}) - (mean_j y_j e^{y_j}) / (mean_j e^{y_j});
// with empirical means this is an identity, not an approximation. All three
// exp-bearing terms are evaluated with the scores shifted by their max: the
// shift adds to ln(mean e^{y-s}) exactly what it subtracts from the tilted
// ratio, so the combination is unchanged and nothing overflows.
struct DecompositionTerms {
    double log_n = 0.0;
    double log_mean_exp = 0.0;
    double tilted_mean_ratio = 0.0;
    double exact_entropy = 0.0; // via the attention path, as the oracle
};

DecompositionTerms empirical_decomposition(std::span<const double> q_i, const Matrix& keys,
                                           double lambda);

// ln N - sigma2/2.
double predicted_entropy(std::size_t n_tokens, const RowMoments& m);

// The decomposition with population moments substituted for the empirical
// means: ln N + ln E[e^y] - E[y e^y]/E[e^y], evaluated through
// gaussian_exp_moments. Algebraically this collapses to ln N - sigma2/2; it
// exists as the explicit composition so the collapse is testable.
double approx_entropy_from_moments(std::size_t n_tokens, const RowMoments& m);

struct MonteCarloResult {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Per trial: resample N keys, average row entropy over q's rows. Trial t draws
// from rng.split(t), and the reduction runs in trial order, so the result does
// not depend on how trials are scheduled.
MonteCarloResult monte_carlo_entropy(const GaussianTokenModel& model, const Matrix& q,
                                     std::size_t n_tokens, double lambda, std::size_t trials,
                                     const RngStream& rng);

struct ScanRow {
    std::size_t n = 0;
    double log_n = 0.0;
    double lambda = 0.0;
    double mean_entropy = 0.0;
    double stderr_ = 0.0;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    LinearFit fit; // mean entropy against ln N
};

// One monte_carlo_entropy per size with lambda from the policy; q stays fixed
// across sizes, only keys are resampled (size index i draws from rng.split(i)).
ScanResult entropy_logN_scan(const GaussianTokenModel& model, const Matrix& q,
                             const attention::ScalePolicy& policy, std::size_t d_key,
                             std::span<const std::size_t> sizes, std::size_t trials,
                             const RngStream& rng);

} // namespace entroscale::theory
