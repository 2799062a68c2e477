#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "entroscale/matrix.hpp"

namespace entroscale::attention {

struct ScalePolicy {
    enum class Kind { Fixed, EntropyPreserving };

    Kind kind = Kind::Fixed;
    std::size_t train_tokens = 0; // only meaningful for EntropyPreserving

    static ScalePolicy fixed() { return {Kind::Fixed, 0}; }
    // Throws InvalidTrainTokens for T < 2.
    static ScalePolicy entropy_preserving(std::size_t train_tokens);
};

// Fixed: 1/sqrt(d_key). EntropyPreserving{T}: sqrt((ln N / ln T) / d_key),
// which is the same floating-point expression as Fixed when N == T, so the
// two policies coincide bitwise there. N < 2 under EntropyPreserving falls
// back to Fixed; *degenerate_fallback (if given) reports that it happened.
double scale_factor(const ScalePolicy& policy, std::size_t n_tokens, std::size_t d_key,
                    bool* degenerate_fallback = nullptr);

struct AttentionMap {
    Matrix weights; // rows index queries, row-stochastic
    double lambda_used = 0.0;
    std::size_t n_tokens = 0; // number of keys
};

// Row-softmax(lambda * Q K^T) with per-row max subtraction. Q may have fewer
// rows than K (the theory probes use a handful of query rows against N keys).
AttentionMap attention_map(const Matrix& q, const Matrix& k, double lambda);

struct AttendResult {
    Matrix output;
    AttentionMap map;
};

// Self-attention contract: Q, K, V all carry the same N rows.
AttendResult attend(const Matrix& q, const Matrix& k, const Matrix& v, double lambda);

struct EntropyProfile {
    std::vector<double> per_row; // nats
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

EntropyProfile row_entropy(const AttentionMap& map);

// Entropy of one probability row; 0 * ln 0 := 0.
double entropy_of_row(const double* p, std::size_t n);

// Mean row entropy of softmax(lambda * Q K^T) for each lambda; lambdas must be
// ascending and non-negative. The output is monotone non-increasing.
std::vector<double> entropy_vs_lambda(const Matrix& q, const Matrix& k,
                                      std::span<const double> lambdas);

} // namespace entroscale::attention
