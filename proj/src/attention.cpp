#include "entroscale/attention.hpp"

#include <cmath>

#include "entroscale/error.hpp"

namespace entroscale::attention {

ScalePolicy ScalePolicy::entropy_preserving(std::size_t train_tokens) {
    if (train_tokens < 2)
        throw Error(ErrorCode::InvalidTrainTokens, "entropy-preserving policy needs T >= 2");
    return {Kind::EntropyPreserving, train_tokens};
}

double scale_factor(const ScalePolicy& policy, std::size_t n_tokens, std::size_t d_key,
                    bool* degenerate_fallback) {
    if (d_key < 1) throw Error(ErrorCode::InvalidRange, "d_key must be >= 1");
    if (degenerate_fallback) *degenerate_fallback = false;
    if (policy.kind == ScalePolicy::Kind::EntropyPreserving) {
        if (policy.train_tokens < 2)
            throw Error(ErrorCode::InvalidTrainTokens, "entropy-preserving policy needs T >= 2");
        if (n_tokens < 2) {
            // ln N would be 0 and wipe out the scores; use the fixed factor
            // and let the caller surface the fallback.
            if (degenerate_fallback) *degenerate_fallback = true;
            return std::sqrt(1.0 / double(d_key));
        }
        double ratio = std::log(double(n_tokens)) / std::log(double(policy.train_tokens));
        return std::sqrt(ratio / double(d_key));
    }
    return std::sqrt(1.0 / double(d_key));
}

AttentionMap attention_map(const Matrix& q, const Matrix& k, double lambda) {
    if (q.cols() != k.cols())
        throw Error(ErrorCode::ShapeMismatch, "query and key widths disagree");
    if (k.rows() == 0) throw Error(ErrorCode::ShapeMismatch, "no keys");
    if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidRange, "lambda must be >= 0");
    if (!q.all_finite() || !k.all_finite())
        throw Error(ErrorCode::NonFiniteInput, "non-finite attention input");

    AttentionMap map;
    map.lambda_used = lambda;
    map.n_tokens = k.rows();
    map.weights = matmul_bt(q, k);

    std::size_t n = k.rows();
    for (std::size_t i = 0; i < q.rows(); ++i) {
        double* row = map.weights.row_ptr(i);
        double mx = lambda * row[0];
        for (std::size_t j = 0; j < n; ++j) {
            row[j] *= lambda;
            if (row[j] > mx) mx = row[j];
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
    }
    return map;
}

AttendResult attend(const Matrix& q, const Matrix& k, const Matrix& v, double lambda) {
    if (q.rows() != k.rows() || k.rows() != v.rows())
        throw Error(ErrorCode::ShapeMismatch, "attend expects equal token counts in Q, K, V");
    if (!v.all_finite()) throw Error(ErrorCode::NonFiniteInput, "non-finite values input");
    AttendResult res;
    res.map = attention_map(q, k, lambda);
    res.output = matmul(res.map.weights, v);
    return res;
}

double entropy_of_row(const double* p, std::size_t n) {
    double h = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double a = p[j];
        if (a > 0.0) h -= a * std::log(a);
    }
    return h;
}

EntropyProfile row_entropy(const AttentionMap& map) {
    EntropyProfile prof;
    std::size_t rows = map.weights.rows();
    prof.per_row.resize(rows);
    double sum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double h = entropy_of_row(map.weights.row_ptr(i), map.weights.cols());
        prof.per_row[i] = h;
        sum += h;
        if (i == 0) {
            prof.min = prof.max = h;
        } else {
            if (h < prof.min) prof.min = h;
            if (h > prof.max) prof.max = h;
        }
    }
    prof.mean = rows ? sum / double(rows) : 0.0;
    return prof;
}

std::vector<double> entropy_vs_lambda(const Matrix& q, const Matrix& k,
                                      std::span<const double> lambdas) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] >= 0.0))
            throw Error(ErrorCode::InvalidRange, "lambdas must be >= 0");
        if (i > 0 && lambdas[i] < lambdas[i - 1])
            throw Error(ErrorCode::InvalidRange, "lambdas must be ascending");
    }
    std::vector<double> means;
    means.reserve(lambdas.size());
    for (double lam : lambdas)
        means.push_back(row_entropy(attention_map(q, k, lam)).mean);
    return means;
}

} // namespace entroscale::attention
