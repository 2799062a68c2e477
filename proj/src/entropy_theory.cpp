#include "entroscale/entropy_theory.hpp"

#include <cmath>
#include <limits>

#include "entroscale/error.hpp"
#include "entroscale/gaussian.hpp"
#include "entroscale/parallel.hpp"
#include "entroscale/quadrature.hpp"

namespace entroscale::theory {

KeyDistribution key_distribution(const GaussianTokenModel& model) {
    std::size_t d = model.mu_x.size();
    if (model.sigma_x.rows() != d || model.sigma_x.cols() != d)
        throw Error(ErrorCode::ShapeMismatch, "sigma_x shape disagrees with mu_x length");
    if (model.w_k.rows() != d)
        throw Error(ErrorCode::ShapeMismatch, "w_k row count disagrees with token dimension");
    cholesky(model.sigma_x); // PSD validation
    KeyDistribution kd;
    kd.mu_k = matvec_t(model.w_k, model.mu_x);
    kd.sigma_k = matmul_at(model.w_k, matmul(model.sigma_x, model.w_k));
    return kd;
}

RowMoments row_moments(std::span<const double> q_i, double lambda, const KeyDistribution& kd) {
    std::size_t d_r = kd.mu_k.size();
    if (q_i.size() != d_r)
        throw Error(ErrorCode::ShapeMismatch, "query length disagrees with key dimension");
    RowMoments m;
    m.mu = lambda * dot(q_i.data(), kd.mu_k.data(), d_r);
    double quad = 0.0;
    for (std::size_t i = 0; i < d_r; ++i)
        quad += q_i[i] * dot(kd.sigma_k.row_ptr(i), q_i.data(), d_r);
    m.sigma2 = lambda * lambda * quad;
    if (m.sigma2 < 0.0) {
        if (m.sigma2 < -1e-12)
            throw Error(ErrorCode::InvalidRange, "score variance came out negative");
        m.sigma2 = 0.0;
    }
    return m;
}

ExpMoments gaussian_exp_moments(const RowMoments& m) {
    if (m.sigma2 < 0.0) throw Error(ErrorCode::InvalidRange, "negative variance");
    double expo = m.mu + 0.5 * m.sigma2;
    if (expo > 700.0)
        throw Error(ErrorCode::Overflow, "exp moment exponent beyond 700");
    ExpMoments out;
    out.e_exp = std::exp(expo);
    out.e_yexp = (m.mu + m.sigma2) * out.e_exp;
    return out;
}

ExpMoments gaussian_exp_moments_quadrature(const RowMoments& m) {
    if (m.sigma2 < 0.0) throw Error(ErrorCode::InvalidRange, "negative variance");
    ExpMoments out;
    if (m.sigma2 == 0.0) {
        // point mass at mu
        out.e_exp = std::exp(m.mu);
        out.e_yexp = m.mu * out.e_exp;
        return out;
    }
    double mu = m.mu;
    double sigma = std::sqrt(m.sigma2);
    // Substitute y = mu + sigma z and pull e^mu out front; the z-integrals
    // stay O(1) over the grid this oracle referees, so an absolute panel
    // tolerance behaves like a relative one.
    constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
    auto phi = [](double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); };
    double tol = 1e-10;
    double i_exp = integrate([&](double z) { return std::exp(sigma * z) * phi(z); },
                             -12.0, 12.0, tol);
    double i_yexp = integrate([&](double z) { return (mu + sigma * z) * std::exp(sigma * z) * phi(z); },
                              -12.0, 12.0, tol);
    double scale = std::exp(mu);
    out.e_exp = scale * i_exp;
    out.e_yexp = scale * i_yexp;
    return out;
}

DecompositionTerms empirical_decomposition(std::span<const double> q_i, const Matrix& keys,
                                           double lambda) {
    std::size_t n = keys.rows();
    if (n < 1) throw Error(ErrorCode::ShapeMismatch, "need at least one key");
    if (q_i.size() != keys.cols())
        throw Error(ErrorCode::ShapeMismatch, "query length disagrees with key width");

    std::vector<double> y(n);
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        y[j] = lambda * dot(q_i.data(), keys.row_ptr(j), keys.cols());
        if (y[j] > shift) shift = y[j];
    }
    // mean e^{y} = e^{shift} mean e^{y-shift}; the shift re-enters log_mean_exp
    // additively and cancels from the tilted ratio, so both terms stay finite.
    double mean_exp = 0.0, mean_yexp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double e = std::exp(y[j] - shift);
        mean_exp += e;
        mean_yexp += y[j] * e;
    }
    mean_exp /= double(n);
    mean_yexp /= double(n);

    DecompositionTerms t;
    t.log_n = std::log(double(n));
    t.log_mean_exp = shift + std::log(mean_exp);
    t.tilted_mean_ratio = mean_yexp / mean_exp;

    Matrix qm(1, q_i.size());
    for (std::size_t j = 0; j < q_i.size(); ++j) qm(0, j) = q_i[j];
    auto map = attention::attention_map(qm, keys, lambda);
    t.exact_entropy = attention::entropy_of_row(map.weights.row_ptr(0), n);
    return t;
}

double predicted_entropy(std::size_t n_tokens, const RowMoments& m) {
    if (n_tokens < 1) throw Error(ErrorCode::InvalidRange, "need at least one token");
    return std::log(double(n_tokens)) - 0.5 * m.sigma2;
}

double approx_entropy_from_moments(std::size_t n_tokens, const RowMoments& m) {
    if (n_tokens < 1) throw Error(ErrorCode::InvalidRange, "need at least one token");
    ExpMoments em = gaussian_exp_moments(m);
    return std::log(double(n_tokens)) + std::log(em.e_exp) - em.e_yexp / em.e_exp;
}

MonteCarloResult monte_carlo_entropy(const GaussianTokenModel& model, const Matrix& q,
                                     std::size_t n_tokens, double lambda, std::size_t trials,
                                     const RngStream& rng) {
    if (trials < 2) throw Error(ErrorCode::InvalidRange, "need at least two trials");
    if (n_tokens < 1) throw Error(ErrorCode::InvalidRange, "need at least one token");

    KeyDistribution kd = key_distribution(model);
    MultivariateGaussian key_dist(kd.mu_k, kd.sigma_k);
    if (q.cols() != kd.mu_k.size())
        throw Error(ErrorCode::ShapeMismatch, "query width disagrees with key dimension");

    std::vector<double> trial_means(trials);
    parallel_for(trials, resolve_thread_count(), [&](std::size_t t) {
        RngStream stream = rng.split(t);
        Matrix keys = sample_gaussian(key_dist, n_tokens, stream);
        auto map = attention::attention_map(q, keys, lambda);
        trial_means[t] = attention::row_entropy(map).mean;
    });

    double mean = 0.0;
    for (double v : trial_means) mean += v;
    mean /= double(trials);
    double var = 0.0;
    for (double v : trial_means) {
        double d = v - mean;
        var += d * d;
    }
    var /= double(trials - 1);
    MonteCarloResult res;
    res.mean = mean;
    res.stderr_ = std::sqrt(var / double(trials));
    return res;
}

ScanResult entropy_logN_scan(const GaussianTokenModel& model, const Matrix& q,
                             const attention::ScalePolicy& policy, std::size_t d_key,
                             std::span<const std::size_t> sizes, std::size_t trials,
                             const RngStream& rng) {
    if (sizes.empty()) throw Error(ErrorCode::InvalidRange, "no scan sizes");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 4) throw Error(ErrorCode::InvalidRange, "scan sizes must be >= 4");
        if (i > 0 && sizes[i] <= sizes[i - 1])
            throw Error(ErrorCode::InvalidRange, "scan sizes must be strictly ascending");
    }

    ScanResult result;
    result.rows.reserve(sizes.size());
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        std::size_t n = sizes[i];
        double lambda = attention::scale_factor(policy, n, d_key);
        MonteCarloResult mc = monte_carlo_entropy(model, q, n, lambda, trials, rng.split(i));
        ScanRow row;
        row.n = n;
        row.log_n = std::log(double(n));
        row.lambda = lambda;
        row.mean_entropy = mc.mean;
        row.stderr_ = mc.stderr_;
        result.rows.push_back(row);
        xs.push_back(row.log_n);
        ys.push_back(row.mean_entropy);
    }
    result.fit = linear_fit(xs, ys);
    return result;
}

} // namespace entroscale::theory
