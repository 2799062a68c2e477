#include "entroscale/gaussian.hpp"

#include <cmath>
#include <utility>

#include "entroscale/error.hpp"

namespace entroscale {
namespace {

Matrix try_factor(const Matrix& cov, double jitter, double neg_tol, bool* failed) {
    std::size_t m = cov.rows();
    Matrix l(m, m);
    *failed = false;
    for (std::size_t j = 0; j < m; ++j) {
        double d = cov(j, j) + jitter;
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 0.0) {
            if (d < -neg_tol) {
                *failed = true;
                return l;
            }
            // Numerically-zero pivot: admissible only when the rest of the
            // column is explained by previous columns already.
            l(j, j) = 0.0;
            for (std::size_t i = j + 1; i < m; ++i) {
                double s = cov(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
                if (std::fabs(s) > neg_tol) {
                    *failed = true;
                    return l;
                }
                l(i, j) = 0.0;
            }
            continue;
        }
        double root = std::sqrt(d);
        l(j, j) = root;
        for (std::size_t i = j + 1; i < m; ++i) {
            double s = cov(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / root;
        }
    }
    return l;
}

} // namespace

Matrix cholesky(const Matrix& cov) {
    if (cov.rows() != cov.cols())
        throw Error(ErrorCode::NotSquare, "cholesky needs a square matrix");
    std::size_t m = cov.rows();
    if (m == 0) return Matrix(0, 0);
    double max_abs = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) max_abs = std::max(max_abs, std::fabs(cov(i, j)));
    double sym_tol = 1e-12 * std::max(1.0, max_abs);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (std::fabs(cov(i, j) - cov(j, i)) > sym_tol)
                throw Error(ErrorCode::NotSymmetric, "cholesky input is not symmetric");

    double trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) trace += cov(i, i);
    double scale = trace / double(m);
    double neg_tol = 1e-8 * std::max(1.0, scale);

    bool failed = false;
    Matrix l = try_factor(cov, 1e-10 * scale, neg_tol, &failed);
    if (failed) l = try_factor(cov, 1e-8 * scale, neg_tol, &failed);
    if (failed)
        throw Error(ErrorCode::IndefiniteAfterJitter,
                    "matrix stayed indefinite after diagonal jitter");
    return l;
}

MultivariateGaussian::MultivariateGaussian(std::vector<double> mean, Matrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
        throw Error(ErrorCode::ShapeMismatch, "covariance shape disagrees with mean length");
    chol_ = cholesky(cov_);
}

Matrix sample_gaussian(const MultivariateGaussian& dist, std::size_t n, RngStream& rng) {
    std::size_t m = dist.dim();
    const Matrix& l = dist.chol();
    const std::vector<double>& mu = dist.mean();
    Matrix out(n, m);
    std::vector<double> z(m);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < m; ++j) z[j] = rng.next_gaussian();
        double* row = out.row_ptr(r);
        for (std::size_t i = 0; i < m; ++i) {
            double s = mu[i];
            const double* lrow = l.row_ptr(i);
            for (std::size_t k = 0; k <= i; ++k) s += lrow[k] * z[k];
            row[i] = s;
        }
    }
    return out;
}

} // namespace entroscale
