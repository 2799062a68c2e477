#pragma once

#include <vector>

#include "entroscale/matrix.hpp"
#include "entroscale/rng.hpp"

namespace entroscale {

// Lower-triangular factor L with L L^T = cov. The input must be square and
// symmetric (tolerance 1e-12 * max|entry|). PSD inputs are accepted: a tiny
// diagonal jitter (1e-10 * trace/m, one retry at 1e-8 * trace/m) absorbs
// roundoff, and an exactly-zero pivot whose column is otherwise consistent is
// clamped to a zero row. Pivots that stay below -1e-8 * max(1, trace/m) after
// the retry raise IndefiniteAfterJitter.
Matrix cholesky(const Matrix& cov);

class MultivariateGaussian {
public:
    MultivariateGaussian(std::vector<double> mean, Matrix cov);

    const std::vector<double>& mean() const noexcept { return mean_; }
    const Matrix& cov() const noexcept { return cov_; }
    const Matrix& chol() const noexcept { return chol_; }
    std::size_t dim() const noexcept { return mean_.size(); }

private:
    std::vector<double> mean_;
    Matrix cov_;
    Matrix chol_; // factored once at construction
};

// n i.i.d. rows, each mean + L z with z standard normal. Draw order is
// row-major in z so results are reproducible for a given stream.
Matrix sample_gaussian(const MultivariateGaussian& dist, std::size_t n, RngStream& rng);

} // namespace entroscale
