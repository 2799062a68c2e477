#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entroscale/error.hpp"
#include "entroscale/fitting.hpp"
#include "entroscale/gaussian.hpp"
#include "entroscale/matrix.hpp"
#include "entroscale/quadrature.hpp"
#include "entroscale/rng.hpp"

using namespace entroscale;

namespace {

bool throws_code(ErrorCode code, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

Matrix random_psd(std::size_t m, RngStream& rng) {
    Matrix a(m, m);
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = rng.next_gaussian();
    return matmul_at(a, a);
}

} // namespace

TEST_CASE("matrix construction and indexing") {
    Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 6);
    CHECK(m.all_finite());

    Matrix eye = Matrix::eye(2, 4);
    CHECK(eye(0, 0) == 1.0);
    CHECK(eye(1, 1) == 1.0);
    CHECK(eye(0, 1) == 0.0);
    CHECK(eye(1, 3) == 0.0);
}

TEST_CASE("matmul agrees with transposed variants") {
    Matrix a = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
    Matrix b = Matrix::from_rows({{7, 8, 9}, {10, 11, 12}});
    Matrix ab = matmul(a, b);
    CHECK(ab(0, 0) == doctest::Approx(27));
    CHECK(ab(2, 2) == doctest::Approx(117));

    Matrix bt = transpose(b);
    Matrix ab2 = matmul_bt(a, bt);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(ab(i, j) == ab2(i, j));

    Matrix at = transpose(a);
    Matrix ab3 = matmul_at(at, b);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(ab(i, j) == ab3(i, j));

    CHECK(throws_code(ErrorCode::ShapeMismatch, [&] { matmul(a, a); }));
}

TEST_CASE("matvec in both orientations") {
    Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    auto y = matvec(a, {1, 1});
    CHECK(y[0] == 3);
    CHECK(y[1] == 7);
    auto yt = matvec_t(a, {1, 1});
    CHECK(yt[0] == 4);
    CHECK(yt[1] == 6);
}

TEST_CASE("rng streams are deterministic and split-stable") {
    RngStream a(123, 7), b(123, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(123, 8);
    bool all_equal = true;
    RngStream a2(123, 7);
    for (int i = 0; i < 16; ++i)
        if (a2.next_u64() != c.next_u64()) all_equal = false;
    CHECK_FALSE(all_equal);

    // split is independent of how much the parent has drawn
    RngStream parent1(9, 1), parent2(9, 1);
    parent1.next_u64();
    parent1.next_u64();
    RngStream c1 = parent1.split(3);
    RngStream c2 = parent2.split(3);
    for (int i = 0; i < 16; ++i) CHECK(c1.next_u64() == c2.next_u64());

    // distinct children disagree
    RngStream d1 = parent2.split(4);
    RngStream d2 = parent2.split(5);
    bool same = true;
    for (int i = 0; i < 16; ++i)
        if (d1.next_u64() != d2.next_u64()) same = false;
    CHECK_FALSE(same);
}

TEST_CASE("uniform draws live in their half-open ranges") {
    RngStream rng(2024, 0);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.next_uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        double v = rng.next_open_uniform();
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("gaussian draws concentrate at standard-normal moments") {
    RngStream rng(5, 0);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = rng.next_gaussian();
        sum += g;
        sum2 += g * g;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.02);
    CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("cholesky identity") {
    Matrix l = cholesky(Matrix::identity(3));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(l(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
}

TEST_CASE("cholesky 2x2 worked example") {
    Matrix cov = Matrix::from_rows({{4, 2}, {2, 3}});
    Matrix l = cholesky(cov);
    CHECK(l(0, 0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    Matrix rt = matmul_bt(l, l);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(std::fabs(rt(i, j) - cov(i, j)) <= 1e-8);
}

TEST_CASE("cholesky rejects bad inputs") {
    CHECK(throws_code(ErrorCode::NotSquare, [] { cholesky(Matrix(2, 3)); }));
    CHECK(throws_code(ErrorCode::NotSymmetric,
                      [] { cholesky(Matrix::from_rows({{1, 2}, {0, 1}})); }));
    CHECK(throws_code(ErrorCode::IndefiniteAfterJitter,
                      [] { cholesky(Matrix::from_rows({{1, 2}, {2, 1}})); }));
}

TEST_CASE("cholesky handles semidefinite and zero matrices") {
    Matrix zero(3, 3);
    Matrix lz = cholesky(zero);
    for (std::size_t i = 0; i < lz.size(); ++i) CHECK(lz.data()[i] == 0.0);

    Matrix rank1 = Matrix::from_rows({{1, 1}, {1, 1}});
    Matrix l = cholesky(rank1);
    Matrix rt = matmul_bt(l, l);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(std::fabs(rt(i, j) - rank1(i, j)) <= 1e-8);
}

TEST_CASE("cholesky round-trips 1000 random PSD matrices") {
    RngStream rng(42, 0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        std::size_t m = 1 + (rng.next_u64() % 16);
        Matrix cov = random_psd(m, rng);
        Matrix l = cholesky(cov);
        Matrix rt = matmul_bt(l, l);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                worst = std::max(worst, std::fabs(rt(i, j) - cov(i, j)));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("sample_gaussian degenerate and moment behavior") {
    MultivariateGaussian degenerate({1.5, -2.0}, Matrix(2, 2));
    RngStream rng(1, 0);
    Matrix rows = sample_gaussian(degenerate, 5, rng);
    CHECK(rows.rows() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(rows(i, 0) == 1.5);
        CHECK(rows(i, 1) == -2.0);
    }

    MultivariateGaussian standard({0.0}, Matrix::identity(1));
    RngStream rng2(7, 0);
    Matrix draws = sample_gaussian(standard, 100000, rng2);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < draws.rows(); ++i) {
        sum += draws(i, 0);
        sum2 += draws(i, 0) * draws(i, 0);
    }
    double mean = sum / double(draws.rows());
    double var = sum2 / double(draws.rows()) - mean * mean;
    CHECK(std::fabs(mean) < 0.02);
    CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("sample_gaussian is bitwise deterministic") {
    MultivariateGaussian dist({0.5, -0.25}, Matrix::from_rows({{2, 0.5}, {0.5, 1}}));
    RngStream r1(99, 3), r2(99, 3);
    Matrix a = sample_gaussian(dist, 64, r1);
    Matrix b = sample_gaussian(dist, 64, r2);
    CHECK(a == b);
}

TEST_CASE("linear_fit worked examples") {
    {
        auto fit = linear_fit(std::vector<double>{0, 1, 2}, std::vector<double>{1, 3, 5});
        CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    }
    {
        auto fit = linear_fit(std::vector<double>{0, 1}, std::vector<double>{4.5, 4.5});
        CHECK(fit.slope == 0.0);
        CHECK(fit.intercept == 4.5);
        CHECK(fit.r_squared == 1.0); // SS_tot = 0 with zero residuals
    }
    {
        auto fit = linear_fit(std::vector<double>{0, 1, 2}, std::vector<double>{0, 1, 1});
        CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(fit.intercept == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    }
}

TEST_CASE("linear_fit rejects degenerate inputs") {
    CHECK(throws_code(ErrorCode::LengthMismatch, [] {
        linear_fit(std::vector<double>{0, 1}, std::vector<double>{1});
    }));
    CHECK(throws_code(ErrorCode::DegenerateX, [] {
        linear_fit(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3});
    }));
    CHECK(throws_code(ErrorCode::DegenerateX, [] {
        linear_fit(std::vector<double>{1}, std::vector<double>{1});
    }));
}

TEST_CASE("ols residuals are orthogonal to the design") {
    RngStream rng(17, 0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> xs(40), ys(40);
        for (int i = 0; i < 40; ++i) {
            xs[i] = rng.next_gaussian() * 3.0;
            ys[i] = 2.5 * xs[i] - 1.0 + rng.next_gaussian();
        }
        auto fit = linear_fit(xs, ys);
        double rsum = 0.0, rxsum = 0.0, scale = 0.0;
        for (int i = 0; i < 40; ++i) {
            double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
            rsum += r;
            rxsum += r * xs[i];
            scale += std::fabs(ys[i]);
        }
        CHECK(std::fabs(rsum) <= 1e-9 * std::max(1.0, scale));
        CHECK(std::fabs(rxsum) <= 1e-9 * std::max(1.0, scale));
    }
}

TEST_CASE("finite differences match analytic derivatives") {
    auto quad = [](std::span<const double> x) { return x[0] * x[0]; };
    auto g = finite_diff_gradient(quad, std::vector<double>{3.0}, 1e-5);
    CHECK(std::fabs(g[0] - 6.0) <= 1e-8);

    auto constant = [](std::span<const double>) { return 4.0; };
    auto gc = finite_diff_gradient(constant, std::vector<double>{1.0, 2.0}, 1e-5);
    CHECK(gc[0] == 0.0);
    CHECK(gc[1] == 0.0);

    auto sins = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += std::sin(v);
        return s;
    };
    auto gs = finite_diff_gradient(sins, std::vector<double>{0.0, 1.5707963267948966}, 1e-5);
    CHECK(std::fabs(gs[0] - 1.0) <= 1e-9);
    CHECK(std::fabs(gs[1] - 0.0) <= 1e-9);
}

TEST_CASE("finite differences flag non-finite objectives") {
    auto bad = [](std::span<const double> x) { return std::log(x[0]); };
    CHECK(throws_code(ErrorCode::NonFiniteEvaluation, [&] {
        finite_diff_gradient(bad, std::vector<double>{0.0}, 1e-3);
    }));
}

TEST_CASE("quadrature integrates known functions") {
    auto one = integrate([](double) { return 1.0; }, 0.0, 3.0, 1e-12);
    CHECK(one == doctest::Approx(3.0).epsilon(1e-12));

    auto quartic = integrate([](double x) { return x * x * x * x; }, -1.0, 2.0, 1e-12);
    CHECK(quartic == doctest::Approx(33.0 / 5.0).epsilon(1e-12));

    auto gauss = integrate(
        [](double x) { return std::exp(-0.5 * x * x) * 0.3989422804014326779; }, -12.0, 12.0,
        1e-12);
    CHECK(gauss == doctest::Approx(1.0).epsilon(1e-12));
}
