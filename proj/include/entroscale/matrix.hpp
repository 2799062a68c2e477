#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace entroscale {

// Dense row-major double matrix. Everything in the analysis path runs in
// 64-bit, so there is no element-type parameter.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    // Rectangular "eye": ones on the main diagonal, zero elsewhere.
    static Matrix eye(std::size_t rows, std::size_t cols);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    bool all_finite() const noexcept;
    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// a (m x k) times b (k x n); throws ShapeMismatch on inner-dimension clash.
Matrix matmul(const Matrix& a, const Matrix& b);
// a (m x k) times b^T where b is (n x k). Row-major friendly, used for Q K^T.
Matrix matmul_bt(const Matrix& a, const Matrix& b);
// a^T (k x m)^T times b (m x n), i.e. result is (k x n).
Matrix matmul_at(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// y = A x for a length-cols vector; throws ShapeMismatch.
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);
// y = A^T x for a length-rows vector.
std::vector<double> matvec_t(const Matrix& a, const std::vector<double>& x);

double dot(const double* a, const double* b, std::size_t n) noexcept;

} // namespace entroscale
