#include "entroscale/matrix.hpp"

#include <cmath>

#include "entroscale/error.hpp"

namespace entroscale {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) { return eye(n, n); }

Matrix Matrix::eye(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    std::size_t d = rows < cols ? rows : cols;
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw Error(ErrorCode::ShapeMismatch, "ragged initializer rows");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

bool Matrix::all_finite() const noexcept {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw Error(ErrorCode::ShapeMismatch, "matmul inner dimensions disagree");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        double* orow = out.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = arow[k];
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw Error(ErrorCode::ShapeMismatch, "matmul_bt inner dimensions disagree");
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        double* orow = out.row_ptr(i);
        for (std::size_t j = 0; j < b.rows(); ++j)
            orow[j] = dot(arow, b.row_ptr(j), a.cols());
    }
    return out;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw Error(ErrorCode::ShapeMismatch, "matmul_at inner dimensions disagree");
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.row_ptr(k);
        const double* brow = b.row_ptr(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            double aki = arow[i];
            double* orow = out.row_ptr(i);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aki * brow[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size())
        throw Error(ErrorCode::ShapeMismatch, "matvec length disagrees with cols");
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row_ptr(i), x.data(), a.cols());
    return y;
}

std::vector<double> matvec_t(const Matrix& a, const std::vector<double>& x) {
    if (a.rows() != x.size())
        throw Error(ErrorCode::ShapeMismatch, "matvec_t length disagrees with rows");
    std::vector<double> y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        double xi = x[i];
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * arow[j];
    }
    return y;
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotSquare: return "NotSquare";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::IndefiniteAfterJitter: return "IndefiniteAfterJitter";
        case ErrorCode::DegenerateX: return "DegenerateX";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::InvalidRange: return "InvalidRange";
        case ErrorCode::InvalidTrainTokens: return "InvalidTrainTokens";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::StepOutOfRange: return "StepOutOfRange";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::IncompatibleResolution: return "IncompatibleResolution";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::CheckpointError: return "CheckpointError";
    }
    return "UnknownError";
}

} // namespace entroscale
