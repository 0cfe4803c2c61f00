#include "mfts/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace mfts {

namespace {

void check_positive_dims(int rows, int cols) {
    if (rows <= 0 || cols <= 0)
        throw Error(ErrorCode::ShapeMismatch,
                    "matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                        std::to_string(cols));
}

} // namespace

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    check_positive_dims(rows, cols);
    data_.assign(static_cast<size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    check_positive_dims(rows, cols);
    if (data_.size() != static_cast<size_t>(rows) * cols)
        throw Error(ErrorCode::ShapeMismatch,
                    "entry count " + std::to_string(data_.size()) + " does not match " +
                        std::to_string(rows) + "x" + std::to_string(cols));
    if (!all_finite())
        throw Error(ErrorCode::NonFinite, "matrix entries must be finite");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    check_positive_dims(rows_, cols_);
    data_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != cols_)
            throw Error(ErrorCode::ShapeMismatch, "ragged initializer rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    if (!all_finite())
        throw Error(ErrorCode::NonFinite, "matrix entries must be finite");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::leading_columns(int r) const {
    if (r <= 0 || r > cols_)
        throw Error(ErrorCode::ShapeMismatch, "leading_columns: r out of range");
    Matrix out(rows_, r);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < r; ++j) out(i, j) = (*this)(i, j);
    return out;
}

std::vector<double> Matrix::column(int j) const {
    std::vector<double> v(static_cast<size_t>(rows_));
    for (int i = 0; i < rows_; ++i) v[static_cast<size_t>(i)] = (*this)(i, j);
    return v;
}

void Matrix::set_column(int j, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != rows_)
        throw Error(ErrorCode::ShapeMismatch, "set_column: length mismatch");
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[static_cast<size_t>(i)];
}

void Matrix::scale_column(int j, double s) {
    for (int i = 0; i < rows_; ++i) (*this)(i, j) *= s;
}

std::vector<double> Matrix::vec() const {
    std::vector<double> v(data_.size());
    size_t k = 0;
    for (int j = 0; j < cols_; ++j)
        for (int i = 0; i < rows_; ++i) v[k++] = (*this)(i, j);
    return v;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double Matrix::trace() const {
    double s = 0.0;
    const int n = std::min(rows_, cols_);
    for (int i = 0; i < n; ++i) s += (*this)(i, i);
    return s;
}

bool Matrix::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw Error(ErrorCode::ShapeMismatch, "operator+=: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw Error(ErrorCode::ShapeMismatch, "operator-=: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw Error(ErrorCode::ShapeMismatch, "multiply: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    const int m = a.rows(), k = a.cols(), n = b.cols();
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* cd = c.data().data();
    // i-k-j order: streams rows of B, vectorizes the inner j loop
    for (int i = 0; i < m; ++i) {
        for (int l = 0; l < k; ++l) {
            const double aik = ad[static_cast<size_t>(i) * k + l];
            const double* brow = bd + static_cast<size_t>(l) * n;
            double* crow = cd + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw Error(ErrorCode::ShapeMismatch, "multiply_at_b: row counts differ");
    Matrix c(a.cols(), b.cols());
    const int m = a.cols(), k = a.rows(), n = b.cols();
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* cd = c.data().data();
    for (int l = 0; l < k; ++l) {
        const double* arow = ad + static_cast<size_t>(l) * m;
        const double* brow = bd + static_cast<size_t>(l) * n;
        for (int i = 0; i < m; ++i) {
            const double ali = arow[i];
            double* crow = cd + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) crow[j] += ali * brow[j];
        }
    }
    return c;
}

Matrix multiply_a_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw Error(ErrorCode::ShapeMismatch, "multiply_a_bt: column counts differ");
    Matrix c(a.rows(), b.rows());
    const int m = a.rows(), k = a.cols(), n = b.rows();
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* cd = c.data().data();
    for (int i = 0; i < m; ++i) {
        const double* arow = ad + static_cast<size_t>(i) * k;
        for (int j = 0; j < n; ++j) {
            const double* brow = bd + static_cast<size_t>(j) * k;
            double s = 0.0;
            for (int l = 0; l < k; ++l) s += arow[l] * brow[l];
            cd[static_cast<size_t>(i) * n + j] = s;
        }
    }
    return c;
}

Matrix unvec(const std::vector<double>& v, int rows, int cols) {
    if (static_cast<size_t>(rows) * cols != v.size())
        throw Error(ErrorCode::ShapeMismatch, "unvec: length mismatch");
    Matrix m(rows, cols);
    size_t k = 0;
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = v[k++];
    return m;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (int ia = 0; ia < a.rows(); ++ia)
        for (int ja = 0; ja < a.cols(); ++ja) {
            const double av = a(ia, ja);
            if (av == 0.0) continue;
            for (int ib = 0; ib < b.rows(); ++ib)
                for (int jb = 0; jb < b.cols(); ++jb)
                    k(ia * b.rows() + ib, ja * b.cols() + jb) = av * b(ib, jb);
        }
    return k;
}

double determinant(Matrix a) {
    if (a.rows() != a.cols())
        throw Error(ErrorCode::ShapeMismatch, "determinant: matrix must be square");
    const int n = a.rows();
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
            det = -det;
        }
        det *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

MatrixTimeSeries::MatrixTimeSeries(std::vector<Matrix> data) : data_(std::move(data)) {
    if (data_.empty()) throw Error(ErrorCode::EmptySeries, "time series must have T >= 1");
    const int r = data_.front().rows();
    const int c = data_.front().cols();
    for (const auto& m : data_)
        if (m.rows() != r || m.cols() != c)
            throw Error(ErrorCode::ShapeMismatch, "time series elements must share one shape");
}

MatrixTimeSeries MatrixTimeSeries::transposed() const {
    std::vector<Matrix> out;
    out.reserve(data_.size());
    for (const auto& m : data_) out.push_back(m.transpose());
    return MatrixTimeSeries(std::move(out));
}

} // namespace mfts
