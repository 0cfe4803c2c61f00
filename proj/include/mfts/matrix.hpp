#ifndef MFTS_MATRIX_HPP
#define MFTS_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "mfts/error.hpp"

namespace mfts {

// Dense real matrix, row-major storage. Entries must be finite; the
// entry-vector constructor validates this (throws NonFinite).
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols); // zero-initialized
    Matrix(int rows, int cols, std::vector<double> entries);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transpose() const;
    // first r columns as a new matrix
    Matrix leading_columns(int r) const;
    std::vector<double> column(int j) const;
    void set_column(int j, const std::vector<double>& v);
    void scale_column(int j, double s);

    // column-stacking vectorization, vec(A): stacks columns top to bottom
    std::vector<double> vec() const;

    double frobenius_norm() const;
    double max_abs() const;
    double trace() const;
    bool all_finite() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

Matrix multiply(const Matrix& a, const Matrix& b);      // A * B
Matrix multiply_at_b(const Matrix& a, const Matrix& b); // Aᵀ * B
Matrix multiply_a_bt(const Matrix& a, const Matrix& b); // A * Bᵀ

// inverse of vec(): reshape a column-stacked vector back into rows x cols
Matrix unvec(const std::vector<double>& v, int rows, int cols);

// Kronecker product A ⊗ B
Matrix kronecker(const Matrix& a, const Matrix& b);

// determinant via LU with partial pivoting (small matrices)
double determinant(Matrix a);

// A length-T sequence of equally shaped matrices. T >= 1 and uniform shape
// are enforced on construction; estimators additionally require T >= 2.
class MatrixTimeSeries {
  public:
    MatrixTimeSeries() = default;
    explicit MatrixTimeSeries(std::vector<Matrix> data);

    int length() const { return static_cast<int>(data_.size()); }
    int rows() const { return data_.empty() ? 0 : data_.front().rows(); }
    int cols() const { return data_.empty() ? 0 : data_.front().cols(); }

    const Matrix& operator[](int t) const { return data_[static_cast<size_t>(t)]; }
    Matrix& operator[](int t) { return data_[static_cast<size_t>(t)]; }

    const std::vector<Matrix>& data() const { return data_; }

    MatrixTimeSeries transposed() const; // element-wise transpose

  private:
    std::vector<Matrix> data_;
};

} // namespace mfts

#endif
