#include "mfts/mpca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfts {

std::string method_name(Method m) { return m == Method::mPCA ? "mPCA" : "mPANIC"; }

std::string normalization_name(Normalization n) {
    switch (n) {
        case Normalization::RowLambda: return "rowLambda";
        case Normalization::ColLambda: return "colLambda";
        case Normalization::SumLambda: return "sumLambda";
    }
    return "?";
}

int default_ratio_bound(int requested, int p) {
    if (requested > 0) return requested;
    return std::min(10, p - 1);
}

std::vector<double> clamp_nonnegative(std::vector<double> values) {
    for (double& v : values)
        if (v < 0.0) v = 0.0;
    return values;
}

Matrix row_covariance(const MatrixTimeSeries& x) {
    if (x.length() < 1) throw Error(ErrorCode::EmptySeries, "row_covariance: empty series");
    const int p1 = x.rows();
    Matrix acc(p1, p1);
    for (int t = 0; t < x.length(); ++t) acc += multiply_a_bt(x[t], x[t]);
    acc *= 1.0 / x.length();
    // symmetrize to absorb accumulation rounding
    Matrix out(p1, p1);
    for (int i = 0; i < p1; ++i)
        for (int j = 0; j < p1; ++j) out(i, j) = 0.5 * (acc(i, j) + acc(j, i));
    return out;
}

Matrix col_covariance(const MatrixTimeSeries& x) {
    if (x.length() < 1) throw Error(ErrorCode::EmptySeries, "col_covariance: empty series");
    const int p2 = x.cols();
    Matrix acc(p2, p2);
    for (int t = 0; t < x.length(); ++t) acc += multiply_at_b(x[t], x[t]);
    acc *= 1.0 / x.length();
    Matrix out(p2, p2);
    for (int i = 0; i < p2; ++i)
        for (int j = 0; j < p2; ++j) out(i, j) = 0.5 * (acc(i, j) + acc(j, i));
    return out;
}

RatioSelection ratio_criterion(const std::vector<double>& eigvals, int K) {
    const int n = static_cast<int>(eigvals.size());
    if (K < 1 || K >= n)
        throw Error(ErrorCode::KOutOfRange,
                    "ratio_criterion: need 1 <= K < " + std::to_string(n) + ", got " +
                        std::to_string(K));
    const double lambda1 = eigvals.front();
    if (lambda1 <= 0.0) throw Error(ErrorCode::AllZero, "ratio_criterion: leading eigenvalue is 0");
    // Values at or below 1e-12*lambda_1 are indistinguishable from zero and
    // floored on both sides of the ratio; a tail of effective zeros then
    // yields ratio 1 among themselves and the argmin lands at the true rank.
    const double floor = 1e-12 * lambda1;
    RatioSelection sel;
    sel.K = K;
    sel.ratios.reserve(static_cast<size_t>(K));
    for (int k = 1; k <= K; ++k) {
        const double numer = std::max(eigvals[static_cast<size_t>(k)], floor);
        const double denom = std::max(eigvals[static_cast<size_t>(k - 1)], floor);
        sel.ratios.push_back(std::abs(numer / denom));
    }
    int best = 0;
    for (int k = 1; k < K; ++k)
        if (sel.ratios[static_cast<size_t>(k)] < sel.ratios[static_cast<size_t>(best)]) best = k;
    sel.r_hat = best + 1;
    return sel;
}

LoadingEstimate loadings_from_covariances(const Matrix& omega_row, const Matrix& omega_col,
                                          int r1, int r2) {
    if (r1 < 1 || r1 > omega_row.rows() || r2 < 1 || r2 > omega_col.rows())
        throw Error(ErrorCode::ShapeMismatch, "loadings: factor counts out of range");
    EigenSystem row = sym_eig(omega_row);
    EigenSystem col = sym_eig(omega_col);
    LoadingEstimate est;
    est.R_hat = row.vectors.leading_columns(r1);
    est.C_hat = col.vectors.leading_columns(r2);
    est.row_eigvals = clamp_nonnegative(std::move(row.values));
    est.col_eigvals = clamp_nonnegative(std::move(col.values));
    return est;
}

LoadingEstimate estimate_loadings(const MatrixTimeSeries& x, int r1, int r2) {
    return loadings_from_covariances(row_covariance(x), col_covariance(x), r1, r2);
}

namespace {

std::vector<double> checked_inverse_sqrt_head(const std::vector<double>& values, int r,
                                              const char* side) {
    const double lambda1 = values.front();
    if (lambda1 <= 0.0)
        throw Error(ErrorCode::DegenerateEigenvalue,
                    std::string("factor estimation: zero ") + side + " spectrum");
    std::vector<double> inv(static_cast<size_t>(r));
    for (int k = 0; k < r; ++k) {
        const double v = values[static_cast<size_t>(k)];
        if (v <= 1e-12 * lambda1)
            throw Error(ErrorCode::DegenerateEigenvalue,
                        std::string(side) + " eigenvalue " + std::to_string(k + 1) +
                            " below 1e-12 of the leading one; r exceeds effective rank");
        inv[static_cast<size_t>(k)] = 1.0 / std::sqrt(v);
    }
    return inv;
}

} // namespace

MatrixTimeSeries scaled_projection_factors(const MatrixTimeSeries& x, const Matrix& r_hat,
                                           const Matrix& c_hat,
                                           const std::vector<double>& row_scaled,
                                           const std::vector<double>& col_scaled,
                                           Normalization normalization) {
    const int r1 = r_hat.cols();
    const int r2 = c_hat.cols();
    if (r_hat.rows() != x.rows() || c_hat.rows() != x.cols())
        throw Error(ErrorCode::ShapeMismatch, "factor estimation: loading shapes mismatch");
    if (static_cast<int>(row_scaled.size()) < r1 || static_cast<int>(col_scaled.size()) < r2)
        throw Error(ErrorCode::ShapeMismatch, "factor estimation: eigenvalue lists too short");

    const std::vector<double> row_inv = checked_inverse_sqrt_head(row_scaled, r1, "row");
    const std::vector<double> col_inv = checked_inverse_sqrt_head(col_scaled, r2, "column");
    double lambda = 0.0;
    switch (normalization) {
        case Normalization::RowLambda: lambda = row_scaled.front(); break;
        case Normalization::ColLambda: lambda = col_scaled.front(); break;
        case Normalization::SumLambda: lambda = row_scaled.front() + col_scaled.front(); break;
    }
    const double scale = std::sqrt(lambda);

    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(x.length()));
    for (int t = 0; t < x.length(); ++t) {
        Matrix f = multiply(multiply_at_b(r_hat, x[t]), c_hat);
        for (int i = 0; i < r1; ++i)
            for (int j = 0; j < r2; ++j)
                f(i, j) *= scale * row_inv[static_cast<size_t>(i)] * col_inv[static_cast<size_t>(j)];
        out.push_back(std::move(f));
    }
    return MatrixTimeSeries(std::move(out));
}

MatrixTimeSeries estimate_factors(const MatrixTimeSeries& x, const Matrix& r_hat,
                                  const Matrix& c_hat, const std::vector<double>& row_eigvals,
                                  const std::vector<double>& col_eigvals,
                                  Normalization normalization) {
    const double inv_t = 1.0 / x.length();
    std::vector<double> row_scaled(row_eigvals);
    std::vector<double> col_scaled(col_eigvals);
    for (double& v : row_scaled) v *= inv_t;
    for (double& v : col_scaled) v *= inv_t;
    return scaled_projection_factors(x, r_hat, c_hat, row_scaled, col_scaled, normalization);
}

MatrixTimeSeries common_components(const MatrixTimeSeries& x, const Matrix& r_hat,
                                   const Matrix& c_hat) {
    if (r_hat.rows() != x.rows() || c_hat.rows() != x.cols())
        throw Error(ErrorCode::ShapeMismatch, "common_components: loading shapes mismatch");
    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(x.length()));
    for (int t = 0; t < x.length(); ++t) {
        Matrix core = multiply(multiply_at_b(r_hat, x[t]), c_hat);
        out.push_back(multiply_a_bt(multiply(r_hat, core), c_hat));
    }
    return MatrixTimeSeries(std::move(out));
}

FactorFit fit_mpca(const MatrixTimeSeries& x, const FitConfig& config) {
    if (x.length() < 2) throw Error(ErrorCode::TooShort, "fit_mpca: need T >= 2");
    const MatrixTimeSeries series = config.demean ? demean(x) : x;
    const Matrix omega_row = row_covariance(series);
    const Matrix omega_col = col_covariance(series);

    EigenSystem row = sym_eig(omega_row);
    EigenSystem col = sym_eig(omega_col);
    const std::vector<double> row_vals = clamp_nonnegative(row.values);
    const std::vector<double> col_vals = clamp_nonnegative(col.values);

    FactorFit fit;
    fit.method = Method::mPCA;
    fit.normalization = config.normalization;
    fit.demeaned = config.demean;
    fit.r1 = config.r1 ? *config.r1
                       : ratio_criterion(row_vals, default_ratio_bound(config.K1, x.rows())).r_hat;
    fit.r2 = config.r2 ? *config.r2
                       : ratio_criterion(col_vals, default_ratio_bound(config.K2, x.cols())).r_hat;
    if (fit.r1 < 1 || fit.r1 > x.rows() || fit.r2 < 1 || fit.r2 > x.cols())
        throw Error(ErrorCode::ShapeMismatch, "fit_mpca: factor counts out of range");
    fit.R_hat = row.vectors.leading_columns(fit.r1);
    fit.C_hat = col.vectors.leading_columns(fit.r2);
    fit.row_eigvals = row_vals;
    fit.col_eigvals = col_vals;
    fit.F_hat = estimate_factors(series, fit.R_hat, fit.C_hat, row_vals, col_vals,
                                 config.normalization);
    return fit;
}

} // namespace mfts
