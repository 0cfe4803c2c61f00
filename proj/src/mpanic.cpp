#include "mfts/mpanic.hpp"

namespace mfts {

std::pair<Matrix, Matrix> diff_covariances(const MatrixTimeSeries& x) {
    if (x.length() < 2) throw Error(ErrorCode::TooShort, "diff_covariances: need T >= 2");
    const MatrixTimeSeries dx = difference(x);
    const double rescale = static_cast<double>(dx.length()) / x.length();
    Matrix omega_row = row_covariance(dx) * rescale;
    Matrix omega_col = col_covariance(dx) * rescale;
    return {std::move(omega_row), std::move(omega_col)};
}

FactorFit fit_mpanic(const MatrixTimeSeries& x, const FitConfig& config) {
    if (x.length() < 2) throw Error(ErrorCode::TooShort, "fit_mpanic: need T >= 2");
    const MatrixTimeSeries series = config.demean ? demean(x) : x;
    auto [omega_row, omega_col] = diff_covariances(series);

    EigenSystem row = sym_eig(omega_row);
    EigenSystem col = sym_eig(omega_col);
    const std::vector<double> row_vals = clamp_nonnegative(row.values);
    const std::vector<double> col_vals = clamp_nonnegative(col.values);

    FactorFit fit;
    fit.method = Method::mPANIC;
    fit.normalization = config.normalization;
    fit.demeaned = config.demean;
    fit.r1 = config.r1 ? *config.r1
                       : ratio_criterion(row_vals, default_ratio_bound(config.K1, x.rows())).r_hat;
    fit.r2 = config.r2 ? *config.r2
                       : ratio_criterion(col_vals, default_ratio_bound(config.K2, x.cols())).r_hat;
    if (fit.r1 < 1 || fit.r1 > x.rows() || fit.r2 < 1 || fit.r2 > x.cols())
        throw Error(ErrorCode::ShapeMismatch, "fit_mpanic: factor counts out of range");
    fit.R_hat = row.vectors.leading_columns(fit.r1);
    fit.C_hat = col.vectors.leading_columns(fit.r2);
    fit.row_eigvals = row_vals;
    fit.col_eigvals = col_vals;
    // levels enter here, not differences; normalizers come from the
    // differenced spectrum without any extra T^-1
    fit.F_hat = scaled_projection_factors(series, fit.R_hat, fit.C_hat, row_vals, col_vals,
                                          config.normalization);
    return fit;
}

} // namespace mfts
