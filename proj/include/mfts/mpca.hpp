#ifndef MFTS_MPCA_HPP
#define MFTS_MPCA_HPP

#include <optional>
#include <string>
#include <vector>

#include "mfts/linalg.hpp"
#include "mfts/matrix.hpp"

namespace mfts {

enum class Method { mPCA, mPANIC };
enum class Normalization { RowLambda, ColLambda, SumLambda };

std::string method_name(Method m);
std::string normalization_name(Normalization n);

// Result of a factor-model fit. For mPCA the eigenvalue lists hold the raw
// eigenvalues of the level covariances; for mPANIC those of the differenced
// covariances. Negative rounding residue is clamped to zero so the lists are
// nonnegative and descending.
struct FactorFit {
    Method method = Method::mPCA;
    int r1 = 0;
    int r2 = 0;
    Matrix R_hat; // p1 x r1, orthonormal columns
    Matrix C_hat; // p2 x r2, orthonormal columns
    MatrixTimeSeries F_hat;
    std::vector<double> row_eigvals;
    std::vector<double> col_eigvals;
    Normalization normalization = Normalization::RowLambda;
    bool demeaned = false;
};

struct RatioSelection {
    int K = 0;
    std::vector<double> ratios; // lambda_{k+1}/lambda_k, k = 1..K
    int r_hat = 0;
};

struct FitConfig {
    std::optional<int> r1;
    std::optional<int> r2;
    int K1 = 0; // 0 = default min(10, p1-1)
    int K2 = 0;
    Normalization normalization = Normalization::RowLambda;
    bool demean = false;
};

// (1/T) sum_t X_t X_tᵀ, symmetrized
Matrix row_covariance(const MatrixTimeSeries& x);
// (1/T) sum_t X_tᵀ X_t, symmetrized
Matrix col_covariance(const MatrixTimeSeries& x);

// r_hat = argmin_{1<=k<=K} lambda_{k+1}/lambda_k, smallest k on ties.
// Denominators below 1e-12*lambda_1 are floored there before dividing.
RatioSelection ratio_criterion(const std::vector<double>& eigvals, int K);

struct LoadingEstimate {
    Matrix R_hat;
    Matrix C_hat;
    std::vector<double> row_eigvals;
    std::vector<double> col_eigvals;
};

LoadingEstimate estimate_loadings(const MatrixTimeSeries& x, int r1, int r2);
// same, from precomputed covariance matrices (shared by selection + scoring)
LoadingEstimate loadings_from_covariances(const Matrix& omega_row, const Matrix& omega_col,
                                          int r1, int r2);

// F_t = lambda^{1/2} V_R^{-1/2} R̂ᵀ X_t Ĉ V_C^{-1/2} where V_R/V_C are the
// diagonal matrices of the leading entries of row_scaled/col_scaled and
// lambda follows the normalization tag. Callers pass the eigenvalue lists on
// the scale their estimator prescribes.
MatrixTimeSeries scaled_projection_factors(const MatrixTimeSeries& x, const Matrix& r_hat,
                                           const Matrix& c_hat,
                                           const std::vector<double>& row_scaled,
                                           const std::vector<double>& col_scaled,
                                           Normalization normalization);

// mPCA factor estimate: applies the T^-1 rescaling of the level covariance
// eigenvalues internally, then delegates to scaled_projection_factors.
MatrixTimeSeries estimate_factors(const MatrixTimeSeries& x, const Matrix& r_hat,
                                  const Matrix& c_hat, const std::vector<double>& row_eigvals,
                                  const std::vector<double>& col_eigvals,
                                  Normalization normalization);

// Z_t = R̂ (R̂ᵀ X_t Ĉ) Ĉᵀ
MatrixTimeSeries common_components(const MatrixTimeSeries& x, const Matrix& r_hat,
                                   const Matrix& c_hat);

FactorFit fit_mpca(const MatrixTimeSeries& x, const FitConfig& config = {});

// shared helpers
int default_ratio_bound(int requested, int p);
std::vector<double> clamp_nonnegative(std::vector<double> values);

} // namespace mfts

#endif
