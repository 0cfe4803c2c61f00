#ifndef MFTS_DGP_HPP
#define MFTS_DGP_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "mfts/matrix.hpp"
#include "mfts/rng.hpp"

namespace mfts {

enum class FactorKind { FullRankI1, Cointegrated };

// Error-correction coefficients: A_j = alpha_j * beta_jᵀ with alpha_j, beta_j
// of shape r_j x k_j, 1 <= k_j <= r_j.
struct EcmParams {
    Matrix alpha1, beta1, alpha2, beta2;
};

struct IdioConfig {
    double ar_coef = 0.3;    // phi_e
    double rho_cross = 0.5;  // Gamma entries rho^{|i-j|}
    int s_row = 0;           // nonstationary top-left block, rows
    int s_col = 0;           // nonstationary top-left block, cols
    double scale = 1.0;      // innovation multiplier; 0 = noiseless panel
};

struct DgpConfig {
    int T = 100;
    int p1 = 30;
    int p2 = 30;
    int r1 = 2;
    int r2 = 2;
    FactorKind factor_kind = FactorKind::FullRankI1;
    double ar_u = 0.3; // phi_u, innovation AR(1) for the I(1) factor case
    EcmParams ecm;
    std::vector<double> strengths_row; // alpha_{R,k} in (0,1], size r1
    std::vector<double> strengths_col; // alpha_{C,k} in (0,1], size r2
    IdioConfig idio;
    uint64_t seed = 0;
};

void validate(const DgpConfig& config);

struct DgpTruth {
    Matrix R;   // p1 x r1 = U_R * B_R
    Matrix C;   // p2 x r2 = V_C * B_C
    Matrix U_R; // orthonormal left factor
    Matrix V_C;
    std::vector<double> B_R; // diagonal of diag(p1^{alpha_k/2})
    std::vector<double> B_C;
    MatrixTimeSeries F;
    MatrixTimeSeries E;
    MatrixTimeSeries X;
    DgpConfig config;
};

// loading = U * diag(p^{alpha_k/2}) for a supplied orthonormal U (test hook
// and the common path under gen_loadings)
std::pair<Matrix, Matrix> loadings_from_orthonormal(const Matrix& u,
                                                    const std::vector<double>& strengths);

// Draws a p x r standard-normal matrix (row-major fill order),
// orthonormalizes it, and applies the strength schedule. Retries a rank
// deficient draw up to 5 times.
std::pair<Matrix, Matrix> gen_loadings(int p, int r, const std::vector<double>& strengths,
                                       Rng& rng);

// F_t = F_{t-1} + U_t from supplied innovation matrices eps_t:
// u_t = phi_u * u_{t-1} + eps_t with u_0 = 0, F_0 = 0 (returned series is
// F_1..F_T).
MatrixTimeSeries i1_path_from_innovations(const std::vector<Matrix>& innovations, double phi_u);
MatrixTimeSeries gen_factors_i1(int T, int r1, int r2, double phi_u, Rng& rng);

// Delta F_t = A1 F_{t-1} A2ᵀ + V_t with F_0 = 0, A_j = alpha_j beta_jᵀ.
MatrixTimeSeries ecm_path_from_innovations(const std::vector<Matrix>& innovations,
                                           const EcmParams& ecm);
// Validates the companion stability condition (all eigenvalue moduli of
// I + betaᵀalpha below 1 - 1e-8) before drawing; a zero adjustment
// (alpha = 0 or beta = 0) degenerates to a pure matrix random walk and is
// accepted without the check.
MatrixTimeSeries gen_factors_ecm(int T, const EcmParams& ecm, Rng& rng);

void check_ecm_stability(const EcmParams& ecm);

// P = (P1, P2) with P1 = orthonormal basis of the complement of
// beta = beta2 ⊗ beta1 (the I(1) directions) and P2 = beta(betaᵀbeta)^{-1/2}.
Matrix cointegration_rotation(const Matrix& beta1, const Matrix& beta2);

// Idiosyncratic path from raw standard-normal draws Xi_t: innovations
// N_t = L_R Xi_t L_Cᵀ (Cholesky factors of the rho^{|i-j|} Toeplitz
// matrices); entries outside the top-left s_row x s_col block follow
// e_t = phi_e e_{t-1} + n_t, entries inside follow e_t = e_{t-1} + n_t.
MatrixTimeSeries idio_path_from_innovations(const std::vector<Matrix>& raw,
                                            const IdioConfig& idio);
MatrixTimeSeries gen_idio(int T, int p1, int p2, const IdioConfig& idio, Rng& rng);

// X_t = R F_t Cᵀ + E_t, exact by construction
DgpTruth assemble(Matrix r_loading, Matrix c_loading, Matrix u_r, Matrix v_c,
                  std::vector<double> b_r, std::vector<double> b_c, MatrixTimeSeries f,
                  MatrixTimeSeries e, DgpConfig config);

// Full generation pass. Consumes the stream in a fixed documented order:
// U_R draw, V_C draw, factor innovations (t ascending, row-major), error
// innovations (t ascending, row-major).
DgpTruth generate(const DgpConfig& config);

} // namespace mfts

#endif
