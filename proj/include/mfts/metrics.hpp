#ifndef MFTS_METRICS_HPP
#define MFTS_METRICS_HPP

#include <utility>
#include <vector>

#include "mfts/dgp.hpp"
#include "mfts/mpca.hpp"

namespace mfts {

struct ReplicationScore {
    double rmse_R = 0.0;
    double rmse_C = 0.0;
    double rmse_F = 0.0;
    int r1_hat = 0;
    int r2_hat = 0;
    Method method = Method::mPCA;
    // RMSE at the ratio-selected counts, filled only when requested
    double rmse_R_sel = -1.0;
    double rmse_C_sel = -1.0;
    double rmse_F_sel = -1.0;
};

// ||A Aᵀ - Q_B Q_Bᵀ||_F with Q_B = qr_orthonormalize(B); A must already have
// orthonormal columns. Computed as sqrt(rA + rB - 2||AᵀQ_B||_F²).
double projection_distance(const Matrix& a, const Matrix& b_basis);

// Distance between the path-space column spans of the stacked factor series
// (rows = time, columns = vec(F_t) cells). Both stacks are truncated to the
// smaller of their numerical ranks; *rank_used reports it when non-null.
// Throws DegenerateStack when a stack vanishes entirely.
double factor_space_distance(const MatrixTimeSeries& f_hat, const MatrixTimeSeries& f_true,
                             int* rank_used = nullptr);

// Truth-aligned rotation matrices (test/diagnostic oracles; they require the
// generator's strength exponents, so they are unusable on real data). The
// homogeneous-strength formulas are the special case of the per-column ones
// implemented here. On zero-noise data the identity
// R_hat = R * H_R * diag(B_R)^-1 holds exactly.
std::pair<Matrix, Matrix> rotation_oracle_mpca(const DgpTruth& truth, const FactorFit& fit);
std::pair<Matrix, Matrix> rotation_oracle_mpanic(const DgpTruth& truth, const FactorFit& fit);

struct AggregateStats {
    double rmse_R = 0.0;
    double rmse_C = 0.0;
    double rmse_F = 0.0;
    double mean_r1 = 0.0;
    double cp_r1 = 0.0;
    double mean_r2 = 0.0;
    double cp_r2 = 0.0;
    double rmse_R_sel = -1.0;
    double rmse_C_sel = -1.0;
    double rmse_F_sel = -1.0;
    int count = 0;
};

// Means over replications. Each field is summed after sorting its values
// (pairwise reduction), so the output is bit-identical under any permutation
// of the input sequence.
AggregateStats aggregate(const std::vector<ReplicationScore>& scores, int r1_true, int r2_true);

// OLS slope of s_t² on t over t = t_begin..t_end (1-based window bounds,
// inclusive); the variance-growth oracle for I(1)-vs-I(0) direction checks.
double squared_growth_slope(const std::vector<double>& s, int t_begin, int t_end);

// sorted pairwise summation (the fixed reduction order used by aggregate)
double sum_sorted(std::vector<double> values);

} // namespace mfts

#endif
