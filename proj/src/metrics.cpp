#include "mfts/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace mfts {

namespace {

// ||A Aᵀ - Q Qᵀ||_F via the residual identity
//   d² = ||A - Q(QᵀA)||² + ||Q - A(AᵀQ)||²
// which avoids the cancellation of rA + rB - 2||AᵀQ||² near d = 0.
double orthonormal_projection_distance(const Matrix& a, const Matrix& q) {
    const Matrix qta = multiply_at_b(q, a);
    const Matrix res_a = a - multiply(q, qta);
    const Matrix res_q = q - multiply(a, qta.transpose());
    double d2 = 0.0;
    for (double x : res_a.data()) d2 += x * x;
    for (double x : res_q.data()) d2 += x * x;
    return std::sqrt(d2);
}

} // namespace

double projection_distance(const Matrix& a, const Matrix& b_basis) {
    if (a.rows() != b_basis.rows())
        throw Error(ErrorCode::ShapeMismatch, "projection_distance: row counts differ");
    return orthonormal_projection_distance(a, qr_orthonormalize(b_basis));
}

namespace {

// orthonormal basis of the top-k left singular subspace of a T x m stack,
// via the m x m Gram matrix; k = numerical rank capped at max_rank
Matrix stack_basis(const MatrixTimeSeries& f, int max_rank, int* rank_out) {
    const int t_len = f.length();
    const int m = f.rows() * f.cols();
    Matrix stack(t_len, m);
    for (int t = 0; t < t_len; ++t) {
        const std::vector<double> v = f[t].vec();
        for (int j = 0; j < m; ++j) stack(t, j) = v[static_cast<size_t>(j)];
    }
    const EigenSystem es = sym_eig(multiply_at_b(stack, stack));
    const double lead = es.values.front();
    if (lead <= 0.0) throw Error(ErrorCode::DegenerateStack, "factor stack is identically zero");
    int rank = 0;
    while (rank < m && rank < max_rank && es.values[static_cast<size_t>(rank)] > 1e-12 * lead) ++rank;
    *rank_out = rank;
    Matrix basis = multiply(stack, es.vectors.leading_columns(rank));
    for (int k = 0; k < rank; ++k)
        basis.scale_column(k, 1.0 / std::sqrt(es.values[static_cast<size_t>(k)]));
    return basis;
}

} // namespace

double factor_space_distance(const MatrixTimeSeries& f_hat, const MatrixTimeSeries& f_true,
                             int* rank_used) {
    if (f_hat.length() != f_true.length() || f_hat.rows() != f_true.rows() ||
        f_hat.cols() != f_true.cols())
        throw Error(ErrorCode::ShapeMismatch, "factor_space_distance: series shapes differ");
    const int full = f_hat.rows() * f_hat.cols();
    int rank_hat = 0, rank_true = 0;
    Matrix basis_hat = stack_basis(f_hat, full, &rank_hat);
    Matrix basis_true = stack_basis(f_true, full, &rank_true);
    const int rank = std::min(rank_hat, rank_true);
    if (rank_used) *rank_used = rank;
    return orthonormal_projection_distance(basis_hat.leading_columns(rank),
                                           basis_true.leading_columns(rank));
}

namespace {

// scales column k of m by s[k]
Matrix scale_columns(Matrix m, const std::vector<double>& s) {
    for (int k = 0; k < m.cols(); ++k) m.scale_column(k, s[static_cast<size_t>(k)]);
    return m;
}

std::vector<double> checked_diag_inverse(const std::vector<double>& v, const char* what) {
    const double lead = v.front();
    std::vector<double> inv(v.size());
    for (size_t k = 0; k < v.size(); ++k) {
        if (v[k] <= 0.0 || v[k] <= 1e-12 * lead)
            throw Error(ErrorCode::SingularV,
                        std::string(what) + ": normalizer eigenvalue " + std::to_string(k + 1) +
                            " at or below the floor");
        inv[k] = 1.0 / v[k];
    }
    return inv;
}

// Shared core. The Gram term is gram_scale * sum over the supplied factor
// series (levels for mPCA with 1/T², differences for mPANIC with 1/T), and
// eig_scale carries the spectrum normalization (1/T for mPCA, 1 for mPANIC).
std::pair<Matrix, Matrix> rotation_oracle(const DgpTruth& truth, const FactorFit& fit,
                                          const MatrixTimeSeries& gram_series, double gram_scale,
                                          double eig_scale, const char* what) {
    const int r1 = fit.r1;
    const int r2 = fit.r2;
    if (r1 != truth.config.r1 || r2 != truth.config.r2)
        throw Error(ErrorCode::ShapeMismatch,
                    std::string(what) + ": oracle requires a fit at the true factor counts");
    const double a_r1 = truth.config.strengths_row.front(); // strongest row exponent
    const double a_c1 = truth.config.strengths_col.front();
    const double p1 = truth.config.p1;
    const double p2 = truth.config.p2;

    std::vector<double> b_r_inv(truth.B_R.size()), b_c_inv(truth.B_C.size());
    for (size_t k = 0; k < truth.B_R.size(); ++k) b_r_inv[k] = 1.0 / truth.B_R[k];
    for (size_t k = 0; k < truth.B_C.size(); ++k) b_c_inv[k] = 1.0 / truth.B_C[k];

    // V_R = p2^{-a_C1} B_R^-2 diag(top eigenvalues), V_C symmetric in roles
    std::vector<double> v_r(static_cast<size_t>(r1)), v_c(static_cast<size_t>(r2));
    for (int k = 0; k < r1; ++k)
        v_r[static_cast<size_t>(k)] = std::pow(p2, -a_c1) * b_r_inv[static_cast<size_t>(k)] *
                                      b_r_inv[static_cast<size_t>(k)] * eig_scale *
                                      fit.row_eigvals[static_cast<size_t>(k)];
    for (int k = 0; k < r2; ++k)
        v_c[static_cast<size_t>(k)] = std::pow(p1, -a_r1) * b_c_inv[static_cast<size_t>(k)] *
                                      b_c_inv[static_cast<size_t>(k)] * eig_scale *
                                      fit.col_eigvals[static_cast<size_t>(k)];
    const std::vector<double> v_r_inv = checked_diag_inverse(v_r, what);
    const std::vector<double> v_c_inv = checked_diag_inverse(v_c, what);

    const Matrix ctc = multiply_at_b(truth.C, truth.C);
    const Matrix rtr = multiply_at_b(truth.R, truth.R);
    Matrix gram_row(truth.config.r1, truth.config.r1);
    Matrix gram_col(truth.config.r2, truth.config.r2);
    for (int t = 0; t < gram_series.length(); ++t) {
        const Matrix fc = multiply(gram_series[t], ctc);
        gram_row += multiply_a_bt(fc, gram_series[t]);
        const Matrix fr = multiply_at_b(gram_series[t], rtr);
        gram_col += multiply(fr, gram_series[t]);
    }
    gram_row *= gram_scale * std::pow(p2, -a_c1);
    gram_col *= gram_scale * std::pow(p1, -a_r1);

    const Matrix h_r = scale_columns(
        multiply(gram_row, scale_columns(multiply_at_b(truth.R, fit.R_hat), b_r_inv)), v_r_inv);
    const Matrix h_c = scale_columns(
        multiply(gram_col, scale_columns(multiply_at_b(truth.C, fit.C_hat), b_c_inv)), v_c_inv);
    return {h_r, h_c};
}

} // namespace

std::pair<Matrix, Matrix> rotation_oracle_mpca(const DgpTruth& truth, const FactorFit& fit) {
    if (fit.method != Method::mPCA)
        throw Error(ErrorCode::ShapeMismatch, "rotation_oracle_mpca: fit is not an mPCA fit");
    const double t_len = truth.F.length();
    return rotation_oracle(truth, fit, truth.F, 1.0 / (t_len * t_len), 1.0 / t_len,
                           "rotation_oracle_mpca");
}

std::pair<Matrix, Matrix> rotation_oracle_mpanic(const DgpTruth& truth, const FactorFit& fit) {
    if (fit.method != Method::mPANIC)
        throw Error(ErrorCode::ShapeMismatch, "rotation_oracle_mpanic: fit is not an mPANIC fit");
    const double t_len = truth.F.length();
    const MatrixTimeSeries df = difference(truth.F); // T-1 terms, 1/T normalizer as in the estimator
    return rotation_oracle(truth, fit, df, 1.0 / t_len, 1.0, "rotation_oracle_mpanic");
}

double sum_sorted(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    // pairwise reduction over the sorted sequence
    std::function<double(size_t, size_t)> reduce = [&](size_t lo, size_t hi) -> double {
        if (hi - lo == 1) return values[lo];
        const size_t mid = lo + (hi - lo) / 2;
        return reduce(lo, mid) + reduce(mid, hi);
    };
    return reduce(0, values.size());
}

AggregateStats aggregate(const std::vector<ReplicationScore>& scores, int r1_true, int r2_true) {
    if (scores.empty()) throw Error(ErrorCode::Empty, "aggregate: no replication scores");
    const double n = static_cast<double>(scores.size());
    auto mean_of = [&](const std::function<double(const ReplicationScore&)>& get) {
        std::vector<double> v;
        v.reserve(scores.size());
        for (const auto& s : scores) v.push_back(get(s));
        return sum_sorted(std::move(v)) / n;
    };
    AggregateStats agg;
    agg.count = static_cast<int>(scores.size());
    agg.rmse_R = mean_of([](const ReplicationScore& s) { return s.rmse_R; });
    agg.rmse_C = mean_of([](const ReplicationScore& s) { return s.rmse_C; });
    agg.rmse_F = mean_of([](const ReplicationScore& s) { return s.rmse_F; });
    agg.mean_r1 = mean_of([](const ReplicationScore& s) { return double(s.r1_hat); });
    agg.mean_r2 = mean_of([](const ReplicationScore& s) { return double(s.r2_hat); });
    int hit1 = 0, hit2 = 0;
    for (const auto& s : scores) {
        hit1 += s.r1_hat == r1_true ? 1 : 0;
        hit2 += s.r2_hat == r2_true ? 1 : 0;
    }
    agg.cp_r1 = hit1 / n;
    agg.cp_r2 = hit2 / n;
    const bool with_sel = scores.front().rmse_R_sel >= 0.0;
    if (with_sel) {
        agg.rmse_R_sel = mean_of([](const ReplicationScore& s) { return s.rmse_R_sel; });
        agg.rmse_C_sel = mean_of([](const ReplicationScore& s) { return s.rmse_C_sel; });
        agg.rmse_F_sel = mean_of([](const ReplicationScore& s) { return s.rmse_F_sel; });
    }
    return agg;
}

double squared_growth_slope(const std::vector<double>& s, int t_begin, int t_end) {
    if (t_begin < 1 || t_end > static_cast<int>(s.size()) || t_end - t_begin < 1)
        throw Error(ErrorCode::ShapeMismatch, "squared_growth_slope: bad window");
    const int n = t_end - t_begin + 1;
    double t_mean = 0.0, y_mean = 0.0;
    for (int t = t_begin; t <= t_end; ++t) {
        t_mean += t;
        y_mean += s[static_cast<size_t>(t - 1)] * s[static_cast<size_t>(t - 1)];
    }
    t_mean /= n;
    y_mean /= n;
    double sxy = 0.0, sxx = 0.0;
    for (int t = t_begin; t <= t_end; ++t) {
        const double y = s[static_cast<size_t>(t - 1)] * s[static_cast<size_t>(t - 1)];
        sxy += (t - t_mean) * (y - y_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    return sxy / sxx;
}

} // namespace mfts
