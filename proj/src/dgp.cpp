#include "mfts/dgp.hpp"

#include <cmath>
#include <string>

#include "mfts/linalg.hpp"

namespace mfts {

void validate(const DgpConfig& config) {
    if (config.T < 1) throw Error(ErrorCode::ShapeMismatch, "dgp: T must be positive");
    if (config.p1 < 1 || config.p2 < 1 || config.r1 < 1 || config.r2 < 1)
        throw Error(ErrorCode::ShapeMismatch, "dgp: dimensions must be positive");
    if (config.r1 > config.p1 || config.r2 > config.p2)
        throw Error(ErrorCode::ShapeMismatch, "dgp: factor counts exceed dimensions");
    if (static_cast<int>(config.strengths_row.size()) != config.r1 ||
        static_cast<int>(config.strengths_col.size()) != config.r2)
        throw Error(ErrorCode::ShapeMismatch, "dgp: strength lists must match factor counts");
    for (double a : config.strengths_row)
        if (!(a > 0.0 && a <= 1.0))
            throw Error(ErrorCode::ShapeMismatch, "dgp: row strengths must lie in (0,1]");
    for (double a : config.strengths_col)
        if (!(a > 0.0 && a <= 1.0))
            throw Error(ErrorCode::ShapeMismatch, "dgp: column strengths must lie in (0,1]");
    if (config.idio.s_row < 0 || config.idio.s_col < 0 || config.idio.s_row > config.p1 ||
        config.idio.s_col > config.p2)
        throw Error(ErrorCode::ShapeMismatch, "dgp: nonstationary block out of range");
    if (std::abs(config.idio.ar_coef) >= 1.0)
        throw Error(ErrorCode::ShapeMismatch, "dgp: |phi_e| must be < 1");
    if (std::abs(config.idio.rho_cross) >= 1.0)
        throw Error(ErrorCode::ShapeMismatch, "dgp: |rho_cross| must be < 1");
    if (!(config.idio.scale >= 0.0) || !std::isfinite(config.idio.scale))
        throw Error(ErrorCode::ShapeMismatch, "dgp: noise scale must be finite and >= 0");
    if (config.factor_kind == FactorKind::FullRankI1) {
        if (std::abs(config.ar_u) >= 1.0)
            throw Error(ErrorCode::ShapeMismatch, "dgp: |phi_u| must be < 1");
    } else {
        const auto check_pair = [](const Matrix& alpha, const Matrix& beta, int r, const char* side) {
            if (alpha.rows() != r || beta.rows() != r || alpha.cols() != beta.cols() ||
                alpha.cols() < 1 || alpha.cols() > r)
                throw Error(ErrorCode::ShapeMismatch,
                            std::string("dgp: ecm ") + side + " pair must be r x k with 1 <= k <= r");
        };
        check_pair(config.ecm.alpha1, config.ecm.beta1, config.r1, "row");
        check_pair(config.ecm.alpha2, config.ecm.beta2, config.r2, "column");
    }
}

std::pair<Matrix, Matrix> loadings_from_orthonormal(const Matrix& u,
                                                    const std::vector<double>& strengths) {
    if (static_cast<int>(strengths.size()) != u.cols())
        throw Error(ErrorCode::ShapeMismatch, "loadings: strengths must match column count");
    Matrix loading = u;
    const double p = static_cast<double>(u.rows());
    for (int k = 0; k < u.cols(); ++k)
        loading.scale_column(k, std::pow(p, strengths[static_cast<size_t>(k)] / 2.0));
    return {std::move(loading), u};
}

std::pair<Matrix, Matrix> gen_loadings(int p, int r, const std::vector<double>& strengths,
                                       Rng& rng) {
    if (r > p) throw Error(ErrorCode::ShapeMismatch, "gen_loadings: need r <= p");
    for (int attempt = 0; attempt < 5; ++attempt) {
        Matrix raw(p, r);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < r; ++j) raw(i, j) = rng.next_normal();
        try {
            return loadings_from_orthonormal(qr_orthonormalize(raw), strengths);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RankDeficient) throw;
        }
    }
    throw Error(ErrorCode::RankDeficient, "gen_loadings: 5 consecutive rank-deficient draws");
}

MatrixTimeSeries i1_path_from_innovations(const std::vector<Matrix>& innovations, double phi_u) {
    if (innovations.empty()) throw Error(ErrorCode::EmptySeries, "i1 path: no innovations");
    const int r1 = innovations.front().rows();
    const int r2 = innovations.front().cols();
    Matrix u(r1, r2); // u_0 = 0
    Matrix f(r1, r2); // F_0 = 0
    std::vector<Matrix> out;
    out.reserve(innovations.size());
    for (const Matrix& eps : innovations) {
        u = u * phi_u + eps;
        f += u;
        out.push_back(f);
    }
    return MatrixTimeSeries(std::move(out));
}

MatrixTimeSeries gen_factors_i1(int T, int r1, int r2, double phi_u, Rng& rng) {
    if (std::abs(phi_u) >= 1.0) throw Error(ErrorCode::ShapeMismatch, "gen_factors_i1: |phi_u| >= 1");
    std::vector<Matrix> innovations;
    innovations.reserve(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
        Matrix eps(r1, r2);
        for (int i = 0; i < r1; ++i)
            for (int j = 0; j < r2; ++j) eps(i, j) = rng.next_normal();
        innovations.push_back(std::move(eps));
    }
    return i1_path_from_innovations(innovations, phi_u);
}

void check_ecm_stability(const EcmParams& ecm) {
    // a vanishing adjustment term degenerates to a pure matrix random walk
    if (ecm.alpha1.max_abs() == 0.0 || ecm.alpha2.max_abs() == 0.0 ||
        ecm.beta1.max_abs() == 0.0 || ecm.beta2.max_abs() == 0.0)
        return;
    const Matrix alpha = kronecker(ecm.alpha2, ecm.alpha1);
    const Matrix beta = kronecker(ecm.beta2, ecm.beta1);
    Matrix companion = multiply_at_b(beta, alpha); // k1k2 x k1k2
    for (int i = 0; i < companion.rows(); ++i) companion(i, i) += 1.0;
    const double radius = spectral_radius(companion);
    if (!(radius < 1.0 - 1e-8))
        throw Error(ErrorCode::UnstableECM,
                    "ecm companion spectral radius " + std::to_string(radius) + " >= 1 - 1e-8");
}

MatrixTimeSeries ecm_path_from_innovations(const std::vector<Matrix>& innovations,
                                           const EcmParams& ecm) {
    if (innovations.empty()) throw Error(ErrorCode::EmptySeries, "ecm path: no innovations");
    const int r1 = innovations.front().rows();
    const int r2 = innovations.front().cols();
    const Matrix a1 = multiply_a_bt(ecm.alpha1, ecm.beta1);
    const Matrix a2 = multiply_a_bt(ecm.alpha2, ecm.beta2);
    if (a1.rows() != r1 || a2.rows() != r2)
        throw Error(ErrorCode::ShapeMismatch, "ecm path: coefficient shapes mismatch");
    Matrix f(r1, r2); // F_0 = 0
    std::vector<Matrix> out;
    out.reserve(innovations.size());
    for (const Matrix& v : innovations) {
        f += multiply_a_bt(multiply(a1, f), a2) + v;
        out.push_back(f);
    }
    return MatrixTimeSeries(std::move(out));
}

MatrixTimeSeries gen_factors_ecm(int T, const EcmParams& ecm, Rng& rng) {
    check_ecm_stability(ecm);
    const int r1 = ecm.alpha1.rows();
    const int r2 = ecm.alpha2.rows();
    std::vector<Matrix> innovations;
    innovations.reserve(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
        Matrix v(r1, r2);
        for (int i = 0; i < r1; ++i)
            for (int j = 0; j < r2; ++j) v(i, j) = rng.next_normal();
        innovations.push_back(std::move(v));
    }
    return ecm_path_from_innovations(innovations, ecm);
}

Matrix cointegration_rotation(const Matrix& beta1, const Matrix& beta2) {
    const Matrix beta = kronecker(beta2, beta1);
    const int m = beta.rows();
    const int k = beta.cols();
    if (k >= m)
        throw Error(ErrorCode::RankDeficient, "cointegration_rotation: beta spans everything");
    Matrix p1 = orthonormal_complement(beta); // throws RankDeficient if beta degenerate
    // the complement basis is arbitrary up to rotation; fix signs the same way
    // eigenvectors are fixed (largest-|entry| coordinate positive)
    for (int j = 0; j < p1.cols(); ++j) {
        int arg = 0;
        for (int i = 1; i < p1.rows(); ++i)
            if (std::abs(p1(i, j)) > std::abs(p1(arg, j))) arg = i;
        if (p1(arg, j) < 0.0) p1.scale_column(j, -1.0);
    }
    const Matrix p2 = multiply(beta, inverse_sqrt_spd(multiply_at_b(beta, beta)));
    Matrix p(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m - k; ++j) p(i, j) = p1(i, j);
        for (int j = 0; j < k; ++j) p(i, m - k + j) = p2(i, j);
    }
    return p;
}

MatrixTimeSeries idio_path_from_innovations(const std::vector<Matrix>& raw,
                                            const IdioConfig& idio) {
    if (raw.empty()) throw Error(ErrorCode::EmptySeries, "idio path: no innovations");
    const int p1 = raw.front().rows();
    const int p2 = raw.front().cols();

    auto toeplitz_chol = [](int p, double rho) {
        Matrix gamma(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) gamma(i, j) = std::pow(rho, std::abs(i - j));
        return cholesky_lower(gamma);
    };
    const bool correlated = idio.rho_cross != 0.0;
    Matrix l_row = correlated ? toeplitz_chol(p1, idio.rho_cross) : Matrix::identity(p1);
    Matrix l_col = correlated ? toeplitz_chol(p2, idio.rho_cross) : Matrix::identity(p2);

    Matrix e(p1, p2); // E_0 = 0
    std::vector<Matrix> out;
    out.reserve(raw.size());
    for (const Matrix& xi : raw) {
        Matrix n = correlated ? multiply_a_bt(multiply(l_row, xi), l_col) : xi;
        if (idio.scale != 1.0) n *= idio.scale;
        for (int i = 0; i < p1; ++i)
            for (int j = 0; j < p2; ++j) {
                const bool nonstationary = i < idio.s_row && j < idio.s_col;
                e(i, j) = (nonstationary ? 1.0 : idio.ar_coef) * e(i, j) + n(i, j);
            }
        out.push_back(e);
    }
    return MatrixTimeSeries(std::move(out));
}

MatrixTimeSeries gen_idio(int T, int p1, int p2, const IdioConfig& idio, Rng& rng) {
    std::vector<Matrix> raw;
    raw.reserve(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
        Matrix xi(p1, p2);
        for (int i = 0; i < p1; ++i)
            for (int j = 0; j < p2; ++j) xi(i, j) = rng.next_normal();
        raw.push_back(std::move(xi));
    }
    return idio_path_from_innovations(raw, idio);
}

DgpTruth assemble(Matrix r_loading, Matrix c_loading, Matrix u_r, Matrix v_c,
                  std::vector<double> b_r, std::vector<double> b_c, MatrixTimeSeries f,
                  MatrixTimeSeries e, DgpConfig config) {
    if (f.length() != e.length())
        throw Error(ErrorCode::ShapeMismatch, "assemble: factor/error lengths differ");
    if (r_loading.cols() != f.rows() || c_loading.cols() != f.cols())
        throw Error(ErrorCode::ShapeMismatch, "assemble: loading/factor shapes mismatch");
    if (r_loading.rows() != e.rows() || c_loading.rows() != e.cols())
        throw Error(ErrorCode::ShapeMismatch, "assemble: loading/error shapes mismatch");
    std::vector<Matrix> x;
    x.reserve(static_cast<size_t>(f.length()));
    for (int t = 0; t < f.length(); ++t)
        x.push_back(multiply_a_bt(multiply(r_loading, f[t]), c_loading) + e[t]);
    DgpTruth truth;
    truth.R = std::move(r_loading);
    truth.C = std::move(c_loading);
    truth.U_R = std::move(u_r);
    truth.V_C = std::move(v_c);
    truth.B_R = std::move(b_r);
    truth.B_C = std::move(b_c);
    truth.F = std::move(f);
    truth.E = std::move(e);
    truth.X = MatrixTimeSeries(std::move(x));
    truth.config = std::move(config);
    return truth;
}

DgpTruth generate(const DgpConfig& config) {
    validate(config);
    if (config.factor_kind == FactorKind::Cointegrated) check_ecm_stability(config.ecm);
    Rng rng(config.seed);

    auto [r_loading, u_r] = gen_loadings(config.p1, config.r1, config.strengths_row, rng);
    auto [c_loading, v_c] = gen_loadings(config.p2, config.r2, config.strengths_col, rng);

    MatrixTimeSeries f = config.factor_kind == FactorKind::FullRankI1
                             ? gen_factors_i1(config.T, config.r1, config.r2, config.ar_u, rng)
                             : gen_factors_ecm(config.T, config.ecm, rng);
    MatrixTimeSeries e = gen_idio(config.T, config.p1, config.p2, config.idio, rng);

    std::vector<double> b_r(static_cast<size_t>(config.r1));
    std::vector<double> b_c(static_cast<size_t>(config.r2));
    for (int k = 0; k < config.r1; ++k)
        b_r[static_cast<size_t>(k)] = std::pow(config.p1, config.strengths_row[static_cast<size_t>(k)] / 2.0);
    for (int k = 0; k < config.r2; ++k)
        b_c[static_cast<size_t>(k)] = std::pow(config.p2, config.strengths_col[static_cast<size_t>(k)] / 2.0);

    return assemble(std::move(r_loading), std::move(c_loading), std::move(u_r), std::move(v_c),
                    std::move(b_r), std::move(b_c), std::move(f), std::move(e), config);
}

} // namespace mfts
