#include <doctest.h>

#include <cmath>

#include "mfts/dgp.hpp"
#include "mfts/linalg.hpp"
#include "mfts/metrics.hpp"
#include "test_helpers.hpp"

using namespace mfts;
using test::bit_equal;
using test::frob_diff;

namespace {

EcmParams paper_ecm() {
    EcmParams ecm;
    ecm.alpha1 = Matrix{{-0.1}, {0.1}};
    ecm.beta1 = Matrix{{1.0}, {-1.0}};
    ecm.alpha2 = Matrix{{0.1}, {-0.1}};
    ecm.beta2 = Matrix{{1.0}, {-1.0}};
    return ecm;
}

std::vector<Matrix> zero_innovations(int t_len, int r1, int r2) {
    return std::vector<Matrix>(static_cast<size_t>(t_len), Matrix(r1, r2));
}

} // namespace

TEST_CASE("gen_loadings column norms follow the strength schedule") {
    Rng rng(derive_stream({45, 1}));
    auto [loading, u] = gen_loadings(100, 2, {1.0, 0.6}, rng);
    CHECK(frob_diff(multiply_at_b(u, u), Matrix::identity(2)) < 1e-10);
    double n0 = 0.0, n1 = 0.0;
    for (int i = 0; i < 100; ++i) {
        n0 += loading(i, 0) * loading(i, 0);
        n1 += loading(i, 1) * loading(i, 1);
    }
    CHECK(std::sqrt(n0) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::sqrt(n1) == doctest::Approx(std::pow(100.0, 0.3)).epsilon(1e-12));

    auto [strong, u2] = gen_loadings(36, 3, {1.0, 1.0, 1.0}, rng);
    (void)u2;
    for (int k = 0; k < 3; ++k) {
        double n = 0.0;
        for (int i = 0; i < 36; ++i) n += strong(i, k) * strong(i, k);
        CHECK(std::sqrt(n) == doctest::Approx(6.0).epsilon(1e-12));
    }
}

TEST_CASE("loadings_from_orthonormal with a planted identity") {
    auto [loading, u] = loadings_from_orthonormal(Matrix::identity(4), {1.0, 0.5, 0.5, 0.25});
    CHECK(bit_equal(u, Matrix::identity(4)));
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            if (i != k) CHECK(loading(i, k) == 0.0);
    CHECK(loading(0, 0) == doctest::Approx(2.0));            // 4^{1/2}
    CHECK(loading(1, 1) == doctest::Approx(std::sqrt(2.0))); // 4^{1/4}
    CHECK(loading(3, 3) == doctest::Approx(std::pow(4.0, 0.125)));
}

TEST_CASE("gen_factors_i1 basics") {
    // forced-zero innovations keep the path at zero
    const MatrixTimeSeries still = i1_path_from_innovations(zero_innovations(6, 2, 3), 0.3);
    for (int t = 0; t < 6; ++t) CHECK(still[t].max_abs() == 0.0);

    // first step identity: F_1 = eps_1 (u_0 = 0, F_0 = 0)
    const uint64_t key = derive_stream({45, 2});
    Rng rng(key);
    const MatrixTimeSeries f = gen_factors_i1(5, 2, 2, 0.3, rng);
    Rng replay(key);
    Matrix eps1(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) eps1(i, j) = replay.next_normal();
    CHECK(bit_equal(f[0], eps1));
}

TEST_CASE("gen_factors_i1 variance grows like t when phi_u = 0") {
    const int paths = 10000;
    const int t_len = 15;
    std::vector<double> sum_sq(static_cast<size_t>(t_len), 0.0);
    for (int rep = 0; rep < paths; ++rep) {
        Rng rng(derive_stream({45, 3, static_cast<uint64_t>(rep)}));
        const MatrixTimeSeries f = gen_factors_i1(t_len, 1, 1, 0.0, rng);
        for (int t = 0; t < t_len; ++t) sum_sq[static_cast<size_t>(t)] += f[t](0, 0) * f[t](0, 0);
    }
    for (int t : {5, 10, 15}) {
        const double var = sum_sq[static_cast<size_t>(t - 1)] / paths;
        CHECK(var == doctest::Approx(static_cast<double>(t)).epsilon(0.05));
    }
}

TEST_CASE("gen_factors_ecm zero-noise fixed point and random-walk degeneracy") {
    const EcmParams ecm = paper_ecm();
    const MatrixTimeSeries still = ecm_path_from_innovations(zero_innovations(8, 2, 2), ecm);
    for (int t = 0; t < 8; ++t) CHECK(still[t].max_abs() == 0.0);

    // alpha = 0 degenerates to the pure random walk, pathwise
    EcmParams zero_adjust = ecm;
    zero_adjust.alpha1 = Matrix(2, 1);
    zero_adjust.alpha2 = Matrix(2, 1);
    Rng rng(derive_stream({45, 4}));
    std::vector<Matrix> innovations;
    for (int t = 0; t < 10; ++t) innovations.push_back(test::random_matrix(rng, 2, 2));
    const MatrixTimeSeries walk = ecm_path_from_innovations(innovations, zero_adjust);
    const MatrixTimeSeries i1 = i1_path_from_innovations(innovations, 0.0);
    for (int t = 0; t < 10; ++t) CHECK(bit_equal(walk[t], i1[t]));

    // gen_factors_ecm accepts the degenerate adjustment without a stability error
    Rng rng2(derive_stream({45, 5}));
    CHECK_NOTHROW(gen_factors_ecm(4, zero_adjust, rng2));
}

TEST_CASE("gen_factors_ecm stability validation") {
    CHECK_NOTHROW(check_ecm_stability(paper_ecm()));

    EcmParams unstable;
    unstable.alpha1 = Matrix{{1.0}, {0.0}};
    unstable.beta1 = Matrix{{1.0}, {0.0}};
    unstable.alpha2 = Matrix{{1.0}, {0.0}};
    unstable.beta2 = Matrix{{1.0}, {0.0}};
    CHECK_THROWS_WITH_AS(check_ecm_stability(unstable), doctest::Contains("UnstableECM"), Error);
}

TEST_CASE("cointegration_rotation axis case and construction identities") {
    // beta = e1 in dimension 2 (r1 = 2, r2 = 1)
    const Matrix p = cointegration_rotation(Matrix{{1.0}, {0.0}}, Matrix{{1.0}});
    CHECK(p.rows() == 2);
    CHECK(p(0, 1) == doctest::Approx(1.0)); // P2 = e1
    CHECK(std::abs(p(1, 1)) < 1e-14);
    CHECK(p(1, 0) == doctest::Approx(1.0)); // P1 = e2
    CHECK(std::abs(p(0, 0)) < 1e-14);

    const Matrix pp = cointegration_rotation(paper_ecm().beta1, paper_ecm().beta2);
    CHECK(frob_diff(multiply_at_b(pp, pp), Matrix::identity(4)) < 1e-10);
    // last column is the normalized beta; the leading block is orthogonal to it
    const Matrix beta = kronecker(paper_ecm().beta2, paper_ecm().beta1);
    Matrix p2(4, 1);
    for (int i = 0; i < 4; ++i) p2(i, 0) = pp(i, 3);
    CHECK(multiply_at_b(beta, p2).max_abs() == doctest::Approx(2.0)); // betaᵀ beta / |beta|
    for (int j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (int i = 0; i < 4; ++i) dot += beta(i, 0) * pp(i, j);
        CHECK(std::abs(dot) < 1e-10);
    }
}

TEST_CASE("ECM paths separate I(1) and I(0) directions at T = 5000") {
    const EcmParams ecm = paper_ecm();
    const Matrix p = cointegration_rotation(ecm.beta1, ecm.beta2);
    const int t_len = 5000;
    const int paths = 200;

    // cross-path mean of squared rotated coordinates = sample variance at t
    std::vector<std::vector<double>> var_t(4, std::vector<double>(static_cast<size_t>(t_len), 0.0));
    for (int rep = 0; rep < paths; ++rep) {
        Rng rng(derive_stream({45, 6, static_cast<uint64_t>(rep)}));
        const MatrixTimeSeries f = gen_factors_ecm(t_len, ecm, rng);
        for (int t = 0; t < t_len; ++t) {
            const std::vector<double> v = f[t].vec();
            for (int j = 0; j < 4; ++j) {
                double s = 0.0;
                for (int i = 0; i < 4; ++i) s += p(i, j) * v[static_cast<size_t>(i)];
                var_t[static_cast<size_t>(j)][static_cast<size_t>(t)] += s * s / paths;
            }
        }
    }
    const auto slope_of = [&](int j) {
        std::vector<double> sqrt_var(static_cast<size_t>(t_len));
        for (int t = 0; t < t_len; ++t)
            sqrt_var[static_cast<size_t>(t)] = std::sqrt(var_t[static_cast<size_t>(j)][static_cast<size_t>(t)]);
        return squared_growth_slope(sqrt_var, t_len / 2, t_len);
    };
    for (int j = 0; j < 3; ++j) CHECK(slope_of(j) > 0.5); // I(1): variance rate ~1 per step
    CHECK(std::abs(slope_of(3)) < 0.02);                  // cointegrated direction is bounded
}

TEST_CASE("gen_idio hooks and the iid case") {
    IdioConfig idio;
    idio.ar_coef = 0.3;
    idio.rho_cross = 0.5;
    const MatrixTimeSeries still = idio_path_from_innovations(
        std::vector<Matrix>(5, Matrix(3, 4)), idio);
    for (int t = 0; t < 5; ++t) CHECK(still[t].max_abs() == 0.0);

    IdioConfig plain;
    plain.ar_coef = 0.0;
    plain.rho_cross = 0.0;
    double sum_sq = 0.0;
    int n = 0;
    for (int rep = 0; rep < 20; ++rep) {
        Rng rng(derive_stream({45, 7, static_cast<uint64_t>(rep)}));
        const MatrixTimeSeries e = gen_idio(20, 5, 5, plain, rng);
        for (int t = 0; t < 20; ++t)
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) {
                    sum_sq += e[t](i, j) * e[t](i, j);
                    ++n;
                }
    }
    CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gen_idio matches the AR(1) and Toeplitz moment targets") {
    IdioConfig idio; // phi_e = 0.3, rho_cross = 0.5 defaults
    const int t_len = 500;
    const int reps = 13;
    double lag_num = 0.0, lag_den = 0.0, cross_num = 0.0, cross_den = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        Rng rng(derive_stream({45, 8, static_cast<uint64_t>(rep)}));
        const MatrixTimeSeries e = gen_idio(t_len, 4, 4, idio, rng);
        for (int t = 100; t + 1 < t_len; ++t) // discard the e_0 = 0 warmup
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    lag_num += e[t](i, j) * e[t + 1](i, j);
                    lag_den += e[t](i, j) * e[t](i, j);
                    if (j + 1 < 4) {
                        cross_num += e[t](i, j) * e[t](i, j + 1);
                        cross_den += 0.5 * (e[t](i, j) * e[t](i, j) +
                                            e[t](i, j + 1) * e[t](i, j + 1));
                    }
                }
    }
    CHECK(lag_num / lag_den == doctest::Approx(0.3).epsilon(0.17));   // within 0.05 absolute
    CHECK(cross_num / cross_den == doctest::Approx(0.5).epsilon(0.1)); // within 0.05 absolute
}

TEST_CASE("gen_idio nonstationary block grows while the rest stays bounded") {
    IdioConfig idio;
    idio.s_row = 2;
    idio.s_col = 2;
    const int t_len = 600;
    const int paths = 150;
    double block_early = 0.0, block_late = 0.0, off_early = 0.0, off_late = 0.0;
    for (int rep = 0; rep < paths; ++rep) {
        Rng rng(derive_stream({45, 9, static_cast<uint64_t>(rep)}));
        const MatrixTimeSeries e = gen_idio(t_len, 4, 4, idio, rng);
        block_early += e[299](0, 0) * e[299](0, 0);
        block_late += e[599](0, 0) * e[599](0, 0);
        off_early += e[299](3, 3) * e[299](3, 3);
        off_late += e[599](3, 3) * e[599](3, 3);
    }
    CHECK(block_late / block_early > 1.5); // ~2 for a random walk
    CHECK(off_late / off_early < 1.3);     // stationary
}

TEST_CASE("assemble identity, rank bound, and zero-factor case") {
    DgpConfig config;
    config.T = 12;
    config.p1 = 8;
    config.p2 = 7;
    config.strengths_row = {1.0, 1.0};
    config.strengths_col = {1.0, 1.0};
    config.seed = derive_stream({45, 10});
    const DgpTruth truth = generate(config);

    for (int t = 0; t < config.T; ++t) {
        const Matrix z = multiply_a_bt(multiply(truth.R, truth.F[t]), truth.C);
        CHECK(bit_equal(truth.X[t], z + truth.E[t]));
    }
    CHECK(frob_diff(multiply_at_b(truth.U_R, truth.U_R), Matrix::identity(2)) < 1e-10);
    CHECK(frob_diff(multiply_at_b(truth.V_C, truth.V_C), Matrix::identity(2)) < 1e-10);

    // E = 0: each X_t has rank <= min(r1, r2)
    const MatrixTimeSeries zero_e(std::vector<Matrix>(12, Matrix(8, 7)));
    const DgpTruth noiseless =
        assemble(truth.R, truth.C, truth.U_R, truth.V_C, truth.B_R, truth.B_C, truth.F, zero_e,
                 config);
    for (int t = 0; t < 3; ++t) {
        const EigenSystem es = sym_eig(multiply_a_bt(noiseless.X[t], noiseless.X[t]));
        for (size_t k = 2; k < es.values.size(); ++k)
            CHECK(std::abs(es.values[k]) < 1e-10 * (1.0 + es.values[0]));
    }

    // F = 0: X equals E
    const MatrixTimeSeries zero_f(std::vector<Matrix>(12, Matrix(2, 2)));
    const DgpTruth pure_noise =
        assemble(truth.R, truth.C, truth.U_R, truth.V_C, truth.B_R, truth.B_C, zero_f, truth.E,
                 config);
    for (int t = 0; t < 12; ++t) CHECK(bit_equal(pure_noise.X[t], truth.E[t]));
}

TEST_CASE("generate is bit-deterministic") {
    DgpConfig config;
    config.T = 20;
    config.p1 = 10;
    config.p2 = 9;
    config.strengths_row = {1.0, 0.8};
    config.strengths_col = {1.0, 0.8};
    config.seed = 987654321;
    const DgpTruth a = generate(config);
    const DgpTruth b = generate(config);
    for (int t = 0; t < config.T; ++t) CHECK(bit_equal(a.X[t], b.X[t]));
    CHECK(bit_equal(a.R, b.R));
    CHECK(bit_equal(a.C, b.C));
}

TEST_CASE("config validation rejects bad inputs") {
    DgpConfig config;
    config.strengths_row = {1.0, 2.0}; // out of (0,1]
    config.strengths_col = {1.0, 1.0};
    CHECK_THROWS_AS(validate(config), Error);
    config.strengths_row = {1.0};
    CHECK_THROWS_AS(validate(config), Error);
    config.strengths_row = {1.0, 1.0};
    CHECK_NOTHROW(validate(config));
    config.idio.s_row = 99;
    CHECK_THROWS_AS(validate(config), Error);
}
