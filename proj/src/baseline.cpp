#include "mfts/baseline.hpp"

#include <cmath>
#include <string>

namespace mfts {

namespace {

void apply_sign_convention(Matrix& v) {
    for (int j = 0; j < v.cols(); ++j) {
        int arg = 0;
        for (int i = 1; i < v.rows(); ++i)
            if (std::abs(v(i, j)) > std::abs(v(arg, j))) arg = i;
        if (v(arg, j) < 0.0) v.scale_column(j, -1.0);
    }
}

} // namespace

VectorizedFit fit_vectorized(const MatrixTimeSeries& x, int r, int K) {
    const int dim = x.rows() * x.cols();
    if (dim > 2000)
        throw Error(ErrorCode::DimensionGuard,
                    "fit_vectorized: p1*p2 = " + std::to_string(dim) + " exceeds the 2000 guard");
    if (x.length() < 2) throw Error(ErrorCode::TooShort, "fit_vectorized: need T >= 2");
    if (r < 0 || r > dim)
        throw Error(ErrorCode::ShapeMismatch, "fit_vectorized: r out of range");

    const int t_len = x.length();
    Matrix stack(dim, t_len); // columns are vec(X_t)
    for (int t = 0; t < t_len; ++t) {
        const std::vector<double> v = x[t].vec();
        for (int i = 0; i < dim; ++i) stack(i, t) = v[static_cast<size_t>(i)];
    }

    VectorizedFit fit;
    if (dim <= t_len) {
        // dense route on the dim x dim covariance
        Matrix cov = multiply_a_bt(stack, stack);
        cov *= 1.0 / t_len;
        EigenSystem es = sym_eig(cov);
        fit.eigvals = clamp_nonnegative(std::move(es.values));
        fit.r_hat = dim >= 2 ? ratio_criterion(fit.eigvals, default_ratio_bound(K, dim)).r_hat
                             : 1; // no valid ratio bound exists at dim 1
        if (r == 0) r = fit.r_hat;
        fit.loadings = es.vectors.leading_columns(r);
    } else {
        // rank <= T: the T x T Gram matrix carries the same nonzero spectrum,
        // with eigenvectors recovered as S w / sqrt(T lambda)
        Matrix gram = multiply_at_b(stack, stack);
        gram *= 1.0 / t_len;
        EigenSystem es = sym_eig(gram);
        const std::vector<double> gram_vals = clamp_nonnegative(std::move(es.values));
        fit.eigvals.assign(static_cast<size_t>(dim), 0.0);
        for (int k = 0; k < t_len; ++k) fit.eigvals[static_cast<size_t>(k)] = gram_vals[static_cast<size_t>(k)];
        fit.r_hat = ratio_criterion(fit.eigvals, default_ratio_bound(K, dim)).r_hat;
        if (r == 0) r = fit.r_hat;
        for (int k = 0; k < r; ++k)
            if (gram_vals[static_cast<size_t>(k)] <= 1e-12 * gram_vals.front())
                throw Error(ErrorCode::DegenerateEigenvalue,
                            "fit_vectorized: requested r exceeds the numerical rank");
        Matrix weights = es.vectors.leading_columns(r);
        for (int k = 0; k < r; ++k)
            weights.scale_column(k, 1.0 / std::sqrt(t_len * gram_vals[static_cast<size_t>(k)]));
        fit.loadings = multiply(stack, weights);
        apply_sign_convention(fit.loadings);
    }

    std::vector<Matrix> factors;
    factors.reserve(static_cast<size_t>(t_len));
    for (int t = 0; t < t_len; ++t) {
        Matrix f(r, 1);
        for (int k = 0; k < r; ++k) {
            double s = 0.0;
            for (int i = 0; i < dim; ++i) s += fit.loadings(i, k) * stack(i, t);
            f(k, 0) = s;
        }
        factors.push_back(std::move(f));
    }
    fit.factors = MatrixTimeSeries(std::move(factors));
    return fit;
}

} // namespace mfts
