#include "mfts/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mfts {

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

// flips each column so its largest-|entry| coordinate is positive
void apply_sign_convention(Matrix& v) {
    for (int j = 0; j < v.cols(); ++j) {
        int arg = 0;
        double best = std::abs(v(0, j));
        for (int i = 1; i < v.rows(); ++i) {
            const double m = std::abs(v(i, j));
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        if (v(arg, j) < 0.0) v.scale_column(j, -1.0);
    }
}

} // namespace

EigenSystem sym_eig(const Matrix& input) {
    if (input.rows() != input.cols())
        throw Error(ErrorCode::ShapeMismatch, "sym_eig: matrix must be square");
    if (!input.all_finite()) throw Error(ErrorCode::NonFinite, "sym_eig: NaN/Inf in input");
    const int n = input.rows();
    const double sym_tol = 1e-10 * (1.0 + input.max_abs());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(input(i, j) - input(j, i)) > sym_tol)
                throw Error(ErrorCode::NonSymmetric,
                            "sym_eig: asymmetry at (" + std::to_string(i) + "," +
                                std::to_string(j) + ") exceeds tolerance");

    // absorb accumulation rounding before iterating
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));

    Matrix v = Matrix::identity(n);
    const double target = 1e-12 * a.frobenius_norm();
    const int max_sweeps = 100;
    int sweeps = 0;
    while (off_diagonal_norm(a) > target) {
        if (sweeps == max_sweeps)
            throw Error(ErrorCode::NoConvergence,
                        "sym_eig: Jacobi did not converge in " + std::to_string(max_sweeps) +
                            " sweeps");
        ++sweeps;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&a](int lhs, int rhs) { return a(lhs, lhs) > a(rhs, rhs); });

    EigenSystem es;
    es.values.resize(static_cast<size_t>(n));
    es.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        es.values[static_cast<size_t>(j)] = a(order[static_cast<size_t>(j)], order[static_cast<size_t>(j)]);
        for (int i = 0; i < n; ++i) es.vectors(i, j) = v(i, order[static_cast<size_t>(j)]);
    }
    apply_sign_convention(es.vectors);
    return es;
}

namespace {

struct HouseholderQr {
    Matrix a;                  // packed reflectors below the diagonal
    std::vector<double> rdiag; // diagonal of R (signed)
};

HouseholderQr householder_factor(const Matrix& m) {
    HouseholderQr f{m, {}};
    const int p = m.rows();
    const int r = m.cols();
    f.rdiag.resize(static_cast<size_t>(r));
    for (int k = 0; k < r; ++k) {
        double norm = 0.0;
        for (int i = k; i < p; ++i) norm = std::hypot(norm, f.a(i, k));
        if (norm == 0.0) {
            f.rdiag[static_cast<size_t>(k)] = 0.0;
            continue;
        }
        if (f.a(k, k) < 0.0) norm = -norm;
        for (int i = k; i < p; ++i) f.a(i, k) /= norm;
        f.a(k, k) += 1.0;
        for (int j = k + 1; j < r; ++j) {
            double s = 0.0;
            for (int i = k; i < p; ++i) s += f.a(i, k) * f.a(i, j);
            s = -s / f.a(k, k);
            for (int i = k; i < p; ++i) f.a(i, j) += s * f.a(i, k);
        }
        f.rdiag[static_cast<size_t>(k)] = -norm;
    }
    return f;
}

// applies the accumulated reflectors to the leading q_cols of the identity
Matrix form_q(const HouseholderQr& f, int q_cols) {
    const int p = f.a.rows();
    const int r = f.a.cols();
    Matrix q(p, q_cols);
    for (int j = 0; j < q_cols; ++j) q(j, j) = 1.0;
    for (int k = r - 1; k >= 0; --k) {
        if (f.a(k, k) == 0.0) continue;
        for (int j = 0; j < q_cols; ++j) {
            double s = 0.0;
            for (int i = k; i < p; ++i) s += f.a(i, k) * q(i, j);
            s = -s / f.a(k, k);
            for (int i = k; i < p; ++i) q(i, j) += s * f.a(i, k);
        }
    }
    return q;
}

} // namespace

Matrix qr_orthonormalize(const Matrix& m) {
    const int p = m.rows();
    const int r = m.cols();
    if (p < r)
        throw Error(ErrorCode::ShapeMismatch, "qr_orthonormalize: need rows >= cols");
    const double pivot_floor = 1e-12 * m.frobenius_norm();
    HouseholderQr f = householder_factor(m);
    for (int k = 0; k < r; ++k)
        if (std::abs(f.rdiag[static_cast<size_t>(k)]) <= pivot_floor)
            throw Error(ErrorCode::RankDeficient,
                        "qr_orthonormalize: pivot " + std::to_string(k) + " below threshold");
    Matrix q = form_q(f, r);
    for (int k = 0; k < r; ++k)
        if (f.rdiag[static_cast<size_t>(k)] < 0.0) q.scale_column(k, -1.0);
    return q;
}

Matrix orthonormal_complement(const Matrix& b) {
    const int m = b.rows();
    const int k = b.cols();
    if (k >= m)
        throw Error(ErrorCode::ShapeMismatch, "orthonormal_complement: no complement exists");
    const double pivot_floor = 1e-12 * b.frobenius_norm();
    HouseholderQr f = householder_factor(b);
    for (int j = 0; j < k; ++j)
        if (std::abs(f.rdiag[static_cast<size_t>(j)]) <= pivot_floor)
            throw Error(ErrorCode::RankDeficient, "orthonormal_complement: input rank deficient");
    Matrix full = form_q(f, m);
    Matrix out(m, m - k);
    for (int i = 0; i < m; ++i)
        for (int j = k; j < m; ++j) out(i, j - k) = full(i, j);
    return out;
}

Matrix cholesky_lower(const Matrix& a) {
    if (a.rows() != a.cols())
        throw Error(ErrorCode::ShapeMismatch, "cholesky_lower: matrix must be square");
    const int n = a.rows();
    Matrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 0.0)
            throw Error(ErrorCode::NotPositiveDefinite, "cholesky_lower: pivot <= 0");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

Matrix inverse_sqrt_spd(const Matrix& a) {
    EigenSystem es = sym_eig(a);
    const int n = a.rows();
    if (es.values.back() <= 0.0)
        throw Error(ErrorCode::NotPositiveDefinite, "inverse_sqrt_spd: eigenvalue <= 0");
    Matrix scaled = es.vectors;
    for (int j = 0; j < n; ++j) scaled.scale_column(j, 1.0 / std::sqrt(es.values[static_cast<size_t>(j)]));
    return multiply_a_bt(scaled, es.vectors);
}

MatrixTimeSeries difference(const MatrixTimeSeries& x) {
    if (x.length() < 2) throw Error(ErrorCode::TooShort, "difference: need T >= 2");
    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(x.length() - 1));
    for (int t = 0; t + 1 < x.length(); ++t) out.push_back(x[t + 1] - x[t]);
    return MatrixTimeSeries(std::move(out));
}

MatrixTimeSeries demean(const MatrixTimeSeries& x) {
    Matrix mean(x.rows(), x.cols());
    for (int t = 0; t < x.length(); ++t) mean += x[t];
    mean *= 1.0 / x.length();
    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(x.length()));
    for (int t = 0; t < x.length(); ++t) out.push_back(x[t] - mean);
    return MatrixTimeSeries(std::move(out));
}

MatrixTimeSeries cumulative_sum(const Matrix& first, const MatrixTimeSeries& increments) {
    if (first.rows() != increments.rows() || first.cols() != increments.cols())
        throw Error(ErrorCode::ShapeMismatch, "cumulative_sum: shape mismatch");
    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(increments.length() + 1));
    out.push_back(first);
    for (int t = 0; t < increments.length(); ++t) out.push_back(out.back() + increments[t]);
    return MatrixTimeSeries(std::move(out));
}

double spectral_radius(const Matrix& m) {
    if (m.rows() != m.cols())
        throw Error(ErrorCode::ShapeMismatch, "spectral_radius: matrix must be square");
    Matrix a = m;
    double f = a.frobenius_norm();
    if (f == 0.0) return 0.0;
    a *= 1.0 / f;
    double log_scale = std::log(f);
    const int squarings = 40; // n = 2^40
    for (int i = 0; i < squarings; ++i) {
        a = multiply(a, a);
        f = a.frobenius_norm();
        log_scale *= 2.0;
        if (f == 0.0) return 0.0;
        a *= 1.0 / f;
        log_scale += std::log(f);
    }
    return std::exp(log_scale / std::pow(2.0, squarings));
}

} // namespace mfts
