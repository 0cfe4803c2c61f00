#ifndef MFTS_LINALG_HPP
#define MFTS_LINALG_HPP

#include <vector>

#include "mfts/matrix.hpp"

namespace mfts {

// Eigenvalues in descending order; vectors(:,k) is the unit eigenvector for
// values[k]. Sign convention: the entry of largest absolute value in each
// column is positive (first such index wins on exact ties).
struct EigenSystem {
    std::vector<double> values;
    Matrix vectors;
};

// Symmetric eigendecomposition by cyclic Jacobi rotations.
// Input must be square, finite, and symmetric within 1e-10*(1+max|A_ij|);
// it is symmetrized as (A+Aᵀ)/2 before iterating. Convergence: off-diagonal
// Frobenius norm <= 1e-12*||A||_F, capped at 100 sweeps (NoConvergence).
// Equal eigenvalues keep the order produced by the solver (stable sort).
EigenSystem sym_eig(const Matrix& a);

// Thin QR orthonormalization of a p x r matrix (p >= r) via Householder
// reflections. The R-factor diagonal is forced positive so Q is unique.
// Throws RankDeficient when min|R_kk| <= 1e-12*||M||_F.
Matrix qr_orthonormalize(const Matrix& m);

// Orthonormal basis of the orthogonal complement of the column span of the
// full-column-rank m x k matrix b (the trailing columns of a full QR).
Matrix orthonormal_complement(const Matrix& b);

// Lower-triangular Cholesky factor L with L*Lᵀ = A (A symmetric PD).
Matrix cholesky_lower(const Matrix& a);

// Symmetric inverse square root of a small symmetric positive definite matrix.
Matrix inverse_sqrt_spd(const Matrix& a);

// First-order difference: output[t] = X[t+1] - X[t], length T-1. T >= 2.
MatrixTimeSeries difference(const MatrixTimeSeries& x);

// Subtract the entrywise time mean from every element.
MatrixTimeSeries demean(const MatrixTimeSeries& x);

// Partial sums: output[0] = first, output[t] = output[t-1] + increments[t-1].
MatrixTimeSeries cumulative_sum(const Matrix& first, const MatrixTimeSeries& increments);

// Spectral radius of a small square matrix, estimated by repeated squaring
// with Frobenius normalization (Gelfand's formula at n = 2^40). Accurate to
// far better than the 1e-8 margins it is used with.
double spectral_radius(const Matrix& m);

} // namespace mfts

#endif
