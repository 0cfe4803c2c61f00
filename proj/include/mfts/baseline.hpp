#ifndef MFTS_BASELINE_HPP
#define MFTS_BASELINE_HPP

#include <vector>

#include "mfts/mpca.hpp"

namespace mfts {

struct VectorizedFit {
    Matrix loadings; // p1*p2 x r
    MatrixTimeSeries factors; // r x 1 per t, by projection
    std::vector<double> eigvals;
    int r_hat = 0;
};

// Classical one-sided PCA on the flattened observations: eigenanalysis of
// (1/T) sum vec(X_t) vec(X_t)ᵀ (column-stacking vec). Guarded at
// p1*p2 <= 2000 to keep the dense eigensolve at desk scale. r = 0 takes the
// ratio-selected count.
VectorizedFit fit_vectorized(const MatrixTimeSeries& x, int r, int K = 0);

} // namespace mfts

#endif
