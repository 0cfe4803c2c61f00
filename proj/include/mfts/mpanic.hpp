#ifndef MFTS_MPANIC_HPP
#define MFTS_MPANIC_HPP

#include <utility>

#include "mfts/mpca.hpp"

namespace mfts {

// Sample covariances of the first-differenced series. The T-1 available
// differences are summed and divided by T, matching the estimator's
// displayed normalizer; the (T-1)/T gap only rescales eigenvalues.
std::pair<Matrix, Matrix> diff_covariances(const MatrixTimeSeries& x);

// mPANIC: loadings and factor counts from the eigenanalysis of the
// differenced covariances; factor levels recovered from the undifferenced
// (optionally demeaned) series with the differenced-spectrum normalizers.
FactorFit fit_mpanic(const MatrixTimeSeries& x, const FitConfig& config = {});

} // namespace mfts

#endif
