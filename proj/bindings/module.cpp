#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfts/baseline.hpp"
#include "mfts/metrics.hpp"
#include "mfts/mpanic.hpp"

namespace py = pybind11;
using namespace mfts;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix matrix_from_numpy(const DoubleArray& a) {
    if (a.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "expected a 2-d array");
    const auto r = static_cast<int>(a.shape(0));
    const auto c = static_cast<int>(a.shape(1));
    std::vector<double> entries(a.data(), a.data() + static_cast<size_t>(r) * c);
    return Matrix(r, c, std::move(entries));
}

MatrixTimeSeries series_from_numpy(const DoubleArray& a) {
    if (a.ndim() != 3) throw Error(ErrorCode::ShapeMismatch, "expected a (T, p1, p2) array");
    const auto t_len = static_cast<int>(a.shape(0));
    const auto p1 = static_cast<int>(a.shape(1));
    const auto p2 = static_cast<int>(a.shape(2));
    std::vector<Matrix> data;
    data.reserve(static_cast<size_t>(t_len));
    const double* ptr = a.data();
    const size_t step = static_cast<size_t>(p1) * p2;
    for (int t = 0; t < t_len; ++t)
        data.emplace_back(p1, p2, std::vector<double>(ptr + t * step, ptr + (t + 1) * step));
    return MatrixTimeSeries(std::move(data));
}

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

py::array_t<double> to_numpy(const MatrixTimeSeries& s) {
    py::array_t<double> out({s.length(), s.rows(), s.cols()});
    double* ptr = out.mutable_data();
    for (int t = 0; t < s.length(); ++t)
        ptr = std::copy(s[t].data().begin(), s[t].data().end(), ptr);
    return out;
}

Normalization parse_normalization(const std::string& name) {
    if (name == "row") return Normalization::RowLambda;
    if (name == "col") return Normalization::ColLambda;
    if (name == "sum") return Normalization::SumLambda;
    throw Error(ErrorCode::ParseError, "normalization must be row|col|sum");
}

FitConfig make_fit_config(int r1, int r2, int k1, int k2, const std::string& norm, bool demean) {
    FitConfig config;
    if (r1 > 0) config.r1 = r1;
    if (r2 > 0) config.r2 = r2;
    config.K1 = k1;
    config.K2 = k2;
    config.normalization = parse_normalization(norm);
    config.demean = demean;
    return config;
}

py::dict fit_to_dict(const FactorFit& fit) {
    py::dict out;
    out["method"] = method_name(fit.method);
    out["r1"] = fit.r1;
    out["r2"] = fit.r2;
    out["R_hat"] = to_numpy(fit.R_hat);
    out["C_hat"] = to_numpy(fit.C_hat);
    out["F_hat"] = to_numpy(fit.F_hat);
    out["row_eigvals"] = fit.row_eigvals;
    out["col_eigvals"] = fit.col_eigvals;
    out["normalization"] = normalization_name(fit.normalization);
    out["demeaned"] = fit.demeaned;
    return out;
}

DgpConfig make_dgp_config(int T, int p1, int p2, int r1, int r2, const std::string& factors,
                          double ar_u, std::vector<double> strengths_row,
                          std::vector<double> strengths_col, double ar_e, double rho_cross,
                          int s_row, int s_col, double noise_scale, uint64_t seed) {
    DgpConfig config;
    config.T = T;
    config.p1 = p1;
    config.p2 = p2;
    config.r1 = r1;
    config.r2 = r2;
    if (factors == "i1") {
        config.factor_kind = FactorKind::FullRankI1;
    } else if (factors == "ecm") {
        config.factor_kind = FactorKind::Cointegrated;
        if (r1 != 2 || r2 != 2)
            throw Error(ErrorCode::ShapeMismatch,
                        "the built-in ECM coefficients are for r1 = r2 = 2");
        config.ecm.alpha1 = Matrix{{-0.1}, {0.1}};
        config.ecm.beta1 = Matrix{{1.0}, {-1.0}};
        config.ecm.alpha2 = Matrix{{0.1}, {-0.1}};
        config.ecm.beta2 = Matrix{{1.0}, {-1.0}};
    } else {
        throw Error(ErrorCode::ParseError, "factors must be i1|ecm");
    }
    config.ar_u = ar_u;
    config.strengths_row = strengths_row.empty()
                               ? std::vector<double>(static_cast<size_t>(r1), 1.0)
                               : std::move(strengths_row);
    config.strengths_col = strengths_col.empty()
                               ? std::vector<double>(static_cast<size_t>(r2), 1.0)
                               : std::move(strengths_col);
    config.idio.ar_coef = ar_e;
    config.idio.rho_cross = rho_cross;
    config.idio.s_row = s_row;
    config.idio.s_col = s_col;
    config.idio.scale = noise_scale;
    config.seed = seed;
    return config;
}

} // namespace

PYBIND11_MODULE(_mfts, m) {
    m.doc() = "Factor models for nonstationary matrix-valued time series (mPCA / mPANIC)";

    py::register_exception<Error>(m, "MftsError");

    m.def(
        "simulate",
        [](int T, int p1, int p2, int r1, int r2, const std::string& factors, double ar_u,
           std::vector<double> strengths_row, std::vector<double> strengths_col, double ar_e,
           double rho_cross, int s_row, int s_col, double noise_scale, uint64_t seed) {
            const DgpTruth truth = generate(make_dgp_config(
                T, p1, p2, r1, r2, factors, ar_u, std::move(strengths_row),
                std::move(strengths_col), ar_e, rho_cross, s_row, s_col, noise_scale, seed));
            py::dict out;
            out["X"] = to_numpy(truth.X);
            out["F"] = to_numpy(truth.F);
            out["E"] = to_numpy(truth.E);
            out["R"] = to_numpy(truth.R);
            out["C"] = to_numpy(truth.C);
            out["U_R"] = to_numpy(truth.U_R);
            out["V_C"] = to_numpy(truth.V_C);
            out["seed"] = truth.config.seed;
            return out;
        },
        py::arg("T") = 100, py::arg("p1") = 30, py::arg("p2") = 30, py::arg("r1") = 2,
        py::arg("r2") = 2, py::arg("factors") = "i1", py::arg("ar_u") = 0.3,
        py::arg("strengths_row") = std::vector<double>{},
        py::arg("strengths_col") = std::vector<double>{}, py::arg("ar_e") = 0.3,
        py::arg("rho_cross") = 0.5, py::arg("s_row") = 0, py::arg("s_col") = 0,
        py::arg("noise_scale") = 1.0, py::arg("seed") = 20240601,
        "Draw one panel from the simulation design; returns X, truth factors, "
        "loadings and the orthonormal loading bases.");

    m.def(
        "fit_mpca",
        [](const DoubleArray& x, int r1, int r2, int k1, int k2, const std::string& norm,
           bool demean) {
            return fit_to_dict(
                fit_mpca(series_from_numpy(x), make_fit_config(r1, r2, k1, k2, norm, demean)));
        },
        py::arg("x"), py::arg("r1") = 0, py::arg("r2") = 0, py::arg("k1") = 0, py::arg("k2") = 0,
        py::arg("normalization") = "row", py::arg("demean") = false,
        "mPCA fit of a (T, p1, p2) panel; r = 0 selects by the eigenvalue ratio criterion.");

    m.def(
        "fit_mpanic",
        [](const DoubleArray& x, int r1, int r2, int k1, int k2, const std::string& norm,
           bool demean) {
            return fit_to_dict(
                fit_mpanic(series_from_numpy(x), make_fit_config(r1, r2, k1, k2, norm, demean)));
        },
        py::arg("x"), py::arg("r1") = 0, py::arg("r2") = 0, py::arg("k1") = 0, py::arg("k2") = 0,
        py::arg("normalization") = "row", py::arg("demean") = false,
        "mPANIC fit: loadings from first differences, factor levels recovered afterwards.");

    m.def(
        "fit_vectorized",
        [](const DoubleArray& x, int r, int k) {
            const VectorizedFit fit = fit_vectorized(series_from_numpy(x), r, k);
            py::dict out;
            out["loadings"] = to_numpy(fit.loadings);
            out["factors"] = to_numpy(fit.factors);
            out["eigvals"] = fit.eigvals;
            out["r_hat"] = fit.r_hat;
            return out;
        },
        py::arg("x"), py::arg("r") = 0, py::arg("k") = 0,
        "Vectorized one-sided PCA baseline (flattens each observation).");

    m.def(
        "ratio_criterion",
        [](const std::vector<double>& eigvals, int K) {
            const RatioSelection sel = ratio_criterion(eigvals, K);
            return py::make_tuple(sel.r_hat, sel.ratios);
        },
        py::arg("eigvals"), py::arg("K"),
        "Eigenvalue ratio criterion; returns (r_hat, ratios).");

    m.def(
        "projection_distance",
        [](const DoubleArray& a, const DoubleArray& b) {
            return projection_distance(matrix_from_numpy(a), matrix_from_numpy(b));
        },
        py::arg("a"), py::arg("b"),
        "Frobenius distance between the projections onto the column spans.");

    m.def(
        "factor_space_distance",
        [](const DoubleArray& f_hat, const DoubleArray& f_true) {
            return factor_space_distance(series_from_numpy(f_hat), series_from_numpy(f_true));
        },
        py::arg("f_hat"), py::arg("f_true"),
        "Path-space subspace distance between two factor series.");

    m.def(
        "common_components",
        [](const DoubleArray& x, const DoubleArray& r_hat, const DoubleArray& c_hat) {
            return to_numpy(common_components(series_from_numpy(x), matrix_from_numpy(r_hat),
                                              matrix_from_numpy(c_hat)));
        },
        py::arg("x"), py::arg("r_hat"), py::arg("c_hat"),
        "Common-component series R̂ (R̂ᵀ X_t Ĉ) Ĉᵀ.");
}
