#include "mfts/montecarlo.hpp"

#include <atomic>
#include <cstdio>
#include <optional>
#include <sstream>
#include <thread>

#include "mfts/mpanic.hpp"

namespace mfts {

DgpConfig cell_config(const McDesign& design, const McCell& cell, Method method) {
    DgpConfig config = design.base;
    config.T = cell.T;
    config.p1 = cell.p1;
    config.p2 = cell.p2;
    if (!cell.strengths_row.empty()) config.strengths_row = cell.strengths_row;
    if (!cell.strengths_col.empty()) config.strengths_col = cell.strengths_col;
    if (design.couple_dgp_to_method)
        config.factor_kind =
            method == Method::mPCA ? FactorKind::FullRankI1 : FactorKind::Cointegrated;
    return config;
}

namespace {

struct CellFits {
    LoadingEstimate at_true_r;
    RatioSelection row_sel;
    RatioSelection col_sel;
    std::vector<double> row_eigvals;
    std::vector<double> col_eigvals;
};

// one covariance pass + eigendecomposition serves both the selection and the
// true-r fit; bit-identical to calling fit_mpca/fit_mpanic twice
CellFits decompose(const MatrixTimeSeries& x, Method method, int r1_true, int r2_true) {
    Matrix omega_row, omega_col;
    if (method == Method::mPCA) {
        omega_row = row_covariance(x);
        omega_col = col_covariance(x);
    } else {
        auto pair = diff_covariances(x);
        omega_row = std::move(pair.first);
        omega_col = std::move(pair.second);
    }
    CellFits fits;
    fits.at_true_r = loadings_from_covariances(omega_row, omega_col, r1_true, r2_true);
    fits.row_eigvals = fits.at_true_r.row_eigvals;
    fits.col_eigvals = fits.at_true_r.col_eigvals;
    fits.row_sel = ratio_criterion(fits.row_eigvals, default_ratio_bound(0, x.rows()));
    fits.col_sel = ratio_criterion(fits.col_eigvals, default_ratio_bound(0, x.cols()));
    return fits;
}

MatrixTimeSeries factor_series(const MatrixTimeSeries& x, Method method, const Matrix& r_hat,
                               const Matrix& c_hat, const std::vector<double>& row_eigvals,
                               const std::vector<double>& col_eigvals) {
    if (method == Method::mPCA)
        return estimate_factors(x, r_hat, c_hat, row_eigvals, col_eigvals,
                                Normalization::RowLambda);
    return scaled_projection_factors(x, r_hat, c_hat, row_eigvals, col_eigvals,
                                     Normalization::RowLambda);
}

} // namespace

ReplicationScore run_replication(const DgpConfig& config, Method method, uint64_t derived_seed,
                                 bool rmse_on_selected) {
    DgpConfig seeded = config;
    seeded.seed = derived_seed;
    const DgpTruth truth = generate(seeded);
    const CellFits fits = decompose(truth.X, method, config.r1, config.r2);

    ReplicationScore score;
    score.method = method;
    score.r1_hat = fits.row_sel.r_hat;
    score.r2_hat = fits.col_sel.r_hat;
    score.rmse_R = projection_distance(fits.at_true_r.R_hat, truth.U_R);
    score.rmse_C = projection_distance(fits.at_true_r.C_hat, truth.V_C);
    const MatrixTimeSeries f_hat = factor_series(truth.X, method, fits.at_true_r.R_hat,
                                                 fits.at_true_r.C_hat, fits.row_eigvals,
                                                 fits.col_eigvals);
    score.rmse_F = factor_space_distance(f_hat, truth.F);

    if (rmse_on_selected) {
        const CellFits fits_sel = decompose(truth.X, method, score.r1_hat, score.r2_hat);
        score.rmse_R_sel = projection_distance(fits_sel.at_true_r.R_hat, truth.U_R);
        score.rmse_C_sel = projection_distance(fits_sel.at_true_r.C_hat, truth.V_C);
        const MatrixTimeSeries f_sel = factor_series(truth.X, method, fits_sel.at_true_r.R_hat,
                                                     fits_sel.at_true_r.C_hat, fits_sel.row_eigvals,
                                                     fits_sel.col_eigvals);
        score.rmse_F_sel = factor_space_distance(f_sel, truth.F);
    }
    return score;
}

std::vector<McResult> run_design(const McDesign& design, std::vector<McResult>* partial) {
    if (design.cells.empty()) throw Error(ErrorCode::Empty, "run_design: no cells");
    if (design.replications < 1)
        throw Error(ErrorCode::Empty, "run_design: replications must be >= 1");
    const int workers = std::max(1, design.workers);

    std::vector<McResult> results;
    for (size_t ci = 0; ci < design.cells.size(); ++ci) {
        for (size_t mi = 0; mi < design.methods.size(); ++mi) {
            const Method method = design.methods[mi];
            const DgpConfig config = cell_config(design, design.cells[ci], method);
            validate(config);

            const int reps = design.replications;
            std::vector<std::optional<ReplicationScore>> slots(static_cast<size_t>(reps));
            std::vector<std::string> errors(static_cast<size_t>(reps));
            std::atomic<int> next{0};
            auto worker = [&]() {
                for (;;) {
                    const int rep = next.fetch_add(1);
                    if (rep >= reps) return;
                    const uint64_t seed = derive_stream(
                        {design.base_seed, ci, static_cast<uint64_t>(method), static_cast<uint64_t>(rep)});
                    try {
                        slots[static_cast<size_t>(rep)] =
                            run_replication(config, method, seed, design.rmse_on_selected);
                    } catch (const Error& e) {
                        errors[static_cast<size_t>(rep)] = e.what();
                    } catch (const std::exception& e) {
                        errors[static_cast<size_t>(rep)] = std::string("InternalError: ") + e.what();
                    }
                }
            };
            if (workers == 1) {
                worker();
            } else {
                std::vector<std::thread> pool;
                pool.reserve(static_cast<size_t>(workers));
                for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
            }

            McResult res;
            res.cell = design.cells[ci].label;
            res.method = method;
            res.base_seed = design.base_seed;
            std::vector<ReplicationScore> scores;
            scores.reserve(static_cast<size_t>(reps));
            for (int rep = 0; rep < reps; ++rep) {
                if (slots[static_cast<size_t>(rep)]) {
                    scores.push_back(*slots[static_cast<size_t>(rep)]);
                } else {
                    res.failures.push_back("rep " + std::to_string(rep) + ": " +
                                           errors[static_cast<size_t>(rep)]);
                }
            }
            res.excluded = static_cast<int>(res.failures.size());
            if (res.excluded * 100 > reps)
                throw Error(ErrorCode::TooManyFailures,
                            "cell " + res.cell + " (" + method_name(method) + "): " +
                                std::to_string(res.excluded) + "/" + std::to_string(reps) +
                                " replications failed; first: " + res.failures.front());
            if (scores.empty())
                throw Error(ErrorCode::TooManyFailures,
                            "cell " + res.cell + ": all replications failed");
            res.stats = aggregate(scores, config.r1, config.r2);
            res.replications = res.stats.count;
            results.push_back(res);
            if (partial) partial->push_back(std::move(res));
        }
    }
    return results;
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_fixed(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

} // namespace

TableOutput emit_table(const std::vector<McResult>& results) {
    if (results.empty()) throw Error(ErrorCode::Empty, "emit_table: no results");
    const bool with_sel = results.front().stats.rmse_R_sel >= 0.0;

    std::ostringstream csv;
    csv << "cell,method,rmse_R,rmse_C,rmse_F,mean_r1,cp_r1,mean_r2,cp_r2,reps,seed";
    if (with_sel) csv << ",rmse_R_sel,rmse_C_sel,rmse_F_sel";
    csv << "\n";
    for (const auto& r : results) {
        csv << r.cell << ',' << method_name(r.method) << ',' << fmt17(r.stats.rmse_R) << ','
            << fmt17(r.stats.rmse_C) << ',' << fmt17(r.stats.rmse_F) << ','
            << fmt17(r.stats.mean_r1) << ',' << fmt17(r.stats.cp_r1) << ','
            << fmt17(r.stats.mean_r2) << ',' << fmt17(r.stats.cp_r2) << ',' << r.replications
            << ',' << r.base_seed;
        if (with_sel)
            csv << ',' << fmt17(r.stats.rmse_R_sel) << ',' << fmt17(r.stats.rmse_C_sel) << ','
                << fmt17(r.stats.rmse_F_sel);
        csv << "\n";
    }

    std::ostringstream text;
    const char* header =
        "cell                  rmse_R   rmse_C   rmse_F   mean_r1  cp_r1   mean_r2  cp_r2   reps";
    for (Method method : {Method::mPCA, Method::mPANIC}) {
        bool any = false;
        for (const auto& r : results) any = any || r.method == method;
        if (!any) continue;
        text << (method == Method::mPCA ? "Panel A: mPCA estimation" : "Panel B: mPANIC estimation")
             << "\n" << header << "\n";
        for (const auto& r : results) {
            if (r.method != method) continue;
            char line[256];
            std::snprintf(line, sizeof(line), "%-20s %8s %8s %8s %8s %7s %8s %7s %6d",
                          r.cell.c_str(), fmt_fixed(r.stats.rmse_R, 4).c_str(),
                          fmt_fixed(r.stats.rmse_C, 4).c_str(), fmt_fixed(r.stats.rmse_F, 4).c_str(),
                          fmt_fixed(r.stats.mean_r1, 3).c_str(), fmt_fixed(r.stats.cp_r1, 3).c_str(),
                          fmt_fixed(r.stats.mean_r2, 3).c_str(), fmt_fixed(r.stats.cp_r2, 3).c_str(),
                          r.replications);
            text << line << "\n";
            if (r.excluded > 0)
                text << "  (" << r.excluded << " replications excluded: " << r.failures.front()
                     << ")\n";
        }
        text << "\n";
    }
    return {csv.str(), text.str()};
}

} // namespace mfts
