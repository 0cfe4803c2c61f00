#ifndef MFTS_MONTECARLO_HPP
#define MFTS_MONTECARLO_HPP

#include <string>
#include <vector>

#include "mfts/metrics.hpp"

namespace mfts {

struct McCell {
    int T = 100;
    int p1 = 30;
    int p2 = 30;
    std::vector<double> strengths_row;
    std::vector<double> strengths_col;
    std::string label;
};

struct McDesign {
    DgpConfig base; // template: factor counts, AR/ECM/idio parameters
    std::vector<McCell> cells;
    int replications = 200;
    std::vector<Method> methods{Method::mPCA, Method::mPANIC};
    uint64_t base_seed = 20240601;
    // Table-1 semantics: mPCA cells draw full-rank I(1) factors, mPANIC cells
    // draw cointegrated ECM factors. Off = use base.factor_kind for all.
    bool couple_dgp_to_method = true;
    // also score RMSE at the ratio-selected counts (extra columns)
    bool rmse_on_selected = false;
    int workers = 1;
};

struct McResult {
    std::string cell;
    Method method = Method::mPCA;
    AggregateStats stats;
    int replications = 0; // successful, i.e. aggregated
    int excluded = 0;     // failed and excluded from the means
    uint64_t base_seed = 0;
    std::vector<std::string> failures; // error strings of excluded replications
};

// One Table-1 sample point: generate, fit with ratio selection (K = 10 cap)
// for the count columns, fit at the true counts for the RMSE columns.
ReplicationScore run_replication(const DgpConfig& config, Method method, uint64_t derived_seed,
                                 bool rmse_on_selected = false);

// Executes every (cell, method) block. Replication seeds derive from
// (base_seed, cell index, method, replication index) so output is a pure
// function of the design, independent of worker count and scheduling. A
// block aborts (TooManyFailures) when more than 1% of its replications fail.
// Completed blocks are also appended to *partial when non-null, so callers
// can flush them if a later block throws.
std::vector<McResult> run_design(const McDesign& design, std::vector<McResult>* partial = nullptr);

struct TableOutput {
    std::string csv;
    std::string text;
};

// CSV: header cell,method,rmse_R,rmse_C,rmse_F,mean_r1,cp_r1,mean_r2,cp_r2,
// reps,seed (plus _sel columns when selected-count RMSE was scored), rows in
// run order, 17 significant digits. Text: aligned rows grouped into
// Panel A (mPCA) then Panel B (mPANIC).
TableOutput emit_table(const std::vector<McResult>& results);

DgpConfig cell_config(const McDesign& design, const McCell& cell, Method method);

} // namespace mfts

#endif
