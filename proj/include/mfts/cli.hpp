#ifndef MFTS_CLI_HPP
#define MFTS_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "mfts/montecarlo.hpp"
#include "mfts/panel_io.hpp"

namespace mfts {

// Flat key = value config files ('#' comments). Unknown keys are hard
// errors; the accepted keys are documented in the README.
DgpConfig parse_dgp_config(const std::string& path);
McDesign parse_mc_design(const std::string& path);

std::string render_dgp_config(const DgpConfig& config);

struct FitOptions {
    std::string method = "mpca"; // mpca | mpanic | both | vectorized
    std::optional<int> r1;
    std::optional<int> r2;
    int K = 0; // 0 = min(10, p-1) per side
    Normalization normalization = Normalization::RowLambda;
    bool demean = true; // real panels are not zero-mean; simulations override
    Transform transform = Transform::None;
    std::string out_dir = ".";
};

// min-max rescaling of R̂Ĉᵀ onto [0,1]
Matrix heatmap_matrix(const Matrix& r_hat, const Matrix& c_hat);

void cmd_simulate(const std::string& config_path, const std::string& out_dir,
                  std::optional<uint64_t> seed_override);
void cmd_fit(const std::string& input_path, const FitOptions& options);
void cmd_mc(const std::string& design_path, const std::string& out_dir, int workers,
            std::optional<uint64_t> seed_override);

} // namespace mfts

#endif
