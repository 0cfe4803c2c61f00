// mfts — matrix factor models for nonstationary matrix time series.
//
// Subcommands:
//   simulate CONFIG --out DIR [--seed N]
//   fit INPUT.csv --method {mpca|mpanic|both|vectorized} [flags] --out DIR
//   mc DESIGN --out DIR [--workers N] [--seed N]
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 numerical or
// degenerate-input failure. stderr carries the structured error name.

#include <CLI11.hpp>

#include <iostream>

#include "mfts/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Factor models for nonstationary matrix-valued time series"};
    app.require_subcommand(1);

    std::string config_path, input_path, design_path;
    std::string out_dir = ".";
    std::string method = "mpca";
    std::string norm = "row";
    std::string demean = "on";
    std::string transform = "none";
    int r1 = 0, r2 = 0, k = 0, workers = 0;
    uint64_t seed = 0;
    bool seed_set = false;

    auto* sim = app.add_subcommand("simulate", "Generate a synthetic panel from a DGP config");
    sim->add_option("config", config_path, "DGP config file")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* fit = app.add_subcommand("fit", "Fit factor models to a long-format panel CSV");
    fit->add_option("input", input_path, "panel CSV with header t,row,col,value")->required();
    fit->add_option("--method", method, "mpca|mpanic|both|vectorized");
    fit->add_option("--r1", r1, "row factor count (0 = ratio criterion)");
    fit->add_option("--r2", r2, "column factor count (0 = ratio criterion)");
    fit->add_option("--k", k, "ratio-criterion upper bound (0 = min(10, p-1))");
    fit->add_option("--norm", norm, "factor normalization: row|col|sum");
    fit->add_option("--demean", demean, "subtract the time mean: on|off");
    fit->add_option("--transform", transform, "value transform: none|log|logdiff");
    fit->add_option("--out", out_dir, "output directory");

    auto* mc = app.add_subcommand("mc", "Run a Monte-Carlo design and emit the results table");
    mc->add_option("design", design_path, "design config file")->required();
    mc->add_option("--out", out_dir, "output directory");
    mc->add_option("--workers", workers, "worker threads (0 = design/default)");
    mc->add_option("--seed", seed, "override the design base seed")->each([&](const std::string&) {
        seed_set = true;
    });

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            mfts::cmd_simulate(config_path, out_dir,
                               seed_set ? std::optional<uint64_t>(seed) : std::nullopt);
        } else if (fit->parsed()) {
            mfts::FitOptions options;
            options.method = method;
            if (r1 > 0) options.r1 = r1;
            if (r2 > 0) options.r2 = r2;
            options.K = k;
            if (norm == "row") options.normalization = mfts::Normalization::RowLambda;
            else if (norm == "col") options.normalization = mfts::Normalization::ColLambda;
            else if (norm == "sum") options.normalization = mfts::Normalization::SumLambda;
            else throw mfts::Error(mfts::ErrorCode::ParseError, "--norm must be row|col|sum");
            if (demean == "on") options.demean = true;
            else if (demean == "off") options.demean = false;
            else throw mfts::Error(mfts::ErrorCode::ParseError, "--demean must be on|off");
            options.transform = mfts::parse_transform(transform);
            options.out_dir = out_dir;
            mfts::cmd_fit(input_path, options);
        } else if (mc->parsed()) {
            mfts::cmd_mc(design_path, out_dir, workers,
                         seed_set ? std::optional<uint64_t>(seed) : std::nullopt);
        }
    } catch (const mfts::Error& e) {
        std::cerr << e.what() << "\n";
        return mfts::error_exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
