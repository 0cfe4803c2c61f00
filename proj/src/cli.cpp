#include "mfts/cli.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mfts/baseline.hpp"
#include "mfts/mpanic.hpp"

namespace mfts {

namespace {

namespace fs = std::filesystem;

struct KeyValueFile {
    // repeated keys keep file order (used by 'cell')
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return true;
        return false;
    }
    std::string get(const std::string& key, const std::string& fallback) const {
        for (const auto& [k, v] : entries)
            if (k == key) return v;
        return fallback;
    }
};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

KeyValueFile read_key_values(const std::string& path, const std::set<std::string>& known) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    KeyValueFile kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError,
                        path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known.count(key))
            throw Error(ErrorCode::ParseError,
                        path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        kv.entries.emplace_back(key, value);
    }
    return kv;
}

long long to_int(const std::string& s, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw Error(ErrorCode::ParseError, what + ": '" + s + "' is not an integer");
    return v;
}

double to_double(const std::string& s, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw Error(ErrorCode::ParseError, what + ": '" + s + "' is not a number");
    return v;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream iss(s);
    std::vector<std::string> out;
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

std::vector<double> to_doubles(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split_ws(s)) out.push_back(to_double(tok, what));
    return out;
}

bool to_switch(const std::string& s, const std::string& what) {
    if (s == "on") return true;
    if (s == "off") return false;
    throw Error(ErrorCode::ParseError, what + ": expected on|off, got '" + s + "'");
}

const std::set<std::string> kDgpKeys = {
    "T",      "p1",     "p2",        "r1",    "r2",    "factors", "ar_u",
    "k1",     "k2",     "alpha1",    "beta1", "alpha2", "beta2",  "strengths_row",
    "strengths_col",    "ar_e",      "rho_cross",      "s_row",   "s_col",
    "noise_scale",      "seed",
};

DgpConfig dgp_from_kv(const KeyValueFile& kv, const std::string& path) {
    DgpConfig config;
    config.T = static_cast<int>(to_int(kv.get("T", "100"), path + ": T"));
    config.p1 = static_cast<int>(to_int(kv.get("p1", "30"), path + ": p1"));
    config.p2 = static_cast<int>(to_int(kv.get("p2", "30"), path + ": p2"));
    config.r1 = static_cast<int>(to_int(kv.get("r1", "2"), path + ": r1"));
    config.r2 = static_cast<int>(to_int(kv.get("r2", "2"), path + ": r2"));
    const std::string kind = kv.get("factors", "i1");
    if (kind == "i1") {
        config.factor_kind = FactorKind::FullRankI1;
    } else if (kind == "ecm") {
        config.factor_kind = FactorKind::Cointegrated;
    } else {
        throw Error(ErrorCode::ParseError, path + ": factors must be i1|ecm, got '" + kind + "'");
    }
    config.ar_u = to_double(kv.get("ar_u", "0.3"), path + ": ar_u");
    const int k1 = static_cast<int>(to_int(kv.get("k1", "1"), path + ": k1"));
    const int k2 = static_cast<int>(to_int(kv.get("k2", "1"), path + ": k2"));
    auto ecm_matrix = [&](const char* key, int r, int k, const std::string& fallback) {
        const std::vector<double> entries = to_doubles(kv.get(key, fallback), path + ": " + key);
        if (static_cast<int>(entries.size()) != r * k)
            throw Error(ErrorCode::ParseError, path + ": " + key + " needs " +
                                                   std::to_string(r * k) + " entries (row-major)");
        return Matrix(r, k, entries);
    };
    // ECM coefficients also back i1-based MC designs whose mPANIC cells draw
    // cointegrated factors; populate whenever given or whenever the built-in
    // two-factor defaults fit
    if (kind == "ecm" || kv.has("alpha1") || (config.r1 * k1 == 2 && config.r2 * k2 == 2)) {
        config.ecm.alpha1 = ecm_matrix("alpha1", config.r1, k1, "-0.1 0.1");
        config.ecm.beta1 = ecm_matrix("beta1", config.r1, k1, "1 -1");
        config.ecm.alpha2 = ecm_matrix("alpha2", config.r2, k2, "0.1 -0.1");
        config.ecm.beta2 = ecm_matrix("beta2", config.r2, k2, "1 -1");
    }
    auto strengths = [&](const char* key, int r) {
        std::vector<double> v = to_doubles(kv.get(key, "1"), path + ": " + key);
        if (v.size() == 1) v.assign(static_cast<size_t>(r), v.front());
        if (static_cast<int>(v.size()) != r)
            throw Error(ErrorCode::ParseError,
                        path + ": " + key + " needs 1 or " + std::to_string(r) + " entries");
        return v;
    };
    config.strengths_row = strengths("strengths_row", config.r1);
    config.strengths_col = strengths("strengths_col", config.r2);
    config.idio.ar_coef = to_double(kv.get("ar_e", "0.3"), path + ": ar_e");
    config.idio.rho_cross = to_double(kv.get("rho_cross", "0.5"), path + ": rho_cross");
    config.idio.s_row = static_cast<int>(to_int(kv.get("s_row", "0"), path + ": s_row"));
    config.idio.s_col = static_cast<int>(to_int(kv.get("s_col", "0"), path + ": s_col"));
    config.idio.scale = to_double(kv.get("noise_scale", "1"), path + ": noise_scale");
    config.seed = static_cast<uint64_t>(to_int(kv.get("seed", "20240601"), path + ": seed"));
    return config;
}

std::string render_matrix_row_major(const Matrix& m) {
    std::string out;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (!out.empty()) out += ' ';
            out += fmt17(m(i, j));
        }
    return out;
}

std::vector<double> case_strengths(const std::string& token, int r, const std::string& where) {
    double tail = 1.0;
    if (token == "i") {
        tail = 1.0;
    } else if (token == "ii") {
        tail = 0.8;
    } else if (token == "iii") {
        tail = 0.6;
    } else {
        // explicit comma-separated strengths, e.g. 1,0.8
        std::vector<double> v;
        std::string cur;
        for (char c : token + ",") {
            if (c == ',') {
                if (!cur.empty()) v.push_back(to_double(cur, where));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (static_cast<int>(v.size()) != r)
            throw Error(ErrorCode::ParseError,
                        where + ": case '" + token + "' needs " + std::to_string(r) + " strengths");
        return v;
    }
    std::vector<double> v(static_cast<size_t>(r), tail);
    v.front() = 1.0;
    return v;
}

} // namespace

DgpConfig parse_dgp_config(const std::string& path) {
    DgpConfig config = dgp_from_kv(read_key_values(path, kDgpKeys), path);
    validate(config);
    return config;
}

McDesign parse_mc_design(const std::string& path) {
    std::set<std::string> known = kDgpKeys;
    known.insert({"replications", "methods", "base_seed", "couple_dgp_to_method",
                  "rmse_on_selected", "cell", "workers"});
    const KeyValueFile kv = read_key_values(path, known);

    McDesign design;
    design.base = dgp_from_kv(kv, path);
    design.replications =
        static_cast<int>(to_int(kv.get("replications", "200"), path + ": replications"));
    design.base_seed =
        static_cast<uint64_t>(to_int(kv.get("base_seed", "20240601"), path + ": base_seed"));
    design.couple_dgp_to_method =
        to_switch(kv.get("couple_dgp_to_method", "on"), path + ": couple_dgp_to_method");
    design.rmse_on_selected =
        to_switch(kv.get("rmse_on_selected", "off"), path + ": rmse_on_selected");
    design.workers = static_cast<int>(to_int(kv.get("workers", "1"), path + ": workers"));

    design.methods.clear();
    for (const auto& tok : split_ws(kv.get("methods", "mpca mpanic"))) {
        if (tok == "mpca") design.methods.push_back(Method::mPCA);
        else if (tok == "mpanic") design.methods.push_back(Method::mPANIC);
        else throw Error(ErrorCode::ParseError, path + ": methods must be mpca|mpanic");
    }
    if (design.methods.empty())
        throw Error(ErrorCode::ParseError, path + ": methods list is empty");

    design.cells.clear();
    for (const auto& [key, value] : kv.entries) {
        if (key != "cell") continue;
        const auto toks = split_ws(value);
        if (toks.size() != 4)
            throw Error(ErrorCode::ParseError,
                        path + ": cell wants 'T p1 p2 case', got '" + value + "'");
        McCell cell;
        cell.T = static_cast<int>(to_int(toks[0], path + ": cell T"));
        cell.p1 = static_cast<int>(to_int(toks[1], path + ": cell p1"));
        cell.p2 = static_cast<int>(to_int(toks[2], path + ": cell p2"));
        cell.strengths_row = case_strengths(toks[3], design.base.r1, path + ": cell");
        cell.strengths_col = case_strengths(toks[3], design.base.r2, path + ": cell");
        cell.label = "T" + toks[0] + "_p" + toks[1] + "x" + toks[2] + "_" + toks[3];
        design.cells.push_back(std::move(cell));
    }
    if (design.cells.empty()) throw Error(ErrorCode::ParseError, path + ": no cells");
    return design;
}

std::string render_dgp_config(const DgpConfig& config) {
    std::ostringstream out;
    out << "T = " << config.T << "\n";
    out << "p1 = " << config.p1 << "\np2 = " << config.p2 << "\n";
    out << "r1 = " << config.r1 << "\nr2 = " << config.r2 << "\n";
    out << "factors = " << (config.factor_kind == FactorKind::FullRankI1 ? "i1" : "ecm") << "\n";
    out << "ar_u = " << fmt17(config.ar_u) << "\n";
    if (config.factor_kind == FactorKind::Cointegrated) {
        out << "k1 = " << config.ecm.alpha1.cols() << "\nk2 = " << config.ecm.alpha2.cols() << "\n";
        out << "alpha1 = " << render_matrix_row_major(config.ecm.alpha1) << "\n";
        out << "beta1 = " << render_matrix_row_major(config.ecm.beta1) << "\n";
        out << "alpha2 = " << render_matrix_row_major(config.ecm.alpha2) << "\n";
        out << "beta2 = " << render_matrix_row_major(config.ecm.beta2) << "\n";
    }
    out << "strengths_row =";
    for (double a : config.strengths_row) out << ' ' << fmt17(a);
    out << "\nstrengths_col =";
    for (double a : config.strengths_col) out << ' ' << fmt17(a);
    out << "\nar_e = " << fmt17(config.idio.ar_coef) << "\n";
    out << "rho_cross = " << fmt17(config.idio.rho_cross) << "\n";
    out << "s_row = " << config.idio.s_row << "\ns_col = " << config.idio.s_col << "\n";
    out << "noise_scale = " << fmt17(config.idio.scale) << "\n";
    out << "seed = " << config.seed << "\n";
    return out.str();
}

Matrix heatmap_matrix(const Matrix& r_hat, const Matrix& c_hat) {
    Matrix h = multiply_a_bt(r_hat, c_hat);
    double lo = h.data().front(), hi = h.data().front();
    for (double v : h.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) {
        for (double& v : h.data()) v = 0.0;
        return h;
    }
    for (double& v : h.data()) v = (v - lo) / (hi - lo);
    return h;
}

void cmd_simulate(const std::string& config_path, const std::string& out_dir,
                  std::optional<uint64_t> seed_override) {
    DgpConfig config = parse_dgp_config(config_path);
    if (seed_override) config.seed = *seed_override;
    const DgpTruth truth = generate(config);

    fs::create_directories(out_dir);
    const auto at = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
    PanelSchema schema{default_labels(config.T), default_labels(config.p1),
                       default_labels(config.p2), Transform::None};
    write_long_csv(at("X.csv"), truth.X, schema);
    write_long_csv(at("E.csv"), truth.E, schema);
    write_matrix_csv(at("R.csv"), truth.R, default_labels(config.p1), "row", "load");
    write_matrix_csv(at("C.csv"), truth.C, default_labels(config.p2), "col", "load");
    write_factors_csv(at("F.csv"), truth.F, default_labels(config.T));
    write_text_file(at("config.cfg"), render_dgp_config(config));
}

namespace {

std::string ratio_line(const std::vector<double>& eigvals, int K) {
    const RatioSelection sel = ratio_criterion(eigvals, K);
    std::string out;
    for (double r : sel.ratios) {
        if (!out.empty()) out += ' ';
        out += fmt17(r);
    }
    return out;
}

std::string joined(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& s : ids) {
        if (!out.empty()) out += ' ';
        out += s;
    }
    return out;
}

void write_fit_outputs(const std::string& dir, const FactorFit& fit, const PanelSchema& schema,
                       const FitOptions& options, int K1, int K2) {
    fs::create_directories(dir);
    const auto at = [&](const char* name) { return (fs::path(dir) / name).string(); };
    write_eigvals_csv(at("eigvals_row.csv"), fit.row_eigvals);
    write_eigvals_csv(at("eigvals_col.csv"), fit.col_eigvals);
    write_factors_csv(at("factors.csv"), fit.F_hat, schema.time_ids);
    write_matrix_csv(at("loadings_R.csv"), fit.R_hat, schema.row_ids, "row", "load");
    write_matrix_csv(at("loadings_C.csv"), fit.C_hat, schema.col_ids, "col", "load");
    write_heatmap_csv(at("heatmap.csv"), heatmap_matrix(fit.R_hat, fit.C_hat), schema.row_ids,
                      schema.col_ids);

    std::ostringstream summary;
    summary << "method: " << method_name(fit.method) << "\n";
    summary << "transform: " << transform_name(options.transform) << "\n";
    summary << "demean: " << (fit.demeaned ? "on" : "off") << "\n";
    summary << "normalization: " << normalization_name(fit.normalization) << "\n";
    summary << "K1: " << K1 << "\nK2: " << K2 << "\n";
    summary << "r1_hat: " << fit.r1 << "\nr2_hat: " << fit.r2 << "\n";
    summary << "row_ratios: " << ratio_line(fit.row_eigvals, K1) << "\n";
    summary << "col_ratios: " << ratio_line(fit.col_eigvals, K2) << "\n";
    summary << "T: " << schema.time_ids.size() << "\n";
    summary << "row_axis: " << joined(schema.row_ids) << "\n";
    summary << "col_axis: " << joined(schema.col_ids) << "\n";
    write_text_file(at("summary.txt"), summary.str());
}

void write_vectorized_outputs(const std::string& dir, const VectorizedFit& fit,
                              const PanelSchema& schema, const FitOptions& options, int K) {
    fs::create_directories(dir);
    const auto at = [&](const char* name) { return (fs::path(dir) / name).string(); };
    write_eigvals_csv(at("eigvals.csv"), fit.eigvals);
    write_factors_csv(at("factors.csv"), fit.factors, schema.time_ids);
    // vec() stacks columns, so labels run column-major: col j outer, row i inner
    std::vector<std::string> labels;
    labels.reserve(schema.row_ids.size() * schema.col_ids.size());
    for (const auto& c : schema.col_ids)
        for (const auto& r : schema.row_ids) labels.push_back(r + ":" + c);
    write_matrix_csv(at("loadings.csv"), fit.loadings, labels, "cell", "load");
    std::ostringstream summary;
    summary << "method: vectorized\n";
    summary << "transform: " << transform_name(options.transform) << "\n";
    summary << "demean: " << (options.demean ? "on" : "off") << "\n";
    summary << "K: " << K << "\n";
    summary << "r_hat: " << fit.r_hat << "\n";
    summary << "r_used: " << fit.loadings.cols() << "\n";
    summary << "ratios: " << ratio_line(fit.eigvals, K) << "\n";
    summary << "T: " << schema.time_ids.size() << "\n";
    summary << "row_axis: " << joined(schema.row_ids) << "\n";
    summary << "col_axis: " << joined(schema.col_ids) << "\n";
    write_text_file(at("summary.txt"), summary.str());
}

} // namespace

void cmd_fit(const std::string& input_path, const FitOptions& options) {
    auto [series, schema] = load_panel(input_path, options.transform);

    std::vector<std::string> methods;
    if (options.method == "both") {
        methods = {"mpca", "mpanic"};
    } else if (options.method == "mpca" || options.method == "mpanic" ||
               options.method == "vectorized") {
        methods = {options.method};
    } else {
        throw Error(ErrorCode::ParseError,
                    "method must be mpca|mpanic|both|vectorized, got '" + options.method + "'");
    }

    const int K1 = default_ratio_bound(options.K, series.rows());
    const int K2 = default_ratio_bound(options.K, series.cols());
    for (const auto& name : methods) {
        // single method writes into out_dir directly, multiple into subdirs
        const std::string dir = methods.size() == 1
                                    ? options.out_dir
                                    : (fs::path(options.out_dir) / name).string();
        if (name == "vectorized") {
            const MatrixTimeSeries prepared = options.demean ? demean(series) : series;
            const int K = default_ratio_bound(options.K, series.rows() * series.cols());
            const VectorizedFit fit = fit_vectorized(prepared, options.r1.value_or(0), K);
            write_vectorized_outputs(dir, fit, schema, options, K);
            continue;
        }
        FitConfig config;
        config.r1 = options.r1;
        config.r2 = options.r2;
        config.K1 = K1;
        config.K2 = K2;
        config.normalization = options.normalization;
        config.demean = options.demean;
        const FactorFit fit =
            name == "mpca" ? fit_mpca(series, config) : fit_mpanic(series, config);
        write_fit_outputs(dir, fit, schema, options, K1, K2);
    }
}

void cmd_mc(const std::string& design_path, const std::string& out_dir, int workers,
            std::optional<uint64_t> seed_override) {
    McDesign design = parse_mc_design(design_path);
    if (workers > 0) design.workers = workers;
    if (seed_override) design.base_seed = *seed_override;

    fs::create_directories(out_dir);
    const auto flush = [&](const std::vector<McResult>& results) {
        if (results.empty()) return;
        const TableOutput table = emit_table(results);
        write_text_file((fs::path(out_dir) / "table.csv").string(), table.csv);
        write_text_file((fs::path(out_dir) / "table.txt").string(), table.text);
    };
    std::vector<McResult> partial;
    try {
        flush(run_design(design, &partial));
    } catch (...) {
        flush(partial); // keep whatever completed
        throw;
    }
}

} // namespace mfts
