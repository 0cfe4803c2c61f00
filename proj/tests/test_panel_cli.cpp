#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mfts/cli.hpp"
#include "test_helpers.hpp"

using namespace mfts;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mfts_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

} // namespace

TEST_CASE("load_panel on an enumerated 2x2x2 file") {
    const fs::path dir = scratch_dir("load_basic");
    write_file(dir / "p.csv",
               "t,row,col,value\n"
               "1,a,x,1\n1,a,y,2\n1,b,x,3\n1,b,y,4\n"
               "2,a,x,5\n2,a,y,6\n2,b,x,7\n2,b,y,8\n");
    const auto [series, schema] = load_panel((dir / "p.csv").string());
    CHECK(series.length() == 2);
    CHECK(series.rows() == 2);
    CHECK(series.cols() == 2);
    CHECK(series[0](0, 0) == 1.0);
    CHECK(series[0](0, 1) == 2.0);
    CHECK(series[0](1, 0) == 3.0);
    CHECK(series[1](1, 1) == 8.0);
    CHECK(schema.row_ids == std::vector<std::string>{"a", "b"});
    CHECK(schema.col_ids == std::vector<std::string>{"x", "y"});
    CHECK(schema.time_ids == std::vector<std::string>{"1", "2"});
}

TEST_CASE("load_panel orders integer times numerically and dates lexically") {
    const fs::path dir = scratch_dir("load_order");
    write_file(dir / "num.csv",
               "t,row,col,value\n10,a,x,3\n2,a,x,1\n9,a,x,2\n");
    const auto [nums, nschema] = load_panel((dir / "num.csv").string());
    CHECK(nschema.time_ids == std::vector<std::string>{"2", "9", "10"});
    CHECK(nums[0](0, 0) == 1.0);
    CHECK(nums[2](0, 0) == 3.0);

    write_file(dir / "dates.csv",
               "t,row,col,value\n2020-02,a,x,2\n2020-01,a,x,1\n2019-12,a,x,0\n");
    const auto [dates, dschema] = load_panel((dir / "dates.csv").string());
    CHECK(dschema.time_ids == std::vector<std::string>{"2019-12", "2020-01", "2020-02"});
    CHECK(dates[0](0, 0) == 0.0);
}

TEST_CASE("load_panel error paths name the offender") {
    const fs::path dir = scratch_dir("load_errors");
    write_file(dir / "missing.csv",
               "t,row,col,value\n1,a,x,1\n1,a,y,2\n1,b,x,3\n"); // (1,b,y) absent
    try {
        load_panel((dir / "missing.csv").string());
        FAIL("expected MissingCell");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingCell);
        CHECK(std::string(e.what()).find("(1,b,y)") != std::string::npos);
        CHECK(error_exit_code(e.code()) == 1);
    }

    write_file(dir / "dup.csv", "t,row,col,value\n1,a,x,1\n1,a,x,2\n");
    CHECK_THROWS_WITH_AS(load_panel((dir / "dup.csv").string()),
                         doctest::Contains("DuplicateCell"), Error);

    write_file(dir / "header.csv", "time,row,col,value\n1,a,x,1\n");
    CHECK_THROWS_WITH_AS(load_panel((dir / "header.csv").string()),
                         doctest::Contains("ParseError"), Error);

    write_file(dir / "badvalue.csv", "t,row,col,value\n1,a,x,oops\n");
    try {
        load_panel((dir / "badvalue.csv").string());
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    CHECK_THROWS_WITH_AS(load_panel((dir / "nope.csv").string()), doctest::Contains("IoError"),
                         Error);
}

TEST_CASE("log and logdiff transforms") {
    const fs::path dir = scratch_dir("load_log");
    write_file(dir / "ones.csv", "t,row,col,value\n1,a,x,1\n2,a,x,1\n3,a,x,1\n");
    const auto [logged, schema] = load_panel((dir / "ones.csv").string(), Transform::Log);
    CHECK(schema.transform == Transform::Log);
    for (int t = 0; t < 3; ++t) CHECK(logged[t](0, 0) == 0.0);

    write_file(dir / "growth.csv", "t,row,col,value\n1,a,x,1\n2,a,x,2\n3,a,x,4\n");
    const auto [rates, rschema] = load_panel((dir / "growth.csv").string(), Transform::LogDiff);
    CHECK(rates.length() == 2);
    CHECK(rschema.time_ids == std::vector<std::string>{"2", "3"});
    CHECK(rates[0](0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

    write_file(dir / "neg.csv", "t,row,col,value\n1,a,x,-1\n");
    try {
        load_panel((dir / "neg.csv").string(), Transform::Log);
        FAIL("expected NonPositiveForLog");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPositiveForLog);
        CHECK(error_exit_code(e.code()) == 1);
    }
}

TEST_CASE("fmt17 round-trips doubles exactly") {
    Rng rng(derive_stream({47, 1}));
    for (int i = 0; i < 200; ++i) {
        const double v = std::exp(10.0 * rng.next_normal()) * (i % 2 == 0 ? 1.0 : -1.0);
        CHECK(std::strtod(fmt17(v).c_str(), nullptr) == v);
    }
    CHECK(std::strtod(fmt17(0.1).c_str(), nullptr) == 0.1);
}

TEST_CASE("simulate writes a panel that loads back bit-exactly") {
    const fs::path dir = scratch_dir("simulate");
    write_file(dir / "dgp.cfg",
               "T = 8\np1 = 5\np2 = 4\nr1 = 2\nr2 = 2\nfactors = i1\n"
               "strengths_row = 1 1\nstrengths_col = 1 1\nseed = 4242\n");
    cmd_simulate((dir / "dgp.cfg").string(), (dir / "out").string(), std::nullopt);

    for (const char* name : {"X.csv", "E.csv", "R.csv", "C.csv", "F.csv", "config.cfg"})
        CHECK(fs::exists(dir / "out" / name));

    DgpConfig config = parse_dgp_config((dir / "dgp.cfg").string());
    const DgpTruth truth = generate(config);
    const auto [loaded, schema] = load_panel((dir / "out" / "X.csv").string());
    REQUIRE(loaded.length() == 8);
    for (int t = 0; t < 8; ++t) CHECK(test::bit_equal(loaded[t], truth.X[t]));

    // config echo parses back to the identical configuration
    const DgpConfig echoed = parse_dgp_config((dir / "out" / "config.cfg").string());
    CHECK(echoed.T == config.T);
    CHECK(echoed.seed == config.seed);
    CHECK(echoed.strengths_row == config.strengths_row);

    // same config + seed twice -> identical bytes
    cmd_simulate((dir / "dgp.cfg").string(), (dir / "out2").string(), std::nullopt);
    CHECK(slurp(dir / "out" / "X.csv") == slurp(dir / "out2" / "X.csv"));

    // truth matrices round-trip through their readers
    std::vector<std::string> labels;
    const Matrix r_loaded = read_matrix_csv((dir / "out" / "R.csv").string(), &labels);
    CHECK(test::bit_equal(r_loaded, truth.R));
    CHECK(labels.size() == 5);
    const MatrixTimeSeries f_loaded = read_factors_csv((dir / "out" / "F.csv").string());
    for (int t = 0; t < 8; ++t) CHECK(test::bit_equal(f_loaded[t], truth.F[t]));
}

TEST_CASE("cmd_fit end-to-end on seeded strong-factor data selects r = 2") {
    const fs::path dir = scratch_dir("fit_e2e");
    write_file(dir / "dgp.cfg",
               "T = 100\np1 = 30\np2 = 30\nr1 = 2\nr2 = 2\nfactors = i1\n"
               "strengths_row = 1 1\nstrengths_col = 1 1\nseed = 20240601\n");
    cmd_simulate((dir / "dgp.cfg").string(), (dir / "sim").string(), std::nullopt);

    FitOptions options;
    options.method = "both";
    options.demean = false;
    options.out_dir = (dir / "fit").string();
    cmd_fit((dir / "sim" / "X.csv").string(), options);

    for (const char* method : {"mpca", "mpanic"}) {
        const fs::path mdir = dir / "fit" / method;
        const std::string summary = slurp(mdir / "summary.txt");
        CHECK(summary.find("r1_hat: 2") != std::string::npos);
        CHECK(summary.find("r2_hat: 2") != std::string::npos);
        for (const char* name : {"eigvals_row.csv", "eigvals_col.csv", "factors.csv",
                                 "loadings_R.csv", "loadings_C.csv", "heatmap.csv"})
            CHECK(fs::exists(mdir / name));

        // heatmap values live in [0,1] and attain both ends
        const Matrix heat = read_heatmap_csv((mdir / "heatmap.csv").string());
        double lo = 1e300, hi = -1e300;
        for (double v : heat.data()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo == 0.0);
        CHECK(hi == 1.0);

        const std::vector<double> eig = read_eigvals_csv((mdir / "eigvals_row.csv").string());
        CHECK(eig.size() == 30);
        CHECK(std::is_sorted(eig.rbegin(), eig.rend()));
    }

    // determinism of the full fit pipeline
    FitOptions again = options;
    again.out_dir = (dir / "fit2").string();
    cmd_fit((dir / "sim" / "X.csv").string(), again);
    CHECK(slurp(dir / "fit" / "mpca" / "loadings_R.csv") ==
          slurp(dir / "fit2" / "mpca" / "loadings_R.csv"));
}

TEST_CASE("cmd_fit surfaces AllZero on a constant panel with exit code 2") {
    const fs::path dir = scratch_dir("fit_const");
    std::string csv = "t,row,col,value\n";
    for (int t = 1; t <= 4; ++t)
        for (const char* r : {"a", "b"})
            for (const char* c : {"x", "y"}) csv += std::to_string(t) + "," + r + "," + c + ",7\n";
    write_file(dir / "const.csv", csv);

    FitOptions options;
    options.method = "mpca";
    options.demean = true;
    options.out_dir = (dir / "out").string();
    try {
        cmd_fit((dir / "const.csv").string(), options);
        FAIL("expected AllZero");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AllZero);
        CHECK(error_exit_code(e.code()) == 2);
    }
}

TEST_CASE("cmd_fit vectorized baseline writes reports without a heatmap") {
    const fs::path dir = scratch_dir("fit_vec");
    write_file(dir / "dgp.cfg",
               "T = 40\np1 = 6\np2 = 5\nr1 = 2\nr2 = 2\nfactors = i1\n"
               "strengths_row = 1 1\nstrengths_col = 1 1\nseed = 11\n");
    cmd_simulate((dir / "dgp.cfg").string(), (dir / "sim").string(), std::nullopt);
    FitOptions options;
    options.method = "vectorized";
    options.demean = false;
    options.out_dir = (dir / "fit").string();
    cmd_fit((dir / "sim" / "X.csv").string(), options);
    CHECK(fs::exists(dir / "fit" / "eigvals.csv"));
    CHECK(fs::exists(dir / "fit" / "factors.csv"));
    CHECK(fs::exists(dir / "fit" / "loadings.csv"));
    CHECK_FALSE(fs::exists(dir / "fit" / "heatmap.csv"));
    const std::string summary = slurp(dir / "fit" / "summary.txt");
    CHECK(summary.find("method: vectorized") != std::string::npos);
}

TEST_CASE("cmd_mc runs a tiny design and its table round-trips") {
    const fs::path dir = scratch_dir("mc");
    write_file(dir / "design.cfg",
               "T = 20\np1 = 8\np2 = 8\nr1 = 2\nr2 = 2\n"
               "strengths_row = 1 1\nstrengths_col = 1 1\n"
               "replications = 3\nmethods = mpca mpanic\nbase_seed = 99\n"
               "cell = 20 8 8 i\ncell = 20 8 8 iii\n");
    cmd_mc((dir / "design.cfg").string(), (dir / "out").string(), 2, std::nullopt);
    CHECK(fs::exists(dir / "out" / "table.csv"));
    CHECK(fs::exists(dir / "out" / "table.txt"));
    const std::string csv = slurp(dir / "out" / "table.csv");
    CHECK(csv.find("T20_p8x8_i,mPCA,") != std::string::npos);
    CHECK(csv.find("T20_p8x8_iii,mPANIC,") != std::string::npos);

    // worker count does not change the bytes
    cmd_mc((dir / "design.cfg").string(), (dir / "out2").string(), 7, std::nullopt);
    CHECK(csv == slurp(dir / "out2" / "table.csv"));
}

TEST_CASE("config parser rejects unknown keys") {
    const fs::path dir = scratch_dir("cfg");
    write_file(dir / "bad.cfg", "T = 10\nbogus_key = 1\n");
    try {
        parse_dgp_config((dir / "bad.cfg").string());
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
}

TEST_CASE("mc design parser builds strength cases") {
    const fs::path dir = scratch_dir("design");
    write_file(dir / "d.cfg",
               "r1 = 2\nr2 = 2\nstrengths_row = 1 1\nstrengths_col = 1 1\n"
               "replications = 2\ncell = 50 30 30 ii\ncell = 50 30 30 0.9,0.7\n");
    const McDesign design = parse_mc_design((dir / "d.cfg").string());
    REQUIRE(design.cells.size() == 2);
    CHECK(design.cells[0].strengths_row == std::vector<double>{1.0, 0.8});
    CHECK(design.cells[1].strengths_row == std::vector<double>{0.9, 0.7});
    CHECK(design.couple_dgp_to_method);
    CHECK(design.methods.size() == 2);
}

TEST_CASE("bundled table1_desk design matches the acceptance configuration") {
    const fs::path here = fs::path(__FILE__).parent_path();
    const fs::path cfg = here.parent_path() / "configs" / "table1_desk.cfg";
    REQUIRE(fs::exists(cfg));
    const McDesign design = parse_mc_design(cfg.string());
    CHECK(design.replications == 200);
    CHECK(design.base_seed == 20240601);
    CHECK(design.couple_dgp_to_method);
    CHECK(design.methods == std::vector<Method>{Method::mPCA, Method::mPANIC});
    REQUIRE(design.cells.size() == 9);
    CHECK(design.cells[0].label == "T50_p30x30_i");
    CHECK(design.cells[8].label == "T100_p60x60_iii");
    CHECK(design.cells[3].strengths_row == std::vector<double>{1.0, 0.8});
    CHECK(design.cells[6].strengths_col == std::vector<double>{1.0, 0.6});
    CHECK(design.base.ecm.alpha1.rows() == 2);
    // stability of the bundled ECM coefficients
    CHECK_NOTHROW(check_ecm_stability(design.base.ecm));
}

TEST_CASE("cmd_mc flushes completed blocks when a later block fails") {
    const fs::path dir = scratch_dir("mc_partial");
    // the explosive ECM makes every mPANIC replication fail while the
    // preceding mPCA block of the same cell completes
    write_file(dir / "design.cfg",
               "r1 = 2\nr2 = 2\nstrengths_row = 1 1\nstrengths_col = 1 1\n"
               "alpha1 = 1 0\nbeta1 = 1 0\nalpha2 = 1 0\nbeta2 = 1 0\n"
               "replications = 3\nmethods = mpca mpanic\nbase_seed = 5\n"
               "cell = 20 6 6 i\n");
    try {
        cmd_mc((dir / "design.cfg").string(), (dir / "out").string(), 1, std::nullopt);
        FAIL("expected TooManyFailures");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooManyFailures);
        CHECK(error_exit_code(e.code()) == 2);
    }
    REQUIRE(fs::exists(dir / "out" / "table.csv"));
    const std::string csv = slurp(dir / "out" / "table.csv");
    CHECK(csv.find("mPCA") != std::string::npos);
    CHECK(csv.find("mPANIC") == std::string::npos);
}
