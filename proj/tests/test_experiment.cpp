#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "isinglab/errors.hpp"
#include "isinglab/exact.hpp"
#include "isinglab/experiment.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/version.hpp"

using namespace isinglab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

fs::path only_file(const fs::path& dir, const std::string& prefix,
                   const std::string& ext) {
    fs::path found;
    int count = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::string name = e.path().filename().string();
        if (name.rfind(prefix, 0) == 0 && e.path().extension() == ext) {
            found = e.path();
            ++count;
        }
    }
    REQUIRE(count == 1);
    return found;
}

RunConfig tiny_exact_cfg(const std::string& dir) {
    RunConfig cfg;
    cfg.kind = "exact-verify";
    cfg.L = {1};
    cfg.alpha = {2.0};
    cfg.beta = {0.5};
    cfg.h_star = {1.0};
    cfg.J = {1.0};
    cfg.out_dir = dir;
    return cfg;
}

}  // namespace

TEST_CASE("exact-verify run matches direct enumeration and reruns identically") {
    const std::string dir = "exp_exact_out";
    fs::remove_all(dir);
    RunConfig cfg = tiny_exact_cfg(dir);

    std::vector<RunRecord> records = run(cfg);
    REQUIRE(records.size() == 1);
    const RunRecord& r = records[0];
    CHECK(r.kind == "exact-verify");
    CHECK(r.status == "ok");
    CHECK(r.error.empty());
    CHECK(r.version == std::string(ISINGLAB_VERSION));
    CHECK(r.rng_id == std::string(RNG_ID));
    CHECK(r.started_at.size() == 20);
    CHECK(r.finished_at.size() == 20);
    CHECK(r.point.at("L") == "1");
    CHECK(r.point.at("beta") == "0.5");
    REQUIRE(r.csv_rows.size() == 4);  // 2 boundaries x 2 constraints

    fs::path csv = only_file(fs::path(dir) / "exact-verify", "run-", ".csv");
    std::string bytes = slurp(csv);
    std::vector<std::string> lines = split_lines(bytes);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == csv_schemas().at("exact-verify"));

    // row 0 is plus/unrestricted; check it against a direct call
    std::vector<std::string> row = split_row(lines[1]);
    REQUIRE(row.size() == 15);
    CHECK(row[7] == "plus");
    CHECK(row[8] == "unrestricted");
    ExactResult direct = partition_function(
        cube(1, 2), Boundary::plus(), CouplingSpec(1.0, 0.5), FieldSpec(1.0, 2.0),
        EnsembleConstraint::unrestricted());
    CHECK(std::stod(row[9]) == doctest::Approx(direct.log_Z).epsilon(1e-12));
    CHECK(std::stol(row[10]) == direct.config_count);
    CHECK(std::stod(row[11]) ==
          doctest::Approx(direct.expectations.at("magnetization")).epsilon(1e-12));
    CHECK(std::stod(row[12]) ==
          doctest::Approx(direct.expectations.at(site_key(Site{0, 0, 0})))
              .epsilon(1e-12));
    CHECK(std::stod(row[14]) == doctest::Approx(6.0));
    CHECK(split_row(lines[2])[8] == "slim_only");
    CHECK(split_row(lines[3])[7] == "minus");

    // manifest carries provenance, not numbers
    fs::path manifest =
        only_file(fs::path(dir) / "exact-verify", "manifest-", ".json");
    nlohmann::json doc = nlohmann::json::parse(slurp(manifest));
    CHECK(doc.at("kind") == "exact-verify");
    CHECK(doc.at("status") == "ok");
    CHECK(doc.at("rows") == 4);
    CHECK(doc.at("version") == std::string(ISINGLAB_VERSION));
    CHECK(doc.at("rng_id") == std::string(RNG_ID));
    CHECK(doc.at("point").at("L") == "1");
    CHECK(doc.count("error") == 0);

    // a second run rewrites the same CSV byte for byte
    std::vector<RunRecord> again = run(cfg);
    CHECK(again[0].csv_rows == r.csv_rows);
    CHECK(slurp(csv) == bytes);
    fs::remove_all(dir);
}

TEST_CASE("worker count does not change the output") {
    const std::string dir = "exp_workers_out";
    fs::remove_all(dir);
    RunConfig cfg = tiny_exact_cfg(dir);
    cfg.beta = {0.3, 0.6};

    RunOptions serial;
    std::vector<RunRecord> a = run(cfg, serial);
    fs::path csv = only_file(fs::path(dir) / "exact-verify", "run-", ".csv");
    std::string bytes = slurp(csv);

    RunOptions pooled;
    pooled.workers = 3;
    std::vector<RunRecord> b = run(cfg, pooled);
    REQUIRE(a.size() == 2);
    REQUIRE(b.size() == 2);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].csv_rows == b[i].csv_rows);
    CHECK(slurp(csv) == bytes);
    fs::remove_all(dir);
}

TEST_CASE("out_dir option overrides the config") {
    fs::remove_all("exp_cfg_dir");
    fs::remove_all("exp_opt_dir");
    RunConfig cfg = tiny_exact_cfg("exp_cfg_dir");
    RunOptions opts;
    opts.out_dir = "exp_opt_dir";
    run(cfg, opts);
    CHECK(fs::exists("exp_opt_dir/exact-verify"));
    CHECK_FALSE(fs::exists("exp_cfg_dir"));
    fs::remove_all("exp_opt_dir");
}

TEST_CASE("a failing grid point becomes an error record") {
    const std::string dir = "exp_error_out";
    fs::remove_all(dir);
    RunConfig cfg;
    cfg.kind = "peierls-scan";
    cfg.L = {1};
    cfg.max_size = 2;
    cfg.site_cap = 1;  // ratio check on a 2-cell interior must refuse
    cfg.out_dir = dir;
    std::vector<RunRecord> records = run(cfg);
    REQUIRE(records.size() == 1);
    CHECK(records[0].status == "error");
    CHECK_FALSE(records[0].error.empty());
    CHECK(records[0].csv_rows.empty());

    fs::path csv = only_file(fs::path(dir) / "peierls-scan", "run-", ".csv");
    CHECK(split_lines(slurp(csv)).size() == 1);  // header only
    nlohmann::json doc = nlohmann::json::parse(
        slurp(only_file(fs::path(dir) / "peierls-scan", "manifest-", ".json")));
    CHECK(doc.at("status") == "error");
    CHECK(doc.at("rows") == 0);
    CHECK_FALSE(doc.at("error").get<std::string>().empty());
    fs::remove_all(dir);
}

TEST_CASE("an empty grid is refused up front") {
    RunConfig cfg;
    cfg.kind = "animals";
    cfg.beta.clear();
    cfg.out_dir = "exp_should_not_exist";
    CHECK_THROWS_AS(run(cfg), ValidationError);
    CHECK_FALSE(fs::exists("exp_should_not_exist"));
}

TEST_CASE("diagnostics stream captures per-sample cluster documents") {
    const std::string dir = "exp_diag_out";
    fs::remove_all(dir);
    RunConfig cfg;
    cfg.kind = "mc-gap";
    cfg.L = {1};
    cfg.alpha = {0.5};
    cfg.beta = {0.5};
    cfg.boundary = {"minus"};
    cfg.sweeps = 30;
    cfg.burn_in = 10;
    cfg.thin = 5;
    cfg.algorithm = "metropolis";
    cfg.out_dir = dir;
    RunOptions opts;
    opts.diagnostics = true;
    run(cfg, opts);

    fs::path jl = only_file(fs::path(dir) / "mc-gap", "diagnostics-", ".jsonl");
    std::vector<std::string> lines = split_lines(slurp(jl));
    REQUIRE(lines.size() == 4);  // retained sweeps 10,15,20,25
    nlohmann::json doc = nlohmann::json::parse(lines[0]);
    CHECK(doc.at("sweep") == 10);
    CHECK(doc.at("L") == "1");
    CHECK(doc.at("boundary") == "minus");
    CHECK(doc.at("C_L_size").is_number());
    CHECK(doc.at("M_k").is_array());
    CHECK(doc.at("M_k").size() == 2);  // shell bucket plus the outer entry
    CHECK(doc.at("s").is_array());     // alpha < 1 turns the sequence on
    CHECK(doc.at("G_event").is_boolean());
    CHECK(doc.at("b_ok").is_boolean());
    CHECK(doc.at("penetration_empty").is_boolean());
    CHECK(nlohmann::json::parse(lines[3]).at("sweep") == 25);
    fs::remove_all(dir);
}

TEST_CASE("report on missing or empty directories says no data") {
    Report rep = report("exp_no_such_results_dir");
    CHECK(rep.no_data);
    CHECK(rep.text == "no data\n");
    CHECK(rep.plot_files.empty());
    CHECK_FALSE(fs::exists("exp_no_such_results_dir/plots"));
}

TEST_CASE("report assembles gap, penetration and c2 summaries") {
    const std::string dir = "exp_report_out";
    fs::remove_all(dir);

    RunConfig mc;
    mc.kind = "mc-gap";
    mc.L = {1};
    mc.alpha = {2.0};
    mc.beta = {0.5};
    mc.boundary = {"plus", "minus"};
    mc.sweeps = 60;
    mc.burn_in = 10;
    mc.algorithm = "metropolis";
    mc.out_dir = dir;
    std::vector<RunRecord> mcr = run(mc);
    REQUIRE(mcr.size() == 2);

    RunConfig pen;
    pen.kind = "penetration";
    pen.L = {2};
    pen.alpha = {2.0};
    pen.beta = {0.5};
    pen.n_samples = 6;
    pen.burn_in = 5;
    pen.algorithm = "metropolis";
    pen.out_dir = dir;
    run(pen);

    run(tiny_exact_cfg(dir));

    Report rep = report(dir);
    CHECK_FALSE(rep.no_data);
    CHECK(rep.text.find("gap vs L") != std::string::npos);
    CHECK(rep.text.find("penetration fraction") != std::string::npos);
    CHECK(rep.text.find("fitted c2") != std::string::npos);
    REQUIRE(rep.plot_files.count("gap_vs_L.csv") == 1);
    REQUIRE(rep.plot_files.count("penetration_vs_L.csv") == 1);
    REQUIRE(rep.plot_files.count("fitted_c2.csv") == 1);
    for (const auto& [name, content] : rep.plot_files)
        CHECK(slurp(fs::path(dir) / "plots" / name) == content);

    // the gap line reproduces mean_plus - mean_minus from the run records
    auto sigma0_row = [](const RunRecord& r) {
        for (const std::string& line : r.csv_rows) {
            std::vector<std::string> cells = split_row(line);
            if (cells[9] == "sigma0") return cells;
        }
        FAIL("no sigma0 row");
        return std::vector<std::string>{};
    };
    std::vector<std::string> plus = sigma0_row(mcr[0]);
    std::vector<std::string> minus = sigma0_row(mcr[1]);
    REQUIRE(plus[6] == "plus");
    REQUIRE(minus[6] == "minus");
    double want_gap = std::stod(plus[10]) - std::stod(minus[10]);
    double want_se = std::hypot(std::stod(plus[11]), std::stod(minus[11]));

    std::vector<std::string> gap_lines =
        split_lines(rep.plot_files.at("gap_vs_L.csv"));
    REQUIRE(gap_lines.size() == 2);
    CHECK(gap_lines[0] == "alpha,beta,seed,L,gap,std_error");
    std::vector<std::string> g = split_row(gap_lines[1]);
    CHECK(g[0] == "2");
    CHECK(g[3] == "1");
    CHECK(std::stod(g[4]) == doctest::Approx(want_gap).epsilon(1e-12));
    CHECK(std::stod(g[5]) == doctest::Approx(want_se).epsilon(1e-12));

    // fitted c2 against the direct slim partition functions
    ExactOptions eo;
    CouplingSpec c(1.0, 0.5);
    FieldSpec f(1.0, 2.0);
    auto slim = EnsembleConstraint::slim_only();
    double zp = partition_function(cube(1, 2), Boundary::plus(), c, f, slim).log_Z;
    double zm = partition_function(cube(1, 2), Boundary::minus(), c, f, slim).log_Z;
    std::vector<std::string> c2_lines =
        split_lines(rep.plot_files.at("fitted_c2.csv"));
    REQUIRE(c2_lines.size() == 2);
    std::vector<std::string> c2 = split_row(c2_lines[1]);
    CHECK(std::stod(c2[4]) == doctest::Approx(zm - zp).epsilon(1e-10));
    CHECK(std::stod(c2[5]) ==
          doctest::Approx(-(zm - zp) / (0.5 * 6.0)).epsilon(1e-10));
    fs::remove_all(dir);
}

TEST_CASE("report refuses a drifted schema") {
    const std::string dir = "exp_drift_out";
    fs::remove_all(dir);
    fs::create_directories(fs::path(dir) / "animals");
    {
        std::ofstream out(fs::path(dir) / "animals" / "run-feedbeef.csv");
        out << "d,beta\n2,1\n";
    }
    CHECK_THROWS_AS(report(dir), ValidationError);
    fs::remove_all(dir);
}
