#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "isinglab/configfile.hpp"
#include "isinglab/errors.hpp"
#include "isinglab/experiment.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/version.hpp"

namespace {

int run_experiment(const std::string& kind, const std::string& config_path,
                   int workers, bool diagnostics, const std::string& out_dir) {
    isinglab::RunConfig cfg;
    try {
        cfg = isinglab::load_config(config_path);
        if (cfg.kind.empty()) cfg.kind = kind;
        if (cfg.kind != kind)
            throw isinglab::ValidationError("config kind '" + cfg.kind +
                                            "' does not match subcommand '" +
                                            kind + "'");
        if (const char* cap = std::getenv("ISINGLAB_CAP_SITES")) {
            int v = 0;
            std::string s(cap);
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size())
                throw isinglab::ValidationError(
                    "ISINGLAB_CAP_SITES is not an integer: " + s);
            cfg.site_cap = std::clamp(v, 1, 30);
        }
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    isinglab::RunOptions opts;
    opts.workers = workers;
    opts.diagnostics = diagnostics;
    opts.out_dir = out_dir;
    try {
        auto records = isinglab::run(cfg, opts);
        long errors = 0;
        for (const auto& r : records) {
            if (r.status != "ok") {
                ++errors;
                std::cerr << "point failed:";
                for (const auto& [k, v] : r.point) std::cerr << " " << k << "=" << v;
                std::cerr << "\n  " << r.error << "\n";
            }
        }
        const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
        std::cout << cfg.kind << ": " << records.size() << " points, " << errors
                  << " failed, results in " << dir << "/" << cfg.kind << "\n";
        return errors ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_report(const std::string& results_dir) {
    try {
        isinglab::Report rep = isinglab::report(results_dir);
        std::cout << rep.text;
        if (rep.no_data) {
            std::cerr << "no result files under " << results_dir << "\n";
            return 3;
        }
        for (const auto& [name, content] : rep.plot_files)
            std::cout << "wrote " << results_dir << "/plots/" << name << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ising model experiments: exact verification, contour scans "
                 "and Monte Carlo drivers"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int workers = 1;
    bool diagnostics = false;

    std::vector<CLI::App*> experiment_subs;
    for (const std::string& kind : isinglab::experiment_kinds()) {
        CLI::App* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
        sub->add_option("--config", config_path, "experiment config file")
            ->required();
        sub->add_option("--workers", workers, "worker threads (default 1)");
        sub->add_flag("--diagnostics", diagnostics,
                      "write per-sample cluster diagnostics (jsonl)");
        sub->add_option("--out", out_dir, "override output directory");
        experiment_subs.push_back(sub);
    }

    std::string results_dir = "results";
    CLI::App* rep = app.add_subcommand("report", "summarize a results directory");
    rep->add_option("dir", results_dir, "results directory (default: results)");

    CLI::App* ver = app.add_subcommand("version", "print version and rng id");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (ver->parsed()) {
        std::cout << "isinglab " << isinglab::ISINGLAB_VERSION << " (rng: "
                  << isinglab::RNG_ID << ")\n";
        return 0;
    }
    if (rep->parsed()) return run_report(results_dir);

    for (CLI::App* sub : experiment_subs)
        if (sub->parsed())
            return run_experiment(sub->get_name(), config_path, workers,
                                  diagnostics, out_dir);
    return 1;
}
