#pragma once

#include <map>
#include <string>
#include <vector>

#include "isinglab/configfile.hpp"

namespace isinglab {

// One grid point's outcome. CSV rows carry the numbers; the record itself
// is persisted as a JSON manifest (the only place timestamps appear, so
// reruns stay byte-identical on the CSV side).
struct RunRecord {
    std::string kind;
    std::map<std::string, std::string> point;
    std::string status;  // "ok" or "error"
    std::string error;
    std::vector<std::string> csv_rows;
    std::string started_at;
    std::string finished_at;
    std::string version;
    std::string rng_id;
};

struct RunOptions {
    int workers = 1;
    bool diagnostics = false;
    std::string out_dir;  // overrides config when nonempty
};

// Fixed CSV header per experiment kind.
const std::map<std::string, std::string>& csv_schemas();

// Executes every grid point (worker threads across points, deterministic
// output order), writing <out>/<kind>/run-<hash>.csv incrementally plus one
// manifest JSON per record. Per-point failures become error records; I/O
// failures throw.
std::vector<RunRecord> run(const RunConfig& cfg, const RunOptions& opts = {});

struct Report {
    std::string text;
    std::map<std::string, std::string> plot_files;  // name -> CSV content
    bool no_data = true;
};

// Summarizes the CSVs under results_dir (gap vs L, penetration fractions,
// fitted c2, animal sums) and prepares plot-ready CSV pairs. Also writes the
// plot files into results_dir/plots.
Report report(const std::string& results_dir);

}  // namespace isinglab
