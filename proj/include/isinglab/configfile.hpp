#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace isinglab {

// Parsed experiment configuration. Lists under [grid] form a cartesian
// product of run points; scalar settings apply to every point.
struct RunConfig {
    std::string kind;

    int d = 2;
    std::vector<int> L{1};
    std::vector<double> alpha{2.0};
    std::vector<double> beta{1.0};
    std::vector<double> h_star{1.0};
    std::vector<double> J{1.0};
    std::vector<std::string> boundary{"plus", "minus"};
    std::vector<int> R;  // field-scan radii

    std::vector<std::uint64_t> seeds{1};
    long sweeps = 4000;
    long burn_in = -1;  // negative: chain default 10*L
    long thin = 1;
    std::string algorithm = "mixed";
    std::string init = "ground_uniform";
    long n_samples = 200;
    double b_star = 0.6;
    double b = -1.0;  // negative: default 0.009 / n_star

    std::optional<int> truncation_radius;

    std::size_t site_cap = 25;
    int max_size = 6;        // peierls-scan / animals size cap
    int box_radius = 5;      // fat-sum candidate ball
    long max_boundary = 12;  // fat-sum boundary cutoff

    std::string out_dir = "results";

    // Fail-fast check of the whole grid against the preconditions of the
    // operations the kind will call. Throws ValidationError.
    void validate() const;
};

const std::vector<std::string>& experiment_kinds();

// Sectioned key-value text: [section] headers, key = value lines, comma
// lists, '#' comments. Unknown sections or keys are parse errors.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

}  // namespace isinglab
