#pragma once

#include <cstddef>
#include <vector>

namespace isinglab {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    double autocorrelation_time = 0.5;
};

// Mean with an autocorrelation-aware error bar: integrated autocorrelation
// time by the self-consistent window rule (window W = smallest t >= 6 tau),
// std_error = sqrt(2 tau var / n). Near-constant series get a 2/n floor so
// downstream sigma tests stay meaningful.
Estimate estimate_series(const std::vector<double>& xs);

struct BinomialCI {
    double p_hat = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval.
BinomialCI binomial_ci(long successes, long trials, double z = 1.96);

}  // namespace isinglab
