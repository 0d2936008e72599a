#include "isinglab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "isinglab/errors.hpp"

namespace isinglab {

Estimate estimate_series(const std::vector<double>& xs) {
    if (xs.empty()) throw ValidationError("estimate_series: empty series");
    const std::size_t n = xs.size();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(n);

    Estimate e;
    e.mean = mean;
    e.n_samples = n;

    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= double(n);

    const double floor_se = 2.0 / double(n);
    if (var <= 0.0 || n < 4) {
        e.std_error = std::max(n > 1 ? std::sqrt(var / double(n)) : 0.0, floor_se);
        return e;
    }

    double tau = 0.5;
    const std::size_t tmax = n / 2;
    for (std::size_t t = 1; t <= tmax; ++t) {
        double g = 0.0;
        for (std::size_t i = 0; i + t < n; ++i)
            g += (xs[i] - mean) * (xs[i + t] - mean);
        g /= double(n - t);
        tau += g / var;
        if (double(t) >= 6.0 * tau) break;
        if (tau < 0.5) {
            tau = 0.5;
            break;
        }
    }
    tau = std::max(tau, 0.5);
    e.autocorrelation_time = tau;
    e.std_error = std::max(std::sqrt(2.0 * tau * var / double(n)), floor_se);
    return e;
}

BinomialCI binomial_ci(long successes, long trials, double z) {
    if (trials <= 0 || successes < 0 || successes > trials)
        throw ValidationError("binomial_ci: need 0 <= successes <= trials, trials >= 1");
    const double nd = double(trials);
    const double p = double(successes) / nd;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nd;
    const double center = (p + z2 / (2.0 * nd)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd)) / denom;
    BinomialCI ci;
    ci.p_hat = p;
    ci.lo = std::max(0.0, center - half);
    ci.hi = std::min(1.0, center + half);
    return ci;
}

}  // namespace isinglab
