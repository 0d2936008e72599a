#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "isinglab/errors.hpp"
#include "isinglab/stats.hpp"

using namespace isinglab;

TEST_CASE("iid series: tau near one half, classic standard error") {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> xs(20000);
    for (double& x : xs) x = gauss(rng);
    Estimate e = estimate_series(xs);
    CHECK(e.n_samples == xs.size());
    CHECK(std::abs(e.mean) < 0.05);
    CHECK(e.autocorrelation_time == doctest::Approx(0.5).epsilon(0.2));
    double var = 0.0;
    for (double x : xs) var += (x - e.mean) * (x - e.mean);
    var /= double(xs.size());
    // with tau = 1/2 this reduces to sqrt(var/n)
    CHECK(e.std_error ==
          doctest::Approx(std::sqrt(2.0 * e.autocorrelation_time * var /
                                    double(xs.size())))
              .epsilon(1e-12));
    CHECK(e.std_error == doctest::Approx(std::sqrt(var / xs.size())).epsilon(0.25));
}

TEST_CASE("AR(1) series recovers the known autocorrelation time") {
    // x_{t+1} = rho x_t + noise: integrated tau = (1+rho)/(2(1-rho))
    for (double rho : {0.5, 0.8}) {
        std::mt19937_64 rng(99);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> xs;
        xs.reserve(200000);
        double x = 0.0;
        for (int i = 0; i < 200000; ++i) {
            x = rho * x + gauss(rng);
            xs.push_back(x);
        }
        double want = (1.0 + rho) / (2.0 * (1.0 - rho));
        Estimate e = estimate_series(xs);
        CHECK(e.autocorrelation_time == doctest::Approx(want).epsilon(0.15));
        // error bar inflated accordingly vs the naive one
        double var = 0.0;
        for (double v : xs) var += (v - e.mean) * (v - e.mean);
        var /= double(xs.size());
        double naive = std::sqrt(var / double(xs.size()));
        CHECK(e.std_error > 1.2 * naive);
    }
}

TEST_CASE("constant and tiny series hit the floor") {
    Estimate c = estimate_series(std::vector<double>(100, 3.25));
    CHECK(c.mean == doctest::Approx(3.25));
    CHECK(c.std_error == doctest::Approx(2.0 / 100.0));
    CHECK(c.autocorrelation_time == doctest::Approx(0.5));
    Estimate one = estimate_series({7.0});
    CHECK(one.mean == doctest::Approx(7.0));
    CHECK(one.std_error == doctest::Approx(2.0));
    Estimate two = estimate_series({1.0, 2.0});
    CHECK(two.mean == doctest::Approx(1.5));
    CHECK(two.std_error >= 1.0);  // floor 2/n
    CHECK_THROWS_AS(estimate_series({}), ValidationError);
}

TEST_CASE("floor keeps small-sample error bars honest") {
    // 10 nearly identical values: plain sqrt(var/n) would be absurdly small
    std::vector<double> xs(10, 1.0);
    xs[0] = 1.0 + 1e-9;
    Estimate e = estimate_series(xs);
    CHECK(e.std_error == doctest::Approx(0.2));  // 2/10
}

TEST_CASE("Wilson interval hand values") {
    // p = 0.5, n = 100, z = 1.96: the textbook interval
    BinomialCI ci = binomial_ci(50, 100);
    CHECK(ci.p_hat == doctest::Approx(0.5));
    CHECK(ci.lo == doctest::Approx(0.404).epsilon(0.01));
    CHECK(ci.hi == doctest::Approx(0.596).epsilon(0.01));
    // extremes stay inside [0, 1] and never collapse to a point
    BinomialCI zero = binomial_ci(0, 20);
    CHECK(zero.p_hat == 0.0);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    CHECK(zero.hi < 0.25);
    BinomialCI all = binomial_ci(20, 20);
    CHECK(all.hi == 1.0);
    CHECK(all.lo < 1.0);
    CHECK(all.lo > 0.75);
    // symmetric counts give mirrored intervals
    BinomialCI a = binomial_ci(30, 100), b = binomial_ci(70, 100);
    CHECK(a.lo == doctest::Approx(1.0 - b.hi));
    CHECK(a.hi == doctest::Approx(1.0 - b.lo));
    // z = 0 collapses onto p_hat
    BinomialCI pt = binomial_ci(3, 10, 0.0);
    CHECK(pt.lo == doctest::Approx(0.3));
    CHECK(pt.hi == doctest::Approx(0.3));
    CHECK_THROWS_AS(binomial_ci(5, 0), ValidationError);
    CHECK_THROWS_AS(binomial_ci(-1, 10), ValidationError);
    CHECK_THROWS_AS(binomial_ci(11, 10), ValidationError);
}
