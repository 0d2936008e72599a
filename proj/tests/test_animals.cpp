#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "isinglab/animals.hpp"
#include "isinglab/errors.hpp"
#include "oracle.hpp"

using namespace isinglab;

TEST_CASE("star animal counts match the independent enumerator") {
    auto counts2 = star_animal_counts(4, 2);
    REQUIRE(counts2.size() == 5);
    for (int n = 1; n <= 4; ++n)
        CHECK(counts2[std::size_t(n)] == oracle::count_star_animals(n, 2));
    CHECK(counts2[1] == 1);
    CHECK(counts2[2] == 8);
    auto counts3 = star_animal_counts(3, 3);
    for (int n = 1; n <= 3; ++n)
        CHECK(counts3[std::size_t(n)] == oracle::count_star_animals(n, 3));
    CHECK(counts3[2] == 26);  // 3^3 - 1 neighbors
}

TEST_CASE("enumeration yields each origin animal once, star connected") {
    std::set<std::vector<Site>> seen;
    std::size_t visits = 0;
    for_each_star_animal(3, 2, [&](const Region& r) {
        CHECK(r.contains({0, 0, 0}));
        CHECK(connected_components(r, Adjacency::star).size() == 1);
        seen.insert(r.sites());
        ++visits;
        return true;
    });
    CHECK(seen.size() == visits);
    auto counts = star_animal_counts(3, 2);
    CHECK(visits == counts[1] + counts[2] + counts[3]);
    // early stop
    std::size_t n = 0;
    for_each_star_animal(3, 2, [&](const Region&) { return ++n < 5; });
    CHECK(n == 5);
    // collector agrees
    CHECK(star_animals(3, 2).size() == visits);
}

TEST_CASE("animal_partial_sum arithmetic") {
    // max_size 1: single animal, e^{-2 beta J}
    CHECK(animal_partial_sum(1.0, 1.0, 1, 2) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    // max_size 2 at beta = J = 1: e^{-2} + 8 e^{-4}
    CHECK(animal_partial_sum(1.0, 1.0, 2, 2) ==
          doctest::Approx(std::exp(-2.0) + 8.0 * std::exp(-4.0))
              .epsilon(1e-14));
    // general: recompute from counts
    auto counts = star_animal_counts(5, 2);
    double want = 0;
    for (std::size_t m = 5; m >= 1; --m)
        want += double(counts[m]) * std::exp(-2.0 * 0.7 * 1.3 * double(m));
    CHECK(animal_partial_sum(0.7, 1.3, 5, 2) == doctest::Approx(want));
    // beta = 0 degenerates to the raw animal count
    double total = 0;
    for (std::size_t m = 1; m <= 3; ++m) total += double(counts[m]);
    CHECK(animal_partial_sum(0.0, 1.0, 3, 2) == doctest::Approx(total));
}

TEST_CASE("caps refuse oversize enumerations unless overridden") {
    CHECK_THROWS_AS(star_animal_counts(11, 2), CapError);
    CHECK_THROWS_AS(star_animal_counts(7, 3), CapError);
    CHECK_THROWS_AS(animal_partial_sum(1.0, 1.0, 11, 2), CapError);
    CHECK_THROWS_AS(star_animal_counts(3, 4), ValidationError);
    CHECK_THROWS_AS(animal_partial_sum(-0.1, 1.0, 2, 2), ValidationError);
}
