#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "isinglab/lattice.hpp"

namespace isinglab {

// Default refusal thresholds: past these the animal count explodes
// (d=2 size 10 already has ~66M origin-containing animals).
inline std::size_t star_animal_default_cap(int d) { return d == 2 ? 10 : 6; }

// Visit every star-connected animal containing the origin with
// |D| <= max_size, each exactly once, deterministic order.
// Throws CapError when max_size exceeds the default cap unless allow_large.
void for_each_star_animal(std::size_t max_size, int d,
                          const std::function<bool(const Region&)>& fn,
                          bool allow_large = false);

// Convenience collector (tests, small sizes).
std::vector<Region> star_animals(std::size_t max_size, int d,
                                 bool allow_large = false);

// Number of star animals containing the origin, by size (index 1..max_size).
std::vector<std::uint64_t> star_animal_counts(std::size_t max_size, int d,
                                              bool allow_large = false);

// sum over star animals D containing 0, |D| <= max_size, of e^{-2 beta J |D|}.
double animal_partial_sum(double beta, double J, std::size_t max_size, int d,
                          bool allow_large = false);

}  // namespace isinglab
