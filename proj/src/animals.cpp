#include "isinglab/animals.hpp"

#include <cmath>
#include <string>

namespace isinglab {

namespace {

void check_cap(std::size_t max_size, int d, bool allow_large) {
    if (d != 2 && d != 3) throw ValidationError("dimension must be 2 or 3");
    if (!allow_large && max_size > star_animal_default_cap(d))
        throw CapError("star animal enumeration of size " + std::to_string(max_size) +
                       " in d=" + std::to_string(d) + " refused (cap " +
                       std::to_string(star_animal_default_cap(d)) +
                       "); pass allow_large to override");
}

}  // namespace

void for_each_star_animal(std::size_t max_size, int d,
                          const std::function<bool(const Region&)>& fn,
                          bool allow_large) {
    check_cap(max_size, d, allow_large);
    // canonical shapes have their lex-min cell at the origin; each animal
    // containing the origin is a unique (shape, cell) translate
    for_each_fixed_shape(max_size, d, Adjacency::star, [&](const Region& shape) {
        for (const Site& c : shape.sites()) {
            std::vector<Site> moved;
            moved.reserve(shape.size());
            for (const Site& s : shape.sites())
                moved.push_back({s.x - c.x, s.y - c.y, s.z - c.z});
            if (!fn(Region(std::move(moved), d))) return false;
        }
        return true;
    });
}

std::vector<Region> star_animals(std::size_t max_size, int d, bool allow_large) {
    std::vector<Region> out;
    for_each_star_animal(max_size, d, [&](const Region& r) {
        out.push_back(r);
        return true;
    }, allow_large);
    return out;
}

std::vector<std::uint64_t> star_animal_counts(std::size_t max_size, int d,
                                              bool allow_large) {
    check_cap(max_size, d, allow_large);
    std::vector<std::uint64_t> counts(max_size + 1, 0);
    for_each_fixed_shape(max_size, d, Adjacency::star, [&](const Region& shape) {
        counts[shape.size()] += shape.size();  // one animal per marked cell
        return true;
    });
    return counts;
}

double animal_partial_sum(double beta, double J, std::size_t max_size, int d,
                          bool allow_large) {
    if (beta < 0 || J < 0) throw ValidationError("animal_partial_sum: beta, J >= 0");
    auto counts = star_animal_counts(max_size, d, allow_large);
    double sum = 0.0;
    for (std::size_t n = max_size; n >= 1; --n)
        sum += double(counts[n]) * std::exp(-2.0 * beta * J * double(n));
    return sum;
}

}  // namespace isinglab
