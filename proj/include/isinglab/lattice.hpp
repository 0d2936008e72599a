#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "isinglab/errors.hpp"

namespace isinglab {

// Lattice site on Z^d, d in {2,3}. z stays 0 in d=2.
struct Site {
    int x = 0;
    int y = 0;
    int z = 0;
    auto operator<=>(const Site&) const = default;
};

inline int l1_norm(const Site& s) {
    return (s.x < 0 ? -s.x : s.x) + (s.y < 0 ? -s.y : s.y) + (s.z < 0 ? -s.z : s.z);
}

inline int linf_norm(const Site& s) {
    int ax = s.x < 0 ? -s.x : s.x;
    int ay = s.y < 0 ? -s.y : s.y;
    int az = s.z < 0 ? -s.z : s.z;
    int m = ax > ay ? ax : ay;
    return m > az ? m : az;
}

// Order by (l1 norm, lexicographic); the anchor order used for contour
// interiors and animal anchors.
inline bool closer_to_origin(const Site& a, const Site& b) {
    int na = l1_norm(a), nb = l1_norm(b);
    if (na != nb) return na < nb;
    return a < b;
}

enum class Adjacency { nearest, star };  // star = l_inf distance 1

// Neighbor offsets, fixed deterministic order.
const std::vector<Site>& nn_offsets(int d);
const std::vector<Site>& star_offsets(int d);

// Finite subset of Z^d with value semantics. Sites kept sorted and unique.
class Region {
  public:
    Region() : d_(2) {}
    Region(std::vector<Site> sites, int d);

    int dim() const { return d_; }
    bool empty() const { return sites_.empty(); }
    std::size_t size() const { return sites_.size(); }
    const std::vector<Site>& sites() const { return sites_; }
    bool contains(const Site& s) const;
    std::optional<std::size_t> index_of(const Site& s) const;

    void insert(const Site& s);

    friend bool operator==(const Region&, const Region&) = default;

  private:
    std::vector<Site> sites_;
    int d_;
};

Region region_union(const Region& a, const Region& b);
Region region_difference(const Region& a, const Region& b);
Region region_intersection(const Region& a, const Region& b);

// l1 ball {x : |x|_1 <= radius}. Throws CapError past site_cap.
Region ball(int radius, int d, std::size_t site_cap = 4'500'000);

// Sites with |x|_1 == radius exactly.
Region shell_l1(int radius, int d);

// Cube Lambda_L = {x : |x|_inf <= L}, side 2L+1.
Region cube(int L, int d, std::size_t site_cap = 4'500'000);

// Inner boundary: sites of K with a nearest neighbor outside K.
Region delta_in(const Region& K);
// Outer boundary: sites outside K with a nearest neighbor in K.
Region delta_out(const Region& K);

// |dK|: number of nearest-neighbor pairs with exactly one end in K.
long boundary_edge_count(const Region& K);

// Nearest-neighbor or star connected components, each component's site list
// sorted; components ordered by their lexicographically smallest site.
std::vector<Region> connected_components(const Region& K,
                                         Adjacency adj = Adjacency::nearest);

// Fill the finite holes of K: complement components inside bounding_box that
// do not touch the box frame get added to K. K must lie inside bounding_box.
Region fill_holes(const Region& K, const Region& bounding_box);

// True if K has no holes w.r.t. its own bounding box plus margin 1.
bool is_hole_free(const Region& K);

struct IsoperimetricCheck {
    double lhs;  // |K|^((d-1)/d)
    double rhs;  // |dK| / (2d)
    bool holds;  // lhs <= rhs (+ tiny float slack)
};

IsoperimetricCheck isoperimetric_check(const Region& K);

// Smallest site in (l1 norm, lexicographic) order.
Site min_site_l1(const Region& K);

// Bounding box [lo, hi] per axis; unset z for d=2 comes back as [0,0].
struct Box {
    Site lo;
    Site hi;
};
Box bounding_box(const Region& K);
Region box_region(const Box& b, int d);

// Enumerate connected subsets of `universe` (given adjacency) of size
// <= max_size, each exactly once, via anchor-and-grow: the anchor is the
// subset's smallest site in `universe` order and growth only uses
// later-indexed sites (Redelmeier's untried-set scheme on a finite graph).
// Visit order is deterministic. Return false from fn to stop early.
void for_each_connected_subset(const Region& universe, std::size_t max_size,
                               Adjacency adj,
                               const std::function<bool(const Region&)>& fn);

// Same, but only subsets whose smallest site is universe.sites().front().
void for_each_connected_subset_anchored(const Region& universe,
                                        std::size_t max_size, Adjacency adj,
                                        const std::function<bool(const Region&)>& fn);

// Enumerate each fixed shape (translation class of connected sets) of size
// <= max_size exactly once, canonically translated so the lexicographically
// smallest site is the origin.
void for_each_fixed_shape(std::size_t max_size, int d, Adjacency adj,
                          const std::function<bool(const Region&)>& fn);

}  // namespace isinglab
