#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "isinglab/field.hpp"
#include "isinglab/lattice.hpp"

namespace isinglab {

enum class BoundaryKind { plus, minus, explicit_map };

// Boundary condition outside the region. Uniform boundaries extend to all of
// the complement; an explicit boundary assigns spins exactly on delta_out.
struct Boundary {
    BoundaryKind kind = BoundaryKind::plus;
    std::map<Site, int> spins;

    static Boundary plus() { return {BoundaryKind::plus, {}}; }
    static Boundary minus() { return {BoundaryKind::minus, {}}; }
    static Boundary explicit_map(std::map<Site, int> s) {
        return {BoundaryKind::explicit_map, std::move(s)};
    }
};

// Spins on a finite region plus its boundary condition.
class SpinConfig {
  public:
    SpinConfig(Region region, std::vector<std::int8_t> spins, Boundary boundary);
    static SpinConfig uniform(Region region, int spin, Boundary boundary);

    const Region& region() const { return region_; }
    const Boundary& boundary() const { return boundary_; }
    const std::vector<std::int8_t>& spins() const { return spins_; }

    int spin_at(const Site& s) const;           // region sites only
    int spin_or_boundary(const Site& s) const;  // falls back to boundary
    void set_spin(const Site& s, int v);
    void set_spin(std::size_t index, int v) { spins_[index] = std::int8_t(v); }

  private:
    Region region_;
    std::vector<std::int8_t> spins_;
    Boundary boundary_;
};

// Unordered nearest-neighbor pair, normalized a < b.
struct Bond {
    Site a;
    Site b;
    auto operator<=>(const Bond&) const = default;
};

Bond make_bond(const Site& s, const Site& t);

// One contour: a maximal dual-connected set of opposite-spin bonds, plus the
// geometry derived from it.
struct Contour {
    std::vector<Bond> broken_bonds;  // sorted
    Region interior;                 // sites separated from infinity by the contour
    long boundary_size = 0;          // |d interior|
    int sign = 0;                    // spin on delta_out(interior)
    Site min_site;                   // smallest interior site, (l1, lex) order
};

// All contours of the configuration extended by its boundary condition,
// ordered by min_site in (l1, lex) order. d=2 and d=3.
std::vector<Contour> extract_contours(const SpinConfig& s);

// Interior of a set of broken bonds: cells not reachable from far away
// without crossing one of them.
Region contour_interior(const std::vector<Bond>& bonds, int d);

struct SlimFatTag {
    bool slim;   // J |dI| > 2 sum_I h
    double lhs;
    double rhs;
};

SlimFatTag classify(const Contour& g, const CouplingSpec& c, const FieldSpec& f);

// e^{-beta J |dI(gamma)|}.
double peierls_weight_bound(const Contour& g, const CouplingSpec& c);

// For fat contours anchored at x != 0:
//   |dI| >= (J / (2 C_p h*))^{d-1} |x|^{alpha (d-1)},  C_p = (2d)^{-d/(d-1)}.
// Throws std::domain_error at x = 0.
double fat_boundary_lower_bound(const Site& x, const CouplingSpec& c,
                                const FieldSpec& f, int d);

// Connected hole-free subsets of `within` up to max_size: the candidate
// single-contour interiors. Deterministic order.
void for_each_candidate_interior(const Region& within, std::size_t max_size,
                                 const std::function<bool(const Region&)>& fn);

struct FatSum {
    double value = 0.0;  // sum of e^{-beta J |dI|} over enumerated fat interiors
    long terms = 0;
};

// Single-contour partial sum over fat interiors inside ball(box_radius) with
// |dI| <= max_boundary. The interior size cap implied by max_boundary via the
// isoperimetric inequality keeps the sweep finite; caps refuse oversize
// requests unless allow_large.
FatSum fat_sum_partial(const CouplingSpec& c, const FieldSpec& f, int box_radius,
                       long max_boundary, bool allow_large = false);

}  // namespace isinglab
