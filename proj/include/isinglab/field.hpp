#pragma once

#include <map>
#include <optional>
#include <vector>

#include "isinglab/lattice.hpp"

namespace isinglab {

// External field h(x) = h*/|x|_1^alpha (h* at the origin), optionally
// truncated to 0 on |x|_1 <= truncation_radius, plus a sparse perturbation.
// The total field must stay >= 0 everywhere.
struct FieldSpec {
    double h_star;
    double alpha;
    std::optional<int> truncation_radius;
    std::map<Site, double> perturbation;

    FieldSpec(double h_star, double alpha,
              std::optional<int> truncation_radius = std::nullopt,
              std::map<Site, double> perturbation = {});
};

struct CouplingSpec {
    double J;
    double beta;

    CouplingSpec(double J, double beta);
};

double field_at(const Site& x, const FieldSpec& f);

// Sum of h over K, compensated (Kahan) accumulation.
double field_sum(const Region& K, const FieldSpec& f);

struct PeierlsCondition {
    double lhs;  // J |dK|
    double rhs;  // 2 sum_K h
    bool holds;  // strict: lhs > rhs
};

PeierlsCondition peierls_condition(const Region& K, const CouplingSpec& c,
                                   const FieldSpec& f);

// ceil(c_const * boundary_size^{1/(d-1)}): radius of the l1 ball whose field
// sum dominates that of any region with the given boundary size.
int dominating_ball_radius(long boundary_size, double c_const, int d);

// field_sum(ball(R)) / R^{d-1}.
double surface_normalized_ball_sum(int R, const FieldSpec& f, int d,
                                   std::size_t site_cap = 4'500'000);

// field_sum(ball(R)) for every R in [0, R_max], shell-incremental
// (one pass over ball(R_max)).
std::vector<double> ball_field_sum_profile(int R_max, const FieldSpec& f, int d);

// Smallest R >= 1 with  h* C^{1/(d-1)} / (R^alpha (2d)^{d/(d-1)}) <= J.
int truncation_radius_for(const CouplingSpec& c, const FieldSpec& f,
                          double C_threshold, int d);

// Smallest volume V such that every l1 ball with |B(0,R)| >= V and
// R <= max_radius satisfies J*2d*R^{d-1} > 2*field_sum(B(0,R)).
// nullopt if the ball at max_radius itself still fails.
std::optional<long> lemma21_threshold_scan(const CouplingSpec& c,
                                           const FieldSpec& f, int d,
                                           int max_radius);

}  // namespace isinglab
