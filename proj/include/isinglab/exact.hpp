#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isinglab/contours.hpp"
#include "isinglab/field.hpp"
#include "isinglab/lattice.hpp"

namespace isinglab {

// Constraint set from the restricted-ensemble construction: spins on Lambda
// with a minus collar inside Delta, plus collar outside it except on M,
// a minus/plus double collar around K, and only slim contours inside
// Delta \ K.
struct XConstraintSpec {
    Region Delta;
    Region K;
    Region M;
};

struct EnsembleConstraint {
    enum class Kind { unrestricted, slim_only, pinned, x_constraint };
    Kind kind = Kind::unrestricted;
    std::map<Site, int> pins;
    std::optional<XConstraintSpec> x;

    static EnsembleConstraint unrestricted() { return {}; }
    static EnsembleConstraint slim_only() {
        return {Kind::slim_only, {}, std::nullopt};
    }
    static EnsembleConstraint pinned(std::map<Site, int> pins) {
        return {Kind::pinned, std::move(pins), std::nullopt};
    }
    static EnsembleConstraint x_constraint(XConstraintSpec x) {
        return {Kind::x_constraint, {}, std::move(x)};
    }
};

struct ExactResult {
    double log_Z = 0.0;
    long config_count = 0;  // configurations admitted by the constraint
    std::map<std::string, double> expectations;
};

struct ExactOptions {
    std::size_t site_cap = 25;   // hard limit 30 regardless
    std::vector<Site> track;     // extra per-site spin expectations
};

inline constexpr std::size_t EXACT_HARD_SITE_CAP = 30;

// Key used in ExactResult::expectations for a tracked site.
std::string site_key(const Site& s);

// Energy of one configuration, boundary bonds included.
double hamiltonian(const SpinConfig& s, const CouplingSpec& c, const FieldSpec& f);

// Exact log partition function and expectations by full enumeration over the
// constrained ensemble. Log-domain accumulation with running max shift;
// deterministic. Throws CapError over the site cap and EmptyEnsembleError if
// nothing is admitted.
ExactResult partition_function(const Region& region, const Boundary& boundary,
                               const CouplingSpec& c, const FieldSpec& f,
                               const EnsembleConstraint& constraint,
                               const ExactOptions& opts = {});

struct PeierlsRatio {
    double log_num;   // Z^- with +1 pinned on delta_in(I)
    double log_den;   // Z^- with -1 pinned on delta_in(I)
    double ratio;
    double bound;     // e^{-beta J |dI|}
    bool ok;          // ratio <= bound + 1e-12
};

// Constrained-ratio bound for a hole-free connected interior I.
PeierlsRatio peierls_ratio_check(const Region& I, const CouplingSpec& c,
                                 const FieldSpec& f, const ExactOptions& opts = {});

struct Theorem32Check {
    double log_ratio;   // log Z^{-,slim} - log Z^{+,slim}
    double field_sum;   // sum of h over the region
    double fitted_c2;   // -log_ratio / (beta * field_sum); 0 when field_sum = 0
};

Theorem32Check theorem32_check(const Region& region, const CouplingSpec& c,
                               const FieldSpec& f, const ExactOptions& opts = {});

// E[sigma(x)] in the slim-restricted minus-boundary ensemble.
double restricted_minus_magnetization(const Region& region, const Site& x,
                                      const CouplingSpec& c, const FieldSpec& f,
                                      const ExactOptions& opts = {});

struct MarkovBound {
    double p_tail;  // P[X <= -m*/2]
    double bound;   // m* / (2 - m*)
    bool holds;
};

// Checks P[X <= -m*/2] >= m*/(2-m*) for a finite distribution on [-1,1]
// with mean <= -m*. Throws ValidationError on precondition violations.
MarkovBound markov_bound_check(const std::vector<double>& values,
                               const std::vector<double>& probs, double m_star);

struct XPartitionResult {
    double log_Z_constrained;
    double log_Z_full;
    long config_count;
    // log of c1 e^{-beta c2 sum_{Delta\K} h} e^{-2 beta J |dK|}
    //        e^{-2 beta J |dDelta| + 4 beta J |M|} Z_full, when c1,c2 given
    std::optional<double> log_rhs_bound;
};

XPartitionResult constrained_partition_X(const Region& region,
                                         const Boundary& boundary,
                                         const XConstraintSpec& x,
                                         const CouplingSpec& c, const FieldSpec& f,
                                         std::optional<double> c1 = std::nullopt,
                                         std::optional<double> c2 = std::nullopt,
                                         const ExactOptions& opts = {});

}  // namespace isinglab
