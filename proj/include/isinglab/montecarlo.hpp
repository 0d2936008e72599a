#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "isinglab/contours.hpp"
#include "isinglab/field.hpp"
#include "isinglab/lattice.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/stats.hpp"

namespace isinglab {

enum class Algorithm { metropolis, wolff, mixed };

// Starting configuration. ground_uniform picks whichever of the two uniform
// configurations has the lower energy under the given boundary and field,
// which lands the chain in the basin it has to equilibrate in anyway.
enum class InitMode { ground_uniform, all_plus, all_minus, random };

struct ChainConfig {
    int dim = 2;
    int L = 8;  // chain runs on the cube of side 2L+1 centered at the origin
    Boundary boundary = Boundary::plus();
    CouplingSpec c{1.0, 1.0};
    FieldSpec f{1.0, 2.0};
    long sweeps = 4000;
    long burn_in = -1;  // negative: default 10*L
    long thin = 1;
    std::uint64_t seed = 1;
    Algorithm algorithm = Algorithm::mixed;
    InitMode init = InitMode::ground_uniform;

    Region region() const;
    long resolved_burn_in() const;
    void validate() const;
};

struct ChainResult {
    Estimate sigma0;
    Estimate magnetization;
    std::vector<double> sigma0_series;
    std::vector<double> mag_series;
};

// Called for every retained sample with the current state and sweep index.
using SampleHook = std::function<void(const SpinConfig&, long)>;

// One full lattice sweep of single-site Metropolis proposals in site order;
// returns the number of accepted flips.
std::size_t metropolis_sweep(SpinConfig& state, const CouplingSpec& c,
                             const FieldSpec& f, Xoshiro256& rng);

struct WolffStep {
    std::size_t cluster_size = 0;
    bool flipped = false;  // false when the ghost or fixed boundary vetoed
};

// One Wolff cluster update. Aligned bonds open with 1-e^{-2 beta J}; the
// field enters through a ghost vertex bonded to +1 sites with probability
// 1-e^{-2 beta h(x)}, and fixed boundary spins act the same way through
// their J bonds. A cluster attached to either is left unflipped.
WolffStep wolff_update(SpinConfig& state, const CouplingSpec& c,
                       const FieldSpec& f, Xoshiro256& rng);

ChainResult run_chain(const ChainConfig& cc, const SampleHook& hook = {});

// Per-L chains with a uniform boundary; estimates E[sigma(0)].
std::map<int, Estimate> magnetization_probe(const std::vector<int>& L_values,
                                            const Boundary& boundary,
                                            const CouplingSpec& c,
                                            const FieldSpec& f,
                                            const ChainConfig& proto);

// Sites of the region joined to the outside by a nearest-neighbor path of
// -1 spins (BFS from the boundary through minus spins).
Region minus_boundary_cluster(const SpinConfig& state);

// Per-shell trace sizes |M_k| for k = 0..L-1 (bucket k holds the sites at
// sup-norm k+1; the origin counts toward bucket 0 so the buckets partition
// the cube) plus the full outer-shell size at key L.
std::map<int, long> shell_trace(const Region& C_L, int L, int dim = 2);

struct ASequence {
    std::vector<double> a;  // a_0 .. a_{n_star}
    int n_star = 0;
};

// a_0 = d-1, a_{n+1} = a_n - (1-alpha)/2, kept while a_n >= 0. Requires
// 0 < alpha < 1 so the sequence actually descends.
ASequence a_sequence(double alpha, int d);

struct SSequence {
    std::vector<long> s;  // s_0 = L onward; stops after an entry forced to 0
    bool G_event = false;
    bool b_ok = true;  // b * n_star < 1/100
};

// s_n = largest k <= s_{n-1} with |M_k| <= L^{a_n}; if none exists the entry
// is 0 and the sequence stops. The final entry requires |M_k| = 0 exactly.
// G_event holds when every consecutive gap is <= b L.
SSequence s_sequence(const std::map<int, long>& M_k_sizes, int L, double alpha,
                     int d, double b);

struct PenetrationPoint {
    long hits = 0;
    long n_samples = 0;
    double fraction = 0.0;
    BinomialCI ci;
};

// Minus-boundary chains; per L, the empirical frequency of samples whose
// minus cluster misses the inner cube of half-side floor(L(1-b_star)).
std::map<int, PenetrationPoint> penetration_experiment(
    const std::vector<int>& L_values, const CouplingSpec& c, const FieldSpec& f,
    double b_star, const ChainConfig& proto, long n_samples);

struct ClusterDiagnostics {
    Region C_L;
    std::map<int, long> M_k_sizes;
    std::vector<long> s_sequence;
    bool G_event = false;
    bool b_ok = true;
    bool has_s_sequence = false;  // false when alpha >= 1
    bool penetration_empty = false;
};

ClusterDiagnostics diagnose_cluster(const SpinConfig& state, int L, double alpha,
                                    double b, double b_star);

}  // namespace isinglab
