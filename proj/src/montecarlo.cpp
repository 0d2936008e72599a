#include "isinglab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "isinglab/errors.hpp"

namespace isinglab {

namespace {

// Flattened lattice with precomputed neighbor tables; the workhorse behind
// both public single-update operations and run_chain.
struct MCKernel {
    int n = 0, z = 0;
    double J = 0.0, beta = 0.0, p_bond = 0.0;
    std::vector<std::int32_t> nbr;    // n*z, -1 marks an external neighbor
    std::vector<std::int8_t> wspin;   // boundary spin where nbr is -1
    std::vector<double> h, p_ghost;
    std::vector<std::int8_t> s;
    long spin_sum = 0;
    int origin = -1;

    std::vector<std::int32_t> members;
    std::vector<char> in_cluster;

    MCKernel(const SpinConfig& state, const CouplingSpec& c, const FieldSpec& f) {
        const Region& region = state.region();
        const auto& offs = nn_offsets(region.dim());
        n = int(region.size());
        z = int(offs.size());
        J = c.J;
        beta = c.beta;
        p_bond = 1.0 - std::exp(-2.0 * beta * J);
        nbr.assign(std::size_t(n) * z, -1);
        wspin.assign(std::size_t(n) * z, 0);
        h.resize(n);
        p_ghost.resize(n);
        s.resize(n);
        in_cluster.assign(n, 0);
        for (int i = 0; i < n; ++i) {
            const Site& a = region.sites()[i];
            s[i] = std::int8_t(state.spins()[i]);
            spin_sum += s[i];
            h[i] = field_at(a, f);
            p_ghost[i] = h[i] > 0 ? 1.0 - std::exp(-2.0 * beta * h[i]) : 0.0;
            for (int k = 0; k < z; ++k) {
                Site b{a.x + offs[k].x, a.y + offs[k].y, a.z + offs[k].z};
                if (auto j = region.index_of(b))
                    nbr[std::size_t(i) * z + k] = std::int32_t(*j);
                else
                    wspin[std::size_t(i) * z + k] =
                        std::int8_t(state.spin_or_boundary(b));
            }
        }
        if (auto j = region.index_of(Site{0, 0, 0})) origin = int(*j);
    }

    int neighbor_sum(int x) const {
        int acc = 0;
        const std::int32_t* nn = &nbr[std::size_t(x) * z];
        const std::int8_t* ww = &wspin[std::size_t(x) * z];
        for (int k = 0; k < z; ++k) acc += nn[k] >= 0 ? s[nn[k]] : ww[k];
        return acc;
    }

    std::size_t metropolis(Xoshiro256& rng) {
        std::size_t accepted = 0;
        for (int x = 0; x < n; ++x) {
            double dH = 2.0 * s[x] * (J * neighbor_sum(x) + h[x]);
            if (dH <= 0.0 || rng.uniform() < std::exp(-beta * dH)) {
                s[x] = std::int8_t(-s[x]);
                spin_sum += 2 * s[x];
                ++accepted;
            }
        }
        return accepted;
    }

    WolffStep wolff(Xoshiro256& rng) {
        int seed = int(rng.below(std::uint64_t(n)));
        std::int8_t sc = s[seed];
        bool frozen = false;
        members.clear();
        members.push_back(seed);
        in_cluster[seed] = 1;
        if (sc > 0 && p_ghost[seed] > 0 && rng.uniform() < p_ghost[seed])
            frozen = true;
        for (std::size_t i = 0; i < members.size(); ++i) {
            int x = members[i];
            const std::int32_t* nn = &nbr[std::size_t(x) * z];
            const std::int8_t* ww = &wspin[std::size_t(x) * z];
            for (int k = 0; k < z; ++k) {
                int y = nn[k];
                if (y >= 0) {
                    if (!in_cluster[y] && s[y] == sc && rng.uniform() < p_bond) {
                        in_cluster[y] = 1;
                        members.push_back(y);
                        if (sc > 0 && p_ghost[y] > 0 && rng.uniform() < p_ghost[y])
                            frozen = true;
                    }
                } else if (ww[k] == sc && rng.uniform() < p_bond) {
                    frozen = true;
                }
            }
        }
        if (!frozen) {
            for (int x : members) s[x] = std::int8_t(-sc);
            spin_sum -= 2L * sc * long(members.size());
        }
        for (int x : members) in_cluster[x] = 0;
        return {members.size(), !frozen};
    }

    void writeback(SpinConfig& state) const {
        for (int i = 0; i < n; ++i) state.set_spin(std::size_t(i), s[i]);
    }
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    SplitMix64 sm(master ^ (0x100000001b3ULL * (tag + 1)));
    return sm.next();
}

}  // namespace

Region ChainConfig::region() const { return cube(L, dim); }

long ChainConfig::resolved_burn_in() const {
    return burn_in >= 0 ? burn_in : 10L * L;
}

void ChainConfig::validate() const {
    if (dim != 2 && dim != 3) throw ValidationError("ChainConfig: dim must be 2 or 3");
    if (L < 1) throw ValidationError("ChainConfig: L must be >= 1");
    if (dim == 2 && L > 128) throw ValidationError("ChainConfig: L must be <= 128 in d=2");
    if (dim == 3 && L > 20) throw ValidationError("ChainConfig: L must be <= 20 in d=3");
    if (thin < 1) throw ValidationError("ChainConfig: thin must be >= 1");
    if (resolved_burn_in() < 0 || sweeps <= resolved_burn_in())
        throw ValidationError("ChainConfig: need sweeps > burn_in >= 0");
}

std::size_t metropolis_sweep(SpinConfig& state, const CouplingSpec& c,
                             const FieldSpec& f, Xoshiro256& rng) {
    MCKernel k(state, c, f);
    std::size_t accepted = k.metropolis(rng);
    k.writeback(state);
    return accepted;
}

WolffStep wolff_update(SpinConfig& state, const CouplingSpec& c,
                       const FieldSpec& f, Xoshiro256& rng) {
    MCKernel k(state, c, f);
    WolffStep step = k.wolff(rng);
    k.writeback(state);
    return step;
}

ChainResult run_chain(const ChainConfig& cc, const SampleHook& hook) {
    cc.validate();
    Region region = cc.region();
    Xoshiro256 rng = Xoshiro256::stream(cc.seed, 0);
    SpinConfig state = SpinConfig::uniform(region, 1, cc.boundary);
    MCKernel k(state, cc.c, cc.f);

    switch (cc.init) {
        case InitMode::all_plus:
            break;
        case InitMode::all_minus:
            for (auto& v : k.s) v = -1;
            k.spin_sum = -k.n;
            break;
        case InitMode::ground_uniform: {
            // H(uniform s0) = -J E_in - s0 (J sum_cross w + sum h)
            double drive = 0.0;
            for (int i = 0; i < k.n; ++i) drive += k.h[i];
            for (std::size_t e = 0; e < k.wspin.size(); ++e)
                drive += cc.c.J * k.wspin[e];
            if (drive < 0.0) {
                for (auto& v : k.s) v = -1;
                k.spin_sum = -k.n;
            }
            break;
        }
        case InitMode::random: {
            k.spin_sum = 0;
            for (auto& v : k.s) {
                v = rng.next() & 1 ? 1 : -1;
                k.spin_sum += v;
            }
            break;
        }
    }

    const long burn = cc.resolved_burn_in();
    ChainResult out;
    const long expected = (cc.sweeps - burn + cc.thin - 1) / cc.thin;
    out.sigma0_series.reserve(expected);
    out.mag_series.reserve(expected);

    for (long t = 0; t < cc.sweeps; ++t) {
        switch (cc.algorithm) {
            case Algorithm::metropolis:
                k.metropolis(rng);
                break;
            case Algorithm::wolff:
                k.wolff(rng);
                break;
            case Algorithm::mixed:
                k.wolff(rng);
                k.metropolis(rng);
                break;
        }
        if (t >= burn && (t - burn) % cc.thin == 0) {
            out.sigma0_series.push_back(double(k.s[k.origin]));
            out.mag_series.push_back(double(k.spin_sum) / double(k.n));
            if (hook) {
                k.writeback(state);
                hook(state, t);
            }
        }
    }

    out.sigma0 = estimate_series(out.sigma0_series);
    out.magnetization = estimate_series(out.mag_series);
    return out;
}

std::map<int, Estimate> magnetization_probe(const std::vector<int>& L_values,
                                            const Boundary& boundary,
                                            const CouplingSpec& c,
                                            const FieldSpec& f,
                                            const ChainConfig& proto) {
    if (boundary.kind == BoundaryKind::explicit_map)
        throw ValidationError("magnetization_probe: boundary must be uniform");
    if (L_values.empty())
        throw ValidationError("magnetization_probe: no L values");
    std::map<int, Estimate> out;
    for (int L : L_values) {
        ChainConfig cc = proto;
        cc.L = L;
        cc.boundary = boundary;
        cc.c = c;
        cc.f = f;
        cc.seed = derive_seed(proto.seed,
                              std::uint64_t(2 * L) +
                                  (boundary.kind == BoundaryKind::minus ? 1 : 0));
        out[L] = run_chain(cc).sigma0;
    }
    return out;
}

Region minus_boundary_cluster(const SpinConfig& state) {
    const Region& region = state.region();
    const auto& offs = nn_offsets(region.dim());
    const std::size_t n = region.size();
    std::vector<char> visited(n, 0);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
        if (state.spins()[i] != -1) continue;
        const Site& a = region.sites()[i];
        for (const Site& o : offs) {
            Site b{a.x + o.x, a.y + o.y, a.z + o.z};
            if (!region.contains(b) && state.spin_or_boundary(b) == -1) {
                visited[i] = 1;
                queue.push_back(i);
                break;
            }
        }
    }
    std::vector<Site> cluster;
    while (!queue.empty()) {
        std::size_t i = queue.front();
        queue.pop_front();
        const Site& a = region.sites()[i];
        cluster.push_back(a);
        for (const Site& o : offs) {
            Site b{a.x + o.x, a.y + o.y, a.z + o.z};
            if (auto j = region.index_of(b)) {
                if (!visited[*j] && state.spins()[*j] == -1) {
                    visited[*j] = 1;
                    queue.push_back(*j);
                }
            }
        }
    }
    return Region(std::move(cluster), region.dim());
}

std::map<int, long> shell_trace(const Region& C_L, int L, int dim) {
    if (L < 1) throw ValidationError("shell_trace: L must be >= 1");
    std::map<int, long> out;
    for (int k = 0; k < L; ++k) out[k] = 0;
    for (const Site& s : C_L.sites()) {
        int r = linf_norm(s);
        if (r > L) throw ValidationError("shell_trace: cluster leaves the cube");
        out[std::max(r, 1) - 1] += 1;
    }
    long outer = 1, inner = 1;
    for (int i = 0; i < dim; ++i) {
        outer *= 2 * (L + 1) + 1;
        inner *= 2 * L + 1;
    }
    out[L] = outer - inner;
    return out;
}

ASequence a_sequence(double alpha, int d) {
    if (d != 2 && d != 3) throw ValidationError("a_sequence: d must be 2 or 3");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw ValidationError("a_sequence: alpha must be in (0,1)");
    const double step = (1.0 - alpha) / 2.0;
    ASequence out;
    double a = double(d - 1);
    while (a >= -1e-12) {
        out.a.push_back(std::max(a, 0.0));
        a -= step;
    }
    out.n_star = int(out.a.size()) - 1;
    return out;
}

SSequence s_sequence(const std::map<int, long>& M_k_sizes, int L, double alpha,
                     int d, double b) {
    if (L < 1) throw ValidationError("s_sequence: L must be >= 1");
    if (!(b > 0.0)) throw ValidationError("s_sequence: b must be > 0");
    ASequence as = a_sequence(alpha, d);

    auto size_at = [&](int k) {
        auto it = M_k_sizes.find(k);
        return it == M_k_sizes.end() ? 0L : it->second;
    };

    SSequence out;
    out.b_ok = b * double(as.n_star) < 0.01;
    out.s.push_back(L);
    for (int n = 1; n <= as.n_star + 1; ++n) {
        const bool final_step = n == as.n_star + 1;
        const double thr = final_step ? 0.0 : std::pow(double(L), as.a[n]);
        int prev = int(out.s.back());
        int found = -1;
        for (int k = prev; k >= 0; --k) {
            if (double(size_at(k)) <= thr + 1e-9) {
                found = k;
                break;
            }
        }
        if (found < 0) {
            out.s.push_back(0);
            break;
        }
        out.s.push_back(found);
    }
    out.G_event = true;
    for (std::size_t i = 1; i < out.s.size(); ++i)
        if (double(out.s[i - 1] - out.s[i]) > b * double(L) + 1e-9)
            out.G_event = false;
    return out;
}

std::map<int, PenetrationPoint> penetration_experiment(
    const std::vector<int>& L_values, const CouplingSpec& c, const FieldSpec& f,
    double b_star, const ChainConfig& proto, long n_samples) {
    if (!(b_star > 0.5) || !(b_star < 1.0))
        throw ValidationError("penetration_experiment: b_star must be in (1/2,1)");
    if (n_samples < 1)
        throw ValidationError("penetration_experiment: n_samples must be >= 1");
    if (L_values.empty())
        throw ValidationError("penetration_experiment: no L values");
    std::map<int, PenetrationPoint> out;
    for (int L : L_values) {
        ChainConfig cc = proto;
        cc.L = L;
        cc.boundary = Boundary::minus();
        cc.c = c;
        cc.f = f;
        cc.seed = derive_seed(proto.seed, 1000000ULL + std::uint64_t(L));
        cc.sweeps = cc.resolved_burn_in() + n_samples * cc.thin;
        const int m = int(std::floor(double(L) * (1.0 - b_star)));
        PenetrationPoint pt;
        pt.n_samples = n_samples;
        run_chain(cc, [&](const SpinConfig& sample, long) {
            Region cl = minus_boundary_cluster(sample);
            bool empty = true;
            for (const Site& s : cl.sites())
                if (linf_norm(s) <= m) {
                    empty = false;
                    break;
                }
            if (empty) ++pt.hits;
        });
        pt.fraction = double(pt.hits) / double(n_samples);
        pt.ci = binomial_ci(pt.hits, n_samples);
        out[L] = pt;
    }
    return out;
}

ClusterDiagnostics diagnose_cluster(const SpinConfig& state, int L, double alpha,
                                    double b, double b_star) {
    if (!(b_star > 0.5) || !(b_star < 1.0))
        throw ValidationError("diagnose_cluster: b_star must be in (1/2,1)");
    ClusterDiagnostics out;
    out.C_L = minus_boundary_cluster(state);
    out.M_k_sizes = shell_trace(out.C_L, L, state.region().dim());
    if (alpha < 1.0) {
        SSequence ss = s_sequence(out.M_k_sizes, L, alpha, state.region().dim(), b);
        out.s_sequence = ss.s;
        out.G_event = ss.G_event;
        out.b_ok = ss.b_ok;
        out.has_s_sequence = true;
    }
    const int m = int(std::floor(double(L) * (1.0 - b_star)));
    out.penetration_empty = true;
    for (const Site& s : out.C_L.sites())
        if (linf_norm(s) <= m) {
            out.penetration_empty = false;
            break;
        }
    return out;
}

}  // namespace isinglab
