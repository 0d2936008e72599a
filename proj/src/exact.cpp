#include "isinglab/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <string>

namespace isinglab {

namespace {

// ------------------------------------------------------------------
// log-domain accumulation with a running lowest-energy reference, so
// every weight is exp(-beta (H - href)) <= 1; Kahan-compensated sums
// ------------------------------------------------------------------

struct LogAccum {
    double beta;
    double href = 0.0;
    bool first = true;
    double wsum = 0.0, wcomp = 0.0;
    std::vector<double> osum, ocomp;
    long count = 0;

    LogAccum(double beta, std::size_t n_obs)
        : beta(beta), osum(n_obs, 0.0), ocomp(n_obs, 0.0) {}

    static void kadd(double& sum, double& comp, double y0) {
        double y = y0 - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    void add(double H, const double* obs) {
        double w;
        if (first) {
            first = false;
            href = H;
            w = 1.0;
        } else if (H < href) {
            double factor = std::exp(-beta * (href - H));
            wsum *= factor;
            wcomp *= factor;
            for (std::size_t k = 0; k < osum.size(); ++k) {
                osum[k] *= factor;
                ocomp[k] *= factor;
            }
            href = H;
            w = 1.0;
        } else {
            w = std::exp(-beta * (H - href));
        }
        kadd(wsum, wcomp, w);
        for (std::size_t k = 0; k < osum.size(); ++k) kadd(osum[k], ocomp[k], w * obs[k]);
        ++count;
    }

    double log_Z() const { return -beta * href + std::log(wsum); }
};

// ------------------------------------------------------------------
// constraint plumbing shared by both enumeration paths
// ------------------------------------------------------------------

struct ResolvedConstraint {
    EnsembleConstraint::Kind kind;
    std::map<Site, int> pins;        // pinned and x_constraint
    Region slim_scope;               // x_constraint: contours with interior
    bool scoped_slim = false;        // inside this region must be slim
};

void merge_pin(std::map<Site, int>& pins, const Site& s, int v) {
    auto [it, fresh] = pins.try_emplace(s, v);
    if (!fresh && it->second != v)
        throw EmptyEnsembleError("contradictory pinning at (" +
                                 std::to_string(s.x) + "," + std::to_string(s.y) +
                                 "," + std::to_string(s.z) + ")");
}

ResolvedConstraint resolve_constraint(const Region& region,
                                      const EnsembleConstraint& con) {
    ResolvedConstraint rc;
    rc.kind = con.kind;
    switch (con.kind) {
        case EnsembleConstraint::Kind::unrestricted:
        case EnsembleConstraint::Kind::slim_only:
            break;
        case EnsembleConstraint::Kind::pinned:
            for (const auto& [s, v] : con.pins) {
                if (!region.contains(s))
                    throw ValidationError("pinned site outside region");
                if (v != 1 && v != -1)
                    throw ValidationError("pinned spin must be +-1");
                merge_pin(rc.pins, s, v);
            }
            break;
        case EnsembleConstraint::Kind::x_constraint: {
            if (!con.x) throw ValidationError("x_constraint spec missing");
            const auto& x = *con.x;
            for (const Site& s : x.Delta.sites())
                if (!region.contains(s))
                    throw ValidationError("Delta not inside region");
            for (const Site& s : x.K.sites())
                if (!x.Delta.contains(s)) throw ValidationError("K not inside Delta");
            Region dout_delta = delta_out(x.Delta);
            for (const Site& s : dout_delta.sites())
                if (!region.contains(s))
                    throw ValidationError("delta_out(Delta) leaves the region");
            for (const Site& s : x.M.sites())
                if (!dout_delta.contains(s))
                    throw ValidationError("M not inside delta_out(Delta)");
            // minus collar inside Delta; plus outside except on M
            Region din_delta = delta_in(x.Delta);
            for (const Site& s : din_delta.sites()) merge_pin(rc.pins, s, -1);
            for (const Site& s : dout_delta.sites())
                merge_pin(rc.pins, s, x.M.contains(s) ? -1 : 1);
            if (!x.K.empty()) {
                Region dout_k = delta_out(x.K);
                for (const Site& s : dout_k.sites()) {
                    if (!region.contains(s))
                        throw ValidationError("delta_out(K) leaves the region");
                    merge_pin(rc.pins, s, -1);
                }
                Region din_k = delta_in(x.K);
                for (const Site& s : din_k.sites()) merge_pin(rc.pins, s, 1);
            }
            rc.slim_scope = region_difference(x.Delta, x.K);
            rc.scoped_slim = true;
            break;
        }
    }
    return rc;
}

// observables tracked during enumeration
struct ObsPlan {
    bool field_weighted = false;
    std::vector<Site> sites;  // per-site spins, origin first when present
    std::vector<std::string> names;
};

ObsPlan plan_observables(const Region& region, double hsum,
                         const ExactOptions& opts) {
    ObsPlan plan;
    plan.names.push_back("magnetization");
    if (hsum > 0) {
        plan.field_weighted = true;
        plan.names.push_back("field_weighted_magnetization");
    }
    std::vector<Site> sites;
    Site origin{0, 0, 0};
    if (region.contains(origin)) sites.push_back(origin);
    for (const Site& s : opts.track) {
        if (!region.contains(s)) throw ValidationError("tracked site outside region");
        sites.push_back(s);
    }
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    for (const Site& s : sites) plan.names.push_back(site_key(s));
    plan.sites = std::move(sites);
    return plan;
}

// ------------------------------------------------------------------
// fast path: d=2 region whose padded bounding box fits in 64 bits
// ------------------------------------------------------------------

struct FastKernel {
    int W = 0, H = 0, n = 0;
    std::uint64_t all_mask = 0, frame_mask = 0, region_mask = 0;
    std::uint64_t validH = 0, validV = 0;  // in-grid adjacencies
    std::uint64_t bondH = 0, bondV = 0;    // region-incident bonds
    std::uint64_t boundary_base = 0;       // +1 bits of non-region cells
    int total_bonds = 0;
    std::array<double, 64> h_cell{};
    double hsum_region = 0.0;
    std::vector<int> cellpos;  // region site index -> grid bit

    double J = 0.0, beta = 0.0;

    // constraint, grid form
    std::uint64_t pin_mask = 0, pin_want = 0;
    bool need_slim = false;
    bool scoped = false;
    std::uint64_t scope_mask = 0;  // interiors must stay inside to be checked

    // observables
    bool field_weighted = false;
    std::vector<int> obs_cells;

    // scratch: corner union-find, stamped per config
    std::array<std::int16_t, 128> parent{};
    std::array<std::uint32_t, 128> stamp{};
    std::array<std::int16_t, 128> root_slot{};
    std::array<std::uint32_t, 128> slot_stamp{};
    std::array<std::uint64_t, 128> blockH{}, blockV{};
    std::uint32_t epoch = 0;

    int find(int i) {
        if (stamp[i] != epoch) {
            stamp[i] = epoch;
            parent[i] = std::int16_t(i);
            return i;
        }
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(int a, int b) { parent[find(a)] = std::int16_t(find(b)); }

    bool admissible(std::uint64_t S);
    void run(LogAccum& acc, const ObsPlan& plan);
};

bool FastKernel::admissible(std::uint64_t S) {
    std::uint64_t brokenH = (S ^ (S >> 1)) & bondH;
    std::uint64_t brokenV = (S ^ (S >> W)) & bondV;
    if (!(brokenH | brokenV)) return true;
    ++epoch;
    // union dual corners of each broken bond; corner (i,j) of the dual grid
    // has id j*(W+1)+i, cell c=(x,y) spans corners (x..x+1, y..y+1)
    int Wc = W + 1;
    for (std::uint64_t m = brokenH; m;) {
        int c = __builtin_ctzll(m);
        m &= m - 1;
        int x = c % W, y = c / W;
        unite(y * Wc + x + 1, (y + 1) * Wc + x + 1);
    }
    for (std::uint64_t m = brokenV; m;) {
        int c = __builtin_ctzll(m);
        m &= m - 1;
        int x = c % W, y = c / W;
        unite((y + 1) * Wc + x, (y + 1) * Wc + x + 1);
    }
    // group bonds into contours by corner root
    int nslots = 0;
    for (std::uint64_t m = brokenH; m;) {
        int c = __builtin_ctzll(m);
        m &= m - 1;
        int x = c % W, y = c / W;
        int r = find(y * Wc + x + 1);
        if (slot_stamp[r] != epoch) {
            slot_stamp[r] = epoch;
            root_slot[r] = std::int16_t(nslots);
            blockH[nslots] = 0;
            blockV[nslots] = 0;
            ++nslots;
        }
        blockH[root_slot[r]] |= 1ULL << c;
    }
    for (std::uint64_t m = brokenV; m;) {
        int c = __builtin_ctzll(m);
        m &= m - 1;
        int x = c % W, y = c / W;
        int r = find((y + 1) * Wc + x);
        if (slot_stamp[r] != epoch) {
            slot_stamp[r] = epoch;
            root_slot[r] = std::int16_t(nslots);
            blockH[nslots] = 0;
            blockV[nslots] = 0;
            ++nslots;
        }
        blockV[root_slot[r]] |= 1ULL << c;
    }
    // flood from the frame, blocked only by this contour's bonds; the
    // unreached cells are its interior
    for (int k = 0; k < nslots; ++k) {
        std::uint64_t canR = validH & ~blockH[k];
        std::uint64_t canU = validV & ~blockV[k];
        std::uint64_t reach = frame_mask;
        for (;;) {
            std::uint64_t nr = reach | ((reach & canR) << 1) | ((reach >> 1) & canR) |
                               ((reach & canU) << W) | ((reach >> W) & canU);
            if (nr == reach) break;
            reach = nr;
        }
        std::uint64_t interior = all_mask & ~reach;
        if (scoped && (interior & ~scope_mask)) continue;  // exempt contour
        long bsz = __builtin_popcountll((interior ^ (interior >> 1)) & validH) +
                   __builtin_popcountll((interior ^ (interior >> W)) & validV);
        double fsum = 0.0;
        for (std::uint64_t m = interior; m;) {
            int c = __builtin_ctzll(m);
            m &= m - 1;
            fsum += h_cell[c];
        }
        if (!(J * double(bsz) > 2.0 * fsum)) return false;  // fat
    }
    return true;
}

void FastKernel::run(LogAccum& acc, const ObsPlan& plan) {
    const bool check_pins = pin_mask != 0;
    const bool check_slim = need_slim || scoped;
    const double inv_n = 1.0 / double(n);
    const double inv_hsum = hsum_region > 0 ? 1.0 / hsum_region : 0.0;
    std::vector<double> obs(plan.names.size());

    const std::uint64_t end = 1ULL << n;
    for (std::uint64_t mask = 0; mask < end; ++mask) {
        std::uint64_t S = boundary_base;
        for (int i = 0; i < n; ++i) S |= ((mask >> i) & 1ULL) << cellpos[i];
        if (check_pins && (S & pin_mask) != pin_want) continue;
        if (check_slim && !admissible(S)) continue;

        std::uint64_t brokenH = (S ^ (S >> 1)) & bondH;
        std::uint64_t brokenV = (S ^ (S >> W)) & bondV;
        int B = __builtin_popcountll(brokenH) + __builtin_popcountll(brokenV);
        double hplus = 0.0;
        for (std::uint64_t m = S & region_mask; m;) {
            int c = __builtin_ctzll(m);
            m &= m - 1;
            hplus += h_cell[c];
        }
        double Hene = -J * double(total_bonds - 2 * B) - (2.0 * hplus - hsum_region);

        int plus = __builtin_popcountll(S & region_mask);
        std::size_t k = 0;
        obs[k++] = double(2 * plus - n) * inv_n;
        if (plan.field_weighted) obs[k++] = (2.0 * hplus - hsum_region) * inv_hsum;
        for (int c : obs_cells) obs[k++] = (S >> c) & 1ULL ? 1.0 : -1.0;
        acc.add(Hene, obs.data());
    }
}

FastKernel build_fast_kernel(const Region& region, const Boundary& boundary,
                             const CouplingSpec& c, const FieldSpec& f,
                             const ResolvedConstraint& rc, const ObsPlan& plan,
                             const Box& box) {
    FastKernel k;
    k.W = box.hi.x - box.lo.x + 1;
    k.H = box.hi.y - box.lo.y + 1;
    k.n = int(region.size());
    k.J = c.J;
    k.beta = c.beta;
    int cells = k.W * k.H;
    k.all_mask = cells == 64 ? ~0ULL : (1ULL << cells) - 1;

    auto cell_of = [&](const Site& s) {
        return (s.y - box.lo.y) * k.W + (s.x - box.lo.x);
    };
    for (int y = 0; y < k.H; ++y)
        for (int x = 0; x < k.W; ++x) {
            int cell = y * k.W + x;
            Site s{box.lo.x + x, box.lo.y + y, 0};
            if (x == 0 || x == k.W - 1 || y == 0 || y == k.H - 1)
                k.frame_mask |= 1ULL << cell;
            if (x < k.W - 1) k.validH |= 1ULL << cell;
            if (y < k.H - 1) k.validV |= 1ULL << cell;
            k.h_cell[cell] = field_at(s, f);
        }
    k.cellpos.reserve(region.size());
    for (const Site& s : region.sites()) {
        int cell = cell_of(s);
        k.cellpos.push_back(cell);
        k.region_mask |= 1ULL << cell;
        k.hsum_region += k.h_cell[cell];
    }
    // region-incident bonds only; the other endpoint is region or delta_out
    for (int y = 0; y < k.H; ++y)
        for (int x = 0; x < k.W; ++x) {
            int cell = y * k.W + x;
            std::uint64_t b = 1ULL << cell;
            if (x < k.W - 1 &&
                ((k.region_mask & b) || (k.region_mask & (b << 1))))
                k.bondH |= b;
            if (y < k.H - 1 &&
                ((k.region_mask & b) || (k.region_mask & (b << k.W))))
                k.bondV |= b;
        }
    k.total_bonds = __builtin_popcountll(k.bondH) + __builtin_popcountll(k.bondV);

    switch (boundary.kind) {
        case BoundaryKind::plus:
            k.boundary_base = k.all_mask & ~k.region_mask;
            break;
        case BoundaryKind::minus:
            k.boundary_base = 0;
            break;
        case BoundaryKind::explicit_map:
            for (const auto& [s, v] : boundary.spins)
                if (v == 1) k.boundary_base |= 1ULL << cell_of(s);
            break;
    }

    for (const auto& [s, v] : rc.pins) {
        std::uint64_t b = 1ULL << cell_of(s);
        k.pin_mask |= b;
        if (v == 1) k.pin_want |= b;
    }
    k.need_slim = rc.kind == EnsembleConstraint::Kind::slim_only;
    k.scoped = rc.scoped_slim;
    if (k.scoped)
        for (const Site& s : rc.slim_scope.sites())
            k.scope_mask |= 1ULL << cell_of(s);

    k.field_weighted = plan.field_weighted;
    for (const Site& s : plan.sites) k.obs_cells.push_back(cell_of(s));
    return k;
}

// ------------------------------------------------------------------
// generic path: any dimension / extent, straight per-config evaluation
// ------------------------------------------------------------------

bool generic_admissible(const SpinConfig& s, const CouplingSpec& c,
                        const FieldSpec& f, const ResolvedConstraint& rc) {
    if (!rc.pins.empty())
        for (const auto& [site, v] : rc.pins)
            if (s.spin_at(site) != v) return false;
    if (rc.kind == EnsembleConstraint::Kind::slim_only || rc.scoped_slim) {
        for (const Contour& g : extract_contours(s)) {
            if (rc.scoped_slim) {
                bool inside = true;
                for (const Site& t : g.interior.sites())
                    if (!rc.slim_scope.contains(t)) {
                        inside = false;
                        break;
                    }
                if (!inside) continue;
            }
            if (!classify(g, c, f).slim) return false;
        }
    }
    return true;
}

void run_generic(const Region& region, const Boundary& boundary,
                 const CouplingSpec& c, const FieldSpec& f,
                 const ResolvedConstraint& rc, LogAccum& acc,
                 const ObsPlan& plan) {
    std::size_t n = region.size();
    double hsum = field_sum(region, f);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = field_at(region.sites()[i], f);
    SpinConfig s = SpinConfig::uniform(region, 1, boundary);
    std::vector<double> obs(plan.names.size());
    std::vector<std::size_t> obs_idx;
    for (const Site& t : plan.sites) obs_idx.push_back(*region.index_of(t));

    const std::uint64_t end = 1ULL << n;
    for (std::uint64_t mask = 0; mask < end; ++mask) {
        for (std::size_t i = 0; i < n; ++i)
            s.set_spin(i, (mask >> i) & 1ULL ? 1 : -1);
        if (!generic_admissible(s, c, f, rc)) continue;
        double Hene = hamiltonian(s, c, f);
        long plus = __builtin_popcountll(mask);
        double hplus = 0.0;
        for (std::uint64_t m = mask; m;) {
            int i = __builtin_ctzll(m);
            m &= m - 1;
            hplus += h[i];
        }
        std::size_t k = 0;
        obs[k++] = double(2 * plus - long(n)) / double(n);
        if (plan.field_weighted) obs[k++] = (2.0 * hplus - hsum) / hsum;
        for (std::size_t i : obs_idx) obs[k++] = s.spins()[i];
        acc.add(Hene, obs.data());
    }
}

}  // namespace

std::string site_key(const Site& s) {
    std::string k = "sigma(" + std::to_string(s.x) + "," + std::to_string(s.y);
    if (s.z != 0) k += "," + std::to_string(s.z);
    return k + ")";
}

double hamiltonian(const SpinConfig& s, const CouplingSpec& c, const FieldSpec& f) {
    const Region& region = s.region();
    const auto& offs = nn_offsets(region.dim());
    double bond_sum = 0.0;
    double field_acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < region.size(); ++i) {
        const Site& a = region.sites()[i];
        int sa = s.spins()[i];
        for (const Site& o : offs) {
            Site b{a.x + o.x, a.y + o.y, a.z + o.z};
            bool internal = region.contains(b);
            if (internal && !(a < b)) continue;
            bond_sum += double(sa * s.spin_or_boundary(b));
        }
        double y = field_at(a, f) * sa - comp;
        double t = field_acc + y;
        comp = (t - field_acc) - y;
        field_acc = t;
    }
    return -c.J * bond_sum - field_acc;
}

ExactResult partition_function(const Region& region, const Boundary& boundary,
                               const CouplingSpec& c, const FieldSpec& f,
                               const EnsembleConstraint& constraint,
                               const ExactOptions& opts) {
    if (region.empty()) throw ValidationError("partition_function: empty region");
    std::size_t cap = std::min(opts.site_cap, EXACT_HARD_SITE_CAP);
    if (region.size() > cap)
        throw CapError("partition_function: region has " +
                       std::to_string(region.size()) + " sites, cap " +
                       std::to_string(cap));
    // runs the boundary/region invariant checks once
    SpinConfig probe = SpinConfig::uniform(region, 1, boundary);
    (void)probe;

    ResolvedConstraint rc = resolve_constraint(region, constraint);
    double hsum = field_sum(region, f);
    ObsPlan plan = plan_observables(region, hsum, opts);
    LogAccum acc(c.beta, plan.names.size());

    bool fast = false;
    Box box{};
    if (region.dim() == 2) {
        box = bounding_box(region);
        box.lo.x -= 1; box.lo.y -= 1; box.hi.x += 1; box.hi.y += 1;
        long cells = long(box.hi.x - box.lo.x + 1) * (box.hi.y - box.lo.y + 1);
        fast = cells <= 64;
    }
    if (fast) {
        FastKernel k = build_fast_kernel(region, boundary, c, f, rc, plan, box);
        k.run(acc, plan);
    } else {
        run_generic(region, boundary, c, f, rc, acc, plan);
    }

    if (acc.count == 0)
        throw EmptyEnsembleError("constraint admits no configuration");
    ExactResult out;
    out.log_Z = acc.log_Z();
    out.config_count = acc.count;
    for (std::size_t k = 0; k < plan.names.size(); ++k) {
        double v = acc.osum[k] / acc.wsum;
        out.expectations[plan.names[k]] = std::clamp(v, -1.0, 1.0);
    }
    return out;
}

PeierlsRatio peierls_ratio_check(const Region& I, const CouplingSpec& c,
                                 const FieldSpec& f, const ExactOptions& opts) {
    if (connected_components(I).size() != 1)
        throw ValidationError("peierls_ratio_check: interior must be connected");
    if (!is_hole_free(I))
        throw ValidationError("peierls_ratio_check: interior must be hole-free");
    std::map<Site, int> plus_pins, minus_pins;
    Region din = delta_in(I);
    for (const Site& s : din.sites()) {
        plus_pins[s] = 1;
        minus_pins[s] = -1;
    }
    Boundary minus = Boundary::minus();
    double log_num = partition_function(I, minus, c, f,
                                        EnsembleConstraint::pinned(plus_pins), opts)
                         .log_Z;
    double log_den = partition_function(I, minus, c, f,
                                        EnsembleConstraint::pinned(minus_pins), opts)
                         .log_Z;
    PeierlsRatio out;
    out.log_num = log_num;
    out.log_den = log_den;
    out.ratio = std::exp(log_num - log_den);
    out.bound = std::exp(-c.beta * c.J * double(boundary_edge_count(I)));
    out.ok = out.ratio <= out.bound + 1e-12;
    return out;
}

Theorem32Check theorem32_check(const Region& region, const CouplingSpec& c,
                               const FieldSpec& f, const ExactOptions& opts) {
    auto slim = EnsembleConstraint::slim_only();
    double log_minus =
        partition_function(region, Boundary::minus(), c, f, slim, opts).log_Z;
    double log_plus =
        partition_function(region, Boundary::plus(), c, f, slim, opts).log_Z;
    Theorem32Check out;
    out.log_ratio = log_minus - log_plus;
    out.field_sum = field_sum(region, f);
    out.fitted_c2 =
        out.field_sum > 0 ? -out.log_ratio / (c.beta * out.field_sum) : 0.0;
    return out;
}

double restricted_minus_magnetization(const Region& region, const Site& x,
                                      const CouplingSpec& c, const FieldSpec& f,
                                      const ExactOptions& opts) {
    ExactOptions o = opts;
    o.track.push_back(x);
    ExactResult r = partition_function(region, Boundary::minus(), c, f,
                                       EnsembleConstraint::slim_only(), o);
    return r.expectations.at(site_key(x));
}

MarkovBound markov_bound_check(const std::vector<double>& values,
                               const std::vector<double>& probs, double m_star) {
    if (values.empty() || values.size() != probs.size())
        throw ValidationError("markov_bound_check: bad distribution shape");
    if (!(m_star > 0) || !(m_star < 1))
        throw ValidationError("markov_bound_check: m_star must be in (0,1)");
    double total = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (probs[i] < -1e-12) throw ValidationError("markov_bound_check: p < 0");
        if (values[i] < -1.0 - 1e-9 || values[i] > 1.0 + 1e-9)
            throw ValidationError("markov_bound_check: X outside [-1,1]");
        total += probs[i];
        mean += probs[i] * values[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("markov_bound_check: probabilities must sum to 1");
    if (mean > -m_star + 1e-9)
        throw ValidationError("markov_bound_check: E[X] must be <= -m_star");
    MarkovBound out;
    out.p_tail = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] <= -m_star / 2 + 1e-12) out.p_tail += probs[i];
    out.bound = m_star / (2.0 - m_star);
    out.holds = out.p_tail + 1e-12 >= out.bound;
    return out;
}

XPartitionResult constrained_partition_X(const Region& region,
                                         const Boundary& boundary,
                                         const XConstraintSpec& x,
                                         const CouplingSpec& c, const FieldSpec& f,
                                         std::optional<double> c1,
                                         std::optional<double> c2,
                                         const ExactOptions& opts) {
    ExactResult constrained = partition_function(
        region, boundary, c, f, EnsembleConstraint::x_constraint(x), opts);
    ExactResult full = partition_function(region, boundary, c, f,
                                          EnsembleConstraint::unrestricted(), opts);
    XPartitionResult out;
    out.log_Z_constrained = constrained.log_Z;
    out.log_Z_full = full.log_Z;
    out.config_count = constrained.config_count;
    if (c1 && c2) {
        double hsum_dk = field_sum(region_difference(x.Delta, x.K), f);
        double log_rhs = std::log(*c1) - c.beta * (*c2) * hsum_dk -
                         2.0 * c.beta * c.J * double(boundary_edge_count(x.K)) -
                         2.0 * c.beta * c.J * double(boundary_edge_count(x.Delta)) +
                         4.0 * c.beta * c.J * double(x.M.size()) + full.log_Z;
        out.log_rhs_bound = log_rhs;
    }
    return out;
}

}  // namespace isinglab
