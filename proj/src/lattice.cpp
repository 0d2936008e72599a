#include "isinglab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace isinglab {

namespace {

struct SiteHash {
    std::size_t operator()(const Site& s) const {
        // 21 bits per axis, enough for any region this library touches
        std::uint64_t k = (std::uint64_t(std::uint32_t(s.x + (1 << 20))) << 42) ^
                          (std::uint64_t(std::uint32_t(s.y + (1 << 20))) << 21) ^
                          std::uint64_t(std::uint32_t(s.z + (1 << 20)));
        k *= 0x9e3779b97f4a7c15ULL;
        return std::size_t(k ^ (k >> 32));
    }
};

using SiteSet = std::unordered_set<Site, SiteHash>;

void check_dim(int d) {
    if (d != 2 && d != 3) throw ValidationError("dimension must be 2 or 3");
}

}  // namespace

const std::vector<Site>& nn_offsets(int d) {
    check_dim(d);
    static const std::vector<Site> two = {
        {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
    static const std::vector<Site> three = {
        {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    return d == 2 ? two : three;
}

const std::vector<Site>& star_offsets(int d) {
    check_dim(d);
    static const std::vector<Site> two = [] {
        std::vector<Site> v;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                if (dx || dy) v.push_back({dx, dy, 0});
        return v;
    }();
    static const std::vector<Site> three = [] {
        std::vector<Site> v;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz)
                    if (dx || dy || dz) v.push_back({dx, dy, dz});
        return v;
    }();
    return d == 2 ? two : three;
}

Region::Region(std::vector<Site> sites, int d) : sites_(std::move(sites)), d_(d) {
    check_dim(d);
    for (const Site& s : sites_)
        if (d == 2 && s.z != 0) throw ValidationError("z coordinate nonzero in d=2");
    std::sort(sites_.begin(), sites_.end());
    sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

bool Region::contains(const Site& s) const {
    return std::binary_search(sites_.begin(), sites_.end(), s);
}

std::optional<std::size_t> Region::index_of(const Site& s) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
    if (it == sites_.end() || *it != s) return std::nullopt;
    return std::size_t(it - sites_.begin());
}

void Region::insert(const Site& s) {
    if (d_ == 2 && s.z != 0) throw ValidationError("z coordinate nonzero in d=2");
    auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
    if (it != sites_.end() && *it == s) return;
    sites_.insert(it, s);
}

Region region_union(const Region& a, const Region& b) {
    std::vector<Site> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.sites().begin(), a.sites().end(), b.sites().begin(),
                   b.sites().end(), std::back_inserter(out));
    return Region(std::move(out), a.dim());
}

Region region_difference(const Region& a, const Region& b) {
    std::vector<Site> out;
    std::set_difference(a.sites().begin(), a.sites().end(), b.sites().begin(),
                        b.sites().end(), std::back_inserter(out));
    return Region(std::move(out), a.dim());
}

Region region_intersection(const Region& a, const Region& b) {
    std::vector<Site> out;
    std::set_intersection(a.sites().begin(), a.sites().end(), b.sites().begin(),
                          b.sites().end(), std::back_inserter(out));
    return Region(std::move(out), a.dim());
}

Region ball(int radius, int d, std::size_t site_cap) {
    check_dim(d);
    if (radius < 0) throw ValidationError("ball radius must be >= 0");
    // |B(0,R)| in d=2 is 2R^2+2R+1; d=3 is (4R^3+6R^2+8R+3)/3
    std::size_t n = d == 2 ? std::size_t(2) * radius * radius + 2 * radius + 1
                           : (std::size_t(4) * radius * radius * radius +
                              6 * std::size_t(radius) * radius + 8 * radius + 3) / 3;
    if (n > site_cap)
        throw CapError("ball(" + std::to_string(radius) + ") has " +
                       std::to_string(n) + " sites, cap " + std::to_string(site_cap));
    std::vector<Site> sites;
    sites.reserve(n);
    for (int x = -radius; x <= radius; ++x) {
        int rx = radius - (x < 0 ? -x : x);
        for (int y = -rx; y <= rx; ++y) {
            if (d == 2) {
                sites.push_back({x, y, 0});
            } else {
                int rxy = rx - (y < 0 ? -y : y);
                for (int z = -rxy; z <= rxy; ++z) sites.push_back({x, y, z});
            }
        }
    }
    return Region(std::move(sites), d);
}

Region shell_l1(int radius, int d) {
    check_dim(d);
    if (radius < 0) throw ValidationError("shell radius must be >= 0");
    if (radius == 0) return Region({{0, 0, 0}}, d);
    std::vector<Site> sites;
    for (int x = -radius; x <= radius; ++x) {
        int rx = radius - (x < 0 ? -x : x);
        if (d == 2) {
            sites.push_back({x, rx, 0});
            if (rx != 0) sites.push_back({x, -rx, 0});
        } else {
            for (int y = -rx; y <= rx; ++y) {
                int rz = rx - (y < 0 ? -y : y);
                sites.push_back({x, y, rz});
                if (rz != 0) sites.push_back({x, y, -rz});
            }
        }
    }
    return Region(std::move(sites), d);
}

Region cube(int L, int d, std::size_t site_cap) {
    check_dim(d);
    if (L < 0) throw ValidationError("cube L must be >= 0");
    std::size_t side = std::size_t(2) * L + 1;
    std::size_t n = d == 2 ? side * side : side * side * side;
    if (n > site_cap)
        throw CapError("cube(" + std::to_string(L) + ") has " + std::to_string(n) +
                       " sites, cap " + std::to_string(site_cap));
    std::vector<Site> sites;
    sites.reserve(n);
    for (int x = -L; x <= L; ++x)
        for (int y = -L; y <= L; ++y) {
            if (d == 2)
                sites.push_back({x, y, 0});
            else
                for (int z = -L; z <= L; ++z) sites.push_back({x, y, z});
        }
    return Region(std::move(sites), d);
}

Region delta_in(const Region& K) {
    const auto& offs = nn_offsets(K.dim());
    std::vector<Site> out;
    for (const Site& s : K.sites()) {
        for (const Site& o : offs) {
            Site t{s.x + o.x, s.y + o.y, s.z + o.z};
            if (!K.contains(t)) {
                out.push_back(s);
                break;
            }
        }
    }
    return Region(std::move(out), K.dim());
}

Region delta_out(const Region& K) {
    const auto& offs = nn_offsets(K.dim());
    SiteSet seen;
    std::vector<Site> out;
    for (const Site& s : K.sites()) {
        for (const Site& o : offs) {
            Site t{s.x + o.x, s.y + o.y, s.z + o.z};
            if (!K.contains(t) && seen.insert(t).second) out.push_back(t);
        }
    }
    return Region(std::move(out), K.dim());
}

long boundary_edge_count(const Region& K) {
    const auto& offs = nn_offsets(K.dim());
    long n = 0;
    for (const Site& s : K.sites())
        for (const Site& o : offs)
            if (!K.contains({s.x + o.x, s.y + o.y, s.z + o.z})) ++n;
    return n;
}

std::vector<Region> connected_components(const Region& K, Adjacency adj) {
    const auto& offs = adj == Adjacency::nearest ? nn_offsets(K.dim())
                                                 : star_offsets(K.dim());
    std::vector<char> done(K.size(), 0);
    std::vector<Region> comps;
    for (std::size_t i = 0; i < K.size(); ++i) {
        if (done[i]) continue;
        std::vector<Site> comp;
        std::deque<std::size_t> queue{i};
        done[i] = 1;
        while (!queue.empty()) {
            std::size_t j = queue.front();
            queue.pop_front();
            Site s = K.sites()[j];
            comp.push_back(s);
            for (const Site& o : offs) {
                auto idx = K.index_of({s.x + o.x, s.y + o.y, s.z + o.z});
                if (idx && !done[*idx]) {
                    done[*idx] = 1;
                    queue.push_back(*idx);
                }
            }
        }
        comps.emplace_back(std::move(comp), K.dim());
    }
    // components come out keyed by smallest site already (sites_ is sorted and
    // we scan anchors in order), but make the guarantee explicit
    std::sort(comps.begin(), comps.end(), [](const Region& a, const Region& b) {
        return a.sites().front() < b.sites().front();
    });
    return comps;
}

Region fill_holes(const Region& K, const Region& bounding_box) {
    for (const Site& s : K.sites())
        if (!bounding_box.contains(s))
            throw ValidationError("fill_holes: K not inside bounding box");
    Region comp = region_difference(bounding_box, K);
    Region frame = delta_in(bounding_box);
    Region out = K;
    for (const Region& c : connected_components(comp)) {
        bool touches_frame = false;
        for (const Site& s : c.sites())
            if (frame.contains(s)) {
                touches_frame = true;
                break;
            }
        if (!touches_frame)
            for (const Site& s : c.sites()) out.insert(s);
    }
    return out;
}

bool is_hole_free(const Region& K) {
    if (K.empty()) return true;
    Box b = bounding_box(K);
    b.lo.x -= 1; b.lo.y -= 1; b.hi.x += 1; b.hi.y += 1;
    if (K.dim() == 3) { b.lo.z -= 1; b.hi.z += 1; }
    return fill_holes(K, box_region(b, K.dim())) == K;
}

IsoperimetricCheck isoperimetric_check(const Region& K) {
    if (K.empty()) throw ValidationError("isoperimetric_check: empty region");
    double d = K.dim();
    double lhs = std::pow(double(K.size()), (d - 1.0) / d);
    double rhs = double(boundary_edge_count(K)) / (2.0 * d);
    return {lhs, rhs, lhs <= rhs * (1.0 + 1e-12) + 1e-12};
}

Site min_site_l1(const Region& K) {
    if (K.empty()) throw ValidationError("min_site_l1: empty region");
    Site best = K.sites().front();
    for (const Site& s : K.sites())
        if (closer_to_origin(s, best)) best = s;
    return best;
}

Box bounding_box(const Region& K) {
    if (K.empty()) throw ValidationError("bounding_box: empty region");
    Box b{K.sites().front(), K.sites().front()};
    for (const Site& s : K.sites()) {
        b.lo.x = std::min(b.lo.x, s.x); b.hi.x = std::max(b.hi.x, s.x);
        b.lo.y = std::min(b.lo.y, s.y); b.hi.y = std::max(b.hi.y, s.y);
        b.lo.z = std::min(b.lo.z, s.z); b.hi.z = std::max(b.hi.z, s.z);
    }
    return b;
}

Region box_region(const Box& b, int d) {
    std::vector<Site> sites;
    for (int x = b.lo.x; x <= b.hi.x; ++x)
        for (int y = b.lo.y; y <= b.hi.y; ++y) {
            if (d == 2)
                sites.push_back({x, y, 0});
            else
                for (int z = b.lo.z; z <= b.hi.z; ++z) sites.push_back({x, y, z});
        }
    return Region(std::move(sites), d);
}

namespace {

void connected_subset_scan(const Region& universe, std::size_t max_size,
                           Adjacency adj, bool first_anchor_only,
                           const std::function<bool(const Region&)>& fn) {
    if (max_size == 0) return;
    const auto& offs = adj == Adjacency::nearest ? nn_offsets(universe.dim())
                                                 : star_offsets(universe.dim());
    std::size_t n = universe.size();
    // neighbor index lists
    std::vector<std::vector<std::uint32_t>> nbr(n);
    for (std::size_t i = 0; i < n; ++i) {
        Site s = universe.sites()[i];
        for (const Site& o : offs) {
            auto j = universe.index_of({s.x + o.x, s.y + o.y, s.z + o.z});
            if (j) nbr[i].push_back(std::uint32_t(*j));
        }
        std::sort(nbr[i].begin(), nbr[i].end());
    }

    std::vector<std::uint32_t> cur;          // current subset (indices)
    std::vector<std::uint32_t> frontier;      // untried extension stack
    std::vector<char> in_cur(n, 0), banned(n, 0), queued(n, 0);
    bool stop = false;

    // classic untried-set recursion: each call owns a slice of the frontier
    std::function<void(std::uint32_t, std::size_t)> grow =
        [&](std::uint32_t anchor, std::size_t frontier_base) {
            if (stop) return;
            std::vector<Site> sites;
            sites.reserve(cur.size());
            for (auto i : cur) sites.push_back(universe.sites()[i]);
            if (!fn(Region(std::move(sites), universe.dim()))) {
                stop = true;
                return;
            }
            if (cur.size() == max_size) return;
            std::size_t end = frontier.size();
            for (std::size_t fi = frontier_base; fi < end && !stop; ++fi) {
                std::uint32_t c = frontier[fi];
                if (banned[c]) continue;
                banned[c] = 1;  // later branches at this level must not reuse c
                cur.push_back(c);
                in_cur[c] = 1;
                std::size_t added_from = frontier.size();
                for (auto m : nbr[c])
                    if (m > anchor && !in_cur[m] && !banned[m] && !queued[m]) {
                        queued[m] = 1;
                        frontier.push_back(m);
                    }
                grow(anchor, fi + 1);
                for (std::size_t k = added_from; k < frontier.size(); ++k)
                    queued[frontier[k]] = 0;
                frontier.resize(added_from);
                in_cur[c] = 0;
                cur.pop_back();
            }
            for (std::size_t fi = frontier_base; fi < end; ++fi)
                banned[frontier[fi]] = 0;
        };

    std::uint32_t a_end = first_anchor_only ? std::min<std::size_t>(1, n) : n;
    for (std::uint32_t a = 0; a < a_end && !stop; ++a) {
        cur = {a};
        in_cur[a] = 1;
        frontier.clear();
        for (auto m : nbr[a])
            if (m > a) {
                queued[m] = 1;
                frontier.push_back(m);
            }
        grow(a, 0);
        for (auto m : frontier) queued[m] = 0;
        in_cur[a] = 0;
    }
}

}  // namespace

void for_each_connected_subset(const Region& universe, std::size_t max_size,
                               Adjacency adj,
                               const std::function<bool(const Region&)>& fn) {
    connected_subset_scan(universe, max_size, adj, false, fn);
}

void for_each_connected_subset_anchored(const Region& universe,
                                        std::size_t max_size, Adjacency adj,
                                        const std::function<bool(const Region&)>& fn) {
    connected_subset_scan(universe, max_size, adj, true, fn);
}

void for_each_fixed_shape(std::size_t max_size, int d, Adjacency adj,
                          const std::function<bool(const Region&)>& fn) {
    if (max_size == 0) return;
    // board of all sites lexicographically >= origin and reachable in
    // max_size-1 steps; any shape translated so its lex-min site is the
    // origin lives here, so anchored enumeration hits each exactly once
    int r = int(max_size) - 1;
    std::vector<Site> board{{0, 0, 0}};
    auto push = [&](int x, int y, int z) {
        if (Site{x, y, z} > Site{0, 0, 0}) board.push_back({x, y, z});
    };
    for (int x = 0; x <= r; ++x)
        for (int y = -r; y <= r; ++y) {
            if (d == 2)
                push(x, y, 0);
            else
                for (int z = -r; z <= r; ++z) push(x, y, z);
        }
    connected_subset_scan(Region(std::move(board), d), max_size, adj, true, fn);
}

}  // namespace isinglab
