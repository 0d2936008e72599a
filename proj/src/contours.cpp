#include "isinglab/contours.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace isinglab {

namespace {

std::uint64_t pack3(int x, int y, int z) {
    return (std::uint64_t(std::uint32_t(x + (1 << 20))) << 42) |
           (std::uint64_t(std::uint32_t(y + (1 << 20))) << 21) |
           std::uint64_t(std::uint32_t(z + (1 << 20)));
}

struct UnionFind {
    std::vector<int> parent;
    int add() {
        parent.push_back(int(parent.size()));
        return int(parent.size()) - 1;
    }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// bond key: anchor cell (the smaller endpoint) and axis
std::uint64_t bond_key(const Bond& b) {
    int axis = b.b.x != b.a.x ? 0 : (b.b.y != b.a.y ? 1 : 2);
    return pack3(b.a.x, b.a.y, b.a.z) * 4 + std::uint64_t(axis);
}

}  // namespace

SpinConfig::SpinConfig(Region region, std::vector<std::int8_t> spins,
                       Boundary boundary)
    : region_(std::move(region)), spins_(std::move(spins)),
      boundary_(std::move(boundary)) {
    if (spins_.size() != region_.size())
        throw ValidationError("SpinConfig: spins and region size differ");
    for (auto v : spins_)
        if (v != 1 && v != -1) throw ValidationError("SpinConfig: spins must be +-1");
    if (boundary_.kind == BoundaryKind::explicit_map) {
        Region dout = delta_out(region_);
        if (boundary_.spins.size() != dout.size())
            throw ValidationError("SpinConfig: explicit boundary must cover delta_out exactly");
        for (const auto& [s, v] : boundary_.spins) {
            if (!dout.contains(s))
                throw ValidationError("SpinConfig: explicit boundary site not on delta_out");
            if (v != 1 && v != -1)
                throw ValidationError("SpinConfig: boundary spins must be +-1");
        }
    }
}

SpinConfig SpinConfig::uniform(Region region, int spin, Boundary boundary) {
    if (spin != 1 && spin != -1) throw ValidationError("uniform: spin must be +-1");
    std::vector<std::int8_t> spins(region.size(), std::int8_t(spin));
    return SpinConfig(std::move(region), std::move(spins), std::move(boundary));
}

int SpinConfig::spin_at(const Site& s) const {
    auto i = region_.index_of(s);
    if (!i) throw ValidationError("spin_at: site not in region");
    return spins_[*i];
}

int SpinConfig::spin_or_boundary(const Site& s) const {
    auto i = region_.index_of(s);
    if (i) return spins_[*i];
    switch (boundary_.kind) {
        case BoundaryKind::plus: return 1;
        case BoundaryKind::minus: return -1;
        case BoundaryKind::explicit_map: {
            auto it = boundary_.spins.find(s);
            if (it == boundary_.spins.end())
                throw ValidationError("spin_or_boundary: site outside explicit boundary");
            return it->second;
        }
    }
    return 1;
}

void SpinConfig::set_spin(const Site& s, int v) {
    auto i = region_.index_of(s);
    if (!i) throw ValidationError("set_spin: site not in region");
    if (v != 1 && v != -1) throw ValidationError("set_spin: spin must be +-1");
    spins_[*i] = std::int8_t(v);
}

Bond make_bond(const Site& s, const Site& t) {
    return s < t ? Bond{s, t} : Bond{t, s};
}

Region contour_interior(const std::vector<Bond>& bonds, int d) {
    if (bonds.empty()) return Region({}, d);
    std::vector<Site> cells;
    for (const Bond& b : bonds) {
        cells.push_back(b.a);
        cells.push_back(b.b);
    }
    Box box = bounding_box(Region(cells, d));
    box.lo.x -= 1; box.lo.y -= 1; box.hi.x += 1; box.hi.y += 1;
    if (d == 3) { box.lo.z -= 1; box.hi.z += 1; }

    std::unordered_set<std::uint64_t> blocked;
    for (const Bond& b : bonds) blocked.insert(bond_key(b));

    int W = box.hi.x - box.lo.x + 1;
    int H = box.hi.y - box.lo.y + 1;
    int D = d == 3 ? box.hi.z - box.lo.z + 1 : 1;
    auto idx = [&](int x, int y, int z) {
        return std::size_t(z - (d == 3 ? box.lo.z : 0)) * W * H +
               std::size_t(y - box.lo.y) * W + std::size_t(x - box.lo.x);
    };
    std::vector<char> reached(std::size_t(W) * H * D, 0);
    std::deque<Site> queue;
    auto seed = [&](int x, int y, int z) {
        std::size_t i = idx(x, y, z);
        if (!reached[i]) {
            reached[i] = 1;
            queue.push_back({x, y, z});
        }
    };
    // frame of the expanded box is always outside the contour
    for (int x = box.lo.x; x <= box.hi.x; ++x)
        for (int y = box.lo.y; y <= box.hi.y; ++y) {
            if (d == 2) {
                if (x == box.lo.x || x == box.hi.x || y == box.lo.y || y == box.hi.y)
                    seed(x, y, 0);
            } else {
                for (int z = box.lo.z; z <= box.hi.z; ++z)
                    if (x == box.lo.x || x == box.hi.x || y == box.lo.y ||
                        y == box.hi.y || z == box.lo.z || z == box.hi.z)
                        seed(x, y, z);
            }
        }
    const auto& offs = nn_offsets(d);
    while (!queue.empty()) {
        Site u = queue.front();
        queue.pop_front();
        for (const Site& o : offs) {
            Site v{u.x + o.x, u.y + o.y, u.z + o.z};
            if (v.x < box.lo.x || v.x > box.hi.x || v.y < box.lo.y ||
                v.y > box.hi.y)
                continue;
            if (d == 3 && (v.z < box.lo.z || v.z > box.hi.z)) continue;
            if (d == 2 && v.z != 0) continue;
            if (blocked.count(bond_key(make_bond(u, v)))) continue;
            std::size_t i = idx(v.x, v.y, v.z);
            if (!reached[i]) {
                reached[i] = 1;
                queue.push_back(v);
            }
        }
    }
    std::vector<Site> interior;
    for (int x = box.lo.x; x <= box.hi.x; ++x)
        for (int y = box.lo.y; y <= box.hi.y; ++y)
            for (int z = (d == 3 ? box.lo.z : 0); z <= (d == 3 ? box.hi.z : 0); ++z)
                if (!reached[idx(x, y, z)]) interior.push_back({x, y, z});
    return Region(std::move(interior), d);
}

std::vector<Contour> extract_contours(const SpinConfig& s) {
    int d = s.region().dim();
    const auto& offs = nn_offsets(d);

    // all bonds touching the region, each once, with broken flag
    std::vector<Bond> broken;
    for (const Site& a : s.region().sites()) {
        int sa = s.spin_at(a);
        for (const Site& o : offs) {
            Site b{a.x + o.x, a.y + o.y, a.z + o.z};
            bool b_in = s.region().contains(b);
            if (b_in && !(a < b)) continue;  // internal bonds once
            if (sa != s.spin_or_boundary(b)) broken.push_back(make_bond(a, b));
        }
    }
    if (broken.empty()) return {};

    // two broken bonds belong to the same contour iff their dual facets share
    // a corner of the dual lattice
    UnionFind uf;
    std::unordered_map<std::uint64_t, int> corner_node;
    std::vector<int> bond_node(broken.size());
    for (std::size_t i = 0; i < broken.size(); ++i) {
        const Bond& b = broken[i];
        int axis = b.b.x != b.a.x ? 0 : (b.b.y != b.a.y ? 1 : 2);
        std::vector<std::uint64_t> corners;
        if (d == 2) {
            if (axis == 0)
                corners = {pack3(b.a.x + 1, b.a.y, 0), pack3(b.a.x + 1, b.a.y + 1, 0)};
            else
                corners = {pack3(b.a.x, b.a.y + 1, 0), pack3(b.a.x + 1, b.a.y + 1, 0)};
        } else {
            for (int u = 0; u <= 1; ++u)
                for (int v = 0; v <= 1; ++v) {
                    if (axis == 0)
                        corners.push_back(pack3(b.a.x + 1, b.a.y + u, b.a.z + v));
                    else if (axis == 1)
                        corners.push_back(pack3(b.a.x + u, b.a.y + 1, b.a.z + v));
                    else
                        corners.push_back(pack3(b.a.x + u, b.a.y + v, b.a.z + 1));
                }
        }
        int first = -1;
        for (auto ck : corners) {
            auto [it, fresh] = corner_node.try_emplace(ck, -1);
            if (fresh) it->second = uf.add();
            if (first < 0)
                first = it->second;
            else
                uf.unite(first, it->second);
        }
        bond_node[i] = first;
    }

    std::unordered_map<int, std::size_t> root_to_slot;
    std::vector<std::vector<Bond>> groups;
    for (std::size_t i = 0; i < broken.size(); ++i) {
        int r = uf.find(bond_node[i]);
        auto [it, fresh] = root_to_slot.try_emplace(r, groups.size());
        if (fresh) groups.emplace_back();
        groups[it->second].push_back(broken[i]);
    }

    std::vector<Contour> out;
    out.reserve(groups.size());
    for (auto& bonds : groups) {
        std::sort(bonds.begin(), bonds.end());
        Contour g;
        g.broken_bonds = std::move(bonds);
        g.interior = contour_interior(g.broken_bonds, d);
        g.boundary_size = boundary_edge_count(g.interior);
        g.min_site = min_site_l1(g.interior);
        Site t = min_site_l1(delta_out(g.interior));
        g.sign = s.spin_or_boundary(t);
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end(), [](const Contour& a, const Contour& b) {
        if (a.min_site != b.min_site) return closer_to_origin(a.min_site, b.min_site);
        if (a.boundary_size != b.boundary_size) return a.boundary_size < b.boundary_size;
        return a.broken_bonds < b.broken_bonds;
    });
    return out;
}

SlimFatTag classify(const Contour& g, const CouplingSpec& c, const FieldSpec& f) {
    double lhs = c.J * double(g.boundary_size);
    double rhs = 2.0 * field_sum(g.interior, f);
    return {lhs > rhs, lhs, rhs};
}

double peierls_weight_bound(const Contour& g, const CouplingSpec& c) {
    return std::exp(-c.beta * c.J * double(g.boundary_size));
}

double fat_boundary_lower_bound(const Site& x, const CouplingSpec& c,
                                const FieldSpec& f, int d) {
    if (x == Site{0, 0, 0})
        throw std::domain_error("fat_boundary_lower_bound undefined at the origin");
    if (d != 2 && d != 3) throw ValidationError("dimension must be 2 or 3");
    double dd = double(d);
    double cp = std::pow(2.0 * dd, -dd / (dd - 1.0));
    double base = c.J / (2.0 * cp * f.h_star);
    return std::pow(base, dd - 1.0) *
           std::pow(double(l1_norm(x)), f.alpha * (dd - 1.0));
}

void for_each_candidate_interior(const Region& within, std::size_t max_size,
                                 const std::function<bool(const Region&)>& fn) {
    for_each_connected_subset(within, max_size, Adjacency::nearest,
                              [&](const Region& r) {
                                  if (!is_hole_free(r)) return true;
                                  return fn(r);
                              });
}

FatSum fat_sum_partial(const CouplingSpec& c, const FieldSpec& f, int box_radius,
                       long max_boundary, bool allow_large) {
    int d = 2;
    if (box_radius < 0) throw ValidationError("fat_sum_partial: box_radius >= 0");
    if (max_boundary < 2 * d) return {};
    if (!allow_large && box_radius > 8)
        throw CapError("fat_sum_partial: box_radius cap 8; pass allow_large");
    // |I| <= (|dI|/(2d))^{d/(d-1)} bounds the interior size given the
    // boundary cap, so the sweep below is exhaustive for this max_boundary
    double dd = double(d);
    auto size_cap = std::size_t(
        std::floor(std::pow(double(max_boundary) / (2.0 * dd), dd / (dd - 1.0)) + 1e-9));
    if (!allow_large && size_cap > 10)
        throw CapError("fat_sum_partial: implied interior size " +
                       std::to_string(size_cap) + " over cap 10; pass allow_large");
    FatSum out;
    double comp = 0.0;
    for_each_candidate_interior(ball(box_radius, d), size_cap, [&](const Region& I) {
        long bsz = boundary_edge_count(I);
        if (bsz > max_boundary) return true;
        double lhs = c.J * double(bsz);
        double rhs = 2.0 * field_sum(I, f);
        if (lhs > rhs) return true;  // slim
        double y = std::exp(-c.beta * c.J * double(bsz)) - comp;
        double t = out.value + y;
        comp = (t - out.value) - y;
        out.value = t;
        out.terms += 1;
        return true;
    });
    return out;
}

}  // namespace isinglab
