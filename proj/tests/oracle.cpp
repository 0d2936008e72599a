#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace oracle {

namespace {

using std::size_t;

struct BondKey {  // bond between cell c and c + e_axis
    Cell c;
    int axis;
    bool operator<(const BondKey& o) const {
        if (c != o.c) return c < o.c;
        return axis < o.axis;
    }
};

std::vector<Cell> axes(int d) {
    std::vector<Cell> out = {{1, 0, 0}, {0, 1, 0}};
    if (d == 3) out.push_back({0, 0, 1});
    return out;
}

// dual vertices of the face crossing a bond, in doubled coordinates
std::vector<Cell> face_corners(const BondKey& b, int d) {
    Cell center{2 * b.c[0], 2 * b.c[1], 2 * b.c[2]};
    center[size_t(b.axis)] += 1;
    std::vector<Cell> out;
    if (d == 2) {
        int u = b.axis == 0 ? 1 : 0;
        for (int s : {-1, 1}) {
            Cell v = center;
            v[size_t(u)] += s;
            out.push_back(v);
        }
    } else {
        int u = (b.axis + 1) % 3, v = (b.axis + 2) % 3;
        for (int su : {-1, 1})
            for (int sv : {-1, 1}) {
                Cell w = center;
                w[size_t(u)] += su;
                w[size_t(v)] += sv;
                out.push_back(w);
            }
    }
    return out;
}

}  // namespace

SlowResult slow_enumerate(const SlowSpec& spec) {
    const int d = spec.d;
    const size_t n = spec.sites.size();
    if (n == 0 || n > 22) throw std::runtime_error("slow_enumerate: bad size");
    if (!spec.h) throw std::runtime_error("slow_enumerate: field missing");

    std::map<Cell, int> index;
    for (size_t i = 0; i < n; ++i) index[spec.sites[i]] = int(i);
    const auto dirs = axes(d);

    // bonds with at least one end in the region, each exactly once
    struct BondRec {
        BondKey key;
        int i;      // region index of low end, -1 if outside
        int j;      // region index of high end, -1 if outside
    };
    std::vector<BondRec> bonds;
    for (size_t i = 0; i < n; ++i) {
        const Cell& s = spec.sites[i];
        for (int a = 0; a < int(dirs.size()); ++a) {
            Cell p = s;
            p[size_t(a)] += 1;
            auto it = index.find(p);
            bonds.push_back({{s, a}, int(i), it == index.end() ? -1 : it->second});
            Cell q = s;
            q[size_t(a)] -= 1;
            if (index.find(q) == index.end())
                bonds.push_back({{q, a}, -1, int(i)});
        }
    }
    // the i<j internal duplicates were never created: only +axis from each
    // site, so internal bonds appear once; dedupe is not needed

    // grid for interiors: bounding box + margin 2
    Cell lo = spec.sites[0], hi = spec.sites[0];
    for (const Cell& s : spec.sites)
        for (int k = 0; k < 3; ++k) {
            lo[size_t(k)] = std::min(lo[size_t(k)], s[k]);
            hi[size_t(k)] = std::max(hi[size_t(k)], s[k]);
        }
    for (int k = 0; k < d; ++k) {
        lo[size_t(k)] -= 2;
        hi[size_t(k)] += 2;
    }
    std::array<int, 3> dims{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1,
                            d == 3 ? hi[2] - lo[2] + 1 : 1};
    auto cell_id = [&](const Cell& s) {
        return ((s[2] - lo[2]) * dims[1] + (s[1] - lo[1])) * dims[0] +
               (s[0] - lo[0]);
    };
    const int ncells = dims[0] * dims[1] * dims[2];

    std::set<Cell> scope_set(spec.scope.begin(), spec.scope.end());
    std::vector<double> h_site(n);
    for (size_t i = 0; i < n; ++i)
        h_site[i] = spec.h(spec.sites[i][0], spec.sites[i][1], spec.sites[i][2]);

    auto track_it = index.find(spec.track);
    const int track_idx = track_it == index.end() ? -1 : track_it->second;

    SlowResult out;
    std::vector<int> spin(n);
    // reference energy keeps expl() in range
    double href = 0.0;
    {
        double e = 0.0;
        for (const auto& b : bonds) {
            int si = b.i < 0 ? spec.boundary : 1;
            int sj = b.j < 0 ? spec.boundary : 1;
            e -= spec.J * si * sj;
        }
        for (size_t i = 0; i < n; ++i) e -= h_site[i];
        href = e;
    }

    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
        bool ok = true;
        for (size_t i = 0; i < n; ++i) {
            spin[i] = (mask >> i) & 1 ? 1 : -1;
            if (spec.pin.size() == n && spec.pin[i] != 0 && spin[i] != spec.pin[i])
                ok = false;
        }
        if (!ok) continue;

        double e = 0.0;
        int msum = 0;
        std::vector<int> broken_idx;
        for (size_t b = 0; b < bonds.size(); ++b) {
            int si = bonds[b].i < 0 ? spec.boundary : spin[size_t(bonds[b].i)];
            int sj = bonds[b].j < 0 ? spec.boundary : spin[size_t(bonds[b].j)];
            e -= spec.J * si * sj;
            if (si * sj < 0) broken_idx.push_back(int(b));
        }
        for (size_t i = 0; i < n; ++i) {
            e -= h_site[i] * spin[i];
            msum += spin[i];
        }

        // group broken bonds into contours through shared dual vertices
        std::vector<int> comp(broken_idx.size(), -1);
        {
            std::map<Cell, std::vector<int>> corner_owners;
            for (size_t k = 0; k < broken_idx.size(); ++k)
                for (const Cell& c : face_corners(bonds[size_t(broken_idx[k])].key, d))
                    corner_owners[c].push_back(int(k));
            int ncomp = 0;
            for (size_t k = 0; k < broken_idx.size(); ++k) {
                if (comp[k] >= 0) continue;
                std::vector<int> stack{int(k)};
                comp[k] = ncomp;
                while (!stack.empty()) {
                    int cur = stack.back();
                    stack.pop_back();
                    for (const Cell& c :
                         face_corners(bonds[size_t(broken_idx[size_t(cur)])].key, d))
                        for (int other : corner_owners[c])
                            if (comp[size_t(other)] < 0) {
                                comp[size_t(other)] = ncomp;
                                stack.push_back(other);
                            }
                }
                ++ncomp;
            }
            // per contour: interior by flood from the grid frame
            bool all_slim = true;
            for (int g = 0; g < ncomp; ++g) {
                std::set<BondKey> blocked;
                for (size_t k = 0; k < broken_idx.size(); ++k)
                    if (comp[k] == g)
                        blocked.insert(bonds[size_t(broken_idx[k])].key);
                std::vector<char> reach(size_t(ncells), 0);
                std::vector<Cell> queue;
                for (int z = lo[2]; z <= (d == 3 ? hi[2] : lo[2]); ++z)
                    for (int y = lo[1]; y <= hi[1]; ++y)
                        for (int x = lo[0]; x <= hi[0]; ++x) {
                            bool frame = x == lo[0] || x == hi[0] || y == lo[1] ||
                                         y == hi[1];
                            if (d == 3) frame = frame || z == lo[2] || z == hi[2];
                            if (frame) {
                                Cell c{x, y, d == 3 ? z : 0};
                                reach[size_t(cell_id(c))] = 1;
                                queue.push_back(c);
                            }
                        }
                while (!queue.empty()) {
                    Cell c = queue.back();
                    queue.pop_back();
                    for (int a = 0; a < int(dirs.size()); ++a)
                        for (int s : {-1, 1}) {
                            Cell p = c;
                            p[size_t(a)] += s;
                            if (p[0] < lo[0] || p[0] > hi[0] || p[1] < lo[1] ||
                                p[1] > hi[1])
                                continue;
                            if (d == 3 && (p[2] < lo[2] || p[2] > hi[2])) continue;
                            if (reach[size_t(cell_id(p))]) continue;
                            BondKey crossing{s > 0 ? c : p, a};
                            if (blocked.count(crossing)) continue;
                            reach[size_t(cell_id(p))] = 1;
                            queue.push_back(p);
                        }
                }
                std::vector<Cell> interior;
                for (int z = lo[2]; z <= (d == 3 ? hi[2] : lo[2]); ++z)
                    for (int y = lo[1]; y <= hi[1]; ++y)
                        for (int x = lo[0]; x <= hi[0]; ++x) {
                            Cell c{x, y, d == 3 ? z : 0};
                            if (!reach[size_t(cell_id(c))]) interior.push_back(c);
                        }
                // boundary edge count of the interior as a site set
                long bsz = 0;
                std::set<Cell> iset(interior.begin(), interior.end());
                for (const Cell& c : interior)
                    for (int a = 0; a < int(dirs.size()); ++a)
                        for (int s : {-1, 1}) {
                            Cell p = c;
                            p[size_t(a)] += s;
                            if (!iset.count(p)) ++bsz;
                        }
                double hsum = 0.0;
                for (const Cell& c : interior) hsum += spec.h(c[0], c[1], c[2]);
                bool slim = spec.J * double(bsz) > 2.0 * hsum;
                bool must_be_slim = true;
                if (spec.slim_mode == 0) must_be_slim = false;
                if (spec.slim_mode == 2) {
                    for (const Cell& c : interior)
                        if (!scope_set.count(c)) {
                            must_be_slim = false;
                            break;
                        }
                }
                if (must_be_slim && !slim) all_slim = false;
            }

            long double w = expl(-(long double)(spec.beta) * (e - href));
            long double m = (long double)(msum) / (long double)(n);
            long double s0 =
                track_idx < 0 ? 0.0L : (long double)(spin[size_t(track_idx)]);
            out.Z += w;
            out.count += 1;
            out.m_sum += w * m;
            out.s0_sum += w * s0;
            if (all_slim) {
                out.Z_slim += w;
                out.count_slim += 1;
                out.m_slim_sum += w * m;
                out.s0_slim_sum += w * s0;
            }
        }
    }
    // shift back so log_Z is the true log partition function
    long double scale = expl(-(long double)(spec.beta) * href);
    out.Z *= scale;
    out.Z_slim *= scale;
    out.m_sum *= scale;
    out.s0_sum *= scale;
    out.m_slim_sum *= scale;
    out.s0_slim_sum *= scale;
    return out;
}

namespace {

std::uint64_t count_animals(int n, int d, bool star) {
    std::vector<Cell> offs;
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dz = (d == 3 ? -1 : 0); dz <= (d == 3 ? 1 : 0); ++dz) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                int l1 = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (!star && l1 != 1) continue;
                offs.push_back({dx, dy, dz});
            }
    std::set<std::set<Cell>> frontier = {{Cell{0, 0, 0}}};
    for (int size = 2; size <= n; ++size) {
        std::set<std::set<Cell>> next;
        for (const auto& shape : frontier)
            for (const Cell& c : shape)
                for (const Cell& o : offs) {
                    Cell p{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
                    if (shape.count(p)) continue;
                    auto grown = shape;
                    grown.insert(p);
                    next.insert(std::move(grown));
                }
        frontier = std::move(next);
    }
    return frontier.size();
}

}  // namespace

std::uint64_t count_star_animals(int n, int d) {
    return count_animals(n, d, true);
}

std::uint64_t count_nn_animals(int n, int d) { return count_animals(n, d, false); }

}  // namespace oracle
