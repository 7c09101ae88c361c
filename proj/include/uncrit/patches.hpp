#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "uncrit/common.hpp"
#include "uncrit/family.hpp"
#include "uncrit/linprog.hpp"
#include "uncrit/mesh.hpp"
#include "uncrit/pltopo.hpp"

namespace uncrit {

/// Affine event function delta_{ij}(a) = c0 + <c, a> = f_{a;j} - f_{a;i}.
/// Its zero set is the hyperplane where vertices i and j swap order.
struct Constraint {
    int i = -1, j = -1;
    double c0 = 0.0;
    std::vector<double> c;
    double cnorm = 0.0;
    bool degenerate = false; // (c0, c) identically zero: i and j always tie
    bool constant = false;   // c ~ 0, c0 != 0: sign never depends on a
    int fixed_sign = 0;      // resolved sign for degenerate/constant constraints
    int wall = -1;           // arrangement hyperplane index, -1 if not a wall
    int orient = 1;          // sign(delta) = orient * (wall sign)
};

inline Constraint make_constraint(const LinearFamily& family, int i, int j) {
    if (i == j) throw config_error("constraint requires two distinct vertices");
    const int m = family.mode_count();
    Constraint k;
    k.i = i;
    k.j = j;
    k.c0 = family.g[0][j] - family.g[0][i];
    k.c.resize(m);
    double s2 = 0.0;
    for (int d = 0; d < m; ++d) {
        k.c[d] = family.g[d + 1][j] - family.g[d + 1][i];
        s2 += k.c[d] * k.c[d];
    }
    k.cnorm = std::sqrt(s2);
    if (k.c0 == 0.0 && k.cnorm == 0.0) {
        k.degenerate = true;
        k.fixed_sign = j > i ? 1 : -1;
    } else if (k.cnorm <= 1e-14 * std::max(1.0, std::abs(k.c0))) {
        k.constant = true;
        k.fixed_sign = k.c0 > 0.0 ? 1 : -1;
    }
    return k;
}

/// Deduplicated arrangement hyperplane. The representative (c0, c) is affine-
/// normalized and oriented so that the first nonzero coefficient in the
/// tie-break order (c_m, ..., c_1, c0) is positive; a tie-broken sample
/// therefore always sits on the wall's + side.
struct Wall {
    double c0 = 0.0;
    std::vector<double> c;
    double cnorm = 0.0;
    std::vector<int> members; // constraint indices merged into this wall
};

struct Patch {
    int id = -1; // global singular-patch id, assigned by the graph builder
    int vertex = -1;
    SignVector sign_vector;              // per link ring position
    std::vector<std::int8_t> wall_signs; // per wall
    CriticalType ctype;
    std::vector<int> active;  // ring positions whose hyperplane is a facet
    std::vector<double> witness;
    double slack = 0.0;
};

enum class EnumMode { Auto, Incremental, ReverseSearch };

struct PatchOptions {
    double eps_feas = 1e-9;       // strict-feasibility threshold (relative to |c|)
    double slack_cap = 1.0;
    int soft_max_m = 4;
    EnumMode mode = EnumMode::Auto;
};

/// All parameter-space cells of one vertex: the arrangement of its neighbor
/// event hyperplanes, each cell carrying sign vector, type, and witness.
struct VertexPatchSet {
    int vertex = -1;
    int m = 0;
    std::vector<Constraint> constraints; // per link ring position
    std::vector<Wall> walls;
    std::vector<Patch> patches;          // lexicographically sorted by sign vector

    int wall_sign(int w, std::span<const double> a) const {
        const Wall& wl = walls[w];
        double v = wl.c0;
        for (std::size_t k = 0; k < wl.c.size(); ++k) v += wl.c[k] * a[k];
        if (v > 0.0) return 1;
        if (v < 0.0) return -1;
        return 1; // canonical orientation makes the tie side positive
    }

    /// Patch whose wall-sign key matches exactly, or -1. Misses only when the
    /// tie-broken sign combination names an empty cell (a measure-zero event
    /// on wall intersections).
    int match_exact(std::span<const double> a) const {
        if (patches.size() == 1) return 0;
        std::uint64_t key = 0;
        for (std::size_t w = 0; w < walls.size(); ++w)
            if (wall_sign(static_cast<int>(w), a) > 0) key |= (1ull << w);
        auto it = lookup_.find(key);
        return it == lookup_.end() ? -1 : it->second;
    }

    /// Index of the patch whose open cell (or tie-broken boundary) contains a.
    /// Total on R^m: boundary samples that miss the hash fall back to the
    /// max-margin cell.
    int match(std::span<const double> a) const {
        const int exact = match_exact(a);
        if (exact >= 0) return exact;
        int best = 0;
        double best_margin = -std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < patches.size(); ++p) {
            double margin = std::numeric_limits<double>::infinity();
            for (std::size_t w = 0; w < walls.size(); ++w) {
                const Wall& wl = walls[w];
                double v = wl.c0;
                for (std::size_t k = 0; k < wl.c.size(); ++k) v += wl.c[k] * a[k];
                margin = std::min(margin, patches[p].wall_signs[w] * v / wl.cnorm);
            }
            if (margin > best_margin) {
                best_margin = margin;
                best = static_cast<int>(p);
            }
        }
        return best;
    }

    void build_lookup() {
        lookup_.clear();
        for (std::size_t p = 0; p < patches.size(); ++p) {
            std::uint64_t key = 0;
            for (std::size_t w = 0; w < walls.size(); ++w)
                if (patches[p].wall_signs[w] > 0) key |= (1ull << w);
            lookup_.emplace(key, static_cast<int>(p));
        }
    }

private:
    std::unordered_map<std::uint64_t, int> lookup_;
};

namespace detail {

inline std::vector<double> affine_unit(double c0, std::span<const double> c) {
    std::vector<double> u(c.size() + 1);
    double s2 = c0 * c0;
    for (std::size_t k = 0; k < c.size(); ++k) s2 += c[k] * c[k];
    const double inv = 1.0 / std::sqrt(s2);
    // tie-break order: c_m, ..., c_1, c0
    for (std::size_t k = 0; k < c.size(); ++k) u[k] = c[c.size() - 1 - k] * inv;
    u[c.size()] = c0 * inv;
    return u;
}

inline int canonical_orientation(const std::vector<double>& u) {
    for (double v : u)
        if (v != 0.0) return v > 0.0 ? 1 : -1;
    return 1;
}

inline bool same_direction(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a[k] - b[k]) > tol) return false;
    return true;
}

inline SlackLp cell_lp(const VertexPatchSet& set, std::span<const std::int8_t> wall_signs,
                       const PatchOptions& opt, int skip_wall = -1, int eq_wall = -1) {
    SlackLp lp(set.m, opt.slack_cap);
    for (std::size_t w = 0; w < set.walls.size(); ++w) {
        if (static_cast<int>(w) == skip_wall) continue;
        if (static_cast<int>(w) == eq_wall) {
            lp.add_equality(set.walls[w].c0, set.walls[w].c);
        } else {
            lp.add_inequality(set.walls[w].c0, set.walls[w].c, wall_signs[w]);
        }
    }
    return lp;
}

inline void enumerate_m1(VertexPatchSet& set, const PatchOptions& opt) {
    // Breakpoints -c0/c sorted ascending; intervals emitted left to right.
    // With the canonical wall orientation (c > 0) every wall is - left of its
    // breakpoint and + right of it, so the leftmost interval (a -> -inf)
    // carries the sign vector of the negated first mode on the link.
    const std::size_t W = set.walls.size();
    std::vector<std::pair<double, int>> bps(W);
    for (std::size_t w = 0; w < W; ++w)
        bps[w] = {-set.walls[w].c0 / set.walls[w].c[0], static_cast<int>(w)};
    std::sort(bps.begin(), bps.end());
    const double span = bps.back().first - bps.front().first;
    for (std::size_t i = 0; i <= W; ++i) {
        Patch p;
        p.vertex = set.vertex;
        p.wall_signs.assign(W, 0);
        for (std::size_t k = 0; k < W; ++k) p.wall_signs[bps[k].second] = k < i ? 1 : -1;
        double lo = i > 0 ? bps[i - 1].first : -std::numeric_limits<double>::infinity();
        double hi = i < W ? bps[i].first : std::numeric_limits<double>::infinity();
        double wit, slack;
        if (i == 0) {
            wit = hi - (1.0 + 0.125 * span);
            slack = opt.slack_cap;
        } else if (i == W) {
            wit = lo + (1.0 + 0.125 * span);
            slack = opt.slack_cap;
        } else {
            wit = 0.5 * (lo + hi);
            slack = std::min(opt.slack_cap, 0.5 * (hi - lo));
        }
        p.witness = {wit};
        p.slack = slack;
        if (i > 0) p.active.push_back(bps[i - 1].second);
        if (i < W) p.active.push_back(bps[i].second);
        set.patches.push_back(std::move(p));
    }
    // Zero-width intervals (numerically coincident breakpoints that survived
    // dedup) are dropped.
    std::erase_if(set.patches, [&](const Patch& p) { return p.slack <= opt.eps_feas; });
    // `active` currently holds wall indices; remapped to ring positions later.
}

inline void enumerate_incremental(VertexPatchSet& set, const PatchOptions& opt) {
    struct Cell {
        std::vector<std::int8_t> signs;
        std::vector<double> witness;
    };
    std::vector<Cell> cells{{{}, std::vector<double>(set.m, 0.0)}};
    for (std::size_t w = 0; w < set.walls.size(); ++w) {
        const Wall& wl = set.walls[w];
        std::vector<Cell> next;
        next.reserve(cells.size() * 2);
        for (Cell& cell : cells) {
            double v = wl.c0;
            for (int k = 0; k < set.m; ++k) v += wl.c[k] * cell.witness[k];
            const double margin = v / wl.cnorm;
            int sure = std::abs(margin) > 1e-7 ? (margin > 0 ? 1 : -1) : 0;
            for (int side : {1, -1}) {
                if (side == sure) {
                    Cell kept = cell;
                    kept.signs.push_back(static_cast<std::int8_t>(side));
                    next.push_back(std::move(kept));
                    continue;
                }
                SlackLp lp(set.m, opt.slack_cap);
                for (std::size_t u = 0; u < w; ++u)
                    lp.add_inequality(set.walls[u].c0, set.walls[u].c, cell.signs[u]);
                lp.add_inequality(wl.c0, wl.c, side);
                auto r = lp.solve();
                if (r.feasible && r.slack > opt.eps_feas) {
                    Cell split = cell;
                    split.signs.push_back(static_cast<std::int8_t>(side));
                    split.witness = r.point;
                    next.push_back(std::move(split));
                }
            }
        }
        cells = std::move(next);
    }
    for (Cell& cell : cells) {
        Patch p;
        p.vertex = set.vertex;
        p.wall_signs = std::move(cell.signs);
        p.witness = std::move(cell.witness);
        set.patches.push_back(std::move(p));
    }
}

inline void enumerate_reverse_search(VertexPatchSet& set, const PatchOptions& opt) {
    const std::size_t W = set.walls.size();
    // A generic probe point seeds the search with one guaranteed-feasible cell.
    double reach = 1.0;
    for (const Wall& wl : set.walls) reach = std::max(reach, std::abs(wl.c0) / wl.cnorm);
    RandomStream rng(derive_stream_seed(0xFACADEull, static_cast<std::uint64_t>(set.vertex)));
    std::vector<double> probe(set.m, 0.0);
    bool ok = false;
    for (int attempt = 0; attempt < 256 && !ok; ++attempt) {
        for (double& x : probe) x = (2.0 * rng.uniform01() - 1.0) * 2.0 * reach;
        ok = true;
        for (const Wall& wl : set.walls) {
            double v = wl.c0;
            for (int k = 0; k < set.m; ++k) v += wl.c[k] * probe[k];
            if (std::abs(v) / wl.cnorm < 1e-6 * reach) { ok = false; break; }
        }
    }
    if (!ok) throw numeric_error("cell enumeration: no generic probe point found");

    auto key_of = [](std::span<const std::int8_t> s) {
        std::uint64_t key = 0;
        for (std::size_t w = 0; w < s.size(); ++w)
            if (s[w] > 0) key |= (1ull << w);
        return key;
    };

    std::vector<std::int8_t> seed(W);
    for (std::size_t w = 0; w < W; ++w) {
        double v = set.walls[w].c0;
        for (int k = 0; k < set.m; ++k) v += set.walls[w].c[k] * probe[k];
        seed[w] = v > 0 ? 1 : -1;
    }
    std::unordered_map<std::uint64_t, int> seen; // key -> patch index or -1 (infeasible)
    std::deque<std::size_t> queue;
    {
        Patch p;
        p.vertex = set.vertex;
        p.wall_signs = seed;
        p.witness = probe;
        seen.emplace(key_of(seed), 0);
        set.patches.push_back(std::move(p));
        queue.push_back(0);
    }
    while (!queue.empty()) {
        const std::size_t pi = queue.front();
        queue.pop_front();
        for (std::size_t w = 0; w < W; ++w) {
            std::vector<std::int8_t> cand = set.patches[pi].wall_signs;
            cand[w] = static_cast<std::int8_t>(-cand[w]);
            const std::uint64_t key = key_of(cand);
            if (seen.count(key)) continue;
            SlackLp lp(set.m, opt.slack_cap);
            for (std::size_t u = 0; u < W; ++u)
                lp.add_inequality(set.walls[u].c0, set.walls[u].c, cand[u]);
            auto r = lp.solve();
            if (r.feasible && r.slack > opt.eps_feas) {
                Patch p;
                p.vertex = set.vertex;
                p.wall_signs = std::move(cand);
                p.witness = r.point;
                p.slack = r.slack;
                seen.emplace(key, static_cast<int>(set.patches.size()));
                set.patches.push_back(std::move(p));
                queue.push_back(set.patches.size() - 1);
            } else {
                seen.emplace(key, -1);
            }
        }
    }
}

} // namespace detail

/// Every full-dimensional cell of the arrangement of v's neighbor event
/// hyperplanes, with tie-broken signs for degenerate/constant constraints.
/// m == 1 walks sorted breakpoints, m == 2 builds the arrangement
/// incrementally, m >= 3 runs a reverse search over sign vectors with
/// LP feasibility pruning.
inline VertexPatchSet enumerate_patches(const LinearFamily& family, const Grid& grid, int v,
                                        const PatchOptions& opt = {}) {
    const Link& link = grid.link(v);
    VertexPatchSet set;
    set.vertex = v;
    set.m = family.mode_count();

    for (int n : link.ring) set.constraints.push_back(make_constraint(family, v, n));

    // Coincident hyperplanes from distinct neighbor pairs are merged into one
    // wall; their signs expand back through the stored orientation.
    const double dir_tol = 1e-9;
    for (std::size_t ci = 0; ci < set.constraints.size(); ++ci) {
        Constraint& k = set.constraints[ci];
        if (k.degenerate || k.constant) continue;
        std::vector<double> u = detail::affine_unit(k.c0, k.c);
        const int orient = detail::canonical_orientation(u);
        if (orient < 0)
            for (double& x : u) x = -x;
        int found = -1;
        for (std::size_t w = 0; w < set.walls.size(); ++w) {
            std::vector<double> wu = detail::affine_unit(set.walls[w].c0, set.walls[w].c);
            if (detail::same_direction(u, wu, dir_tol)) { found = static_cast<int>(w); break; }
        }
        if (found < 0) {
            Wall wl;
            wl.c.resize(set.m);
            for (int d = 0; d < set.m; ++d) wl.c[d] = u[set.m - 1 - d];
            wl.c0 = u[set.m];
            double s2 = 0.0;
            for (double x : wl.c) s2 += x * x;
            wl.cnorm = std::sqrt(s2);
            found = static_cast<int>(set.walls.size());
            set.walls.push_back(std::move(wl));
        }
        set.walls[found].members.push_back(static_cast<int>(ci));
        k.wall = found;
        k.orient = orient;
    }
    if (set.walls.size() > 64)
        throw numeric_error("vertex " + std::to_string(v) + " has more than 64 distinct event hyperplanes");

    if (set.walls.empty()) {
        // Whole parameter space is a single patch (all constraints degenerate
        // or constant).
        Patch p;
        p.vertex = v;
        p.witness.assign(set.m, 0.0);
        p.slack = opt.slack_cap;
        set.patches.push_back(std::move(p));
    } else if (set.m == 1) {
        detail::enumerate_m1(set, opt);
    } else {
        EnumMode mode = opt.mode;
        if (mode == EnumMode::Auto) mode = set.m == 2 ? EnumMode::Incremental : EnumMode::ReverseSearch;
        if (mode == EnumMode::Incremental)
            detail::enumerate_incremental(set, opt);
        else
            detail::enumerate_reverse_search(set, opt);
        // Final witness + facet pass over the complete wall set.
        for (Patch& p : set.patches) {
            auto r = detail::cell_lp(set, p.wall_signs, opt).solve();
            if (!r.feasible || r.slack <= opt.eps_feas)
                throw numeric_error("cell enumeration produced an infeasible cell at vertex " +
                                    std::to_string(v));
            p.witness = r.point;
            p.slack = r.slack;
            for (std::size_t w = 0; w < set.walls.size(); ++w) {
                auto f = detail::cell_lp(set, p.wall_signs, opt, -1, static_cast<int>(w)).solve();
                if (f.feasible && f.slack > opt.eps_feas) p.active.push_back(static_cast<int>(w));
            }
        }
    }

    // Expand wall signs to per-ring signs and classify.
    for (Patch& p : set.patches) {
        p.sign_vector.center = v;
        p.sign_vector.signs.resize(set.constraints.size());
        for (std::size_t ci = 0; ci < set.constraints.size(); ++ci) {
            const Constraint& k = set.constraints[ci];
            int s;
            if (k.wall >= 0)
                s = k.orient * p.wall_signs[k.wall];
            else
                s = k.fixed_sign;
            p.sign_vector.signs[ci] = static_cast<std::int8_t>(s);
        }
        p.ctype = classify(link, p.sign_vector.signs);
        // Remap facet wall indices to ring positions.
        std::vector<int> ring_active;
        for (int w : p.active)
            for (int ci : set.walls[w].members) ring_active.push_back(ci);
        std::sort(ring_active.begin(), ring_active.end());
        p.active = std::move(ring_active);
    }

    std::sort(set.patches.begin(), set.patches.end(), [](const Patch& a, const Patch& b) {
        return a.sign_vector.signs < b.sign_vector.signs;
    });
    set.build_lookup();
    return set;
}

/// Parameter interval of a patch in a one-parameter family.
inline std::array<double, 2> patch_interval_1d(const VertexPatchSet& set, const Patch& p) {
    if (set.m != 1) throw config_error("patch_interval_1d: m == 1 families only");
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < set.walls.size(); ++w) {
        const double b = -set.walls[w].c0 / set.walls[w].c[0];
        if (p.wall_signs[w] > 0)
            lo = std::max(lo, b);
        else
            hi = std::min(hi, b);
    }
    return {lo, hi};
}

struct AdjacencyResult {
    bool adjacent = false;
    double slack = 0.0;
    std::vector<std::array<int, 2>> shared; // event hyperplanes as vertex pairs
    std::vector<double> point;              // a point of the common polytope
};

/// Patch adjacency. Same vertex: the closures share the face obtained by
/// turning the differing sign constraints into equalities. Neighboring
/// vertices i, j: the system {delta_ij = 0} + weak(p) + weak(q) must admit a
/// point (the common subset U on the event hyperplane).
inline AdjacencyResult is_adjacent(const VertexPatchSet& A, const Patch& p, const VertexPatchSet& B,
                                   const Patch& q, const Grid& grid, const PatchOptions& opt = {}) {
    AdjacencyResult res;
    const int m = A.m;
    SlackLp lp(m, opt.slack_cap);

    if (A.vertex == B.vertex) {
        std::vector<int> diff;
        for (std::size_t w = 0; w < A.walls.size(); ++w)
            if (p.wall_signs[w] != q.wall_signs[w]) diff.push_back(static_cast<int>(w));
        if (diff.empty()) return res; // same cell, not an adjacency
        std::vector<bool> is_eq(A.walls.size(), false);
        for (int w : diff) is_eq[w] = true;
        for (std::size_t w = 0; w < A.walls.size(); ++w) {
            if (is_eq[w])
                lp.add_equality(A.walls[w].c0, A.walls[w].c);
            else
                lp.add_inequality(A.walls[w].c0, A.walls[w].c, p.wall_signs[w]);
        }
        auto r = lp.solve();
        if (!r.feasible || r.slack < -opt.eps_feas) return res;
        res.adjacent = true;
        res.slack = r.slack;
        res.point = r.point;
        for (int w : diff)
            for (int ci : A.walls[w].members)
                res.shared.push_back({std::min(A.vertex, A.constraints[ci].j),
                                      std::max(A.vertex, A.constraints[ci].j)});
        std::sort(res.shared.begin(), res.shared.end());
        return res;
    }

    const auto& nb = grid.neighbors[A.vertex];
    if (!std::binary_search(nb.begin(), nb.end(), B.vertex))
        throw config_error("is_adjacent: patches live at non-neighboring vertices");

    // The event constraint between the two vertices.
    int ring_pos = -1;
    const Link& la = grid.link(A.vertex);
    for (std::size_t i = 0; i < la.ring.size(); ++i)
        if (la.ring[i] == B.vertex) { ring_pos = static_cast<int>(i); break; }
    const Constraint& ev = A.constraints[ring_pos];
    if (ev.constant) return res; // values never equal: no shared event
    std::vector<double> ev_unit;
    if (!ev.degenerate) {
        lp.add_equality(ev.c0, ev.c);
        ev_unit = detail::affine_unit(ev.c0, ev.c);
        if (detail::canonical_orientation(ev_unit) < 0)
            for (double& x : ev_unit) x = -x;
    }
    auto add_weak = [&](const VertexPatchSet& S, const Patch& P) {
        for (std::size_t w = 0; w < S.walls.size(); ++w) {
            if (!ev_unit.empty()) {
                std::vector<double> wu = detail::affine_unit(S.walls[w].c0, S.walls[w].c);
                if (detail::same_direction(wu, ev_unit, 1e-9)) continue; // the equality itself
            }
            lp.add_inequality(S.walls[w].c0, S.walls[w].c, P.wall_signs[w]);
        }
    };
    add_weak(A, p);
    add_weak(B, q);
    auto r = lp.solve();
    if (!r.feasible || r.slack < -opt.eps_feas) return res;
    res.adjacent = true;
    res.slack = r.slack;
    res.point = r.point;
    res.shared.push_back({std::min(A.vertex, B.vertex), std::max(A.vertex, B.vertex)});
    // Additional hyperplanes tight at the common point extend the event tuple.
    auto collect_tight = [&](const VertexPatchSet& S) {
        for (const Constraint& k : S.constraints) {
            if (k.wall < 0) continue;
            if (k.j == A.vertex || k.j == B.vertex) continue;
            double v = k.c0;
            for (int d = 0; d < m; ++d) v += k.c[d] * r.point[d];
            if (std::abs(v) <= 1e-7 * std::max(k.cnorm, 1e-30)) {
                std::array<int, 2> e{std::min(k.i, k.j), std::max(k.i, k.j)};
                if (std::find(res.shared.begin(), res.shared.end(), e) == res.shared.end())
                    res.shared.push_back(e);
            }
        }
    };
    collect_tight(A);
    collect_tight(B);
    std::sort(res.shared.begin() + 1, res.shared.end());
    return res;
}

/// Graph over singular patches; same-type edges realize the connected
/// components that project uncertain critical points into the domain.
struct SingularPatchGraph {
    struct Node {
        int id = -1;
        int vertex = -1;
        int local = -1; // index into the vertex's VertexPatchSet::patches
        CriticalType ctype;
    };
    struct Edge {
        int a = -1, b = -1;
        bool same_type = false;
        std::vector<std::array<int, 2>> shared;
    };
    std::vector<Node> nodes;
    std::vector<Edge> edges;
};

} // namespace uncrit
