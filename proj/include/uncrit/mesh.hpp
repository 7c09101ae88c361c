#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "uncrit/common.hpp"

namespace uncrit {

/// Link of a grid vertex: its ring of neighbors in geometric order.
/// For 2D interior vertices the ring is a cycle (closed == true), for 2D
/// boundary vertices and all 1D vertices it is an open path. Ring order is
/// counterclockwise; cycles are rotated to start at the lowest-index neighbor.
struct Link {
    int center = -1;
    std::vector<int> ring;
    bool closed = false;
};

/// Simplicial grid: a 1D path of segments or a 2D triangulation.
/// Immutable after construction; safe for shared concurrent reads.
struct Grid {
    int dim = 1;
    std::vector<std::array<double, 2>> vertices; // y == 0 in 1D
    std::vector<std::array<int, 2>> segments;    // 1D cells
    std::vector<std::array<int, 3>> triangles;   // 2D cells, CCW
    std::vector<std::vector<int>> neighbors;     // sorted ascending
    std::vector<Link> links;
    std::vector<bool> boundary;
    std::vector<double> dual_area;               // barycentric dual measure
    double total_measure = 0.0;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    double x(int v) const { return vertices[v][0]; }
    double y(int v) const { return vertices[v][1]; }

    const Link& link(int v) const {
        if (v < 0 || v >= vertex_count()) throw config_error("link: vertex index out of range");
        return links[v];
    }
};

/// 1D grid over strictly increasing coordinates. Dual cell of a vertex is the
/// half of each incident segment.
inline Grid build_line_grid(const std::vector<double>& xs) {
    if (xs.size() < 2) throw parse_error("line grid needs at least 2 vertices");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw parse_error("line grid coordinates not strictly increasing at index " +
                              std::to_string(i));
    Grid g;
    g.dim = 1;
    const int n = static_cast<int>(xs.size());
    g.vertices.resize(n);
    for (int i = 0; i < n; ++i) g.vertices[i] = {xs[i], 0.0};
    g.segments.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) g.segments[i] = {i, i + 1};
    g.neighbors.resize(n);
    g.links.resize(n);
    g.boundary.assign(n, false);
    g.boundary[0] = g.boundary[n - 1] = true;
    g.dual_area.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            g.neighbors[i].push_back(i - 1);
            g.dual_area[i] += 0.5 * (xs[i] - xs[i - 1]);
        }
        if (i + 1 < n) {
            g.neighbors[i].push_back(i + 1);
            g.dual_area[i] += 0.5 * (xs[i + 1] - xs[i]);
        }
        g.links[i] = Link{i, g.neighbors[i], false};
    }
    g.total_measure = xs[n - 1] - xs[0];
    return g;
}

namespace detail {

inline double tri_signed_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                              const std::array<double, 2>& c) {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

} // namespace detail

/// 2D triangulation. Triangles are reoriented CCW; each edge may belong to at
/// most two triangles. Dual cells are barycentric (one third of each incident
/// triangle). Links are ordered CCW, cycles starting at the lowest-index
/// neighbor, open paths from their CCW start.
inline Grid build_triangle_grid(std::vector<std::array<double, 2>> points,
                                std::vector<std::array<int, 3>> tris) {
    Grid g;
    g.dim = 2;
    const int n = static_cast<int>(points.size());
    if (n < 3 || tris.empty()) throw parse_error("triangle grid needs >= 3 vertices and >= 1 cell");
    g.vertices = std::move(points);

    double scale = 0.0;
    for (const auto& p : g.vertices) scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
    const double area_eps = 1e-14 * scale * scale + 1e-300;

    for (auto& t : tris) {
        for (int k = 0; k < 3; ++k)
            if (t[k] < 0 || t[k] >= n) throw parse_error("triangle references vertex out of range");
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw parse_error("triangle with repeated vertex indices");
        double a = detail::tri_signed_area(g.vertices[t[0]], g.vertices[t[1]], g.vertices[t[2]]);
        if (std::abs(a) <= area_eps)
            throw parse_error("degenerate (zero-area) triangle (" + std::to_string(t[0]) + "," +
                              std::to_string(t[1]) + "," + std::to_string(t[2]) + ")");
        if (a < 0.0) std::swap(t[1], t[2]);
    }
    g.triangles = std::move(tris);

    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : g.triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            auto key = std::minmax(a, b);
            int& c = edge_count[{key.first, key.second}];
            if (++c > 2)
                throw parse_error("non-manifold edge (" + std::to_string(key.first) + "," +
                                  std::to_string(key.second) + "): more than 2 incident triangles");
        }
    }

    g.neighbors.assign(n, {});
    for (const auto& [e, c] : edge_count) {
        g.neighbors[e.first].push_back(e.second);
        g.neighbors[e.second].push_back(e.first);
    }
    for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());

    g.boundary.assign(n, false);
    for (const auto& [e, c] : edge_count)
        if (c == 1) g.boundary[e.first] = g.boundary[e.second] = true;

    g.dual_area.assign(n, 0.0);
    g.total_measure = 0.0;
    for (const auto& t : g.triangles) {
        double a = detail::tri_signed_area(g.vertices[t[0]], g.vertices[t[1]], g.vertices[t[2]]);
        g.total_measure += a;
        for (int k = 0; k < 3; ++k) g.dual_area[t[k]] += a / 3.0;
    }

    // Link rings: every incident CCW triangle (v,a,b) contributes the directed
    // link edge a->b. Interior vertices walk a single cycle, boundary vertices
    // a single chain; anything else is a non-manifold (pinched) vertex.
    g.links.resize(n);
    std::vector<std::map<int, int>> succ(n);
    std::vector<std::map<int, int>> indeg(n);
    for (const auto& t : g.triangles) {
        for (int k = 0; k < 3; ++k) {
            int v = t[k], a = t[(k + 1) % 3], b = t[(k + 2) % 3];
            if (succ[v].count(a)) throw parse_error("inconsistent triangle fan at vertex " + std::to_string(v));
            succ[v][a] = b;
            indeg[v][b] += 1;
        }
    }
    for (int v = 0; v < n; ++v) {
        Link& lk = g.links[v];
        lk.center = v;
        const auto& nb = g.neighbors[v];
        if (nb.empty()) throw parse_error("isolated vertex " + std::to_string(v));
        if (!g.boundary[v]) {
            if (succ[v].size() != nb.size())
                throw parse_error("non-manifold vertex " + std::to_string(v));
            lk.closed = true;
            int start = nb.front();
            int cur = start;
            do {
                lk.ring.push_back(cur);
                auto it = succ[v].find(cur);
                if (it == succ[v].end()) throw parse_error("broken link cycle at vertex " + std::to_string(v));
                cur = it->second;
            } while (cur != start && lk.ring.size() <= nb.size());
            if (lk.ring.size() != nb.size())
                throw parse_error("non-manifold vertex " + std::to_string(v) + " (split link)");
        } else {
            lk.closed = false;
            int start = -1;
            for (int u : nb)
                if (indeg[v].count(u) == 0 || indeg[v][u] == 0) {
                    if (start != -1) throw parse_error("non-manifold boundary vertex " + std::to_string(v));
                    start = u;
                }
            if (start == -1) throw parse_error("non-manifold boundary vertex " + std::to_string(v));
            int cur = start;
            while (true) {
                lk.ring.push_back(cur);
                auto it = succ[v].find(cur);
                if (it == succ[v].end()) break;
                cur = it->second;
            }
            if (lk.ring.size() != nb.size())
                throw parse_error("non-manifold boundary vertex " + std::to_string(v) + " (split link)");
        }
    }
    return g;
}

/// Dual-cell polygon of a vertex (median dual: edge midpoints and triangle
/// barycenters; boundary cells additionally pass through the vertex itself).
/// Its area equals dual_area[v].
inline std::vector<std::array<double, 2>> dual_cell_polygon(const Grid& g, int v) {
    if (g.dim != 2) throw config_error("dual_cell_polygon: 2D grids only");
    const Link& lk = g.links[v];
    auto mid = [&](int a, int b) -> std::array<double, 2> {
        return {0.5 * (g.vertices[a][0] + g.vertices[b][0]),
                0.5 * (g.vertices[a][1] + g.vertices[b][1])};
    };
    auto bary = [&](int a, int b, int c) -> std::array<double, 2> {
        return {(g.vertices[a][0] + g.vertices[b][0] + g.vertices[c][0]) / 3.0,
                (g.vertices[a][1] + g.vertices[b][1] + g.vertices[c][1]) / 3.0};
    };
    std::vector<std::array<double, 2>> poly;
    const std::size_t r = lk.ring.size();
    if (!lk.closed) poly.push_back(g.vertices[v]);
    for (std::size_t i = 0; i < r; ++i) {
        poly.push_back(mid(v, lk.ring[i]));
        const std::size_t j = (i + 1) % r;
        if (i + 1 < r || lk.closed) poly.push_back(bary(v, lk.ring[i], lk.ring[j]));
    }
    return poly;
}

/// 1D dual cell as an interval.
inline std::array<double, 2> dual_cell_interval(const Grid& g, int v) {
    if (g.dim != 1) throw config_error("dual_cell_interval: 1D grids only");
    const int n = g.vertex_count();
    double lo = v > 0 ? 0.5 * (g.x(v - 1) + g.x(v)) : g.x(0);
    double hi = v + 1 < n ? 0.5 * (g.x(v) + g.x(v + 1)) : g.x(n - 1);
    return {lo, hi};
}

} // namespace uncrit
