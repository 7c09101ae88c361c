#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "uncrit/patches.hpp"

namespace uncrit {

/// A maximally connected component of same-type singular patches: the
/// discrete uncertain critical point. Connector tuples are the domain
/// projections of the polytopes linking patches at neighboring vertices.
struct UncertainCriticalPoint {
    int id = -1; // lowest member patch id
    CriticalTag type = CriticalTag::Regular;
    int multiplicity_max = 1;
    std::vector<int> patch_ids;
    std::vector<int> vertices; // sorted unique
    std::vector<std::vector<int>> connectors;
};

struct ExtractOptions {
    bool include_boundary = false;
    PatchOptions patch;
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<int> parent_;
};

} // namespace detail

/// Connected components of the subgraph induced by same-type edges over the
/// singular nodes. Components are disjoint, exhaustive, and ordered by id.
inline std::vector<UncertainCriticalPoint> uncertain_critical_points(const SingularPatchGraph& graph) {
    const int n = static_cast<int>(graph.nodes.size());
    detail::UnionFind uf(n);
    for (const auto& e : graph.edges)
        if (e.same_type) uf.unite(e.a, e.b);

    std::vector<int> root_to_out(n, -1);
    std::vector<UncertainCriticalPoint> out;
    for (int i = 0; i < n; ++i) {
        const int r = uf.find(i);
        if (root_to_out[r] < 0) {
            root_to_out[r] = static_cast<int>(out.size());
            out.emplace_back();
            out.back().id = i; // nodes scanned in id order, so root == min id
            out.back().type = graph.nodes[i].ctype.tag;
        }
        UncertainCriticalPoint& c = out[root_to_out[r]];
        c.patch_ids.push_back(i);
        c.vertices.push_back(graph.nodes[i].vertex);
        c.multiplicity_max = std::max(c.multiplicity_max, graph.nodes[i].ctype.multiplicity);
    }
    for (auto& c : out) {
        std::sort(c.vertices.begin(), c.vertices.end());
        c.vertices.erase(std::unique(c.vertices.begin(), c.vertices.end()), c.vertices.end());
    }
    for (const auto& e : graph.edges) {
        if (!e.same_type) continue;
        if (graph.nodes[e.a].vertex == graph.nodes[e.b].vertex) continue;
        UncertainCriticalPoint& c = out[root_to_out[uf.find(e.a)]];
        std::vector<int> tuple;
        for (const auto& pr : e.shared) {
            tuple.push_back(pr[0]);
            tuple.push_back(pr[1]);
        }
        std::sort(tuple.begin(), tuple.end());
        tuple.erase(std::unique(tuple.begin(), tuple.end()), tuple.end());
        if (std::find(c.connectors.begin(), c.connectors.end(), tuple) == c.connectors.end())
            c.connectors.push_back(tuple);
    }
    std::sort(out.begin(), out.end(),
              [](const UncertainCriticalPoint& a, const UncertainCriticalPoint& b) { return a.id < b.id; });
    return out;
}

/// Spatial support: union of member dual cells plus connector hulls.
/// 1D supports merge into maximal intervals; 2D supports stay a polygon
/// collection (dual cells) with connector hulls listed separately.
struct SupportRegion {
    std::vector<std::array<double, 2>> intervals;
    std::vector<std::vector<std::array<double, 2>>> polygons;
    std::vector<std::vector<std::array<double, 2>>> connector_hulls;
};

namespace detail {

inline std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

inline std::vector<std::array<double, 2>> merge_intervals(std::vector<std::array<double, 2>> iv) {
    std::sort(iv.begin(), iv.end());
    std::vector<std::array<double, 2>> out;
    for (const auto& i : iv) {
        if (!out.empty() && i[0] <= out.back()[1] + 1e-12) {
            out.back()[1] = std::max(out.back()[1], i[1]);
        } else {
            out.push_back(i);
        }
    }
    return out;
}

} // namespace detail

inline SupportRegion spatial_support(const UncertainCriticalPoint& ucp, const Grid& grid) {
    SupportRegion s;
    if (grid.dim == 1) {
        std::vector<std::array<double, 2>> iv;
        for (int v : ucp.vertices) iv.push_back(dual_cell_interval(grid, v));
        for (const auto& t : ucp.connectors) {
            double lo = grid.x(t.front()), hi = lo;
            for (int v : t) {
                lo = std::min(lo, grid.x(v));
                hi = std::max(hi, grid.x(v));
            }
            iv.push_back({lo, hi});
        }
        s.intervals = detail::merge_intervals(std::move(iv));
    } else {
        for (int v : ucp.vertices) s.polygons.push_back(dual_cell_polygon(grid, v));
        for (const auto& t : ucp.connectors) {
            std::vector<std::array<double, 2>> pts;
            for (int v : t) pts.push_back(grid.vertices[v]);
            s.connector_hulls.push_back(detail::convex_hull(std::move(pts)));
        }
    }
    return s;
}

/// The full discrete pipeline bundle: per-vertex arrangements, the singular
/// patch graph, its same-type components, and the sample-to-component lookup.
struct Extraction {
    Grid grid;
    LinearFamily family;
    ExtractOptions options;
    std::vector<VertexPatchSet> cells; // per vertex; suppressed vertices stay empty
    SingularPatchGraph graph;
    std::vector<UncertainCriticalPoint> components;
    std::vector<int> component_of; // patch id -> component index
    std::vector<std::string> warnings;

    static Extraction run(Grid grid, LinearFamily family, ExtractOptions options = {}) {
        family.validate();
        if (family.vertex_count() != grid.vertex_count())
            throw config_error("family field length does not match grid vertex count");
        Extraction ex;
        ex.grid = std::move(grid);
        ex.family = std::move(family);
        ex.options = options;
        const int n = ex.grid.vertex_count();
        const int m = ex.family.mode_count();
        if (m > options.patch.soft_max_m)
            ex.warnings.push_back("parameter dimension m = " + std::to_string(m) +
                                  " exceeds the supported soft cap " +
                                  std::to_string(options.patch.soft_max_m) +
                                  "; cell counts grow like O(k^m) per vertex");

        ex.cells.resize(n);
        for (int v = 0; v < n; ++v) {
            if (ex.grid.boundary[v] && !options.include_boundary) continue;
            try {
                ex.cells[v] = enumerate_patches(ex.family, ex.grid, v, options.patch);
            } catch (const numeric_error& e) {
                throw numeric_error("patch enumeration failed at vertex " + std::to_string(v) +
                                    ": " + e.what());
            }
        }

        // Singular nodes in (vertex, lexicographic sign vector) order.
        for (int v = 0; v < n; ++v) {
            auto& set = ex.cells[v];
            if (set.vertex < 0) continue;
            for (std::size_t p = 0; p < set.patches.size(); ++p) {
                if (!set.patches[p].ctype.is_singular()) continue;
                SingularPatchGraph::Node node;
                node.id = static_cast<int>(ex.graph.nodes.size());
                node.vertex = v;
                node.local = static_cast<int>(p);
                node.ctype = set.patches[p].ctype;
                set.patches[p].id = node.id;
                ex.graph.nodes.push_back(node);
            }
        }

        auto singular_locals = [&](int v) {
            std::vector<int> out;
            if (ex.cells[v].vertex < 0) return out;
            for (std::size_t p = 0; p < ex.cells[v].patches.size(); ++p)
                if (ex.cells[v].patches[p].ctype.is_singular()) out.push_back(static_cast<int>(p));
            return out;
        };

        for (int v = 0; v < n; ++v) {
            if (ex.cells[v].vertex < 0) continue;
            const auto locals = singular_locals(v);
            // Same-vertex pairs.
            for (std::size_t i = 0; i < locals.size(); ++i) {
                for (std::size_t j = i + 1; j < locals.size(); ++j) {
                    const Patch& p = ex.cells[v].patches[locals[i]];
                    const Patch& q = ex.cells[v].patches[locals[j]];
                    auto adj = is_adjacent(ex.cells[v], p, ex.cells[v], q, ex.grid, options.patch);
                    if (adj.adjacent)
                        ex.graph.edges.push_back({p.id, q.id, p.ctype.tag == q.ctype.tag,
                                                  std::move(adj.shared)});
                }
            }
            // Neighboring-vertex pairs (each unordered pair once).
            for (int w : ex.grid.neighbors[v]) {
                if (w <= v || ex.cells[w].vertex < 0) continue;
                const auto wl = singular_locals(w);
                for (int li : locals) {
                    for (int lj : wl) {
                        const Patch& p = ex.cells[v].patches[li];
                        const Patch& q = ex.cells[w].patches[lj];
                        try {
                            auto adj =
                                is_adjacent(ex.cells[v], p, ex.cells[w], q, ex.grid, options.patch);
                            if (adj.adjacent)
                                ex.graph.edges.push_back({p.id, q.id, p.ctype.tag == q.ctype.tag,
                                                          std::move(adj.shared)});
                        } catch (const numeric_error& e) {
                            throw numeric_error("adjacency test failed for patches " +
                                                std::to_string(p.id) + " (vertex " +
                                                std::to_string(v) + ") and " + std::to_string(q.id) +
                                                " (vertex " + std::to_string(w) + "): " + e.what());
                        }
                    }
                }
            }
        }
        std::sort(ex.graph.edges.begin(), ex.graph.edges.end(),
                  [](const SingularPatchGraph::Edge& a, const SingularPatchGraph::Edge& b) {
                      return std::tie(a.a, a.b) < std::tie(b.a, b.b);
                  });

        ex.components = uncertain_critical_points(ex.graph);
        ex.component_of.assign(ex.graph.nodes.size(), -1);
        for (std::size_t c = 0; c < ex.components.size(); ++c)
            for (int pid : ex.components[c].patch_ids) ex.component_of[pid] = static_cast<int>(c);
        return ex;
    }

    /// Component index whose singular patch contains a at vertex v, or -1.
    int locate(int v, std::span<const double> a) const {
        const VertexPatchSet& set = cells[v];
        if (set.vertex < 0) return -1;
        const Patch& p = set.patches[set.match(a)];
        if (p.id < 0) return -1;
        return component_of[p.id];
    }

    int component_index_by_id(int id) const {
        for (std::size_t c = 0; c < components.size(); ++c)
            if (components[c].id == id) return static_cast<int>(c);
        return -1;
    }

    const Patch& patch_by_id(int id) const {
        const auto& node = graph.nodes.at(id);
        return cells[node.vertex].patches[node.local];
    }
};

} // namespace uncrit
