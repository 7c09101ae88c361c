#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uncrit/extract.hpp"

namespace uncrit {

struct ProbabilityEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::string note;
};

/// Spatial query region. Vertex membership is by coordinate: intervals are
/// half-open [lo, hi), polygons use a half-open crossing test, so tiling
/// regions partition the vertices with no double counting.
struct Region {
    enum class Kind { All, Vertices, Intervals, Polygon };
    Kind kind = Kind::All;
    std::string name;
    std::vector<int> vertices;                  // sorted
    std::vector<std::array<double, 2>> intervals;
    std::vector<std::array<double, 2>> polygon;

    static Region all() { return {}; }
    static Region from_vertices(std::vector<int> vs, std::string name = {}) {
        Region r;
        r.kind = Kind::Vertices;
        r.vertices = std::move(vs);
        std::sort(r.vertices.begin(), r.vertices.end());
        r.name = std::move(name);
        return r;
    }
    static Region from_interval(double lo, double hi, std::string name = {}) {
        Region r;
        r.kind = Kind::Intervals;
        r.intervals.push_back({lo, hi});
        r.name = std::move(name);
        return r;
    }
    static Region from_polygon(std::vector<std::array<double, 2>> poly, std::string name = {}) {
        Region r;
        r.kind = Kind::Polygon;
        r.polygon = std::move(poly);
        r.name = std::move(name);
        return r;
    }

    bool contains(const Grid& grid, int v) const {
        switch (kind) {
            case Kind::All: return true;
            case Kind::Vertices: return std::binary_search(vertices.begin(), vertices.end(), v);
            case Kind::Intervals: {
                const double x = grid.x(v);
                for (const auto& iv : intervals)
                    if (x >= iv[0] && x < iv[1]) return true;
                return false;
            }
            case Kind::Polygon: {
                const double px = grid.x(v), py = grid.y(v);
                bool in = false;
                const std::size_t n = polygon.size();
                for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                    const auto& pi = polygon[i];
                    const auto& pj = polygon[j];
                    if (((pi[1] > py) != (pj[1] > py)) &&
                        (px < (pj[0] - pi[0]) * (py - pi[1]) / (pj[1] - pi[1]) + pi[0]))
                        in = !in;
                }
                return in;
            }
        }
        return false;
    }
};

namespace detail {

/// (vertex, singular locals of one component) pairs restricted to a region.
struct MemberIndex {
    std::vector<int> vertices;
    std::vector<std::vector<int>> locals;

    static MemberIndex build(const Extraction& ex, int ucp_index, const Region& region) {
        MemberIndex mi;
        const auto& ucp = ex.components.at(ucp_index);
        for (int v : ucp.vertices) {
            if (!region.contains(ex.grid, v)) continue;
            std::vector<int> loc;
            for (int pid : ucp.patch_ids) {
                const auto& node = ex.graph.nodes[pid];
                if (node.vertex == v) loc.push_back(node.local);
            }
            if (!loc.empty()) {
                mi.vertices.push_back(v);
                mi.locals.push_back(std::move(loc));
            }
        }
        return mi;
    }

    bool hit(const Extraction& ex, std::span<const double> a) const {
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const int local = ex.cells[vertices[i]].match(a);
            for (int l : locals[i])
                if (l == local) return true;
        }
        return false;
    }
};

inline ProbabilityEstimate estimate_from_count(std::int64_t hits, const SampleBatch& batch) {
    ProbabilityEstimate e;
    e.samples = batch.size();
    e.seed = batch.seed();
    e.value = static_cast<double>(hits) / static_cast<double>(batch.size());
    e.stderr_ = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(batch.size()));
    if (batch.size() < 100) e.note = "warning: fewer than 100 samples";
    return e;
}

} // namespace detail

/// P(component has a manifestation in D), estimated over the shared sample
/// stream. Manifestations on connectors carry no parameter measure and are
/// ignored.
inline ProbabilityEstimate region_probability(const Extraction& ex, int ucp_index,
                                              const Region& region, const SampleBatch& batch) {
    auto mi = detail::MemberIndex::build(ex, ucp_index, region);
    if (mi.vertices.empty()) {
        auto e = detail::estimate_from_count(0, batch);
        e.note = "empty region: no member vertices inside";
        return e;
    }
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < batch.size(); ++i)
        if (mi.hit(ex, batch.sample(i))) ++hits;
    return detail::estimate_from_count(hits, batch);
}

struct JointResult {
    ProbabilityEstimate joint;  // manifestation in D1 and in D2
    ProbabilityEstimate first;  // in D1
    ProbabilityEstimate second; // in D2
    ProbabilityEstimate either; // in D1 union D2
    /// p(D1) + p(D2) - p(D1 u D2) - p(D1 ^ D2); identically 0 on a shared stream.
    double inclusion_exclusion_residual = 0.0;
};

inline JointResult joint_probability(const Extraction& ex, int ucp_index, const Region& d1,
                                     const Region& d2, const SampleBatch& batch) {
    auto m1 = detail::MemberIndex::build(ex, ucp_index, d1);
    auto m2 = detail::MemberIndex::build(ex, ucp_index, d2);
    std::int64_t h1 = 0, h2 = 0, hj = 0, hu = 0;
    for (std::int64_t i = 0; i < batch.size(); ++i) {
        const auto a = batch.sample(i);
        const bool in1 = m1.hit(ex, a);
        const bool in2 = m2.hit(ex, a);
        h1 += in1;
        h2 += in2;
        hj += in1 && in2;
        hu += in1 || in2;
    }
    JointResult r;
    r.joint = detail::estimate_from_count(hj, batch);
    r.first = detail::estimate_from_count(h1, batch);
    r.second = detail::estimate_from_count(h2, batch);
    r.either = detail::estimate_from_count(hu, batch);
    r.inclusion_exclusion_residual =
        r.first.value + r.second.value - r.either.value - r.joint.value;
    return r;
}

/// Fraction of samples whose tie-broken sign vector at the patch's vertex is
/// exactly this patch.
inline ProbabilityEstimate patch_probability(const VertexPatchSet& set, int local,
                                             const SampleBatch& batch) {
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < batch.size(); ++i)
        if (set.match(batch.sample(i)) == local) ++hits;
    return detail::estimate_from_count(hits, batch);
}

inline ProbabilityEstimate patch_probability(const Extraction& ex, int patch_id,
                                             const SampleBatch& batch) {
    const auto& node = ex.graph.nodes.at(patch_id);
    return patch_probability(ex.cells[node.vertex], node.local, batch);
}

/// Per-vertex spatial density of one component: vertex probability divided by
/// the dual-cell measure. The support-cell intersection is approximated by the
/// full dual cell (recorded in `normalization`).
struct DensityField {
    int ucp_index = -1;
    std::vector<double> density;            // per grid vertex; 0 off the component
    std::vector<double> vertex_probability; // same layout
    std::string normalization = "dual-cell";
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
};

inline DensityField density_field(const Extraction& ex, int ucp_index, const SampleBatch& batch) {
    auto mi = detail::MemberIndex::build(ex, ucp_index, Region::all());
    DensityField f;
    f.ucp_index = ucp_index;
    f.samples = batch.size();
    f.seed = batch.seed();
    f.density.assign(ex.grid.vertex_count(), 0.0);
    f.vertex_probability.assign(ex.grid.vertex_count(), 0.0);
    std::vector<std::int64_t> hits(mi.vertices.size(), 0);
    for (std::int64_t i = 0; i < batch.size(); ++i) {
        const auto a = batch.sample(i);
        for (std::size_t k = 0; k < mi.vertices.size(); ++k) {
            const int local = ex.cells[mi.vertices[k]].match(a);
            for (int l : mi.locals[k])
                if (l == local) {
                    ++hits[k];
                    break;
                }
        }
    }
    for (std::size_t k = 0; k < mi.vertices.size(); ++k) {
        const int v = mi.vertices[k];
        f.vertex_probability[v] = static_cast<double>(hits[k]) / static_cast<double>(batch.size());
        f.density[v] = f.vertex_probability[v] / ex.grid.dual_area[v];
    }
    return f;
}

/// How often a component manifests at several distinct vertices of the same
/// realization (the phenomenon that makes P(C in .) non-additive).
struct ManifestationStats {
    double fraction_multi = 0.0; // samples with >= 2 distinct manifestation vertices
    double mean_manifestations = 0.0;
    int max_manifestations = 0;
    std::int64_t samples = 0;
};

inline ManifestationStats manifestation_stats(const Extraction& ex, int ucp_index,
                                              const SampleBatch& batch) {
    auto mi = detail::MemberIndex::build(ex, ucp_index, Region::all());
    ManifestationStats st;
    st.samples = batch.size();
    std::int64_t multi = 0, total = 0;
    for (std::int64_t i = 0; i < batch.size(); ++i) {
        const auto a = batch.sample(i);
        int count = 0;
        for (std::size_t k = 0; k < mi.vertices.size(); ++k) {
            const int local = ex.cells[mi.vertices[k]].match(a);
            for (int l : mi.locals[k])
                if (l == local) {
                    ++count;
                    break;
                }
        }
        multi += count >= 2;
        total += count;
        st.max_manifestations = std::max(st.max_manifestations, count);
    }
    st.fraction_multi = static_cast<double>(multi) / static_cast<double>(batch.size());
    st.mean_manifestations = static_cast<double>(total) / static_cast<double>(batch.size());
    return st;
}

} // namespace uncrit
