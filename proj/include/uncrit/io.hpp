#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "uncrit/analytic.hpp"
#include "uncrit/extract.hpp"
#include "uncrit/prob.hpp"

namespace uncrit {

using json = nlohmann::json;

/// Serialize with sorted keys and fixed float formatting (17 significant
/// digits via %.17g) so outputs are byte-identical across runs and platforms.
inline void dump_deterministic(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) { // nlohmann objects iterate sorted
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_deterministic(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_deterministic(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) throw numeric_error("refusing to serialize a non-finite number");
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            break;
        }
        default:
            out += j.dump();
    }
}

inline std::string dump_deterministic(const json& j) {
    std::string out;
    dump_deterministic(j, out);
    out += '\n';
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open '" + path.string() + "' for writing");
    os << data;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw parse_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline json parse_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw parse_error("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Grid: {"dim": d, "vertices": [[x(,y)]...], "cells": [[i,j(,k)]...]}
// Neighbor lists and dual cells are derived, never serialized.

inline json grid_to_json(const Grid& g) {
    json j;
    j["dim"] = g.dim;
    json verts = json::array();
    for (const auto& p : g.vertices) {
        if (g.dim == 1)
            verts.push_back(json::array({p[0]}));
        else
            verts.push_back(json::array({p[0], p[1]}));
    }
    j["vertices"] = std::move(verts);
    json cells = json::array();
    if (g.dim == 1)
        for (const auto& s : g.segments) cells.push_back(json::array({s[0], s[1]}));
    else
        for (const auto& t : g.triangles) cells.push_back(json::array({t[0], t[1], t[2]}));
    j["cells"] = std::move(cells);
    return j;
}

inline Grid grid_from_json(const json& j) {
    try {
        const int dim = j.at("dim").get<int>();
        if (dim == 1) {
            std::vector<double> xs;
            for (const auto& v : j.at("vertices")) xs.push_back(v.at(0).get<double>());
            return build_line_grid(xs);
        }
        if (dim == 2) {
            std::vector<std::array<double, 2>> pts;
            for (const auto& v : j.at("vertices"))
                pts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
            std::vector<std::array<int, 3>> tris;
            for (const auto& c : j.at("cells"))
                tris.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>()});
            return build_triangle_grid(std::move(pts), std::move(tris));
        }
        throw parse_error("grid dim must be 1 or 2");
    } catch (const json::exception& e) {
        throw parse_error(std::string("grid JSON malformed: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Family: {"m": int, "g0": [...], "modes": [[...]...]}

inline json family_to_json(const LinearFamily& f) {
    json j;
    j["m"] = f.mode_count();
    j["g0"] = f.g[0];
    json modes = json::array();
    for (int i = 1; i <= f.mode_count(); ++i) modes.push_back(f.g[i]);
    j["modes"] = std::move(modes);
    return j;
}

inline LinearFamily family_from_json(const json& j) {
    try {
        LinearFamily f;
        const int m = j.at("m").get<int>();
        f.g.push_back(j.at("g0").get<std::vector<double>>());
        for (const auto& mode : j.at("modes")) f.g.push_back(mode.get<std::vector<double>>());
        if (f.mode_count() != m) throw parse_error("family JSON: m does not match the mode count");
        f.validate();
        return f;
    } catch (const json::exception& e) {
        throw parse_error(std::string("family JSON malformed: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Ensemble: CSV (one member per row) or raw little-endian float64 behind a
// JSON header {"rows": r, "cols": n, "data": "relative/path.bin"}.

inline std::vector<std::vector<double>> ensemble_from_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw parse_error("cannot open ensemble CSV '" + path.string() + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                throw parse_error("ensemble CSV: non-numeric cell '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw parse_error("ensemble CSV: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error("ensemble CSV is empty");
    return rows;
}

inline std::vector<std::vector<double>> ensemble_from_raw(const std::filesystem::path& header_path) {
    const json h = parse_json_file(header_path);
    std::int64_t r, n;
    std::string data;
    try {
        r = h.at("rows").get<std::int64_t>();
        n = h.at("cols").get<std::int64_t>();
        data = h.at("data").get<std::string>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("ensemble raw header malformed: ") + e.what());
    }
    const auto bin_path = header_path.parent_path() / data;
    std::string bytes = read_file(bin_path);
    if (static_cast<std::int64_t>(bytes.size()) != r * n * 8)
        throw parse_error("ensemble raw file size does not match rows*cols*8");
    std::vector<std::vector<double>> rows(r, std::vector<double>(n));
    const char* p = bytes.data();
    for (std::int64_t i = 0; i < r; ++i)
        for (std::int64_t j = 0; j < n; ++j) {
            double v;
            std::memcpy(&v, p + (i * n + j) * 8, 8);
            rows[i][j] = v;
        }
    return rows;
}

inline std::vector<std::vector<double>> load_ensemble(const std::filesystem::path& path) {
    if (path.extension() == ".json") return ensemble_from_raw(path);
    return ensemble_from_csv(path);
}

// ---------------------------------------------------------------------------
// Regions: [{"name": .., "interval": [lo,hi]} | {"intervals": [[lo,hi]..]} |
//           {"polygon": [[x,y]..]} | {"vertices": [..]}]

inline Region region_from_json(const json& j) {
    Region r;
    try {
        if (j.contains("name")) r.name = j.at("name").get<std::string>();
        if (j.contains("interval")) {
            r.kind = Region::Kind::Intervals;
            r.intervals.push_back({j.at("interval").at(0).get<double>(),
                                   j.at("interval").at(1).get<double>()});
        } else if (j.contains("intervals")) {
            r.kind = Region::Kind::Intervals;
            for (const auto& iv : j.at("intervals"))
                r.intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
        } else if (j.contains("polygon")) {
            r.kind = Region::Kind::Polygon;
            for (const auto& p : j.at("polygon"))
                r.polygon.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        } else if (j.contains("vertices")) {
            r.kind = Region::Kind::Vertices;
            r.vertices = j.at("vertices").get<std::vector<int>>();
            std::sort(r.vertices.begin(), r.vertices.end());
        } else if (j.contains("all")) {
            r.kind = Region::Kind::All;
        } else {
            throw parse_error("region needs one of: interval, intervals, polygon, vertices, all");
        }
    } catch (const json::exception& e) {
        throw parse_error(std::string("region JSON malformed: ") + e.what());
    }
    return r;
}

// ---------------------------------------------------------------------------
// Pipeline exports.

inline json patch_graph_to_json(const Extraction& ex) {
    json nodes = json::array();
    for (const auto& node : ex.graph.nodes) {
        const Patch& p = ex.cells[node.vertex].patches[node.local];
        json jn;
        jn["id"] = node.id;
        jn["vertex"] = node.vertex;
        jn["type"] = to_string(node.ctype.tag);
        jn["multiplicity"] = node.ctype.multiplicity;
        json sv = json::array();
        for (auto s : p.sign_vector.signs) sv.push_back(static_cast<int>(s));
        jn["sign_vector"] = std::move(sv);
        jn["witness"] = p.witness;
        nodes.push_back(std::move(jn));
    }
    json edges = json::array();
    for (const auto& e : ex.graph.edges) {
        json je;
        je["a"] = e.a;
        je["b"] = e.b;
        je["same_type"] = e.same_type;
        json sh = json::array();
        for (const auto& pr : e.shared) sh.push_back(json::array({pr[0], pr[1]}));
        je["shared_constraints"] = std::move(sh);
        edges.push_back(std::move(je));
    }
    json j;
    j["nodes"] = std::move(nodes);
    j["edges"] = std::move(edges);
    return j;
}

inline json components_to_json(const Extraction& ex) {
    json ucps = json::array();
    for (const auto& c : ex.components) {
        json jc;
        jc["id"] = c.id;
        jc["type"] = to_string(c.type);
        jc["multiplicity_max"] = c.multiplicity_max;
        jc["patches"] = c.patch_ids;
        jc["vertices"] = c.vertices;
        json conns = json::array();
        for (const auto& t : c.connectors) conns.push_back(t);
        jc["connectors"] = std::move(conns);
        const SupportRegion s = spatial_support(c, ex.grid);
        json sup;
        if (ex.grid.dim == 1) {
            json iv = json::array();
            for (const auto& i : s.intervals) iv.push_back(json::array({i[0], i[1]}));
            sup["intervals"] = std::move(iv);
        } else {
            json polys = json::array();
            for (const auto& poly : s.polygons) {
                json jp = json::array();
                for (const auto& pt : poly) jp.push_back(json::array({pt[0], pt[1]}));
                polys.push_back(std::move(jp));
            }
            sup["polygons"] = std::move(polys);
        }
        jc["support"] = std::move(sup);
        ucps.push_back(std::move(jc));
    }
    json j;
    j["ucps"] = std::move(ucps);
    j["warnings"] = ex.warnings;
    return j;
}

inline json branches_to_json(const BranchDecomposition& d, const ParameterDistribution& dist) {
    json arr = json::array();
    for (const auto& b : d.branches) {
        json jb;
        jb["interval"] = json::array({b.lo, b.hi});
        jb["type"] = to_string(b.ctype);
        jb["lo_kind"] = to_string(b.lo_kind);
        jb["hi_kind"] = to_string(b.hi_kind);
        jb["probability"] = branch_probability(b, dist);
        arr.push_back(std::move(jb));
    }
    json j;
    j["branches"] = std::move(arr);
    j["poles"] = d.poles;
    j["degenerate_points"] = d.degenerate_points;
    j["degenerate_curve"] = d.degenerate_curve;
    j["warnings"] = d.warnings;
    return j;
}

inline std::string density_to_csv(const Grid& grid, const DensityField& f) {
    std::string out = grid.dim == 1 ? "vertex,x,density\n" : "vertex,x,y,density\n";
    for (int v = 0; v < grid.vertex_count(); ++v) {
        if (f.density[v] == 0.0) continue;
        out += std::to_string(v);
        out += ',';
        out += format_double(grid.x(v));
        if (grid.dim == 2) {
            out += ',';
            out += format_double(grid.y(v));
        }
        out += ',';
        out += format_double(f.density[v]);
        out += '\n';
    }
    return out;
}

/// Curve samples (x, a(x), density) per branch for plotting.
inline std::string branch_curve_csv(const BranchDecomposition& d, const ParameterDistribution& dist,
                                    int samples_per_branch = 128) {
    std::string out = "branch,x,a,density\n";
    for (std::size_t b = 0; b < d.branches.size(); ++b) {
        const auto& br = d.branches[b];
        for (int k = 1; k < samples_per_branch; ++k) {
            const double x = br.lo + (br.hi - br.lo) * k / samples_per_branch;
            out += std::to_string(b);
            out += ',';
            out += format_double(x);
            out += ',';
            out += format_double(br.a(x));
            out += ',';
            out += format_double(branch_density(br, dist, x));
            out += '\n';
        }
    }
    return out;
}

/// Sorted per-mode coefficients against standard-normal quantiles.
inline std::string qq_csv(const EofResult& eof) {
    std::string out = "mode,index,coefficient,normal_quantile\n";
    for (std::size_t mth = 0; mth < eof.coefficients.size(); ++mth) {
        std::vector<double> sorted = eof.coefficients[mth];
        std::sort(sorted.begin(), sorted.end());
        const std::size_t r = sorted.size();
        for (std::size_t i = 0; i < r; ++i) {
            out += std::to_string(mth);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += format_double(sorted[i]);
            out += ',';
            out += format_double(normal_quantile((i + 0.5) / static_cast<double>(r)));
            out += '\n';
        }
    }
    return out;
}

} // namespace uncrit
