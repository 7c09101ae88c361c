#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "uncrit/analytic.hpp"
#include "uncrit/extract.hpp"
#include "uncrit/prob.hpp"

namespace uncrit {

namespace svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

/// Diverging white->red (maxima) and white->blue (minima) fills, t in [0,1].
inline std::string colormap(CriticalTag tag, double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int fade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    char buf[10];
    if (tag == CriticalTag::Maximum)
        std::snprintf(buf, sizeof buf, "#ff%02x%02x", fade, fade);
    else if (tag == CriticalTag::Minimum)
        std::snprintf(buf, sizeof buf, "#%02x%02xff", fade, fade);
    else
        std::snprintf(buf, sizeof buf, "#%02xff%02x", fade, fade);
    return buf;
}

/// Minimal SVG writer; every draw call appends one element.
class Document {
public:
    Document(double width, double height) : w_(width), h_(height) {}

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, const std::string& extra = {}) {
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                 "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 num(width) + "\"" + (extra.empty() ? "" : " " + extra) + " />\n";
    }

    void polyline(const std::vector<std::array<double, 2>>& pts, const std::string& stroke,
                  double width = 1.0, const std::string& extra = {}) {
        body_ += "<polyline points=\"";
        for (const auto& p : pts) body_ += num(p[0]) + "," + num(p[1]) + " ";
        body_ += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"" +
                 (extra.empty() ? "" : " " + extra) + " />\n";
    }

    void polygon(const std::vector<std::array<double, 2>>& pts, const std::string& fill,
                 const std::string& stroke = "none", double width = 0.5,
                 const std::string& extra = {}) {
        body_ += "<polygon points=\"";
        for (const auto& p : pts) body_ += num(p[0]) + "," + num(p[1]) + " ";
        body_ += "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) +
                 "\"" + (extra.empty() ? "" : " " + extra) + " />\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                 "\" height=\"" + num(h) + "\" fill=\"" + fill + "\" />\n";
    }

    void text(double x, double y, const std::string& s, double size = 10.0) {
        body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
                 "\" font-family=\"sans-serif\">" + s + "</text>\n";
    }

    void append_raw(const std::string& markup) { body_ += markup; }

    std::string str() const {
        return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
               "width=\"" + num(w_) + "\" height=\"" + num(h_) + "\" viewBox=\"0 0 " + num(w_) + " " +
               num(h_) + "\">\n" + body_ + "</svg>\n";
    }

private:
    double w_, h_;
    std::string body_;
};

struct Frame {
    double x0, x1, y0, y1;   // data ranges
    double px0, px1, py0, py1; // pixel ranges (py0 is the TOP)
    double X(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
    double Y(double y) const { return py1 - (y - y0) / (y1 - y0) * (py1 - py0); }
};

} // namespace svg

/// Analytic 1D plot: the critical-point curve a(x), drawn per branch with
/// segment colors encoding the spatial density, poles as black and degenerate
/// points as gray vertical lines, plus a density-projection panel underneath.
inline std::string render_branches_svg(const BranchDecomposition& dec,
                                       const ParameterDistribution& dist, double x_lo, double x_hi,
                                       double a_clip = 4.0) {
    svg::Document doc(800, 540);
    svg::Frame top{x_lo, x_hi, -a_clip, a_clip, 50, 780, 20, 360};
    svg::Frame bot{x_lo, x_hi, 0.0, 1.0, 50, 780, 400, 520};

    double dmax = 1e-12;
    const int K = 256;
    std::vector<std::vector<double>> dens(dec.branches.size(), std::vector<double>(K + 1, 0.0));
    for (std::size_t b = 0; b < dec.branches.size(); ++b) {
        const auto& br = dec.branches[b];
        for (int k = 0; k <= K; ++k) {
            const double pad = 1e-7 * (br.hi - br.lo);
            const double x = std::min(br.hi - pad, std::max(br.lo + pad, br.lo + (br.hi - br.lo) * k / K));
            dens[b][k] = branch_density(br, dist, x);
            dmax = std::max(dmax, dens[b][k]);
        }
    }
    bot.y1 = dmax * 1.05;

    // frame + axis
    doc.rect(top.px0, top.py0, top.px1 - top.px0, top.py1 - top.py0, "#fbfbfb");
    doc.rect(bot.px0, bot.py0, bot.px1 - bot.px0, bot.py1 - bot.py0, "#fbfbfb");
    doc.line(top.px0, top.Y(0), top.px1, top.Y(0), "#cccccc", 1.0);
    for (double p : dec.poles)
        doc.line(top.X(p), top.py0, top.X(p), top.py1, "#000000", 1.2, "class=\"pole\"");
    for (double d : dec.degenerate_points)
        doc.line(top.X(d), top.py0, top.X(d), top.py1, "#999999", 1.0, "class=\"degenerate\"");

    for (std::size_t b = 0; b < dec.branches.size(); ++b) {
        const auto& br = dec.branches[b];
        std::string group =
            "<g class=\"branch branch-" + std::string(to_string(br.ctype)) + "\">\n";
        for (int k = 0; k < K; ++k) {
            const double xa = br.lo + (br.hi - br.lo) * k / K;
            const double xb = br.lo + (br.hi - br.lo) * (k + 1.0) / K;
            const double ya = std::clamp(br.a(std::max(xa, br.lo + 1e-9)), -a_clip, a_clip);
            const double yb = std::clamp(br.a(std::min(xb, br.hi - 1e-9)), -a_clip, a_clip);
            if (std::abs(ya) >= a_clip && std::abs(yb) >= a_clip) continue;
            const double t = 0.15 + 0.85 * (0.5 * (dens[b][k] + dens[b][k + 1]) / dmax);
            group += "<line x1=\"" + svg::num(top.X(xa)) + "\" y1=\"" + svg::num(top.Y(ya)) +
                     "\" x2=\"" + svg::num(top.X(xb)) + "\" y2=\"" + svg::num(top.Y(yb)) +
                     "\" stroke=\"" + svg::colormap(br.ctype, t) + "\" stroke-width=\"2.5\" />\n";
        }
        group += "</g>\n";
        doc.append_raw(group);
        doc.text(top.X(0.5 * (br.lo + br.hi)) - 4, top.py1 + 14,
                 br.ctype == CriticalTag::Maximum ? "max" : "min", 9);

        std::vector<std::array<double, 2>> proj;
        for (int k = 0; k <= K; ++k)
            proj.push_back({bot.X(br.lo + (br.hi - br.lo) * k / K), bot.Y(dens[b][k])});
        doc.polyline(proj, br.ctype == CriticalTag::Maximum ? "#cc2222" : "#2222cc", 1.5,
                     "class=\"density\"");
    }
    doc.text(10, 390, "a(x)", 11);
    doc.text(10, 535, "density", 11);
    return doc.str();
}

/// Discrete density plot. 1D: per-vertex density steps (or an interpolating
/// polyline), one series per component. 2D: colormapped dual cells with
/// component outlines; optional per-triangle interpolation display.
inline std::string render_density_svg(const Extraction& ex, const std::vector<DensityField>& fields,
                                      bool interpolate_display = false) {
    const Grid& g = ex.grid;
    if (g.dim == 1) {
        svg::Document doc(800, 400);
        double dmax = 1e-12;
        for (const auto& f : fields)
            for (double d : f.density) dmax = std::max(dmax, d);
        svg::Frame fr{g.x(0), g.x(g.vertex_count() - 1), 0.0, dmax * 1.05, 50, 780, 20, 360};
        doc.rect(fr.px0, fr.py0, fr.px1 - fr.px0, fr.py1 - fr.py0, "#fbfbfb");
        doc.line(fr.px0, fr.Y(0), fr.px1, fr.Y(0), "#888888", 1.0);
        for (const auto& f : fields) {
            const auto& ucp = ex.components[f.ucp_index];
            const std::string color = ucp.type == CriticalTag::Maximum ? "#cc2222" : "#2222cc";
            std::vector<std::array<double, 2>> pts;
            for (int v : ucp.vertices) {
                if (interpolate_display) {
                    pts.push_back({fr.X(g.x(v)), fr.Y(f.density[v])});
                } else {
                    const auto iv = dual_cell_interval(g, v);
                    pts.push_back({fr.X(iv[0]), fr.Y(f.density[v])});
                    pts.push_back({fr.X(iv[1]), fr.Y(f.density[v])});
                }
            }
            if (!pts.empty())
                doc.polyline(pts, color, 1.5, "class=\"ucp ucp-" + std::to_string(ucp.id) + "\"");
        }
        return doc.str();
    }

    // 2D: fit the mesh into the canvas.
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : g.vertices) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    svg::Document doc(720, 720);
    svg::Frame fr{xmin, xmax, ymin, ymax, 40, 680, 40, 680};
    auto map_poly = [&](const std::vector<std::array<double, 2>>& poly) {
        std::vector<std::array<double, 2>> out;
        for (const auto& p : poly) out.push_back({fr.X(p[0]), fr.Y(p[1])});
        return out;
    };
    double dmax = 1e-12;
    for (const auto& f : fields)
        for (double d : f.density) dmax = std::max(dmax, d);

    for (const auto& f : fields) {
        const auto& ucp = ex.components[f.ucp_index];
        if (interpolate_display) {
            // flat-shaded triangles whose corners all carry the component
            for (const auto& t : g.triangles) {
                bool all = true;
                double mean = 0;
                for (int v : t) {
                    const bool member =
                        std::binary_search(ucp.vertices.begin(), ucp.vertices.end(), v);
                    all &= member;
                    mean += f.density[v];
                }
                if (!all) continue;
                mean /= 3.0;
                doc.polygon(map_poly({g.vertices[t[0]], g.vertices[t[1]], g.vertices[t[2]]}),
                            svg::colormap(ucp.type, mean / dmax));
            }
        } else {
            for (int v : ucp.vertices)
                doc.polygon(map_poly(dual_cell_polygon(g, v)),
                            svg::colormap(ucp.type, f.density[v] / dmax));
        }
        // outline: dual-cell boundary segments that are not shared twice
        std::map<std::pair<std::pair<long, long>, std::pair<long, long>>, int> seg_count;
        auto key_pt = [&](const std::array<double, 2>& p) {
            return std::make_pair(std::lround(p[0] * 1e7), std::lround(p[1] * 1e7));
        };
        std::vector<std::vector<std::array<double, 2>>> cells;
        for (int v : ucp.vertices) cells.push_back(dual_cell_polygon(g, v));
        for (const auto& poly : cells) {
            for (std::size_t i = 0; i < poly.size(); ++i) {
                auto a = key_pt(poly[i]);
                auto b = key_pt(poly[(i + 1) % poly.size()]);
                seg_count[a < b ? std::make_pair(a, b) : std::make_pair(b, a)] += 1;
            }
        }
        for (const auto& poly : cells) {
            for (std::size_t i = 0; i < poly.size(); ++i) {
                auto a = key_pt(poly[i]);
                auto b = key_pt(poly[(i + 1) % poly.size()]);
                if (seg_count[a < b ? std::make_pair(a, b) : std::make_pair(b, a)] == 1) {
                    const auto& pa = poly[i];
                    const auto& pb = poly[(i + 1) % poly.size()];
                    doc.line(fr.X(pa[0]), fr.Y(pa[1]), fr.X(pb[0]), fr.Y(pb[1]), "#222222", 1.0,
                             "class=\"outline outline-" + std::to_string(ucp.id) + "\"");
                }
            }
        }
    }
    return doc.str();
}

} // namespace uncrit
