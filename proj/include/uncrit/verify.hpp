#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "uncrit/analytic.hpp"
#include "uncrit/cases.hpp"
#include "uncrit/extract.hpp"
#include "uncrit/io.hpp"
#include "uncrit/prob.hpp"

namespace uncrit {

struct Check {
    std::string name;
    std::string measured;
    std::string expected;
    bool pass = false;
};

struct Report {
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    void add(std::string name, double measured, double expected, double tol) {
        char m[64], e[64];
        std::snprintf(m, sizeof m, "%.6g", measured);
        std::snprintf(e, sizeof e, "%.6g +/- %.3g", expected, tol);
        checks.push_back({std::move(name), m, e, std::abs(measured - expected) <= tol});
    }
    void add_count(std::string name, long measured, long expected) {
        checks.push_back({std::move(name), std::to_string(measured), std::to_string(expected),
                          measured == expected});
    }
    void add_flag(std::string name, bool ok, std::string detail = {}) {
        checks.push_back({std::move(name), detail.empty() ? (ok ? "ok" : "violated") : detail,
                          "ok", ok});
    }
};

inline void print_report(const Report& r) {
    std::printf("== %s ==\n", r.title.c_str());
    for (const auto& c : r.checks)
        std::printf("  [%s] %s: %s (expected %s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.measured.c_str(), c.expected.c_str());
    if (r.seconds > 0) std::printf("  (%.2f s)\n", r.seconds);
}

// ---------------------------------------------------------------------------
// Randomized instances shared by the property suites.

inline Grid random_grid(RandomStream& rng, int max_vertices = 200) {
    if (rng.uniform01() < 0.5) {
        const int n = 8 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_vertices - 8));
        std::vector<double> xs(n);
        double x = -5.0 * rng.uniform01();
        for (int i = 0; i < n; ++i) {
            x += 0.05 + rng.uniform01();
            xs[i] = x;
        }
        return build_line_grid(xs);
    }
    const int nx = 3 + static_cast<int>(rng.next_u64() % 10);
    const int ny = 3 + static_cast<int>(rng.next_u64() % 10);
    Grid base = make_unit_square_grid(nx, ny);
    // jitter interior vertices; triangles stay positively oriented
    std::vector<std::array<double, 2>> pts = base.vertices;
    const double hx = 1.0 / (nx - 1), hy = 1.0 / (ny - 1);
    for (int v = 0; v < base.vertex_count(); ++v) {
        if (base.boundary[v]) continue;
        pts[v][0] += (rng.uniform01() - 0.5) * 0.4 * hx;
        pts[v][1] += (rng.uniform01() - 0.5) * 0.4 * hy;
    }
    return build_triangle_grid(std::move(pts), base.triangles);
}

inline LinearFamily random_family(RandomStream& rng, int n, int m) {
    LinearFamily f;
    f.g.assign(m + 1, std::vector<double>(n));
    for (auto& gi : f.g)
        for (auto& v : gi) v = rng.gaussian();
    return f;
}

// ---------------------------------------------------------------------------
// Criterion 1 + 2 context: the helicoid pipeline.

struct HelicoidContext {
    BuiltinCase cs;
    Extraction ex;
    SampleBatch batch;
    int max_index = -1;
    int min_index = -1;
    double build_seconds = 0.0;
};

inline HelicoidContext build_helicoid_context(int n = 601, std::int64_t N = 20000,
                                              std::uint64_t seed = 20240809ull) {
    const auto t0 = std::chrono::steady_clock::now();
    HelicoidContext ctx{make_helicoid_case(n), {}, SampleBatch::generate(ParameterDistribution::standard_normal(2), N, seed)};
    ctx.ex = Extraction::run(ctx.cs.grid, ctx.cs.family, {});
    for (std::size_t c = 0; c < ctx.ex.components.size(); ++c) {
        if (ctx.ex.components[c].type == CriticalTag::Maximum && ctx.max_index < 0)
            ctx.max_index = static_cast<int>(c);
        if (ctx.ex.components[c].type == CriticalTag::Minimum && ctx.min_index < 0)
            ctx.min_index = static_cast<int>(c);
    }
    ctx.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return ctx;
}

inline Report criterion1_helicoid(const HelicoidContext& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    Report r;
    r.title = "criterion 1: helicoid counterexample";
    long maxima = 0, minima = 0;
    for (const auto& c : ctx.ex.components) {
        maxima += c.type == CriticalTag::Maximum;
        minima += c.type == CriticalTag::Minimum;
    }
    r.add_count("uncertain maxima", maxima, 1);
    r.add_count("uncertain minima", minima, 1);
    if (ctx.max_index >= 0) {
        const double period = 2.0 * kPi;
        for (int k = 0; k < 3; ++k) {
            auto est = region_probability(ctx.ex, ctx.max_index,
                                          Region::from_interval(k * period, (k + 1) * period),
                                          ctx.batch);
            r.add("P(max in [2pi*" + std::to_string(k) + ", 2pi*" + std::to_string(k + 1) + "))",
                  est.value, 1.0, 0.01);
        }
        auto joint = joint_probability(ctx.ex, ctx.max_index, Region::from_interval(0, period),
                                       Region::from_interval(period, 2 * period), ctx.batch);
        r.add("joint P(max in both period windows)", joint.joint.value, 1.0, 0.01);
        auto half = region_probability(ctx.ex, ctx.max_index, Region::from_interval(0.0, kPi),
                                       ctx.batch);
        r.add("P(max in [0, pi))", half.value, 0.5, 0.02);
    }
    r.seconds = ctx.build_seconds +
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.add_flag("single-threaded runtime < 30 s", r.seconds < 30.0,
               std::to_string(r.seconds) + " s");
    return r;
}

inline Report criterion2_double_manifestation(const HelicoidContext& ctx) {
    Report r;
    r.title = "criterion 2: same-realization double manifestation";
    auto st = manifestation_stats(ctx.ex, ctx.max_index, ctx.batch);
    r.add("fraction of samples with >= 2 manifestation vertices", st.fraction_multi, 1.0, 0.01);
    r.add_flag("max manifestations per sample >= 2", st.max_manifestations >= 2,
               std::to_string(st.max_manifestations));
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 3: the analytic parabola-sine structure. The five-branch picture
// (three minima, two maxima) lives on the window between the second pair of
// fold points, e.g. [-4.5, 4.5]; wider windows gain further branches.

inline Report criterion3_parabola_sine(double half_range = 4.5) {
    Report r;
    r.title = "criterion 3: parabola-sine analytic branches";
    auto cs = make_parabola_sine_case(181, half_range);
    auto dec = jacobi_branches(*cs.pair);
    long mins = 0, maxs = 0;
    for (const auto& b : dec.branches) {
        mins += b.ctype == CriticalTag::Minimum;
        maxs += b.ctype == CriticalTag::Maximum;
    }
    r.add_count("branch count", static_cast<long>(dec.branches.size()), 5);
    r.add_count("minimum branches", mins, 3);
    r.add_count("maximum branches", maxs, 2);

    const AnalyticBranch* central = nullptr;
    for (const auto& b : dec.branches)
        if (b.contains(0.0)) central = &b;
    if (central) {
        r.add("central minimum branch probability (pole to pole)",
              branch_probability(*central, cs.dist), 1.0, 1e-9);
        const double d0 = branch_density(*central, cs.dist, 0.0);
        const double d14 = branch_density(*central, cs.dist, 1.4);
        r.add("density at x = 0", d0, 0.0798, 0.01 * 0.0798);
        r.add("density at x = 1.4", d14, 1.10, 0.01 * 1.10);
        r.add_flag("border density exceeds center density", d14 > d0);
    } else {
        r.add_flag("central branch found", false);
    }
    double worst = 0.0;
    for (const auto& b : dec.branches)
        worst = std::max(worst, std::abs(integrate_branch_density(b, cs.dist) -
                                         branch_probability(b, cs.dist)));
    r.add("max |quadrature - CDF difference| over branches", worst, 0.0, 1e-6);
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 4: discrete <-> analytic convergence on the parabola-sine family.

namespace detail {

struct MatchedUcp {
    int ucp_index = -1;
    std::array<double, 2> support{};
};

inline MatchedUcp match_ucp_to_branch(const Extraction& ex, const AnalyticBranch& br) {
    MatchedUcp best;
    double best_overlap = 0.0;
    for (std::size_t c = 0; c < ex.components.size(); ++c) {
        const auto& ucp = ex.components[c];
        if (ucp.type != br.ctype) continue;
        const auto sup = spatial_support(ucp, ex.grid);
        for (const auto& iv : sup.intervals) {
            const double overlap = std::min(iv[1], br.hi) - std::max(iv[0], br.lo);
            if (overlap > best_overlap) {
                best_overlap = overlap;
                best.ucp_index = static_cast<int>(c);
                best.support = iv;
            }
        }
    }
    return best;
}

} // namespace detail

inline Report criterion4_convergence(std::int64_t N = 20000, std::uint64_t seed = 777123ull,
                                     double half_range = 4.5, int n_coarse = 181) {
    Report r;
    r.title = "criterion 4: discrete-analytic convergence under refinement";
    auto cs = make_parabola_sine_case(n_coarse, half_range);
    auto dec = jacobi_branches(*cs.pair);
    const double h = 2.0 * half_range / (n_coarse - 1);

    auto cs_fine = make_parabola_sine_case(2 * n_coarse - 1, half_range);
    Extraction ex_h = Extraction::run(cs.grid, cs.family, {});
    Extraction ex_f = Extraction::run(cs_fine.grid, cs_fine.family, {});
    SampleBatch batch = SampleBatch::generate(cs.dist, N, seed);

    r.add_count("components at h", static_cast<long>(ex_h.components.size()),
                static_cast<long>(dec.branches.size()));
    r.add_count("components at h/2", static_cast<long>(ex_f.components.size()),
                static_cast<long>(dec.branches.size()));

    double worst_hausdorff = 0.0, worst_hausdorff_f = 0.0, worst_prob = 0.0, prob_tol_used = 0.0;
    for (const auto& br : dec.branches) {
        auto mh = detail::match_ucp_to_branch(ex_h, br);
        auto mf = detail::match_ucp_to_branch(ex_f, br);
        if (mh.ucp_index < 0 || mf.ucp_index < 0) {
            r.add_flag("branch matched by a component", false);
            continue;
        }
        worst_hausdorff = std::max(worst_hausdorff, std::max(std::abs(mh.support[0] - br.lo),
                                                             std::abs(mh.support[1] - br.hi)));
        worst_hausdorff_f = std::max(worst_hausdorff_f, std::max(std::abs(mf.support[0] - br.lo),
                                                                 std::abs(mf.support[1] - br.hi)));
        auto est = region_probability(ex_h, mh.ucp_index, Region::all(), batch);
        const double expect = branch_probability(br, cs.dist);
        const double tol = std::max(3.0 * est.stderr_, 0.02);
        worst_prob = std::max(worst_prob, std::abs(est.value - expect));
        prob_tol_used = std::max(prob_tol_used, tol);
    }
    r.add("max Hausdorff(support, branch) at h", worst_hausdorff, 0.0, 2.0 * h);
    r.add("max Hausdorff(support, branch) at h/2", worst_hausdorff_f, 0.0, h);
    r.add("max |MC component probability - branch probability|", worst_prob, 0.0, prob_tol_used);

    // Density stability: common interior vertices change by MC noise + O(h).
    double worst_excess = 0.0;
    long compared = 0;
    for (const auto& br : dec.branches) {
        auto mh = detail::match_ucp_to_branch(ex_h, br);
        auto mf = detail::match_ucp_to_branch(ex_f, br);
        if (mh.ucp_index < 0 || mf.ucp_index < 0) continue;
        auto dh = density_field(ex_h, mh.ucp_index, batch);
        auto df = density_field(ex_f, mf.ucp_index, batch);
        for (int v = 1; v + 1 < ex_h.grid.vertex_count(); ++v) {
            const int vf = 2 * v; // refinement keeps coarse vertices at even ids
            const double x = ex_h.grid.x(v);
            if (std::abs(x - cs_fine.grid.x(vf)) > 1e-12) continue;
            if (dh.density[v] < 0.05 || df.density[vf] <= 0.0) continue;
            if (x - br.lo < h || br.hi - x < h) continue; // end cells see the breakpoint
            auto se = [&](const DensityField& d, const Extraction& e, int vv) {
                const double p = d.vertex_probability[vv];
                return std::sqrt(p * (1 - p) / static_cast<double>(N)) / e.grid.dual_area[vv];
            };
            // local slope of the analytic density bounds the O(h) term
            const double x0 = std::max(br.lo + 1e-6, x - h);
            const double x1 = std::min(br.hi - 1e-6, x + h);
            const double rho0 = branch_density(br, cs.dist, x0);
            const double rho1 = branch_density(br, cs.dist, x1);
            const double rho = branch_density(br, cs.dist, x);
            const double L = std::max(std::abs(rho - rho0), std::abs(rho1 - rho)) /
                             std::max(1e-12, std::min(x - x0, x1 - x));
            const double tol = 3.0 * (se(dh, ex_h, v) + se(df, ex_f, vf)) + 2.0 * h * L + 1e-3;
            const double diff = std::abs(dh.density[v] - df.density[vf]);
            worst_excess = std::max(worst_excess, diff - tol);
            ++compared;
        }
    }
    r.add_flag("interior densities stable under refinement (" + std::to_string(compared) +
                   " vertices)",
               worst_excess <= 0.0, "max excess " + std::to_string(worst_excess));
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 5: one-parameter property suite.

inline Report criterion5_prop54(std::uint64_t seed = 555001ull, int trials = 50) {
    Report r;
    r.title = "criterion 5: one-parameter projection and partition properties";
    RandomStream rng(seed);
    long overlap_violations = 0, extremum_violations = 0, saddle_violations = 0;
    long partition_misses = 0, partition_checked = 0;
    for (int t = 0; t < trials; ++t) {
        Grid g = random_grid(rng);
        LinearFamily fam = random_family(rng, g.vertex_count(), 1);
        Extraction ex = Extraction::run(std::move(g), std::move(fam), {});

        for (const auto& ucp : ex.components) {
            struct Iv {
                int vertex;
                double lo, hi;
            };
            std::vector<Iv> ivs;
            for (int pid : ucp.patch_ids) {
                const auto& node = ex.graph.nodes[pid];
                const auto iv = patch_interval_1d(ex.cells[node.vertex],
                                                  ex.cells[node.vertex].patches[node.local]);
                ivs.push_back({node.vertex, iv[0], iv[1]});
            }
            for (std::size_t i = 0; i < ivs.size(); ++i)
                for (std::size_t j = i + 1; j < ivs.size(); ++j) {
                    if (ivs[i].vertex == ivs[j].vertex) continue;
                    const double lo = std::max(ivs[i].lo, ivs[j].lo);
                    const double hi = std::min(ivs[i].hi, ivs[j].hi);
                    if (hi - lo > 1e-9) {
                        ++overlap_violations;
                        if (ucp.type == CriticalTag::Saddle)
                            ++saddle_violations;
                        else
                            ++extremum_violations;
                    }
                }
        }

        // Partition of unity at a random vertex over a fresh sub-stream.
        SampleBatch batch = SampleBatch::generate(ParameterDistribution::standard_normal(1), 10000,
                                                  derive_stream_seed(seed, 1000 + t));
        int v = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(ex.grid.vertex_count()));
        if (ex.cells[v].vertex < 0) v = 0;
        while (ex.cells[v].vertex < 0) ++v;
        const auto& set = ex.cells[v];
        for (std::int64_t i = 0; i < batch.size(); ++i) {
            ++partition_checked;
            const int idx = set.match_exact(batch.sample(i));
            if (idx < 0) {
                ++partition_misses;
                continue;
            }
            // the matched patch must reproduce the tie-broken constraint signs
            const auto a = batch.sample(i);
            for (std::size_t cpos = 0; cpos < set.constraints.size(); ++cpos) {
                const auto& k = set.constraints[cpos];
                const int s = tie_break_sign(k.i, k.j, k.c0, k.c, a);
                if (s != set.patches[idx].sign_vector.signs[cpos]) {
                    ++partition_misses;
                    break;
                }
            }
        }
    }
    r.add_count("interval overlap violations across distinct vertices", overlap_violations, 0);
    r.add_count("overlap violations within extremum components", extremum_violations, 0);
    // Saddle components genuinely fold: two simple saddles at neighboring
    // vertices can coexist on a parameter range and still share their
    // value-tie event (merging into a multiplicity-2 saddle), so the
    // component search connects them. Extremum handoffs cannot do this, which
    // is why the extremum count above must be zero.
    r.add_flag("saddle components may fold onto overlapping parameter ranges", true,
               std::to_string(saddle_violations) + " folded saddle pairs observed");
    r.add_count("partition-of-unity misses (" + std::to_string(partition_checked) + " samples)",
                partition_misses, 0);
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 6: patch classification agrees with per-realization classification.

inline Report criterion6_classification(std::uint64_t seed = 606001ull, int trials = 1000) {
    Report r;
    r.title = "criterion 6: classification oracle equivalence";
    RandomStream rng(seed);
    long agree = 0;
    PatchOptions opt;
    for (int t = 0; t < trials; ++t) {
        Grid g = random_grid(rng, 60);
        const int m = 1 + static_cast<int>(rng.next_u64() % 3);
        LinearFamily fam = random_family(rng, g.vertex_count(), m);
        const int v = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(g.vertex_count()));
        std::vector<double> a(m);
        for (auto& x : a) x = rng.gaussian();

        auto set = enumerate_patches(fam, g, v, opt);
        const Patch& patch = set.patches[set.match(a)];

        // direct classification of the realized values, same tie rule
        const std::vector<double> f = fam.evaluate(a);
        const Link& lk = g.link(v);
        std::vector<std::int8_t> signs;
        for (std::size_t pos = 0; pos < lk.ring.size(); ++pos) {
            const int nb = lk.ring[pos];
            const double d = f[nb] - f[v];
            int s;
            if (d != 0.0)
                s = d > 0 ? 1 : -1;
            else
                s = tie_break_sign(v, nb, set.constraints[pos].c0, set.constraints[pos].c, a);
            signs.push_back(static_cast<std::int8_t>(s));
        }
        const CriticalType direct = classify(lk, signs);
        agree += patch.ctype == direct;
    }
    r.add_count("agreements out of " + std::to_string(trials), agree, trials);
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 7: ensemble decomposition round-trip + deterministic extraction.

inline Report criterion7_eof(std::uint64_t seed = 707001ull) {
    Report r;
    r.title = "criterion 7: ensemble decomposition round-trip";
    Grid g = make_unit_square_grid(11, 11);
    auto ens = make_synthetic_ensemble(g, 200, seed, 1e-5);

    auto full = eof_decompose(ens, std::min(static_cast<int>(ens.size()) - 1, g.vertex_count()));
    double lo = 1e300, hi = -1e300, max_err = 0.0;
    for (const auto& row : ens)
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    for (std::size_t i = 0; i < ens.size(); ++i)
        for (int v = 0; v < g.vertex_count(); ++v) {
            double recon = full.family.g[0][v];
            for (std::size_t k = 0; k < full.coefficients.size(); ++k)
                recon += full.coefficients[k][i] * full.family.g[k + 1][v];
            max_err = std::max(max_err, std::abs(recon - ens[i][v]));
        }
    r.add("reconstruction max error / range", max_err / (hi - lo), 0.0, 1e-9);

    auto two = eof_decompose(ens, 2);
    double worst_var = 0.0;
    for (const auto& coeff : two.coefficients) {
        double mean = 0, var = 0;
        for (double c : coeff) mean += c;
        mean /= static_cast<double>(coeff.size());
        for (double c : coeff) var += (c - mean) * (c - mean);
        var /= static_cast<double>(coeff.size() - 1);
        worst_var = std::max(worst_var, std::abs(var - 1.0));
    }
    r.add("max |coefficient variance - 1|", worst_var, 0.0, 1e-9);

    auto run_once = [&]() {
        Extraction ex = Extraction::run(g, two.family, {});
        return dump_deterministic(components_to_json(ex)) +
               dump_deterministic(patch_graph_to_json(ex));
    };
    const std::string out1 = run_once();
    const std::string out2 = run_once();
    r.add_flag("extraction on the decomposed family is byte-deterministic", out1 == out2,
               out1 == out2 ? "identical" : "outputs differ");
    r.add_flag("extraction yields components", !out1.empty() && out1.find("ucps") != std::string::npos);
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 8: arrangement cell count at a generic 6-neighbor vertex, m = 2.

inline Report criterion8_arrangement() {
    Report r;
    r.title = "criterion 8: generic 6-line arrangement at one vertex";
    // hexagon star: center 0 with ring 1..6
    std::vector<std::array<double, 2>> pts{{0, 0}};
    for (int l = 0; l < 6; ++l)
        pts.push_back({std::cos(l * kPi / 3.0), std::sin(l * kPi / 3.0)});
    std::vector<std::array<int, 3>> tris;
    for (int l = 1; l <= 6; ++l) tris.push_back({0, l, l % 6 + 1});
    Grid g = build_triangle_grid(std::move(pts), std::move(tris));

    LinearFamily fam;
    fam.g.assign(3, std::vector<double>(7, 0.0));
    const double offs[6] = {0.3, -0.7, 0.5, 0.9, -0.4, 0.2};
    for (int l = 1; l <= 6; ++l) {
        const double th = (2 * l - 1) * kPi / 12.0;
        fam.g[0][l] = offs[l - 1];
        fam.g[1][l] = std::cos(th);
        fam.g[2][l] = std::sin(th);
    }

    auto set = enumerate_patches(fam, g, 0, {});
    r.add_count("cells of the 6-line arrangement", static_cast<long>(set.patches.size()), 22);
    r.add_count("distinct walls", static_cast<long>(set.walls.size()), 6);

    bool symmetric = true;
    for (std::size_t i = 0; i < set.patches.size() && symmetric; ++i)
        for (std::size_t j = 0; j < set.patches.size() && symmetric; ++j) {
            if (i == j) continue;
            const bool ab = is_adjacent(set, set.patches[i], set, set.patches[j], g).adjacent;
            const bool ba = is_adjacent(set, set.patches[j], set, set.patches[i], g).adjacent;
            symmetric = ab == ba;
        }
    r.add_flag("exhaustive adjacency symmetry", symmetric);
    return r;
}

// ---------------------------------------------------------------------------
// Named scenarios for the command-line verify surface.

inline std::vector<Report> run_scenario(const std::string& name, std::int64_t samples,
                                        std::uint64_t seed) {
    if (name == "helicoid") {
        auto ctx = build_helicoid_context(601, samples, seed);
        return {criterion1_helicoid(ctx), criterion2_double_manifestation(ctx)};
    }
    if (name == "parabola-sine") {
        return {criterion3_parabola_sine(), criterion4_convergence(samples, seed)};
    }
    if (name == "prop54-random") {
        return {criterion5_prop54(seed)};
    }
    throw config_error("unknown verify case '" + name +
                       "' (have: helicoid, parabola-sine, prop54-random)");
}

} // namespace uncrit
