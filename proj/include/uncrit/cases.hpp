#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "uncrit/analytic.hpp"
#include "uncrit/family.hpp"
#include "uncrit/mesh.hpp"

namespace uncrit {

inline constexpr double kPi = 3.141592653589793238462643383279;

/// A generated benchmark input: grid + family + parameter distribution, with
/// the exact smooth companion where one exists (1D one-parameter cases).
struct BuiltinCase {
    std::string name;
    Grid grid;
    LinearFamily family;
    ParameterDistribution dist = ParameterDistribution::standard_normal(1);
    std::optional<SmoothPair> pair;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

/// f_a(x) = a1 cos x + a2 sin x on [0, x_hi]: a rotating wave whose extrema
/// wander with the phase of (a1, a2). One uncertain maximum and one uncertain
/// minimum wind around the domain axis.
inline BuiltinCase make_helicoid_case(int n = 601, double x_hi = 6.0 * kPi) {
    BuiltinCase c;
    c.name = "helicoid";
    const auto xs = linspace(0.0, x_hi, n);
    c.grid = build_line_grid(xs);
    c.family.g.resize(3);
    c.family.g[0].assign(n, 0.0);
    c.family.g[1].resize(n);
    c.family.g[2].resize(n);
    for (int i = 0; i < n; ++i) {
        c.family.g[1][i] = std::cos(xs[i]);
        c.family.g[2][i] = std::sin(xs[i]);
    }
    c.dist = ParameterDistribution::standard_normal(2);
    return c;
}

/// f_a(x) = x^2/10 + a sin x. The default half-range 4.5 shows the five-branch
/// structure (three minima, two maxima); wider ranges pick up further fold
/// points and poles.
inline BuiltinCase make_parabola_sine_case(int n = 181, double half_range = 4.5) {
    BuiltinCase c;
    c.name = "parabola-sine";
    const auto xs = linspace(-half_range, half_range, n);
    c.grid = build_line_grid(xs);
    c.family.g.resize(2);
    c.family.g[0].resize(n);
    c.family.g[1].resize(n);
    for (int i = 0; i < n; ++i) {
        c.family.g[0][i] = xs[i] * xs[i] / 10.0;
        c.family.g[1][i] = std::sin(xs[i]);
    }
    c.dist = ParameterDistribution::standard_normal(1);
    SmoothPair pair;
    pair.g0 = {[](double x) { return x * x / 10.0; }, [](double x) { return x / 5.0; },
               [](double) { return 0.2; }};
    pair.g1 = {[](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
               [](double x) { return -std::sin(x); }};
    pair.x_lo = -half_range;
    pair.x_hi = half_range;
    c.pair = pair;
    return c;
}

/// Structured triangulation of [0,1]^2 (each quad split along one diagonal).
inline Grid make_unit_square_grid(int nx, int ny) {
    std::vector<std::array<double, 2>> pts;
    pts.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            pts.push_back({static_cast<double>(i) / (nx - 1), static_cast<double>(j) / (ny - 1)});
    std::vector<std::array<int, 3>> tris;
    auto id = [nx](int i, int j) { return j * nx + i; };
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return build_triangle_grid(std::move(pts), std::move(tris));
}

/// 2D two-mode case: a Gaussian bump whose location is uncertain. The modes
/// are the linearized translations of the bump, so f_a is approximately the
/// bump displaced by `shift * a`. A paraboloid decay and a small mode tilt
/// keep the far field free of flat-data noise criticality.
inline BuiltinCase make_bumps2d_case(int nx = 21, int ny = 21, double shift = 0.06) {
    BuiltinCase c;
    c.name = "bumps2d";
    c.grid = make_unit_square_grid(nx, ny);
    const int n = c.grid.vertex_count();
    const double s2 = 0.18 * 0.18;
    c.family.g.assign(3, std::vector<double>(n));
    for (int v = 0; v < n; ++v) {
        const double dx = c.grid.x(v) - 0.5;
        const double dy = c.grid.y(v) - 0.5;
        const double r2 = dx * dx + dy * dy;
        const double bump = std::exp(-r2 / (2.0 * s2));
        c.family.g[0][v] = bump - 0.3 * r2;
        c.family.g[1][v] = shift * ((dx / s2) * bump + 0.3 * dx);
        c.family.g[2][v] = shift * ((dy / s2) * bump + 0.3 * dy);
    }
    c.dist = ParameterDistribution::standard_normal(2);
    return c;
}

/// r synthetic ensemble members over a grid: mean field plus two orthonormal
/// modes with Gaussian coefficients (sd 3 and 1.5) and optional iid noise.
inline std::vector<std::vector<double>> make_synthetic_ensemble(const Grid& grid, int members,
                                                                std::uint64_t seed,
                                                                double noise_sd = 0.0) {
    const int n = grid.vertex_count();
    std::vector<double> mean(n), u1(n), u2(n);
    for (int v = 0; v < n; ++v) {
        const double x = grid.x(v), y = grid.y(v);
        mean[v] = 1.0 + 0.5 * x + 0.25 * y;
        u1[v] = std::sin(kPi * (x + 0.3) * 1.7) + 0.2 * y;
        u2[v] = std::cos(kPi * (x - 0.1) * 2.3) - 0.4 * x * y;
    }
    // Orthonormalize (Gram-Schmidt in the Euclidean inner product).
    auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int v = 0; v < n; ++v) s += a[v] * b[v];
        return s;
    };
    double n1 = std::sqrt(dot(u1, u1));
    for (auto& v : u1) v /= n1;
    const double p = dot(u2, u1);
    for (int v = 0; v < n; ++v) u2[v] -= p * u1[v];
    double n2 = std::sqrt(dot(u2, u2));
    for (auto& v : u2) v /= n2;

    std::vector<std::vector<double>> ens(members, std::vector<double>(n));
    RandomStream rng(seed);
    for (int r = 0; r < members; ++r) {
        const double c1 = 3.0 * rng.gaussian();
        const double c2 = 1.5 * rng.gaussian();
        for (int v = 0; v < n; ++v) {
            double val = mean[v] + c1 * u1[v] + c2 * u2[v];
            if (noise_sd > 0.0) val += noise_sd * rng.gaussian();
            ens[r][v] = val;
        }
    }
    return ens;
}

inline BuiltinCase make_builtin_case(const std::string& name) {
    if (name == "helicoid") return make_helicoid_case();
    if (name == "parabola-sine") return make_parabola_sine_case();
    if (name == "bumps2d") return make_bumps2d_case();
    throw config_error("unknown built-in case '" + name + "' (have: helicoid, parabola-sine, bumps2d)");
}

} // namespace uncrit
