#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "uncrit/common.hpp"
#include "uncrit/family.hpp"
#include "uncrit/pltopo.hpp"
#include "uncrit/rng.hpp"

namespace uncrit {

/// Scalar function with first and second derivatives, supplied as evaluators.
struct ScalarFunction {
    std::function<double(double)> f, df, ddf;
};

/// One-parameter family f_a(x) = g0(x) + a * g1(x) on an interval. The locus
/// of critical points is the graph of a(x) = -g0'(x)/g1'(x) away from common
/// roots of the derivatives.
struct SmoothPair {
    ScalarFunction g0, g1;
    double x_lo = 0.0, x_hi = 1.0;

    double a(double x) const { return -g0.df(x) / g1.df(x); }

    /// a'(x) = -(g0'' g1' - g0' g1'') / g1'^2
    double da(double x) const {
        const double d1 = g1.df(x);
        return -(g0.ddf(x) * d1 - g0.df(x) * g1.ddf(x)) / (d1 * d1);
    }

    /// Second derivative of the realization passing through (x, a(x)).
    double hessian(double x) const { return g0.ddf(x) + a(x) * g1.ddf(x); }

    /// Supplied derivatives must agree with centered finite differences to
    /// 1e-6 relative error at random interior points.
    void self_check(std::uint64_t seed = 0x5EEDull) const {
        RandomStream rng(seed);
        const double span = x_hi - x_lo;
        const double h = 1e-5 * std::max(1.0, span);
        for (int t = 0; t < 48; ++t) {
            const double x = x_lo + (0.02 + 0.96 * rng.uniform01()) * span;
            const double fd1 = (g0.f(x + h) - g0.f(x - h)) / (2 * h);
            const double fd2 = (g1.f(x + h) - g1.f(x - h)) / (2 * h);
            const double sd1 = (g0.df(x + h) - g0.df(x - h)) / (2 * h);
            const double sd2 = (g1.df(x + h) - g1.df(x - h)) / (2 * h);
            auto bad = [](double got, double fd) {
                return std::abs(got - fd) > 1e-6 * std::max(1.0, std::abs(fd));
            };
            if (bad(g0.df(x), fd1) || bad(g1.df(x), fd2) || bad(g0.ddf(x), sd1) || bad(g1.ddf(x), sd2))
                throw config_error("smooth pair: supplied derivatives disagree with finite differences near x = " +
                                   std::to_string(x));
        }
    }
};

enum class BreakKind { Pole, Degenerate, DomainEnd };

inline const char* to_string(BreakKind k) {
    switch (k) {
        case BreakKind::Pole: return "pole";
        case BreakKind::Degenerate: return "degenerate";
        case BreakKind::DomainEnd: return "domain-end";
    }
    return "?";
}

/// Maximal open interval of the critical-point curve between consecutive
/// breakpoints; a(x) is strictly monotone and the type constant on it.
struct AnalyticBranch {
    double lo = 0.0, hi = 0.0;
    BreakKind lo_kind = BreakKind::DomainEnd, hi_kind = BreakKind::DomainEnd;
    CriticalTag ctype = CriticalTag::Regular;
    SmoothPair pair;

    bool contains(double x) const { return x > lo && x < hi; }
    double a(double x) const { return pair.a(x); }
    double da(double x) const { return pair.da(x); }
};

struct BranchDecomposition {
    std::vector<AnalyticBranch> branches;
    std::vector<double> poles;
    std::vector<double> degenerate_points;
    bool degenerate_curve = false; // a' vanishes identically: no nondegenerate points
    std::vector<std::string> warnings;
};

namespace detail {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double flo,
                     double tol) {
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Roots by sign-change scan + bisection; suspected even-multiplicity roots
/// (deep dips without sign change) are reported as warnings.
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                                      int resolution, double dip_scale,
                                      std::vector<std::string>* warnings, const char* what) {
    std::vector<double> roots;
    const double tol = 1e-12 * std::max(1.0, hi - lo);
    double xp = lo, fp = f(lo);
    for (int i = 1; i <= resolution; ++i) {
        const double x = lo + (hi - lo) * i / resolution;
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (fp != 0.0 && (fx > 0) != (fp > 0)) {
            roots.push_back(bisect(f, xp, x, fp, tol));
        } else if (warnings && i >= 2) {
            // local dip far below scale without crossing: possible double root
            const double fm = fp;
            const double fpp = f(lo + (hi - lo) * (i - 2.0) / resolution);
            if (std::abs(fm) < 1e-6 * dip_scale && std::abs(fm) < std::abs(fx) &&
                std::abs(fm) < std::abs(fpp) && (fx > 0) == (fpp > 0))
                warnings->push_back(std::string("possible double root of ") + what + " near x = " +
                                    std::to_string(xp));
        }
        xp = x;
        fp = fx;
    }
    return roots;
}

} // namespace detail

/// Breakpoints are the roots of g1' (poles), the roots of a' (degenerate
/// points, where the realization Hessian is singular), and the domain ends.
/// Branch type is classified at the midpoint and re-checked at 16 interior
/// points.
inline BranchDecomposition jacobi_branches(const SmoothPair& pair, int grid_resolution = 10000) {
    pair.self_check();
    BranchDecomposition out;
    const double lo = pair.x_lo, hi = pair.x_hi;
    if (!(hi > lo)) throw config_error("jacobi_branches: empty domain");
    const double span = hi - lo;

    double d1_scale = 0.0, num_scale = 0.0;
    for (int i = 0; i <= grid_resolution; ++i) {
        const double x = lo + span * i / grid_resolution;
        d1_scale = std::max(d1_scale, std::abs(pair.g1.df(x)));
        num_scale = std::max(num_scale,
                             std::abs(pair.g0.ddf(x) * pair.g1.df(x)) +
                                 std::abs(pair.g0.df(x) * pair.g1.ddf(x)));
    }
    if (d1_scale <= 1e-14)
        throw config_error("jacobi_branches: g1' vanishes identically; criticality does not depend on a");

    out.poles = detail::scan_roots([&](double x) { return pair.g1.df(x); }, lo, hi, grid_resolution,
                                   d1_scale, &out.warnings, "g1'");

    // a' numerator; its roots away from poles are the degenerate points.
    auto numer = [&](double x) {
        return -(pair.g0.ddf(x) * pair.g1.df(x) - pair.g0.df(x) * pair.g1.ddf(x));
    };
    double num_max = 0.0;
    for (int i = 0; i <= grid_resolution; ++i)
        num_max = std::max(num_max, std::abs(numer(lo + span * i / grid_resolution)));
    if (num_max <= 1e-12 * std::max(1.0, num_scale)) {
        out.degenerate_curve = true;
        return out;
    }
    out.degenerate_points =
        detail::scan_roots(numer, lo, hi, grid_resolution, num_scale, &out.warnings, "a'");
    // Drop numerator roots that coincide with poles.
    const double merge_tol = 1e-9 * std::max(1.0, span);
    std::erase_if(out.degenerate_points, [&](double x) {
        for (double p : out.poles)
            if (std::abs(x - p) <= merge_tol) return true;
        return false;
    });

    struct Bp {
        double x;
        BreakKind kind;
    };
    std::vector<Bp> bps{{lo, BreakKind::DomainEnd}};
    for (double p : out.poles) bps.push_back({p, BreakKind::Pole});
    for (double d : out.degenerate_points) bps.push_back({d, BreakKind::Degenerate});
    bps.push_back({hi, BreakKind::DomainEnd});
    std::sort(bps.begin(), bps.end(), [](const Bp& a, const Bp& b) { return a.x < b.x; });

    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        if (bps[i + 1].x - bps[i].x <= merge_tol) continue;
        AnalyticBranch br;
        br.lo = bps[i].x;
        br.hi = bps[i + 1].x;
        br.lo_kind = bps[i].kind;
        br.hi_kind = bps[i + 1].kind;
        br.pair = pair;
        double s = pair.hessian(0.5 * (br.lo + br.hi));
        for (int k = 1; s == 0.0 && k <= 16; ++k)
            s = pair.hessian(br.lo + (br.hi - br.lo) * k / 17.0);
        if (s == 0.0) throw numeric_error("branch type indeterminate (Hessian vanishes on the branch)");
        br.ctype = s > 0 ? CriticalTag::Minimum : CriticalTag::Maximum;
        for (int k = 1; k <= 16; ++k) {
            const double xs = br.lo + (br.hi - br.lo) * k / 17.0;
            const double hs = pair.hessian(xs);
            if (hs != 0.0 && (hs > 0) != (s > 0))
                throw numeric_error("branch type changes inside a branch; breakpoint missed near x = " +
                                    std::to_string(xs));
        }
        out.branches.push_back(std::move(br));
    }
    return out;
}

/// Spatial density |phi_A(a(x)) * a'(x)| at a point strictly inside the branch.
inline double branch_density(const AnalyticBranch& br, const ParameterDistribution& dist, double x) {
    if (!br.contains(x))
        throw config_error("branch_density: x = " + std::to_string(x) + " outside the branch");
    return std::abs(dist.pdf1(br.a(x)) * br.da(x));
}

/// |Phi_A at the right end - Phi_A at the left end|; poles map to 0/1.
inline double branch_probability(const AnalyticBranch& br, const ParameterDistribution& dist) {
    const double span = br.hi - br.lo;
    if (!(span > 0)) return 0.0;
    const double delta = 1e-9 * std::max(1.0, br.pair.x_hi - br.pair.x_lo);
    const double a_lo = br.a(br.lo + std::min(delta, 0.25 * span));
    const double a_hi = br.a(br.hi - std::min(delta, 0.25 * span));
    return std::abs(dist.cdf1(a_hi) - dist.cdf1(a_lo));
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                               double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
        return left + right + (left + right - whole) / 15;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

} // namespace detail

/// Adaptive quadrature of the branch density; equals branch_probability.
inline double integrate_branch_density(const AnalyticBranch& br, const ParameterDistribution& dist,
                                       double tol = 1e-8) {
    const double span = br.hi - br.lo;
    if (!(span > 0)) return 0.0;
    const double delta = std::min(1e-9 * std::max(1.0, br.pair.x_hi - br.pair.x_lo), 0.25 * span);
    const double a = br.lo + delta, b = br.hi - delta;
    auto f = [&](double x) { return std::abs(dist.pdf1(br.a(x)) * br.da(x)); };
    // Split at interior octile points first: the integrand can be sharply
    // peaked toward poles.
    double total = 0.0;
    for (int k = 0; k < 8; ++k) {
        const double u = a + (b - a) * k / 8.0, v = a + (b - a) * (k + 1) / 8.0;
        const double fu = f(u), fv = f(v), fm = f(0.5 * (u + v));
        const double whole = (v - u) / 6 * (fu + 4 * fm + fv);
        total += detail::adaptive_simpson(f, u, v, fu, fm, fv, whole, tol / 8, 48);
    }
    return total;
}

/// Probability that the helicoid's uncertain extremum (of either type)
/// manifests in [x0, x1]: min(1, (x1-x0)/(2 pi)) for every rotationally
/// symmetric parameter distribution, because the manifestation phase is
/// uniform and repeats with period 2 pi.
inline double helicoid_region_probability(double x0, double x1) {
    if (!(x1 > x0)) throw config_error("helicoid_region_probability: requires x1 > x0");
    return std::min(1.0, (x1 - x0) / 6.283185307179586476925286766559);
}

} // namespace uncrit
