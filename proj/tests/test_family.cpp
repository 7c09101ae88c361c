#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "uncrit/cases.hpp"
#include "uncrit/family.hpp"

using namespace uncrit;

TEST_CASE("evaluate: zero parameter returns g0 exactly") {
    LinearFamily fam;
    fam.g = {{1.0, 2.0, 3.0}, {0.5, -0.5, 0.25}};
    auto f = fam.evaluate(std::vector<double>{0.0});
    CHECK(f == fam.g[0]);
}

TEST_CASE("evaluate: linearity") {
    LinearFamily fam;
    fam.g = {{0.0, 0.0}, {1.0, -2.0}};
    auto f = fam.evaluate(std::vector<double>{2.0});
    CHECK(f[0] == 2.0);
    CHECK(f[1] == -4.0);
    CHECK_THROWS_AS(fam.evaluate(std::vector<double>{1.0, 2.0}), config_error);
}

TEST_CASE("evaluate: helicoid realization sin(x) peaks at the vertex nearest pi/2") {
    auto c = make_helicoid_case(901, 3.0 * kPi);
    auto f = c.family.evaluate(std::vector<double>{0.0, 1.0});
    int best = 0;
    for (int v = 1; v < c.grid.vertex_count(); ++v)
        if (f[v] > f[best]) best = v;
    CHECK(std::abs(c.grid.x(best) - kPi / 2.0) <= 3.0 * kPi / 900.0);
}

TEST_CASE("evaluate is affine in the parameter") {
    auto c = make_helicoid_case(101, 2.0 * kPi);
    LinearFamily homogeneous = c.family;
    std::fill(homogeneous.g[0].begin(), homogeneous.g[0].end(), 0.0);
    RandomStream rng(5);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> a{rng.gaussian(), rng.gaussian()}, b{rng.gaussian(), rng.gaussian()};
        std::vector<double> ab{a[0] + b[0], a[1] + b[1]};
        auto fab = c.family.evaluate(ab);
        auto fa = c.family.evaluate(a);
        auto fb = homogeneous.evaluate(b);
        for (int v = 0; v < c.grid.vertex_count(); ++v)
            REQUIRE(fab[v] == Catch::Approx(fa[v] + fb[v]).margin(1e-12));
    }
}

TEST_CASE("sampling is deterministic for a fixed seed") {
    auto dist = ParameterDistribution::standard_normal(3);
    auto s1 = sample_parameters(dist, 257, 42);
    auto s2 = sample_parameters(dist, 257, 42);
    CHECK(s1 == s2);
    auto s3 = sample_parameters(dist, 257, 43);
    CHECK(s1 != s3);
    // chunked generation: a longer batch extends the shorter one
    auto s4 = sample_parameters(dist, 5000, 42);
    for (int i = 0; i < 257; ++i) REQUIRE(s4[i] == s1[i]);
}

TEST_CASE("standard normal sampling: first and second moments") {
    auto dist = ParameterDistribution::standard_normal(2);
    SampleBatch b = SampleBatch::generate(dist, 100000, 2024);
    for (int d = 0; d < 2; ++d) {
        double mean = 0, var = 0;
        for (std::int64_t i = 0; i < b.size(); ++i) mean += b.sample(i)[d];
        mean /= static_cast<double>(b.size());
        for (std::int64_t i = 0; i < b.size(); ++i) {
            const double z = b.sample(i)[d] - mean;
            var += z * z;
        }
        var /= static_cast<double>(b.size() - 1);
        CHECK(std::abs(mean) < 0.02);
        CHECK(std::abs(var - 1.0) < 0.03);
    }
}

TEST_CASE("general Gaussian sampling: L = diag(2,1) gives variance 4") {
    auto dist = ParameterDistribution::gaussian({0.0, 0.0}, {{2.0, 0.0}, {0.0, 1.0}});
    SampleBatch b = SampleBatch::generate(dist, 60000, 7);
    double var = 0;
    for (std::int64_t i = 0; i < b.size(); ++i) var += b.sample(i)[0] * b.sample(i)[0];
    var /= static_cast<double>(b.size());
    CHECK(var == Catch::Approx(4.0).epsilon(0.05));
    CHECK_THROWS_AS(ParameterDistribution::gaussian({0.0, 0.0}, {{1.0, 0.0}, {1.0, 0.0}}),
                    config_error);
}

TEST_CASE("normal quantile inverts the CDF") {
    for (double p : {1e-9, 0.02425, 0.1, 0.5, 0.77, 0.97575, 1 - 1e-9})
        CHECK(normal_cdf(normal_quantile(p)) == Catch::Approx(p).margin(1e-12));
}

TEST_CASE("eof: identical members have zero variance") {
    std::vector<std::vector<double>> ens(5, std::vector<double>{1.0, 2.0, 3.0});
    CHECK_THROWS_AS(eof_decompose(ens, 1), numeric_error);
}

TEST_CASE("eof: rank-1 hand-computed case") {
    // rows = g0 + c_i * u with c = (-1, 0, 1), u unit
    const std::vector<double> g0{1.0, -2.0, 0.5, 3.0};
    std::vector<double> u{0.5, 0.5, 0.5, 0.5};
    std::vector<std::vector<double>> ens;
    for (double c : {-1.0, 0.0, 1.0}) {
        std::vector<double> row(4);
        for (int k = 0; k < 4; ++k) row[k] = g0[k] + c * u[k];
        ens.push_back(row);
    }
    auto res = eof_decompose(ens, 1);
    CHECK(res.positive_rank == 1);
    for (int k = 0; k < 4; ++k) CHECK(res.family.g[0][k] == Catch::Approx(g0[k]));
    // mode proportional to u with the sqrt(r-1) scaling folded in
    const double s = res.family.g[1][0] / u[0];
    for (int k = 0; k < 4; ++k) CHECK(res.family.g[1][k] == Catch::Approx(s * u[k]));
    // coefficients are (-1,0,1) up to joint sign: unit sample variance
    double var = 0;
    for (double c : res.coefficients[0]) var += c * c;
    var /= 2.0;
    CHECK(var == Catch::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(eof_decompose(ens, 2), numeric_error); // beyond rank
    CHECK_THROWS_AS(eof_decompose(ens, 3), config_error);  // beyond min(r-1, n)
}

TEST_CASE("eof: synthetic two-mode ensemble") {
    Grid g = make_unit_square_grid(9, 9);
    auto ens = make_synthetic_ensemble(g, 200, 99, 1e-4);
    auto res = eof_decompose(ens, 2);
    CHECK(res.explained_variance[0] + res.explained_variance[1] >= 0.99);

    SECTION("round-trip with all modes reproduces members") {
        auto full = eof_decompose(ens, std::min(199, g.vertex_count()));
        double range_lo = 1e300, range_hi = -1e300;
        for (const auto& row : ens)
            for (double v : row) {
                range_lo = std::min(range_lo, v);
                range_hi = std::max(range_hi, v);
            }
        double max_err = 0;
        for (std::size_t r = 0; r < ens.size(); ++r) {
            for (int v = 0; v < g.vertex_count(); ++v) {
                double recon = full.family.g[0][v];
                for (std::size_t k = 0; k < full.coefficients.size(); ++k)
                    recon += full.coefficients[k][r] * full.family.g[k + 1][v];
                max_err = std::max(max_err, std::abs(recon - ens[r][v]));
            }
        }
        CHECK(max_err <= 1e-9 * (range_hi - range_lo));
    }

    SECTION("modes are orthogonal, coefficients standardized") {
        const auto& m1 = res.family.g[1];
        const auto& m2 = res.family.g[2];
        double d12 = 0, n1 = 0, n2 = 0;
        for (std::size_t v = 0; v < m1.size(); ++v) {
            d12 += m1[v] * m2[v];
            n1 += m1[v] * m1[v];
            n2 += m2[v] * m2[v];
        }
        CHECK(std::abs(d12) / std::sqrt(n1 * n2) <= 1e-10);
        for (const auto& coeff : res.coefficients) {
            double mean = 0, var = 0;
            for (double c : coeff) mean += c;
            mean /= static_cast<double>(coeff.size());
            for (double c : coeff) var += (c - mean) * (c - mean);
            var /= static_cast<double>(coeff.size() - 1);
            CHECK(var == Catch::Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("eof: optional vertex weights") {
    Grid g = make_unit_square_grid(5, 5);
    auto ens = make_synthetic_ensemble(g, 40, 3, 0.0);
    std::vector<double> w(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) w[v] = g.dual_area[v];
    auto res = eof_decompose(ens, 2, &w);
    // weighted modes still reconstruct the two-mode ensemble
    double max_err = 0;
    for (std::size_t r = 0; r < ens.size(); ++r)
        for (int v = 0; v < g.vertex_count(); ++v) {
            double recon = res.family.g[0][v];
            for (int k = 0; k < 2; ++k) recon += res.coefficients[k][r] * res.family.g[k + 1][v];
            max_err = std::max(max_err, std::abs(recon - ens[r][v]));
        }
    CHECK(max_err <= 1e-8);
}
