#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "uncrit/cases.hpp"
#include "uncrit/patches.hpp"
#include "uncrit/pltopo.hpp"
#include "uncrit/rng.hpp"

using namespace uncrit;

namespace {

Link closed_ring(int k) {
    Link lk;
    lk.center = 100;
    lk.closed = true;
    for (int i = 0; i < k; ++i) lk.ring.push_back(i);
    return lk;
}

Link open_path(int k) {
    Link lk = closed_ring(k);
    lk.closed = false;
    return lk;
}

} // namespace

TEST_CASE("tie_break_sign basics") {
    // delta(a) = 2 a1 at a = (3, 0)
    CHECK(tie_break_sign(0, 1, 0.0, std::vector<double>{2.0, 0.0}, std::vector<double>{3.0, 0.0}) == 1);
    // identically zero delta: index rule
    CHECK(tie_break_sign(4, 7, 0.0, std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}) == 1);
    CHECK(tie_break_sign(7, 4, 0.0, std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}) == -1);
    // delta(a) = a2 - a1 at (1,1): ties, resolved by c2 = +1
    CHECK(tie_break_sign(0, 1, 0.0, std::vector<double>{-1.0, 1.0}, std::vector<double>{1.0, 1.0}) == 1);
    // then c1, then c0
    CHECK(tie_break_sign(0, 1, 0.0, std::vector<double>{-1.0, 0.0}, std::vector<double>{0.0, 5.0}) == -1);
    CHECK(tie_break_sign(0, 1, -2.0, std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0}) == -1);
}

TEST_CASE("tie_break_sign is antisymmetric under (i,j) swap") {
    RandomStream rng(17);
    for (int t = 0; t < 2000; ++t) {
        const int m = 1 + static_cast<int>(rng.next_u64() % 3);
        double c0 = rng.gaussian();
        std::vector<double> c(m), a(m);
        for (auto& v : c) v = rng.gaussian();
        for (auto& v : a) v = rng.gaussian();
        // Make a quarter of the trials exact ties.
        if (t % 4 == 0) {
            if (m == 1) {
                a[0] = c[0] != 0.0 ? -c0 / c[0] : a[0];
            } else {
                c0 = 0.0;
                std::fill(c.begin(), c.end(), 0.0);
                c[t % m] = rng.gaussian();
                std::fill(a.begin(), a.end(), 0.0);
            }
        }
        std::vector<double> cn(c);
        for (auto& v : cn) v = -v;
        const int s1 = tie_break_sign(3, 9, c0, c, a);
        const int s2 = tie_break_sign(9, 3, -c0, cn, a);
        REQUIRE(s1 == -s2);
    }
}

TEST_CASE("lower link component counting") {
    auto lk6 = closed_ring(6);
    CHECK(lower_link_components(lk6, std::vector<std::int8_t>{-1, -1, -1, -1, -1, -1}) == 1);
    CHECK(lower_link_components(lk6, std::vector<std::int8_t>{-1, 1, -1, 1, -1, 1}) == 3);
    auto lk3 = open_path(3);
    CHECK(lower_link_components(lk3, std::vector<std::int8_t>{-1, -1, 1}) == 1);
    // wrap-around run on a closed ring is one component
    CHECK(lower_link_components(lk6, std::vector<std::int8_t>{-1, 1, 1, 1, 1, -1}) == 1);
}

TEST_CASE("classification of standard configurations") {
    auto lk6 = closed_ring(6);
    CHECK(classify(lk6, std::vector<std::int8_t>{1, 1, 1, 1, 1, 1}).tag == CriticalTag::Minimum);
    CHECK(classify(lk6, std::vector<std::int8_t>{-1, -1, -1, -1, -1, -1}).tag == CriticalTag::Maximum);
    CHECK(classify(lk6, std::vector<std::int8_t>{1, 1, 1, 1, 1, -1}).tag == CriticalTag::Regular);

    auto monkey = classify(lk6, std::vector<std::int8_t>{1, -1, 1, -1, 1, -1});
    CHECK(monkey.tag == CriticalTag::Saddle);
    CHECK(monkey.multiplicity == 2);

    auto simple = classify(lk6, std::vector<std::int8_t>{1, 1, -1, 1, -1, -1});
    CHECK(simple.tag == CriticalTag::Saddle);
    CHECK(simple.multiplicity == 1);
}

TEST_CASE("1D classification") {
    auto lk2 = open_path(2);
    CHECK(classify(lk2, std::vector<std::int8_t>{1, 1}).tag == CriticalTag::Minimum);
    CHECK(classify(lk2, std::vector<std::int8_t>{-1, -1}).tag == CriticalTag::Maximum);
    CHECK(classify(lk2, std::vector<std::int8_t>{1, -1}).tag == CriticalTag::Regular);
    auto lk1 = open_path(1);
    CHECK(classify(lk1, std::vector<std::int8_t>{1}).tag == CriticalTag::Minimum);
    CHECK(classify(lk1, std::vector<std::int8_t>{-1}).tag == CriticalTag::Maximum);
}

TEST_CASE("open-link (boundary) classification keeps multiplicity positive") {
    auto lk3 = open_path(3);
    auto t = classify(lk3, std::vector<std::int8_t>{1, -1, 1});
    CHECK(t.tag == CriticalTag::Saddle);
    CHECK(t.multiplicity == 1);
    CHECK(classify(lk3, std::vector<std::int8_t>{1, 1, -1}).tag == CriticalTag::Regular);
}

TEST_CASE("classify rejects mismatched sign length") {
    CHECK_THROWS_AS(classify(closed_ring(6), std::vector<std::int8_t>{1, 1}), config_error);
}

namespace {

// Realized-field classification: evaluate f_a, compare neighbor values with
// the library tie rule as the fallback for exact ties.
CriticalType classify_realization(const Grid& g, const LinearFamily& fam, int v,
                                  std::span<const double> a) {
    const std::vector<double> f = fam.evaluate(a);
    const Link& lk = g.link(v);
    std::vector<std::int8_t> signs;
    for (int n : lk.ring) {
        const double d = f[n] - f[v];
        int s;
        if (d != 0.0) {
            s = d > 0 ? 1 : -1;
        } else {
            auto k = make_constraint(fam, v, n);
            s = tie_break_sign(v, n, k.c0, k.c, a);
        }
        signs.push_back(static_cast<std::int8_t>(s));
    }
    return classify(lk, signs);
}

} // namespace

TEST_CASE("Euler counts on constructed planar fields (boundary excluded)") {
    Grid g = make_unit_square_grid(17, 17);
    auto classify_field = [&](const std::vector<double>& f) {
        int mins = 0, maxs = 0, saddles = 0;
        for (int v = 0; v < g.vertex_count(); ++v) {
            if (g.boundary[v]) continue;
            const Link& lk = g.link(v);
            std::vector<std::int8_t> signs;
            for (int n : lk.ring)
                signs.push_back(static_cast<std::int8_t>(f[n] > f[v] ? 1 : -1));
            auto t = classify(lk, signs);
            if (t.tag == CriticalTag::Minimum) ++mins;
            if (t.tag == CriticalTag::Maximum) ++maxs;
            if (t.tag == CriticalTag::Saddle) saddles += t.multiplicity;
        }
        return mins - saddles + maxs;
    };

    SECTION("single interior bump") {
        std::vector<double> f(g.vertex_count());
        for (int v = 0; v < g.vertex_count(); ++v) {
            const double dx = g.x(v) - 0.5, dy = g.y(v) - 0.45;
            f[v] = std::exp(-(dx * dx + dy * dy) / 0.02);
        }
        CHECK(classify_field(f) == 1);
    }
    SECTION("two bumps and the saddle between them") {
        std::vector<double> f(g.vertex_count());
        for (int v = 0; v < g.vertex_count(); ++v) {
            const double x = g.x(v), y = g.y(v);
            auto bump = [](double dx, double dy) { return std::exp(-(dx * dx + dy * dy) / 0.01); };
            f[v] = bump(x - 0.3, y - 0.5) + bump(x - 0.7, y - 0.5);
        }
        CHECK(classify_field(f) == 1);
    }
    SECTION("paraboloid bowl") {
        std::vector<double> f(g.vertex_count());
        for (int v = 0; v < g.vertex_count(); ++v) {
            const double dx = g.x(v) - 0.48, dy = g.y(v) - 0.52;
            f[v] = dx * dx + dy * dy;
        }
        CHECK(classify_field(f) == 1);
    }
}
