#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "uncrit/cases.hpp"
#include "uncrit/prob.hpp"

using namespace uncrit;

namespace {

struct HelicoidFixture {
    BuiltinCase c = make_helicoid_case(121);
    Extraction ex = Extraction::run(c.grid, c.family, {});
    SampleBatch batch = SampleBatch::generate(c.dist, 20000, 313ull);
    int max_idx = ex.components[0].type == CriticalTag::Maximum ? 0 : 1;
};

} // namespace

TEST_CASE("patch probability: universal patch is certain") {
    Grid g = build_line_grid({0, 1, 2});
    LinearFamily fam;
    fam.g = {{0.5, 0.0, 1.0}, {0.0, 0.0, 0.0}};
    auto set = enumerate_patches(fam, g, 1);
    SampleBatch batch = SampleBatch::generate(ParameterDistribution::standard_normal(1), 500, 1);
    auto est = patch_probability(set, 0, batch);
    CHECK(est.value == 1.0);
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("patch probability: halfline and quadrant") {
    SECTION("a > 0 under N(0,1)") {
        Grid g = build_line_grid({0, 1, 2});
        LinearFamily fam;
        fam.g = {{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}}; // right wall at a = 0
        auto set = enumerate_patches(fam, g, 1);
        SampleBatch batch = SampleBatch::generate(ParameterDistribution::standard_normal(1), 10000, 5);
        const int local = set.match(std::vector<double>{1.0});
        auto est = patch_probability(set, local, batch);
        CHECK(est.value == Catch::Approx(0.5).margin(0.01));
    }
    SECTION("quadrant a1 > 0, a2 > 0") {
        Grid g = build_line_grid({0, 1, 2});
        LinearFamily fam;
        fam.g = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
        auto set = enumerate_patches(fam, g, 1);
        SampleBatch batch = SampleBatch::generate(ParameterDistribution::standard_normal(2), 10000, 5);
        const int local = set.match(std::vector<double>{1.0, 1.0});
        auto est = patch_probability(set, local, batch);
        CHECK(est.value == Catch::Approx(0.25).margin(0.01));
    }
}

TEST_CASE("per-vertex partition: patch probabilities sum to one exactly") {
    auto c = make_parabola_sine_case(61, 4.5);
    Extraction ex = Extraction::run(c.grid, c.family, {});
    SampleBatch batch = SampleBatch::generate(c.dist, 5000, 17);
    for (int v : {1, 15, 30, 45, 59}) {
        const auto& set = ex.cells[v];
        // every sample matches exactly one patch, so the counts total N
        std::int64_t hits = 0;
        for (std::size_t p = 0; p < set.patches.size(); ++p) {
            const auto est = patch_probability(set, static_cast<int>(p), batch);
            hits += static_cast<std::int64_t>(est.value * static_cast<double>(batch.size()) + 0.5);
        }
        REQUIRE(hits == batch.size());
    }
}

TEST_CASE("helicoid region probabilities") {
    HelicoidFixture fx;

    SECTION("empty region") {
        auto est = region_probability(fx.ex, fx.max_idx, Region::from_interval(100.0, 101.0),
                                      fx.batch);
        CHECK(est.value == 0.0);
        CHECK_FALSE(est.note.empty());
    }
    SECTION("full period windows are certain") {
        // One window can lose the phase wedge whose manifestations sit on
        // suppressed boundary vertices or an ulp outside the half-open edge:
        // at this coarse resolution a wedge carries h/(2 pi) = 0.025
        for (int k = 0; k < 3; ++k) {
            auto est = region_probability(
                fx.ex, fx.max_idx, Region::from_interval(2 * kPi * k, 2 * kPi * (k + 1)), fx.batch);
            CHECK(est.value >= 0.97);
        }
    }
    SECTION("half period is a coin flip") {
        auto est = region_probability(fx.ex, fx.max_idx, Region::from_interval(0.0, kPi), fx.batch);
        CHECK(est.value == Catch::Approx(0.5).margin(0.02));
    }
    SECTION("determinism: same seed, same estimate bits") {
        auto e1 = region_probability(fx.ex, fx.max_idx, Region::from_interval(0.0, kPi), fx.batch);
        SampleBatch batch2 = SampleBatch::generate(fx.c.dist, 20000, 313ull);
        auto e2 = region_probability(fx.ex, fx.max_idx, Region::from_interval(0.0, kPi), batch2);
        CHECK(e1.value == e2.value);
    }
}

TEST_CASE("joint probabilities and the inclusion-exclusion identity") {
    HelicoidFixture fx;
    const Region d1 = Region::from_interval(0.0, 2 * kPi, "p1");
    const Region d2 = Region::from_interval(2 * kPi, 4 * kPi, "p2");

    SECTION("identical regions reduce to the region probability") {
        auto joint = joint_probability(fx.ex, fx.max_idx, d1, d1, fx.batch);
        auto single = region_probability(fx.ex, fx.max_idx, d1, fx.batch);
        CHECK(joint.joint.value == single.value);
    }
    SECTION("disjoint period windows still co-occur with certainty") {
        auto joint = joint_probability(fx.ex, fx.max_idx, d1, d2, fx.batch);
        CHECK(joint.joint.value >= 0.99);
        CHECK(joint.inclusion_exclusion_residual == 0.0);
    }
    SECTION("aligned half-periods co-occur, anti-aligned ones do not") {
        // [2pi, 3pi) is [0, pi) shifted by one full period: the same phase
        // wedge manifests in both, so the joint equals P(phase in [0, pi))
        auto aligned = joint_probability(fx.ex, fx.max_idx, Region::from_interval(0.0, kPi),
                                         Region::from_interval(2 * kPi, 3 * kPi), fx.batch);
        // wedge truncation at the window edges costs up to h/(2 pi) here
        CHECK(aligned.joint.value == Catch::Approx(0.5).margin(0.035));
        // [3pi, 4pi) collects the complementary phases
        auto anti = joint_probability(fx.ex, fx.max_idx, Region::from_interval(0.0, kPi),
                                      Region::from_interval(3 * kPi, 4 * kPi), fx.batch);
        CHECK(anti.joint.value <= 0.03);
    }
    SECTION("monotonicity on the shared stream") {
        auto small = region_probability(fx.ex, fx.max_idx, Region::from_interval(1.0, 2.0), fx.batch);
        auto large = region_probability(fx.ex, fx.max_idx, Region::from_interval(0.5, 2.5), fx.batch);
        CHECK(small.value <= large.value);
    }
}

TEST_CASE("density fields") {
    SECTION("density times dual area reproduces the vertex probability") {
        HelicoidFixture fx;
        auto f = density_field(fx.ex, fx.max_idx, fx.batch);
        for (int v = 0; v < fx.ex.grid.vertex_count(); ++v)
            REQUIRE(f.density[v] * fx.ex.grid.dual_area[v] ==
                    Catch::Approx(f.vertex_probability[v]).margin(1e-15));
        // per-vertex probabilities over one period sum to ~1
        double total = 0.0;
        for (int v = 0; v <= 40; ++v) total += f.vertex_probability[v];
        CHECK(total == Catch::Approx(1.0).margin(0.02));
    }

    SECTION("parabola-sine density matches the exact values near 0 and 1.4") {
        auto c = make_parabola_sine_case(181, 4.5);
        Extraction ex = Extraction::run(c.grid, c.family, {});
        SampleBatch batch = SampleBatch::generate(c.dist, 200000, 404ull);
        int central = -1;
        for (std::size_t u = 0; u < ex.components.size(); ++u) {
            const auto& comp = ex.components[u];
            if (comp.type != CriticalTag::Minimum) continue;
            for (int v : comp.vertices)
                if (std::abs(ex.grid.x(v)) < 1e-9) central = static_cast<int>(u);
        }
        REQUIRE(central >= 0);
        auto f = density_field(ex, central, batch);
        int v0 = -1, v14 = -1;
        for (int v = 0; v < ex.grid.vertex_count(); ++v) {
            if (std::abs(ex.grid.x(v)) < 1e-9) v0 = v;
            if (std::abs(ex.grid.x(v) - 1.4) < 0.013) v14 = v;
        }
        REQUIRE(v0 >= 0);
        REQUIRE(v14 >= 0);
        CHECK(f.density[v0] == Catch::Approx(0.0798).margin(0.015));
        CHECK(f.density[v14] == Catch::Approx(1.10).margin(0.09));
        CHECK(f.density[v14] > f.density[v0]);
    }
}

TEST_CASE("region membership tie rules partition tilings") {
    Grid g = build_line_grid(linspace(0.0, 1.0, 11));
    const Region left = Region::from_interval(0.0, 0.5);
    const Region right = Region::from_interval(0.5, 1.0);
    for (int v = 0; v < g.vertex_count() - 1; ++v) {
        const int count = left.contains(g, v) + right.contains(g, v);
        REQUIRE(count == 1); // half-open: vertex 5 (x = 0.5) belongs to the right only
    }

    SECTION("polygon membership, half-open on edges") {
        Grid sq = make_unit_square_grid(3, 3);
        Region poly = Region::from_polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
        CHECK(poly.contains(sq, 4));  // center
        Region tri = Region::from_polygon({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
        int inside = 0;
        for (int v = 0; v < sq.vertex_count(); ++v) inside += tri.contains(sq, v);
        CHECK(inside >= 2);
        Region vset = Region::from_vertices({4, 7});
        CHECK(vset.contains(sq, 4));
        CHECK_FALSE(vset.contains(sq, 5));
    }
}

TEST_CASE("small sample counts carry a warning note") {
    HelicoidFixture fx;
    SampleBatch tiny = SampleBatch::generate(fx.c.dist, 50, 1);
    auto est = region_probability(fx.ex, fx.max_idx, Region::from_interval(0.0, kPi), tiny);
    CHECK_FALSE(est.note.empty());
}
