#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "uncrit/cases.hpp"
#include "uncrit/mesh.hpp"

using namespace uncrit;

namespace {

void check_neighbor_symmetry(const Grid& g) {
    for (int i = 0; i < g.vertex_count(); ++i)
        for (int j : g.neighbors[i]) {
            const auto& nj = g.neighbors[j];
            REQUIRE(std::binary_search(nj.begin(), nj.end(), i));
        }
}

} // namespace

TEST_CASE("line grid: smallest interior-vertex path") {
    Grid g = build_line_grid({0, 1, 2});
    CHECK(g.dim == 1);
    CHECK(g.vertex_count() == 3);
    CHECK(g.segments.size() == 2);
    CHECK(g.neighbors[1] == std::vector<int>{0, 2});
    CHECK(g.boundary[0]);
    CHECK_FALSE(g.boundary[1]);
    CHECK(g.boundary[2]);
    check_neighbor_symmetry(g);
}

TEST_CASE("line grid: two vertices") {
    Grid g = build_line_grid({0, 1});
    CHECK(g.neighbors[0] == std::vector<int>{1});
    CHECK(g.boundary[0]);
    CHECK(g.boundary[1]);
}

TEST_CASE("line grid: uniform dual cells on [0, 6pi]") {
    Grid g = build_line_grid(linspace(0.0, 6.0 * kPi, 601));
    const double h = 6.0 * kPi / 600.0;
    for (int v = 1; v < 600; ++v) CHECK(g.dual_area[v] == Catch::Approx(h).epsilon(1e-12));
    double sum = 0;
    for (double a : g.dual_area) sum += a;
    CHECK(sum == Catch::Approx(g.total_measure).epsilon(1e-12));
}

TEST_CASE("line grid rejects non-monotone input naming the index") {
    CHECK_THROWS_WITH(build_line_grid({0, 1, 1}), Catch::Matchers::ContainsSubstring("index 2"));
    CHECK_THROWS_AS(build_line_grid({0, -1}), parse_error);
    CHECK_THROWS_AS(build_line_grid({0}), parse_error);
}

TEST_CASE("single triangle: all boundary, one-edge links") {
    Grid g = build_triangle_grid({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    CHECK(g.dim == 2);
    for (int v = 0; v < 3; ++v) {
        CHECK(g.boundary[v]);
        CHECK(g.links[v].ring.size() == 2);
        CHECK_FALSE(g.links[v].closed);
    }
    CHECK(g.total_measure == Catch::Approx(0.5));
    CHECK(g.dual_area[0] == Catch::Approx(0.5 / 3.0));
}

TEST_CASE("3x3 structured grid: center vertex has a closed 6-ring") {
    Grid g = make_unit_square_grid(3, 3);
    const int center = 4;
    CHECK_FALSE(g.boundary[center]);
    const Link& lk = g.link(center);
    CHECK(lk.closed);
    CHECK(lk.ring.size() == 6);
    CHECK(lk.ring.front() == 0); // lowest-index neighbor first
    check_neighbor_symmetry(g);
}

TEST_CASE("dual areas partition the mesh area") {
    Grid g = make_unit_square_grid(7, 5);
    double sum = 0;
    for (double a : g.dual_area) sum += a;
    CHECK(sum == Catch::Approx(g.total_measure).epsilon(1e-12));
    CHECK(g.total_measure == Catch::Approx(1.0).epsilon(1e-12));

    SECTION("dual-cell polygons enclose exactly the dual areas") {
        for (int v : {0, 3, 8, 16, 24}) {
            auto poly = dual_cell_polygon(g, v);
            double area = 0;
            for (std::size_t i = 0; i < poly.size(); ++i) {
                const auto& p = poly[i];
                const auto& q = poly[(i + 1) % poly.size()];
                area += p[0] * q[1] - q[0] * p[1];
            }
            area *= 0.5;
            CHECK(area == Catch::Approx(g.dual_area[v]).epsilon(1e-12));
        }
    }
}

TEST_CASE("ring ordering: consecutive link vertices share a triangle with the center") {
    Grid g = make_unit_square_grid(5, 4);
    for (int v = 0; v < g.vertex_count(); ++v) {
        const Link& lk = g.links[v];
        const std::size_t r = lk.ring.size();
        for (std::size_t i = 0; i + 1 < r || (lk.closed && i < r); ++i) {
            const int a = lk.ring[i], b = lk.ring[(i + 1) % r];
            bool found = false;
            for (const auto& t : g.triangles) {
                bool hv = false, ha = false, hb = false;
                for (int k : t) {
                    hv |= k == v;
                    ha |= k == a;
                    hb |= k == b;
                }
                if (hv && ha && hb) { found = true; break; }
            }
            REQUIRE(found);
        }
    }
}

TEST_CASE("triangle grid rejections") {
    SECTION("non-manifold edge is named") {
        CHECK_THROWS_WITH(build_triangle_grid({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {-1, -1}},
                                              {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}),
                          Catch::Matchers::ContainsSubstring("non-manifold edge (0,1)"));
    }
    SECTION("degenerate triangle") {
        CHECK_THROWS_AS(build_triangle_grid({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), parse_error);
    }
    SECTION("out-of-range index") {
        CHECK_THROWS_AS(build_triangle_grid({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 3}}), parse_error);
    }
}

TEST_CASE("1D links") {
    Grid g = build_line_grid(linspace(0, 1, 5));
    CHECK(g.link(2).ring == std::vector<int>{1, 3});
    CHECK_FALSE(g.link(2).closed);
    CHECK(g.link(0).ring == std::vector<int>{1});
    CHECK_THROWS_AS(g.link(7), config_error);
}
