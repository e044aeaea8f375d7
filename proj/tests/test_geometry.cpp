// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "panowarp/geometry.hpp"

using namespace panowarp;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("shoelace area and orientation") {
    const Polygon square{{1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
    CHECK(polygon_area_signed(square) == doctest::Approx(4.0));
    Polygon reversed(square.rbegin(), square.rend());
    CHECK(polygon_area_signed(reversed) == doctest::Approx(-4.0));
}

TEST_CASE("simplicity detects crossings") {
    CHECK(polygon_is_simple({{0, 0}, {2, 0}, {2, 2}, {0, 2}}));
    CHECK_FALSE(polygon_is_simple({{0, 0}, {2, 2}, {2, 0}, {0, 2}})); // bowtie
    CHECK_FALSE(polygon_is_simple({{0, 0}, {0, 0}, {1, 1}}));         // degenerate edge
}

TEST_CASE("point in polygon and boundary distance") {
    const Polygon lshape{{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 4}, {0, 4}};
    CHECK(point_in_polygon(lshape, {1, 1}));
    CHECK(point_in_polygon(lshape, {3, 1}));
    CHECK_FALSE(point_in_polygon(lshape, {3, 3}));
    CHECK(distance_to_boundary(lshape, {1, 1}) == doctest::Approx(1.0));
}

TEST_CASE("kernel membership") {
    // the kernel of this L-shape is the {x < 2, y < 2} quadrant of it
    const Polygon lshape{{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 4}, {0, 4}};
    CHECK(point_in_kernel(lshape, {1, 1}));
    CHECK(point_in_kernel(lshape, {1.5, 1.5}, 0.2));
    CHECK_FALSE(point_in_kernel(lshape, {3.5, 1.9})); // leg hides the far wall
    CHECK_FALSE(point_in_kernel(lshape, {0.5, 3.5}));
}

TEST_CASE("ear clipping preserves area") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        // random rectilinear staircase hexagon
        const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        const Polygon poly{{0, 0}, {a + b, 0}, {a + b, c}, {a, c}, {a, c + d}, {0, c + d}};
        const auto tris = triangulate(poly);
        CHECK(tris.size() == poly.size() - 2);
        double tri_area = 0.0;
        for (const auto& t : tris) {
            tri_area += polygon_area({t[0], t[1], t[2]});
        }
        CHECK(tri_area == doctest::Approx(polygon_area(poly)).epsilon(1e-12));
    }
}

TEST_CASE("convex clip basics") {
    const Polygon unit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Polygon shifted{{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}};
    const Polygon clipped = clip_convex(unit, shifted);
    CHECK(polygon_area(clipped) == doctest::Approx(0.5));
    CHECK(clip_convex(unit, {{5, 5}, {6, 5}, {6, 6}, {5, 6}}).empty());
}

TEST_SUITE_END();
