// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "panowarp/errors.hpp"
#include "panowarp/metrics.hpp"

using namespace panowarp;

namespace {

layout::RoomLayout prism(const Polygon& floor, double ceiling) {
    layout::RoomLayout room;
    room.floor_polygon = floor;
    room.camera_height = 1.6;
    room.ceiling_height = ceiling;
    return room;
}

// random rectilinear hexagon or rectangle around the origin
Polygon random_manhattan(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.8, 3.5);
    std::uniform_real_distribution<double> frac(0.2, 0.9);
    const double w2 = u(rng), d2 = u(rng);
    if (rng() % 2 == 0) {
        return {{w2, -d2}, {w2, d2}, {-w2, d2}, {-w2, -d2}};
    }
    const double a = frac(rng) * w2; // notch sizes, inside the quadrant
    const double b = frac(rng) * d2;
    return {{w2, -d2}, {w2, d2 - b}, {w2 - a, d2 - b}, {w2 - a, d2}, {-w2, d2}, {-w2, -d2}};
}

} // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("polygon intersection basics") {
    const Polygon unit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(metrics::polygon_intersection_area(unit, unit) == doctest::Approx(1.0));

    const Polygon far{{5, 5}, {6, 5}, {6, 6}, {5, 6}};
    CHECK(metrics::polygon_intersection_area(unit, far) == doctest::Approx(0.0));

    Polygon shifted = unit;
    for (auto& v : shifted) v.x += 0.5;
    CHECK(metrics::polygon_intersection_area(unit, shifted) == doctest::Approx(0.5));
    CHECK(metrics::polygon_intersection_area(shifted, unit) == doctest::Approx(0.5));

    const Polygon bowtie{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
    CHECK_THROWS_AS(metrics::polygon_intersection_area(unit, bowtie), std::invalid_argument);
}

TEST_CASE("intersection area matches a Monte-Carlo oracle") {
    const Polygon unit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    Polygon shifted = unit;
    for (auto& v : shifted) v.x += 0.5;
    const double mc = oracle::mc_intersection_area(unit, shifted, 1000000, 99);
    CHECK(std::abs(mc - 0.5) < 2e-3);

    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 5; ++trial) {
        const Polygon a = random_manhattan(rng);
        const Polygon b = random_manhattan(rng);
        const double exact = metrics::polygon_intersection_area(a, b);
        const double approx = oracle::mc_intersection_area(a, b, 400000, 1000 + trial);
        CHECK(std::abs(exact - approx) < 0.02 * std::max(1.0, exact));
    }
}

TEST_CASE("2d iou basics and raster oracle") {
    const Polygon big{{2, -2}, {2, 2}, {-2, 2}, {-2, -2}};
    const Polygon small{{1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
    CHECK(metrics::iou_2d(prism(big, 3), prism(big, 3)) == doctest::Approx(1.0));
    CHECK(metrics::iou_2d(prism(small, 3), prism(big, 3)) == doctest::Approx(0.25));

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = prism(random_manhattan(rng), 3);
        const auto b = prism(random_manhattan(rng), 3);
        const double ours = metrics::iou_2d(a, b);
        const double ref = oracle::raster_iou_2d(a.floor_polygon, b.floor_polygon, 2048);
        CHECK(std::abs(ours - ref) < 5e-3);
    }
}

TEST_CASE("3d iou: nested heights, box closed form, voxel oracle") {
    const Polygon floor{{2, -3}, {2, 3}, {-2, 3}, {-2, -3}};
    CHECK(metrics::iou_3d(prism(floor, 2.8), prism(floor, 3.0)) ==
          doctest::Approx(2.8 / 3.0));

    // axis-aligned closed form
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double ax0 = -u(rng), ax1 = u(rng), az0 = -u(rng), az1 = u(rng);
        const double bx0 = -u(rng) + 0.5, bx1 = u(rng) - 0.3, bz0 = -u(rng), bz1 = u(rng);
        const double ha = 2.0 + u(rng) / 4, hb = 2.0 + u(rng) / 4;
        const auto a = prism({{ax1, az0}, {ax1, az1}, {ax0, az1}, {ax0, az0}}, ha);
        const auto b = prism({{bx1, bz0}, {bx1, bz1}, {bx0, bz1}, {bx0, bz0}}, hb);
        const double ox = std::max(0.0, std::min(ax1, bx1) - std::max(ax0, bx0));
        const double oz = std::max(0.0, std::min(az1, bz1) - std::max(az0, bz0));
        const double inter = ox * oz * std::min(ha, hb);
        const double va = (ax1 - ax0) * (az1 - az0) * ha;
        const double vb = (bx1 - bx0) * (bz1 - bz0) * hb;
        const double expect = inter / (va + vb - inter);
        CHECK(metrics::iou_3d(a, b) == doctest::Approx(expect).epsilon(1e-12));
    }

    for (int trial = 0; trial < 5; ++trial) {
        const auto a = prism(random_manhattan(rng), 2.4 + 0.2 * (trial % 3));
        const auto b = prism(random_manhattan(rng), 2.8);
        const double ours = metrics::iou_3d(a, b);
        const double ref = oracle::voxel_iou_3d(a.floor_polygon, a.ceiling_height,
                                                b.floor_polygon, b.ceiling_height, 0.01);
        CHECK(std::abs(ours - ref) < 1e-2);
    }
}

TEST_CASE("corner error: exact cases and cyclic alignment") {
    layout::CornerAnnotation gt;
    gt.corners = {{100, 50, 400}, {300, 60, 380}, {600, 55, 390}, {900, 52, 410}};

    CHECK(metrics::corner_error(gt, gt, 1024, 512) == doctest::Approx(0.0));

    // single displaced corner pair: 3-4-5 triangle
    layout::CornerAnnotation one_gt, one_pred;
    one_gt.corners = {{100, 50, 400}};
    one_pred.corners = {{103, 54, 404}};
    const double diag = std::sqrt(1024.0 * 1024.0 + 512.0 * 512.0);
    CHECK(metrics::corner_error(one_pred, one_gt, 1024, 512) ==
          doctest::Approx(5.0 / diag * 100.0));

    // rotated sequence realigns to zero
    layout::CornerAnnotation rotated = gt;
    std::rotate(rotated.corners.begin(), rotated.corners.begin() + 2, rotated.corners.end());
    CHECK(metrics::corner_error(rotated, gt, 1024, 512) == doctest::Approx(0.0));

    layout::CornerAnnotation fewer = gt;
    fewer.corners.pop_back();
    CHECK_THROWS_AS(metrics::corner_error(fewer, gt, 1024, 512), DataError);
}

TEST_CASE("corner error respects the panorama seam") {
    layout::CornerAnnotation gt, pred;
    gt.corners = {{1023.0, 50, 400}};
    pred.corners = {{1.0, 50, 400}};
    const double diag = std::sqrt(1024.0 * 1024.0 + 512.0 * 512.0);
    CHECK(metrics::corner_error(pred, gt, 1024, 512) == doctest::Approx(2.0 / diag * 100.0));
}

TEST_CASE("pixel error counts class disagreement") {
    using metrics::RegionClass;
    const std::vector<RegionClass> gt(1000, RegionClass::wall);
    CHECK(metrics::pixel_error(gt, gt) == doctest::Approx(0.0));

    // 60% wall ground truth against an all-wall prediction
    std::vector<RegionClass> mixed(1000);
    for (size_t i = 0; i < mixed.size(); ++i) {
        mixed[i] = i < 600 ? RegionClass::wall
                           : (i < 800 ? RegionClass::ceiling : RegionClass::floor);
    }
    CHECK(metrics::pixel_error(gt, mixed) == doctest::Approx(40.0));

    std::vector<RegionClass> shorter(999, RegionClass::wall);
    CHECK_THROWS_AS(metrics::pixel_error(shorter, gt), DataError);
}

TEST_CASE("classified edge maps: a 2-row boundary shift costs 2W pixels") {
    const int w = 1024, h = 512;
    Raster gt_edge(w, h, 3);
    Raster pred_edge(w, h, 3);
    for (int c = 0; c < w; ++c) {
        gt_edge.at(100, c, 1) = 1.0;   // wall-ceiling boundary
        gt_edge.at(400, c, 2) = 1.0;   // wall-floor boundary
        pred_edge.at(102, c, 1) = 1.0; // ceiling boundary two rows lower
        pred_edge.at(400, c, 2) = 1.0;
    }
    const auto gt_cls = metrics::classify_regions(gt_edge);
    const auto pred_cls = metrics::classify_regions(pred_edge);
    const double expected = 2.0 * w / (static_cast<double>(w) * h) * 100.0;
    CHECK(metrics::pixel_error(pred_cls, gt_cls) == doctest::Approx(expected));
}

TEST_CASE("metrics are translation invariant") {
    std::mt19937_64 rng(31);
    const Polygon a = random_manhattan(rng);
    const Polygon b = random_manhattan(rng);
    const Vec2 offset{1.7, -2.3};
    Polygon a2 = a, b2 = b;
    for (auto& v : a2) v += offset;
    for (auto& v : b2) v += offset;
    CHECK(std::abs(metrics::iou_2d(prism(a, 3), prism(b, 3)) -
                   metrics::iou_2d(prism(a2, 3), prism(b2, 3))) < 1e-9);
    CHECK(std::abs(metrics::iou_3d(prism(a, 2.5), prism(b, 3)) -
                   metrics::iou_3d(prism(a2, 2.5), prism(b2, 3))) < 1e-9);
}

TEST_CASE("report JSON round trip") {
    metrics::Report r{0.93, 0.95, 0.41, 1.7};
    const auto back = metrics::report_from_json_string(metrics::to_json_string(r));
    CHECK(back.iou3d == r.iou3d);
    CHECK(back.iou2d == r.iou2d);
    CHECK(back.ce_pct == r.ce_pct);
    CHECK(back.pe_pct == r.pe_pct);
}

TEST_SUITE_END();
