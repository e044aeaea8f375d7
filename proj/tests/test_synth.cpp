// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "panowarp/errors.hpp"
#include "panowarp/synth.hpp"

using namespace panowarp;

namespace {

// two-sided Kolmogorov-Smirnov statistic against U[lo, hi]
double ks_statistic(std::vector<double> values, double lo, double hi) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        const double cdf = (values[i] - lo) / (hi - lo);
        d = std::max(d, std::abs((i + 1) / n - cdf));
        d = std::max(d, std::abs(cdf - i / n));
    }
    return d;
}

struct Extent {
    double width, depth;
};

Extent bbox_extent(const Polygon& poly) {
    double min_x = 1e9, max_x = -1e9, min_z = 1e9, max_z = -1e9;
    for (const Vec2& v : poly) {
        min_x = std::min(min_x, v.x);
        max_x = std::max(max_x, v.x);
        min_z = std::min(min_z, v.y);
        max_z = std::max(max_z, v.y);
    }
    return {max_x - min_x, max_z - min_z};
}

} // namespace

TEST_SUITE_BEGIN("synth");

TEST_CASE("generation is deterministic per seed") {
    synth::CorpusSpec spec;
    spec.count = 10;
    spec.seed = 7;
    spec.width = 256;
    spec.height = 128;
    const auto a = synth::generate(spec);
    const auto b = synth::generate(spec);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].room.floor_polygon.size() == b[i].room.floor_polygon.size());
        for (size_t k = 0; k < a[i].room.floor_polygon.size(); ++k) {
            CHECK(a[i].room.floor_polygon[k].x == b[i].room.floor_polygon[k].x);
            CHECK(a[i].room.floor_polygon[k].y == b[i].room.floor_polygon[k].y);
        }
        CHECK(a[i].room.ceiling_height == b[i].room.ceiling_height);
        CHECK(a[i].maps.corner.data == b[i].maps.corner.data);
    }

    synth::CorpusSpec other = spec;
    other.seed = 8;
    const auto c = synth::generate(other);
    bool any_different = false;
    for (size_t i = 0; i < a.size() && !any_different; ++i) {
        any_different = a[i].room.floor_polygon != c[i].room.floor_polygon;
    }
    CHECK(any_different);
}

TEST_CASE("cuboid corpus has exactly 4 corner columns per room") {
    synth::CorpusSpec spec;
    spec.count = 12;
    spec.seed = 3;
    spec.width = 256;
    spec.height = 128;
    for (const auto& sample : synth::generate(spec)) {
        CHECK(sample.corners.corners.size() == 4);
        CHECK(sample.room.floor_polygon.size() == 4);
        sample.room.validate();
    }
}

TEST_CASE("manhattan six-corner rooms audit clean") {
    synth::CorpusSpec spec;
    spec.kind = synth::CorpusSpec::Kind::manhattan;
    spec.min_corners = 6;
    spec.max_corners = 6;
    spec.count = 12;
    spec.seed = 11;
    spec.width = 256;
    spec.height = 128;
    for (int i = 0; i < spec.count; ++i) {
        const auto room = synth::generate_layout(spec, i);
        CHECK(room.floor_polygon.size() == 6);
        room.validate();
        CHECK(oracle::polygon_audit(room.floor_polygon, true));
    }
}

TEST_CASE("manhattan corner counts stay within the requested range") {
    synth::CorpusSpec spec;
    spec.kind = synth::CorpusSpec::Kind::manhattan;
    spec.min_corners = 6;
    spec.max_corners = 10;
    spec.count = 40;
    spec.seed = 13;
    bool saw_low = false, saw_high = false;
    for (int i = 0; i < spec.count; ++i) {
        const auto room = synth::generate_layout(spec, i);
        const size_t n = room.floor_polygon.size();
        CHECK(n >= 6);
        CHECK(n <= 10);
        CHECK(n % 2 == 0);
        saw_low = saw_low || n == 6;
        saw_high = saw_high || n == 10;
        CHECK(oracle::polygon_audit(room.floor_polygon, true));
    }
    CHECK(saw_low);
    CHECK(saw_high);
}

TEST_CASE("corpus round-trips through map recovery within 2 cm") {
    synth::CorpusSpec spec;
    spec.count = 6;
    spec.seed = 17;
    for (const auto& sample : synth::generate(spec)) {
        const auto recovered = layout::maps_to_layout(sample.maps, 1.6);
        REQUIRE(recovered.floor_polygon.size() == sample.room.floor_polygon.size());
        CHECK(std::abs(recovered.ceiling_height - sample.room.ceiling_height) < 0.02);
        for (const Vec2& v : sample.room.floor_polygon) {
            double best = 1e9;
            for (const Vec2& r : recovered.floor_polygon) {
                best = std::min(best, (v - r).norm());
            }
            CHECK(best < 0.02);
        }
    }
}

TEST_CASE("room dimensions cover their ranges uniformly") {
    synth::CorpusSpec spec;
    spec.count = 1000;
    spec.seed = 23;
    std::vector<double> widths, depths, ceilings;
    for (int i = 0; i < spec.count; ++i) {
        const auto room = synth::generate_layout(spec, i);
        const auto ext = bbox_extent(room.floor_polygon);
        widths.push_back(ext.width);
        depths.push_back(ext.depth);
        ceilings.push_back(room.ceiling_height);
    }
    // KS critical value at the 1% level for n = 1000
    const double critical = 1.63 / std::sqrt(1000.0);
    CHECK(ks_statistic(widths, spec.min_size, spec.max_size) < critical);
    CHECK(ks_statistic(depths, spec.min_size, spec.max_size) < critical);
    CHECK(ks_statistic(ceilings, spec.min_ceiling, spec.max_ceiling) < critical);
}

TEST_CASE("infeasible specs report a bounded-rejection failure") {
    synth::CorpusSpec spec;
    spec.kind = synth::CorpusSpec::Kind::manhattan;
    spec.min_corners = 6;
    spec.max_corners = 6;
    spec.min_size = 1.2; // too small to host a notch with 0.5 m legs
    spec.max_size = 1.3;
    CHECK_THROWS_AS(synth::generate_layout(spec, 0), DataError);
}

TEST_SUITE_END();
