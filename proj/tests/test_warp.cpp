// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "panowarp/warp.hpp"

using namespace panowarp;

namespace {

tps::SamplingGrid identity_grid(int w, int h) {
    tps::SamplingGrid g;
    g.width = w;
    g.height = h;
    g.coords.resize(static_cast<size_t>(w) * h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            g.coords[static_cast<size_t>(r) * w + c] = {(c + 0.5) / w, (r + 0.5) / h};
        }
    }
    return g;
}

Raster random_raster(int w, int h, int c, uint64_t seed) {
    Raster r(w, h, c);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : r.data) v = u(rng);
    return r;
}

} // namespace

TEST_SUITE_BEGIN("warp");

TEST_CASE("identity grid reproduces the input") {
    for (int w : {64, 100}) { // power of two and not
        const Raster src = random_raster(w, 30, 3, 7);
        const Raster out = warp::sample_bilinear(src, identity_grid(w, 30), true);
        for (size_t i = 0; i < src.data.size(); ++i) {
            CHECK(std::abs(out.data[i] - src.data[i]) <= 1e-12);
        }
    }
}

TEST_CASE("constant input stays constant under any grid") {
    Raster src(32, 16, 1);
    for (auto& v : src.data) v = 0.375;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    auto grid = identity_grid(24, 12);
    for (auto& c : grid.coords) c = {u(rng), u(rng)};
    const Raster out = warp::sample_bilinear(src, grid, true);
    for (double v : out.data) CHECK(v == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("one-pixel shift permutes columns and wraps the seam") {
    Raster src(4, 4, 1);
    src.at(1, 0) = 1.0; // single white pixel in column 0
    auto grid = identity_grid(4, 4);
    for (auto& c : grid.coords) c.x -= 1.0 / 4.0; // content moves one column right
    const Raster out = warp::sample_bilinear(src, grid, true);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const double expect = (r == 1 && c == 1) ? 1.0 : 0.0;
            CHECK(out.at(r, c) == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    // shifting the other way moves the white pixel across the seam
    auto grid2 = identity_grid(4, 4);
    for (auto& c : grid2.coords) c.x += 1.0 / 4.0;
    const Raster out2 = warp::sample_bilinear(src, grid2, true);
    CHECK(out2.at(1, 3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("horizontal wrap consistency under a full-width shift") {
    const Raster src = random_raster(32, 16, 3, 13);
    // dyadic coordinates stay exact under +1.0, so outputs match bitwise
    std::mt19937_64 rng(17);
    auto grid = identity_grid(32, 16);
    for (auto& c : grid.coords) {
        c = {(rng() % 4096) / 4096.0, (rng() % 4096) / 4096.0};
    }
    auto shifted = grid;
    for (auto& c : shifted.coords) c.x += 1.0;
    const Raster a = warp::sample_bilinear(src, grid, true);
    const Raster b = warp::sample_bilinear(src, shifted, true);
    CHECK(a.data == b.data);

    // arbitrary coordinates survive to within rounding
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& c : grid.coords) c = {u(rng), u(rng)};
    shifted = grid;
    for (auto& c : shifted.coords) c.x += 1.0;
    const Raster a2 = warp::sample_bilinear(src, grid, true);
    const Raster b2 = warp::sample_bilinear(src, shifted, true);
    for (size_t i = 0; i < a2.data.size(); ++i) {
        CHECK(std::abs(a2.data[i] - b2.data[i]) < 1e-11);
    }
}

TEST_CASE("unwrapped out-of-range columns read zero, rows clamp") {
    Raster src(4, 2, 1);
    for (auto& v : src.data) v = 1.0;
    auto grid = identity_grid(4, 2);
    grid.coords[0] = {-0.5, 0.25};  // far left, outside
    grid.coords[1] = {1.5, 0.25};   // far right, outside
    grid.coords[2] = {0.5, -2.0};   // above: clamps to row 0
    const Raster out = warp::sample_bilinear(src, grid, false);
    CHECK(out.at(0, 0) == 0.0);
    CHECK(out.at(0, 1) == 0.0);
    CHECK(out.at(0, 2) == doctest::Approx(1.0));
}

TEST_CASE("values stay inside [0,1]") {
    const Raster src = random_raster(16, 8, 3, 19);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    auto grid = identity_grid(20, 10);
    for (auto& c : grid.coords) c = {u(rng), u(rng)};
    for (bool wrap : {false, true}) {
        const Raster out = warp::sample_bilinear(src, grid, wrap);
        for (double v : out.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("gradient of a constant image is zero") {
    Raster src(16, 8, 1);
    for (auto& v : src.data) v = 0.8;
    auto grid = identity_grid(16, 8);
    Raster upstream(16, 8, 1);
    for (auto& v : upstream.data) v = 1.0;
    const auto grads = warp::sample_gradient(src, grid, upstream, true);
    for (const Vec2& g : grads) {
        CHECK(g.x == 0.0);
        CHECK(g.y == 0.0);
    }
}

TEST_CASE("linear ramp has exact gradient") {
    const int w = 32, h = 8;
    Raster src(w, h, 1);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) src.at(r, c) = static_cast<double>(c) / w;
    }
    tps::SamplingGrid grid;
    grid.width = 1;
    grid.height = 1;
    grid.coords = {{0.4, 0.5}}; // interior, away from breakpoints and clamps
    Raster upstream(1, 1, 1);
    upstream.at(0, 0) = 1.0;
    const auto grads = warp::sample_gradient(src, grid, upstream, false);
    // value(x) = x - 1/(2w), so the normalized-x derivative is exactly 1
    CHECK(grads[0].x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grads[0].y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gradients match central finite differences") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> frac(0.1, 0.9);
    for (int channels : {1, 3}) {
        const Raster src = random_raster(16, 8, channels, 31 + channels);
        const Raster upstream = random_raster(10, 10, channels, 37 + channels);

        tps::SamplingGrid grid;
        grid.width = 10;
        grid.height = 10;
        for (int i = 0; i < 100; ++i) {
            // keep the fractional part away from bilinear breakpoints
            const double px = static_cast<double>(rng() % 16) + frac(rng);
            const double py = 1.0 + static_cast<double>(rng() % 5) + frac(rng);
            grid.coords.push_back({(px + 0.5) / 16.0, (py + 0.5) / 8.0});
        }
        const auto analytic = warp::sample_gradient(src, grid, upstream, true);

        double worst = 0.0;
        for (size_t p = 0; p < grid.coords.size(); ++p) {
            auto value_at = [&](Vec2 coord) {
                auto g = grid;
                g.coords[p] = coord;
                const Raster out = warp::sample_bilinear(src, g, true);
                double acc = 0.0;
                for (size_t i = 0; i < out.data.size(); ++i) {
                    acc += out.data[i] * upstream.data[i];
                }
                return acc;
            };
            const Vec2 c = grid.coords[p];
            const double step = 1e-4;
            const double fx =
                (value_at({c.x + step, c.y}) - value_at({c.x - step, c.y})) / (2 * step);
            const double fy =
                (value_at({c.x, c.y + step}) - value_at({c.x, c.y - step})) / (2 * step);
            const double scale = std::max({1e-6, std::abs(fx), std::abs(fy)});
            worst = std::max(worst, std::abs(analytic[p].x - fx) / scale);
            worst = std::max(worst, std::abs(analytic[p].y - fy) / scale);
        }
        CHECK(worst < 1e-4);
    }
}

TEST_SUITE_END();
