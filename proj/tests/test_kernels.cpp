// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0
//
// Every OpenMP kernel must be bit-identical to its serial reference,
// whatever the thread count happens to be.

#include <doctest.h>

#include <random>

#include "panowarp/kernels.hpp"
#include "panowarp/tps.hpp"

using namespace panowarp;

namespace {

Raster random_raster(int w, int h, int c, std::mt19937_64& rng) {
    Raster r(w, h, c);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : r.data) v = u(rng);
    return r;
}

std::vector<Vec2> random_coords(size_t n, std::mt19937_64& rng) {
    std::vector<Vec2> coords(n);
    std::uniform_real_distribution<double> u(-0.3, 1.3);
    for (auto& c : coords) c = {u(rng), u(rng)};
    return coords;
}

} // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("tps grid evaluation: serial equals parallel") {
    std::mt19937_64 rng(1);
    auto grid = tps::ControlGrid::regular(5);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (auto& t : grid.target_points) t += {u(rng), u(rng)};
    const auto coef = tps::solve_coefficients(grid, 0.0);

    std::vector<Vec2> a(128 * 64), b(128 * 64);
    kernels::tps_grid_eval_serial(coef, grid, 128, 64, a.data());
    kernels::tps_grid_eval_parallel(coef, grid, 128, 64, b.data());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
    }
}

TEST_CASE("basis kernels: serial equals parallel") {
    std::mt19937_64 rng(2);
    auto grid = tps::ControlGrid::regular(4);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (auto& t : grid.target_points) t += {u(rng), u(rng)};

    const auto basis_s = tps::grid_basis(grid, 0.0, 96, 48, Exec::serial);
    const auto basis_p = tps::grid_basis(grid, 0.0, 96, 48, Exec::parallel);
    CHECK(basis_s.phi == basis_p.phi);

    const auto out_s = basis_s.apply(grid.target_points, Exec::serial);
    const auto out_p = basis_s.apply(grid.target_points, Exec::parallel);
    for (size_t i = 0; i < out_s.size(); ++i) {
        CHECK(out_s[i].x == out_p[i].x);
        CHECK(out_s[i].y == out_p[i].y);
    }

    const auto grads = random_coords(out_s.size(), rng);
    Eigen::MatrixX2d acc_s, acc_p;
    kernels::basis_accumulate_serial(basis_s.phi, grads.data(), acc_s);
    kernels::basis_accumulate_parallel(basis_s.phi, grads.data(), acc_p);
    CHECK(acc_s == acc_p);
}

TEST_CASE("sampling kernels: serial equals parallel") {
    std::mt19937_64 rng(3);
    for (int channels : {1, 3}) {
        const Raster src = random_raster(64, 32, channels, rng);
        const auto coords = random_coords(48 * 24, rng);
        for (bool wrap : {false, true}) {
            Raster out_s(48, 24, channels), out_p(48, 24, channels);
            kernels::bilinear_serial(src, coords.data(), wrap, out_s);
            kernels::bilinear_parallel(src, coords.data(), wrap, out_p);
            CHECK(out_s.data == out_p.data);

            const Raster upstream = random_raster(48, 24, channels, rng);
            std::vector<Vec2> g_s(coords.size()), g_p(coords.size());
            kernels::bilinear_grad_serial(src, coords.data(), upstream, wrap, g_s.data());
            kernels::bilinear_grad_parallel(src, coords.data(), upstream, wrap, g_p.data());
            for (size_t i = 0; i < g_s.size(); ++i) {
                CHECK(g_s[i].x == g_p[i].x);
                CHECK(g_s[i].y == g_p[i].y);
            }
        }
    }
}

TEST_CASE("reduction kernels: serial equals parallel") {
    std::mt19937_64 rng(4);
    // sizes straddle the reduction block boundary
    for (int w : {33, 128}) {
        const Raster a = random_raster(w, 129, 3, rng);
        const Raster b = random_raster(w, 129, 3, rng);
        Raster grad_s(w, 129, 3), grad_p(w, 129, 3);
        const double l_s = kernels::huber_sum_serial(a, b, 1.0, &grad_s);
        const double l_p = kernels::huber_sum_parallel(a, b, 1.0, &grad_p);
        CHECK(l_s == l_p);
        CHECK(grad_s.data == grad_p.data);
    }
}

TEST_CASE("blur and downsample: serial equals parallel") {
    std::mt19937_64 rng(5);
    const Raster src = random_raster(64, 32, 3, rng);
    const Raster blur_s = kernels::gaussian_blur_serial(src, 1.7);
    const Raster blur_p = kernels::gaussian_blur_parallel(src, 1.7);
    CHECK(blur_s.data == blur_p.data);

    const Raster down_s = kernels::downsample2_serial(src);
    const Raster down_p = kernels::downsample2_parallel(src);
    CHECK(down_s.data == down_p.data);
    CHECK(down_s.width == 32);
    CHECK(down_s.height == 16);
}

TEST_CASE("blur preserves mass and constants") {
    std::mt19937_64 rng(6);
    Raster flat(40, 20, 1);
    for (auto& v : flat.data) v = 0.625;
    const Raster blurred = kernels::gaussian_blur(flat, 2.0, Exec::parallel);
    for (double v : blurred.data) CHECK(v == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_SUITE_END();
