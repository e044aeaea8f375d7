// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0
//
// Times the serial reference loops against their OpenMP twins on
// working-resolution data and prints the speedup per kernel.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "panowarp/kernels.hpp"
#include "panowarp/layout.hpp"
#include "panowarp/tps.hpp"
#include "panowarp/warp.hpp"

using namespace panowarp;

namespace {

double time_ms(int repeats, const std::function<void()>& fn) {
    fn(); // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-22s serial %8.2f ms   openmp %8.2f ms   speedup %.2fx\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main() {
    const int width = 1024;
    const int height = 512;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto grid = tps::ControlGrid::regular(8);
    for (auto& t : grid.target_points) {
        t.x += 0.04 * (unit(rng) - 0.5);
        t.y += 0.04 * (unit(rng) - 0.5);
    }
    const auto coef = tps::solve_coefficients(grid, 0.0);
    const auto maps = layout::reference_layout(width, height);

    std::vector<Vec2> coords(static_cast<size_t>(width) * height);
    report("tps_grid_eval",
           time_ms(3, [&] { kernels::tps_grid_eval_serial(coef, grid, width, height, coords.data()); }),
           time_ms(3, [&] { kernels::tps_grid_eval_parallel(coef, grid, width, height, coords.data()); }));

    const auto basis = tps::grid_basis(grid, 0.0, width / 2, height / 2);
    std::vector<Vec2> half_coords(static_cast<size_t>(width / 2) * (height / 2));
    report("basis_apply",
           time_ms(10, [&] { kernels::basis_apply_serial(basis.phi, grid.target_points.data(), half_coords.data()); }),
           time_ms(10, [&] { kernels::basis_apply_parallel(basis.phi, grid.target_points.data(), half_coords.data()); }));

    std::vector<Vec2> grads(half_coords.size());
    for (auto& g : grads) g = {unit(rng) - 0.5, unit(rng) - 0.5};
    Eigen::MatrixX2d acc;
    report("basis_accumulate",
           time_ms(10, [&] { kernels::basis_accumulate_serial(basis.phi, grads.data(), acc); }),
           time_ms(10, [&] { kernels::basis_accumulate_parallel(basis.phi, grads.data(), acc); }));

    tps::SamplingGrid sg;
    sg.width = width;
    sg.height = height;
    sg.coords = coords;
    Raster warped(width, height, 3);
    report("bilinear",
           time_ms(10, [&] { kernels::bilinear_serial(maps.edge, sg.coords.data(), true, warped); }),
           time_ms(10, [&] { kernels::bilinear_parallel(maps.edge, sg.coords.data(), true, warped); }));

    Raster upstream(width, height, 3);
    for (auto& v : upstream.data) v = unit(rng);
    std::vector<Vec2> coord_grads(sg.coords.size());
    report("bilinear_grad",
           time_ms(10, [&] { kernels::bilinear_grad_serial(maps.edge, sg.coords.data(), upstream, true, coord_grads.data()); }),
           time_ms(10, [&] { kernels::bilinear_grad_parallel(maps.edge, sg.coords.data(), upstream, true, coord_grads.data()); }));

    Raster grad(width, height, 3);
    report("huber_sum",
           time_ms(10, [&] { kernels::huber_sum_serial(warped, maps.edge, 1.0, &grad); }),
           time_ms(10, [&] { kernels::huber_sum_parallel(warped, maps.edge, 1.0, &grad); }));

    report("gaussian_blur",
           time_ms(3, [&] { kernels::gaussian_blur_serial(maps.edge, 2.0); }),
           time_ms(3, [&] { kernels::gaussian_blur_parallel(maps.edge, 2.0); }));

    report("downsample2",
           time_ms(10, [&] { kernels::downsample2_serial(maps.edge); }),
           time_ms(10, [&] { kernels::downsample2_parallel(maps.edge); }));

    return 0;
}
