// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "panowarp/errors.hpp"
#include "panowarp/fit.hpp"
#include "panowarp/layout.hpp"
#include "panowarp/metrics.hpp"
#include "panowarp/warp.hpp"

using namespace panowarp;

namespace {

Raster single_pixel(double value) {
    Raster r(1, 1, 1);
    r.at(0, 0) = value;
    return r;
}

LayoutMaps warp_by_grid(const LayoutMaps& maps, const tps::ControlGrid& grid) {
    const auto coef = tps::solve_coefficients(grid, 0.0);
    const auto sg = tps::make_sampling_grid(coef, grid, maps.edge.width, maps.edge.height);
    LayoutMaps out;
    out.edge = warp::sample_bilinear(maps.edge, sg, true);
    out.corner = warp::sample_bilinear(maps.corner, sg, true);
    return out;
}

tps::ControlGrid displaced_grid(int n_side, double amplitude, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    auto grid = tps::ControlGrid::regular(n_side);
    for (auto& t : grid.target_points) {
        t.x += u(rng);
        t.y += u(rng);
    }
    return grid;
}

} // namespace

TEST_SUITE_BEGIN("fit");

TEST_CASE("huber unit values") {
    CHECK(fit::huber_loss(single_pixel(0.7), single_pixel(0.7), 1.0) == 0.0);
    CHECK(fit::huber_loss(single_pixel(0.5), single_pixel(0.0), 1.0) ==
          doctest::Approx(0.125).epsilon(1e-15));
    // |e| = 2 is past the threshold: delta * (|e| - delta/2)
    Raster two(1, 1, 1);
    two.at(0, 0) = 2.0;
    CHECK(fit::huber_loss(two, single_pixel(0.0), 1.0) == doctest::Approx(1.5).epsilon(1e-15));

    Raster grad(1, 1, 1);
    fit::huber_loss(two, single_pixel(0.0), 1.0, &grad);
    CHECK(grad.at(0, 0) == doctest::Approx(1.0)); // clipped to delta
    fit::huber_loss(single_pixel(0.5), single_pixel(0.0), 1.0, &grad);
    CHECK(grad.at(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("huber mean reduction divides by element count") {
    Raster pred(4, 2, 1), gt(4, 2, 1);
    pred.at(0, 0) = 0.5;
    CHECK(fit::huber_loss(pred, gt, 1.0) == doctest::Approx(0.125 / 8.0).epsilon(1e-15));
    Raster mismatch(3, 2, 1);
    CHECK_THROWS_AS(fit::huber_loss(pred, mismatch, 1.0), std::invalid_argument);
}

TEST_CASE("overall loss weights the two maps") {
    fit::FitConfig cfg; // alpha 0.75, beta 0.25

    LayoutMaps pred, gt;
    pred.edge = Raster(1, 1, 3);
    pred.corner = Raster(1, 1, 1);
    gt = pred;

    CHECK(fit::overall_loss(pred, gt, cfg) == 0.0);

    // edge loss 0.4 (quadratic branch), corner loss 0.8 (linear branch)
    const double e_edge = std::sqrt(0.8);
    for (int ch = 0; ch < 3; ++ch) pred.edge.at(0, 0, ch) = e_edge;
    pred.corner.at(0, 0) = 1.3;
    const double loss = fit::overall_loss(pred, gt, cfg);
    CHECK(loss == doctest::Approx(0.75 * 0.4 + 0.25 * 0.8).epsilon(1e-12));
    CHECK(loss == doctest::Approx(0.5).epsilon(1e-12));

    fit::FitConfig corner_only = cfg;
    corner_only.alpha = 0.0;
    corner_only.beta = 1.0;
    CHECK(fit::overall_loss(pred, gt, corner_only) ==
          fit::huber_loss(pred.corner, gt.corner, cfg.delta));
}

TEST_CASE("overall loss gradient is linear in alpha and beta") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LayoutMaps pred, gt;
    pred.edge = Raster(8, 4, 3);
    pred.corner = Raster(8, 4, 1);
    gt.edge = Raster(8, 4, 3);
    gt.corner = Raster(8, 4, 1);
    for (auto& v : pred.edge.data) v = u(rng);
    for (auto& v : pred.corner.data) v = u(rng);
    for (auto& v : gt.edge.data) v = u(rng);
    for (auto& v : gt.corner.data) v = u(rng);

    auto grad_for = [&](double alpha, double beta) {
        fit::FitConfig cfg;
        cfg.alpha = alpha;
        cfg.beta = beta;
        LayoutMaps grad;
        grad.edge = Raster(8, 4, 3);
        grad.corner = Raster(8, 4, 1);
        fit::overall_loss(pred, gt, cfg, &grad);
        return grad;
    };

    const auto g_edge = grad_for(1.0, 0.0);
    const auto g_corner = grad_for(0.0, 1.0);
    const auto g_mix = grad_for(0.3, 0.9);
    for (size_t i = 0; i < g_mix.edge.data.size(); ++i) {
        CHECK(std::abs(g_mix.edge.data[i] -
                       (0.3 * g_edge.edge.data[i] + 0.9 * g_corner.edge.data[i])) < 1e-12);
    }
    for (size_t i = 0; i < g_mix.corner.data.size(); ++i) {
        CHECK(std::abs(g_mix.corner.data[i] -
                       (0.3 * g_edge.corner.data[i] + 0.9 * g_corner.corner.data[i])) < 1e-12);
    }
}

TEST_CASE("identity target is a fixed point with exactly zero gradient") {
    const auto reference = layout::reference_layout(256, 128);
    fit::FitConfig cfg;
    cfg.pyramid = false;
    cfg.n_side = 4;

    const fit::Objective objective(reference, reference, cfg);
    const auto grid = tps::ControlGrid::regular(4);
    Eigen::MatrixX2d grad;
    const double loss = objective.value_and_grad(grid.target_points, grad);
    CHECK(loss == 0.0);
    CHECK(grad.cwiseAbs().maxCoeff() == 0.0);

    cfg.steps = 10;
    const auto trace = fit::fit_tps(reference, reference, cfg);
    for (double l : trace.losses) CHECK(l == 0.0);
    for (int i = 0; i < grid.size(); ++i) {
        CHECK(trace.grid.target_points[i].x == grid.source_points[i].x);
        CHECK(trace.grid.target_points[i].y == grid.source_points[i].y);
    }
}

TEST_CASE("end-to-end gradient matches finite differences") {
    const auto reference = layout::reference_layout(256, 128);
    const auto target_grid = displaced_grid(4, 0.02, 17);
    const auto target = warp_by_grid(reference, target_grid);

    fit::FitConfig cfg;
    cfg.pyramid = false;
    cfg.n_side = 4;
    const fit::Objective objective(reference, target, cfg);

    const auto start = displaced_grid(4, 0.01, 23);
    Eigen::MatrixX2d analytic;
    objective.value_and_grad(start.target_points, analytic);

    const int n = start.size();
    std::vector<double> x(2 * n);
    for (int i = 0; i < n; ++i) {
        x[2 * i + 0] = start.target_points[i].x;
        x[2 * i + 1] = start.target_points[i].y;
    }
    auto f = [&](const std::vector<double>& flat) {
        std::vector<Vec2> targets(n);
        for (int i = 0; i < n; ++i) targets[i] = {flat[2 * i], flat[2 * i + 1]};
        return objective.value(targets);
    };
    const auto fd = oracle::fd_gradient(f, x, 1e-4);

    double worst = 0.0;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        scale = std::max({scale, std::abs(analytic(i, 0)), std::abs(analytic(i, 1))});
    }
    for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(fd[2 * i + 0] - analytic(i, 0)));
        worst = std::max(worst, std::abs(fd[2 * i + 1] - analytic(i, 1)));
    }
    CHECK(worst / scale < 1e-3);
}

TEST_CASE("fit recovers a known displacement") {
    const auto reference = layout::reference_layout(512, 256);
    const auto truth = displaced_grid(4, 0.03, 41);
    const auto target = warp_by_grid(reference, truth);

    fit::FitConfig cfg;
    cfg.pyramid = false; // self-consistency runs at the native resolution
    cfg.n_side = 4;
    cfg.steps = 300;
    const auto trace = fit::fit_tps(reference, target, cfg);

    CHECK(trace.losses.size() == 300);
    CHECK(trace.losses.back() < 0.01 * trace.losses.front());

    const auto recovered_room = layout::maps_to_layout(trace.warped, 1.6);
    const auto target_room = layout::maps_to_layout(target, 1.6);
    CHECK(metrics::iou_3d(recovered_room, target_room) >= 0.97);
}

TEST_CASE("fit is deterministic") {
    const auto reference = layout::reference_layout(256, 128);
    const auto target = warp_by_grid(reference, displaced_grid(4, 0.02, 51));
    fit::FitConfig cfg;
    cfg.steps = 12;
    const auto t1 = fit::fit_tps(reference, target, cfg);
    const auto t2 = fit::fit_tps(reference, target, cfg);
    CHECK(t1.losses == t2.losses);
    for (int i = 0; i < t1.grid.size(); ++i) {
        CHECK(t1.grid.target_points[i].x == t2.grid.target_points[i].x);
        CHECK(t1.grid.target_points[i].y == t2.grid.target_points[i].y);
    }
    CHECK(t1.warped.edge.data == t2.warped.edge.data);
}

TEST_CASE("edge-only fitting still converges") {
    const auto reference = layout::reference_layout(512, 256);
    const auto target = warp_by_grid(reference, displaced_grid(4, 0.03, 61));

    fit::FitConfig cfg;
    cfg.alpha = 1.0;
    cfg.beta = 0.0;
    cfg.steps = 300;
    cfg.pyramid = true;
    const auto trace = fit::fit_tps(reference, target, cfg);
    CHECK(trace.losses.back() < 0.15 * trace.losses.front());
}

TEST_CASE("config validation and JSON round trip") {
    fit::FitConfig cfg;
    cfg.validate();
    cfg.alpha = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    fit::FitConfig custom;
    custom.alpha = 0.9;
    custom.beta = 0.1;
    custom.steps = 123;
    custom.n_side = 8;
    const auto back = fit::FitConfig::from_json_string(custom.to_json_string());
    CHECK(back.alpha == custom.alpha);
    CHECK(back.steps == custom.steps);
    CHECK(back.n_side == custom.n_side);

    // partial configs keep defaults for missing keys
    const auto partial = fit::FitConfig::from_json_string("{\"alpha\": 0.5}");
    CHECK(partial.alpha == 0.5);
    CHECK(partial.beta == 0.25);
    CHECK_THROWS_AS(fit::FitConfig::from_json_string("{\"alpha\": -3}"), std::exception);
}

TEST_CASE("divergence guard reports a numeric error") {
    const auto reference = layout::reference_layout(128, 64);
    const auto target = warp_by_grid(reference, displaced_grid(4, 0.02, 71));
    fit::FitConfig cfg;
    cfg.steps = 50;
    cfg.step_size = 1e12; // blows the warp far outside any sensible range
    cfg.pyramid = false;
    // loss stays finite under bilinear sampling of [0,1] maps, so drive the
    // divergence check directly instead
    LayoutMaps bad = reference;
    bad.edge.data[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit::fit_tps(reference, bad, cfg), NumericError);
}

TEST_SUITE_END();
