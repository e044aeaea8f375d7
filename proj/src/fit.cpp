// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/fit.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "panowarp/errors.hpp"
#include "panowarp/kernels.hpp"
#include "panowarp/warp.hpp"

namespace panowarp::fit {

using json = nlohmann::json;

void FitConfig::validate() const {
    if (!(alpha + beta > 0.0) || alpha < 0.0 || beta < 0.0) {
        throw std::invalid_argument("FitConfig: need alpha, beta >= 0 with alpha + beta > 0");
    }
    if (!(delta > 0.0)) throw std::invalid_argument("FitConfig: delta must be > 0");
    if (steps < 1) throw std::invalid_argument("FitConfig: steps must be >= 1");
    if (!(step_size > 0.0) || !(decay1 > 0.0) || !(decay1 < 1.0) || !(decay2 > 0.0) ||
        !(decay2 < 1.0) || weight_decay < 0.0) {
        throw std::invalid_argument("FitConfig: bad optimizer rates");
    }
    if (n_side < 3) throw std::invalid_argument("FitConfig: n_side must be >= 3");
    if (smoothing < 0.0) throw std::invalid_argument("FitConfig: smoothing must be >= 0");
    if (pyramid && (pyramid_levels < 1 || pyramid_levels > 6)) {
        throw std::invalid_argument("FitConfig: pyramid_levels out of range");
    }
    if (polish_steps < 0) throw std::invalid_argument("FitConfig: polish_steps must be >= 0");
}

std::string FitConfig::to_json_string() const {
    json j;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["delta"] = delta;
    j["steps"] = steps;
    j["step_size"] = step_size;
    j["decay1"] = decay1;
    j["decay2"] = decay2;
    j["weight_decay"] = weight_decay;
    j["n_side"] = n_side;
    j["smoothing"] = smoothing;
    j["wrap_x"] = wrap_x;
    j["pyramid"] = pyramid;
    j["pyramid_levels"] = pyramid_levels;
    j["pyramid_blur"] = pyramid_blur;
    j["polish_steps"] = polish_steps;
    return j.dump(2);
}

FitConfig FitConfig::from_json_string(const std::string& text) {
    try {
        const json j = json::parse(text);
        FitConfig cfg;
        cfg.alpha = j.value("alpha", cfg.alpha);
        cfg.beta = j.value("beta", cfg.beta);
        cfg.delta = j.value("delta", cfg.delta);
        cfg.steps = j.value("steps", cfg.steps);
        cfg.step_size = j.value("step_size", cfg.step_size);
        cfg.decay1 = j.value("decay1", cfg.decay1);
        cfg.decay2 = j.value("decay2", cfg.decay2);
        cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
        cfg.n_side = j.value("n_side", cfg.n_side);
        cfg.smoothing = j.value("smoothing", cfg.smoothing);
        cfg.wrap_x = j.value("wrap_x", cfg.wrap_x);
        cfg.pyramid = j.value("pyramid", cfg.pyramid);
        cfg.pyramid_levels = j.value("pyramid_levels", cfg.pyramid_levels);
        cfg.pyramid_blur = j.value("pyramid_blur", cfg.pyramid_blur);
        cfg.polish_steps = j.value("polish_steps", cfg.polish_steps);
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw DataError(std::string("fit config JSON: ") + e.what());
    }
}

void FitTrace::write_loss_csv(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("write_loss_csv: cannot open " + path.string());
    f << "iteration,loss\n";
    f.precision(12);
    for (size_t i = 0; i < losses.size(); ++i) f << i << "," << losses[i] << "\n";
    if (!f) throw DataError("write_loss_csv: write failed for " + path.string());
}

double huber_loss(const Raster& pred, const Raster& gt, double delta, Raster* grad) {
    if (!pred.same_shape(gt)) throw std::invalid_argument("huber_loss: shape mismatch");
    if (grad && !grad->same_shape(pred)) *grad = Raster(pred.width, pred.height, pred.channels);
    return kernels::huber_sum(pred, gt, delta, grad, default_exec());
}

double overall_loss(const LayoutMaps& pred, const LayoutMaps& gt, const FitConfig& cfg,
                    LayoutMaps* grad) {
    Raster* edge_grad = grad ? &grad->edge : nullptr;
    Raster* corner_grad = grad ? &grad->corner : nullptr;
    const double edge = huber_loss(pred.edge, gt.edge, cfg.delta, edge_grad);
    const double corner = huber_loss(pred.corner, gt.corner, cfg.delta, corner_grad);
    if (grad) {
        for (double& v : grad->edge.data) v *= cfg.alpha;
        for (double& v : grad->corner.data) v *= cfg.beta;
    }
    return cfg.alpha * edge + cfg.beta * corner;
}

namespace {

std::vector<Vec2> pixel_centers(int width, int height) {
    std::vector<Vec2> centers(static_cast<size_t>(width) * height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            centers[static_cast<size_t>(r) * width + c] = {(c + 0.5) / width,
                                                           (r + 0.5) / height};
        }
    }
    return centers;
}

} // namespace

Objective::Objective(const LayoutMaps& reference, const LayoutMaps& target,
                     const FitConfig& cfg, double edge_sigma, double corner_sigma)
    : cfg_(cfg),
      reference_(reference),
      target_(target),
      edge_sigma_(edge_sigma),
      corner_sigma_(corner_sigma) {
    cfg_.validate();
    if (!reference.edge.same_shape(target.edge) || !reference.corner.same_shape(target.corner)) {
        throw std::invalid_argument("Objective: reference and target resolutions differ");
    }
    if (edge_sigma_ > 0.0) {
        target_.edge = kernels::gaussian_blur(target_.edge, edge_sigma_, default_exec());
    }
    if (corner_sigma_ > 0.0) {
        target_.corner = kernels::gaussian_blur(target_.corner, corner_sigma_, default_exec());
    }
    grid_ = tps::ControlGrid::regular(cfg.n_side);
    const int w = reference.edge.width;
    const int h = reference.edge.height;
    basis_ = tps::grid_basis(grid_, cfg.smoothing, w, h);
    centers_ = pixel_centers(w, h);
}

namespace {

tps::SamplingGrid displaced_grid(const tps::Basis& basis, const std::vector<Vec2>& centers,
                                 const tps::ControlGrid& grid, std::span<const Vec2> targets,
                                 int width, int height) {
    std::vector<Vec2> disp(targets.size());
    for (size_t i = 0; i < targets.size(); ++i) disp[i] = targets[i] - grid.source_points[i];
    tps::SamplingGrid sg;
    sg.width = width;
    sg.height = height;
    sg.coords = basis.apply(disp);
    for (size_t p = 0; p < sg.coords.size(); ++p) sg.coords[p] += centers[p];
    return sg;
}

} // namespace

LayoutMaps Objective::warp_raw(std::span<const Vec2> targets,
                               tps::SamplingGrid* grid_out) const {
    const int w = reference_.edge.width;
    const int h = reference_.edge.height;
    auto sg = displaced_grid(basis_, centers_, grid_, targets, w, h);
    LayoutMaps warped;
    warped.edge = warp::sample_bilinear(reference_.edge, sg, cfg_.wrap_x);
    warped.corner = warp::sample_bilinear(reference_.corner, sg, cfg_.wrap_x);
    if (grid_out) *grid_out = std::move(sg);
    return warped;
}

double Objective::value(std::span<const Vec2> targets) const {
    LayoutMaps warped = warp_raw(targets, nullptr);
    if (edge_sigma_ > 0.0) {
        warped.edge = kernels::gaussian_blur(warped.edge, edge_sigma_, default_exec());
    }
    if (corner_sigma_ > 0.0) {
        warped.corner = kernels::gaussian_blur(warped.corner, corner_sigma_, default_exec());
    }
    return overall_loss(warped, target_, cfg_);
}

double Objective::value_and_grad(std::span<const Vec2> targets,
                                 Eigen::MatrixX2d& grad) const {
    const int w = reference_.edge.width;
    const int h = reference_.edge.height;
    tps::SamplingGrid sg;
    LayoutMaps warped = warp_raw(targets, &sg);
    if (edge_sigma_ > 0.0) {
        warped.edge = kernels::gaussian_blur(warped.edge, edge_sigma_, default_exec());
    }
    if (corner_sigma_ > 0.0) {
        warped.corner = kernels::gaussian_blur(warped.corner, corner_sigma_, default_exec());
    }

    LayoutMaps upstream;
    upstream.edge = Raster(w, h, 3);
    upstream.corner = Raster(w, h, 1);
    const double loss = overall_loss(warped, target_, cfg_, &upstream);

    // the blur is symmetric, so its adjoint just blurs the upstream
    if (edge_sigma_ > 0.0) {
        upstream.edge = kernels::gaussian_blur(upstream.edge, edge_sigma_, default_exec());
    }
    if (corner_sigma_ > 0.0) {
        upstream.corner = kernels::gaussian_blur(upstream.corner, corner_sigma_, default_exec());
    }

    auto coord_grads = warp::sample_gradient(reference_.edge, sg, upstream.edge, cfg_.wrap_x);
    const auto corner_grads =
        warp::sample_gradient(reference_.corner, sg, upstream.corner, cfg_.wrap_x);
    for (size_t p = 0; p < coord_grads.size(); ++p) coord_grads[p] += corner_grads[p];

    grad = basis_.accumulate(coord_grads);
    return loss;
}

namespace {

struct Level {
    LayoutMaps reference; // downsampled and blurred for this scale
    LayoutMaps target;
    int iterations = 0;
};

LayoutMaps shrink_maps(const LayoutMaps& maps, int times) {
    LayoutMaps out = maps;
    for (int i = 0; i < times; ++i) {
        out.edge = kernels::downsample2(out.edge, default_exec());
        out.corner = kernels::downsample2(out.corner, default_exec());
    }
    return out;
}

void blur_maps(LayoutMaps& maps, double edge_sigma, double corner_sigma) {
    if (edge_sigma > 0.0) {
        maps.edge = kernels::gaussian_blur(maps.edge, edge_sigma, default_exec());
    }
    if (corner_sigma > 0.0) {
        maps.corner = kernels::gaussian_blur(maps.corner, corner_sigma, default_exec());
    }
}

std::vector<Level> build_levels(const LayoutMaps& reference, const LayoutMaps& target,
                                const FitConfig& cfg) {
    std::vector<Level> levels;
    if (!cfg.pyramid) {
        levels.push_back({reference, target, cfg.steps});
        return levels;
    }

    int max_halvings = 0;
    int w = reference.edge.width;
    int h = reference.edge.height;
    while (w % 2 == 0 && h % 2 == 0 && w / 2 >= 16 && h / 2 >= 8 &&
           max_halvings < cfg.pyramid_levels) {
        ++max_halvings;
        w /= 2;
        h /= 2;
    }
    const int n_levels = std::max(1, max_halvings);

    // coarse levels take a larger share of the budget; they are cheap and do
    // the long-range alignment, the finest level only polishes
    std::vector<double> weights(n_levels);
    double weight_sum = 0.0;
    for (int i = 0; i < n_levels; ++i) {
        weights[i] = 1.0 + 0.5 * (n_levels - 1 - i);
        weight_sum += weights[i];
    }
    int remaining = cfg.steps;
    for (int i = 0; i < n_levels; ++i) {
        const int halvings = n_levels - i; // n_levels..1, coarse to fine
        Level level;
        const double sigma = cfg.pyramid_blur * (1.0 + 0.5 * (n_levels - 1 - i));
        level.reference = shrink_maps(reference, halvings);
        level.target = shrink_maps(target, halvings);
        // thin edge strokes need the travel blur; corner blobs are wide to
        // begin with, and heavy blur would fuse neighboring corners into
        // one basin
        blur_maps(level.reference, sigma, std::min(sigma, 2.5));
        blur_maps(level.target, sigma, std::min(sigma, 2.5));
        level.iterations =
            (i + 1 < n_levels)
                ? std::min(remaining,
                           static_cast<int>(std::lround(cfg.steps * weights[i] / weight_sum)))
                : remaining;
        remaining -= level.iterations;
        levels.push_back(std::move(level));
    }
    return levels;
}

} // namespace

FitTrace fit_tps(const LayoutMaps& reference, const LayoutMaps& target, const FitConfig& cfg) {
    cfg.validate();
    if (!reference.edge.same_shape(target.edge) ||
        !reference.corner.same_shape(target.corner)) {
        throw std::invalid_argument("fit_tps: reference and target resolutions differ");
    }

    tps::ControlGrid grid = tps::ControlGrid::regular(cfg.n_side);
    const int n = grid.size();

    Eigen::MatrixX2d m = Eigen::MatrixX2d::Zero(n, 2);
    Eigen::MatrixX2d v = Eigen::MatrixX2d::Zero(n, 2);
    constexpr double kEps = 1e-8;

    FitTrace trace;
    trace.losses.reserve(static_cast<size_t>(cfg.steps));

    const auto run_adam = [&](const Objective& objective, int iterations,
                              Eigen::MatrixX2d& m1, Eigen::MatrixX2d& m2, long& counter) {
        Eigen::MatrixX2d grad(n, 2);
        for (int it = 0; it < iterations; ++it) {
            const double loss = objective.value_and_grad(grid.target_points, grad);
            if (!std::isfinite(loss)) {
                throw NumericError("fit_tps: loss diverged at iteration " +
                                   std::to_string(counter));
            }
            trace.losses.push_back(loss);
            ++counter;

            const double bias1 = 1.0 - std::pow(cfg.decay1, static_cast<double>(counter));
            const double bias2 = 1.0 - std::pow(cfg.decay2, static_cast<double>(counter));
            for (int i = 0; i < n; ++i) {
                for (int k = 0; k < 2; ++k) {
                    const double g = grad(i, k);
                    m1(i, k) = cfg.decay1 * m1(i, k) + (1.0 - cfg.decay1) * g;
                    m2(i, k) = cfg.decay2 * m2(i, k) + (1.0 - cfg.decay2) * g * g;
                    const double m_hat = m1(i, k) / bias1;
                    const double v_hat = m2(i, k) / bias2;
                    const double coord = k == 0 ? grid.target_points[i].x
                                                : grid.target_points[i].y;
                    const double source = k == 0 ? grid.source_points[i].x
                                                 : grid.source_points[i].y;
                    const double update =
                        cfg.step_size * m_hat / (std::sqrt(v_hat) + kEps) +
                        cfg.step_size * cfg.weight_decay * (coord - source);
                    if (k == 0) {
                        grid.target_points[i].x = coord - update;
                    } else {
                        grid.target_points[i].y = coord - update;
                    }
                }
            }
        }
    };

    const auto levels = build_levels(reference, target, cfg);
    long step_count = 0;
    for (const Level& level : levels) {
        if (level.iterations == 0) continue;
        const Objective objective(level.reference, level.target, cfg);
        run_adam(objective, level.iterations, m, v, step_count);
    }

    // Corner-only polish: the reconstruction reads corner blobs, and near
    // the optimum the edge term's shape-mismatch residual tugs them off
    // their targets. A short snap phase with the edge weight dropped fixes
    // that; corner-only fitting from scratch does not converge, but from an
    // aligned state it is a local refinement.
    if (cfg.polish_steps > 0 && cfg.beta > 0.0 && cfg.pyramid &&
        reference.edge.width % 2 == 0 && reference.edge.height % 2 == 0) {
        FitConfig polish_cfg = cfg;
        polish_cfg.alpha = 0.0;
        Level level;
        level.reference = shrink_maps(reference, 1);
        level.target = shrink_maps(target, 1);
        blur_maps(level.reference, 0.0, 1.0);
        blur_maps(level.target, 0.0, 1.0);
        const Objective objective(level.reference, level.target, polish_cfg);
        Eigen::MatrixX2d pm = Eigen::MatrixX2d::Zero(n, 2);
        Eigen::MatrixX2d pv = Eigen::MatrixX2d::Zero(n, 2);
        long polish_count = 0;
        run_adam(objective, cfg.polish_steps, pm, pv, polish_count);
    }

    trace.grid = grid;
    const auto coef = tps::solve_coefficients(grid, cfg.smoothing);
    const auto sg = tps::make_sampling_grid(coef, grid, reference.edge.width,
                                            reference.edge.height);
    trace.warped.edge = warp::sample_bilinear(reference.edge, sg, cfg.wrap_x);
    trace.warped.corner = warp::sample_bilinear(reference.corner, sg, cfg.wrap_x);
    return trace;
}

} // namespace panowarp::fit
