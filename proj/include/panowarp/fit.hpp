// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "panowarp/raster.hpp"
#include "panowarp/tps.hpp"

namespace panowarp::fit {

struct FitConfig {
    double alpha = 0.75;        // edge-map loss weight
    double beta = 0.25;         // corner-map loss weight
    double delta = 1.0;         // Huber threshold
    int steps = 600;            // total iteration budget (across pyramid levels)
    double step_size = 1e-2;
    double decay1 = 0.9;        // first-moment decay
    double decay2 = 0.999;      // second-moment decay
    double weight_decay = 1e-4; // decoupled, applied to the displacement
    int n_side = 4;
    double smoothing = 0.0;
    bool wrap_x = true;

    // Coarse-to-fine schedule over blurred, downsampled maps. Widens the
    // basin of attraction; sparse edge strokes give almost no gradient far
    // from alignment. The finest level fits at half the input resolution.
    bool pyramid = true;
    int pyramid_levels = 4;
    double pyramid_blur = 2.0; // edge-stroke blur at the finest level, in level px

    // corner-snap refinement after the pyramid (0 disables); see fit_tps
    int polish_steps = 150;

    void validate() const;
    std::string to_json_string() const;
    static FitConfig from_json_string(const std::string& text);
};

struct FitTrace {
    std::vector<double> losses; // one entry per executed iteration
    tps::ControlGrid grid;
    LayoutMaps warped; // final warp of the reference at input resolution

    void write_loss_csv(const std::filesystem::path& path) const;
};

// Mean-reduced elementwise Huber: 0.5 e^2 below delta, delta(|e| - delta/2)
// above. Optional gradient with respect to pred (same shape).
double huber_loss(const Raster& pred, const Raster& gt, double delta,
                  Raster* grad = nullptr);

// alpha * L_edge + beta * L_corner, gradients scaled accordingly.
double overall_loss(const LayoutMaps& pred, const LayoutMaps& gt, const FitConfig& cfg,
                    LayoutMaps* grad = nullptr);

// The warp-and-compare objective at one resolution: warps the reference
// through the TPS defined by the target control points and measures
// overall_loss against the target maps. Gradients flow through the bilinear
// sampler and the TPS basis. Coordinates use the displacement form
// q + sum_i phi_i(q) (t_i - s_i), which is exact at the identity.
//
// Optional per-map blur applies to the *warped* prediction (and once to the
// target), not to the reference: blurring before warping would move the
// optimum wherever the warp stretches. The blur is symmetric, so the chain
// rule just blurs the upstream loss gradient.
class Objective {
  public:
    Objective(const LayoutMaps& reference, const LayoutMaps& target, const FitConfig& cfg,
              double edge_sigma = 0.0, double corner_sigma = 0.0);

    double value(std::span<const Vec2> targets) const;
    double value_and_grad(std::span<const Vec2> targets, Eigen::MatrixX2d& grad) const;

    const tps::ControlGrid& control_grid() const { return grid_; }

  private:
    LayoutMaps warp_raw(std::span<const Vec2> targets, tps::SamplingGrid* grid_out) const;

    FitConfig cfg_;
    LayoutMaps reference_;
    LayoutMaps target_;   // stored pre-blurred
    double edge_sigma_ = 0.0;
    double corner_sigma_ = 0.0;
    tps::ControlGrid grid_;
    tps::Basis basis_;
    std::vector<Vec2> centers_;
};

// Optimizes the target control points so the warped reference matches the
// target maps: first-order moment updates with decoupled weight decay,
// identity initialization, optional blur pyramid. Deterministic. Throws
// NumericError if the loss becomes non-finite.
FitTrace fit_tps(const LayoutMaps& reference, const LayoutMaps& target, const FitConfig& cfg);

} // namespace panowarp::fit
