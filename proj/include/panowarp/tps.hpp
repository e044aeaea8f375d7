// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "panowarp/geometry.hpp"
#include "panowarp/parallel.hpp"

namespace panowarp::tps {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Square lattice of source control points in normalized [0,1]^2 map space,
// together with the target positions they move to. The targets are the free
// parameters of the warp.
struct ControlGrid {
    int n_side = 4;
    std::vector<Vec2> source_points;
    std::vector<Vec2> target_points;

    // Cell-centered lattice: point (i,j) at ((j+1/2)/n, (i+1/2)/n), row-major.
    // Targets start at the sources (identity warp).
    static ControlGrid regular(int n_side);

    int size() const { return n_side * n_side; }

    // Throws std::invalid_argument on lattice violations (n_side < 3, list
    // length mismatch, sources off the regular lattice).
    void validate() const;
};

// Solved transform: affine part plus one radial weight per control point,
// independently for the two output dimensions.
struct Coefficients {
    Eigen::Matrix<double, 2, 3> affine;                 // row k: a0, a1, a2
    Eigen::Matrix<double, Eigen::Dynamic, 2> weights;   // N x 2
    double smoothing = 0.0;
};

// Per-output-pixel source coordinate in normalized map space; backward-warp
// convention (each output pixel says where to sample the source).
struct SamplingGrid {
    int width = 0;
    int height = 0;
    std::vector<Vec2> coords; // row-major, width*height entries
};

// The warp is linear in the targets: T(q) = sum_i phi_i(q) * t_i, where the
// basis phi depends only on the source lattice and the smoothing constant.
// Row p holds phi(q_p). This is simultaneously the Jacobian of the mapped
// point with respect to each target (d T(q)/d t_i = phi_i(q) * I2).
struct Basis {
    int n_ctrl = 0;
    RowMatrixXd phi; // n_query x N

    // T(q_p) for all rows given target positions.
    std::vector<Vec2> apply(std::span<const Vec2> targets, Exec mode = default_exec()) const;

    // Chain rule: gradients w.r.t. targets from per-query point gradients,
    // i.e. phi^T * point_grads. Returns an N x 2 matrix.
    Eigen::MatrixX2d accumulate(std::span<const Vec2> point_grads,
                                Exec mode = default_exec()) const;
};

// U(r^2) = r^2 * ln(r^2), continued with 0 at r = 0.
double kernel(double r_sq);

// Solves [[K + kI, P],[P^T, 0]] [w; a] = [t; 0] per output dimension.
// Throws NumericError when the system is singular (collinear or duplicate
// source points).
Coefficients solve_coefficients(const ControlGrid& grid, double smoothing);

Vec2 evaluate_map(const Coefficients& coef, const ControlGrid& grid, Vec2 q);
std::vector<Vec2> evaluate_map(const Coefficients& coef, const ControlGrid& grid,
                               std::span<const Vec2> points);

// Evaluates the solved map at every output pixel center of a width x height
// raster. Parallel and serial paths produce bit-identical grids.
SamplingGrid make_sampling_grid(const Coefficients& coef, const ControlGrid& grid,
                                int width, int height, Exec mode = default_exec());

// Basis rows for arbitrary query points.
Basis map_jacobian_wrt_targets(const ControlGrid& grid, double smoothing,
                               std::span<const Vec2> query_points,
                               Exec mode = default_exec());

// Basis rows for all pixel centers of a raster, row-major. Equivalent to
// map_jacobian_wrt_targets on the pixel-center list but sized for full maps.
Basis grid_basis(const ControlGrid& grid, double smoothing, int width, int height,
                 Exec mode = default_exec());

// w^T K w, the roughness the smoothing constant trades against fit.
double bending_energy(const ControlGrid& grid, const Coefficients& coef);

} // namespace panowarp::tps
