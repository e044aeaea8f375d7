// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>

#include "panowarp/geometry.hpp"
#include "panowarp/parallel.hpp"
#include "panowarp/raster.hpp"
#include "panowarp/tps.hpp"

// Data-parallel inner loops. Every kernel exists twice: *_serial is the
// plain reference loop, *_parallel the OpenMP version. The pairs are
// bit-identical by construction (per-element writes, or block-wise
// reductions combined in index order), which the kernel tests assert and
// the bench target times.
namespace panowarp::kernels {

// --- TPS evaluation --------------------------------------------------------

void tps_grid_eval_serial(const tps::Coefficients& coef, const tps::ControlGrid& grid,
                          int width, int height, Vec2* out);
void tps_grid_eval_parallel(const tps::Coefficients& coef, const tps::ControlGrid& grid,
                            int width, int height, Vec2* out);
void tps_grid_eval(const tps::Coefficients& coef, const tps::ControlGrid& grid,
                   int width, int height, Vec2* out, Exec mode);

// phi(q) = W^T u(q) for each query; w is the (N+3) x N solve against the
// identity block, u(q) the kernel/affine feature vector.
void basis_eval_serial(const Vec2* sources, int n_ctrl, const Eigen::MatrixXd& w,
                       const Vec2* queries, size_t n_queries, tps::RowMatrixXd& phi);
void basis_eval_parallel(const Vec2* sources, int n_ctrl, const Eigen::MatrixXd& w,
                         const Vec2* queries, size_t n_queries, tps::RowMatrixXd& phi);
void basis_eval(const Vec2* sources, int n_ctrl, const Eigen::MatrixXd& w,
                const Vec2* queries, size_t n_queries, tps::RowMatrixXd& phi, Exec mode);

void basis_apply_serial(const tps::RowMatrixXd& phi, const Vec2* targets, Vec2* out);
void basis_apply_parallel(const tps::RowMatrixXd& phi, const Vec2* targets, Vec2* out);
void basis_apply(const tps::RowMatrixXd& phi, const Vec2* targets, Vec2* out, Exec mode);

void basis_accumulate_serial(const tps::RowMatrixXd& phi, const Vec2* point_grads,
                             Eigen::MatrixX2d& out);
void basis_accumulate_parallel(const tps::RowMatrixXd& phi, const Vec2* point_grads,
                               Eigen::MatrixX2d& out);
void basis_accumulate(const tps::RowMatrixXd& phi, const Vec2* point_grads,
                      Eigen::MatrixX2d& out, Exec mode);

// --- Sampling --------------------------------------------------------------

// Bilinear backward warp. Coordinates are normalized; x wraps modulo the
// source width when wrap_x is set and reads zero outside otherwise, y is
// clamped to the valid rows.
void bilinear_serial(const Raster& src, const Vec2* coords, bool wrap_x, Raster& out);
void bilinear_parallel(const Raster& src, const Vec2* coords, bool wrap_x, Raster& out);
void bilinear(const Raster& src, const Vec2* coords, bool wrap_x, Raster& out, Exec mode);

// d(sum upstream .* output)/d coords, in normalized-coordinate units.
// Right-limit subgradient at integer pixel breakpoints.
void bilinear_grad_serial(const Raster& src, const Vec2* coords, const Raster& upstream,
                          bool wrap_x, Vec2* out_grads);
void bilinear_grad_parallel(const Raster& src, const Vec2* coords, const Raster& upstream,
                            bool wrap_x, Vec2* out_grads);
void bilinear_grad(const Raster& src, const Vec2* coords, const Raster& upstream,
                   bool wrap_x, Vec2* out_grads, Exec mode);

// --- Reductions and pyramid helpers ----------------------------------------

// Mean-reduced Huber loss over all elements; optional gradient w.r.t. pred.
double huber_sum_serial(const Raster& pred, const Raster& gt, double delta, Raster* grad);
double huber_sum_parallel(const Raster& pred, const Raster& gt, double delta, Raster* grad);
double huber_sum(const Raster& pred, const Raster& gt, double delta, Raster* grad, Exec mode);

// Separable Gaussian blur; x wraps (panorama seam), y clamps.
Raster gaussian_blur_serial(const Raster& src, double sigma);
Raster gaussian_blur_parallel(const Raster& src, double sigma);
Raster gaussian_blur(const Raster& src, double sigma, Exec mode);

// 2x area downsample; requires even dimensions.
Raster downsample2_serial(const Raster& src);
Raster downsample2_parallel(const Raster& src);
Raster downsample2(const Raster& src, Exec mode);

} // namespace panowarp::kernels
