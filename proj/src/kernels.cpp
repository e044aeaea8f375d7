// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace panowarp::kernels {

namespace {

// shared per-pixel bodies so both execution paths run the same arithmetic

inline Vec2 eval_point(const tps::Coefficients& coef, const Vec2* sources, int n, Vec2 q) {
    double out_x = coef.affine(0, 0) + coef.affine(0, 1) * q.x + coef.affine(0, 2) * q.y;
    double out_y = coef.affine(1, 0) + coef.affine(1, 1) * q.x + coef.affine(1, 2) * q.y;
    for (int i = 0; i < n; ++i) {
        const double r_sq = (q - sources[i]).norm_sq();
        const double u = r_sq <= 0.0 ? 0.0 : r_sq * std::log(r_sq);
        out_x += coef.weights(i, 0) * u;
        out_y += coef.weights(i, 1) * u;
    }
    return {out_x, out_y};
}

struct TapX {
    int i0, i1;
    double fx;
    bool valid0, valid1;
};

inline TapX resolve_x(double px, int width, bool wrap_x) {
    TapX t;
    if (wrap_x) {
        px -= width * std::floor(px / width);
        if (px >= width) px = 0.0; // guards fp edge at exactly width
        t.i0 = static_cast<int>(px);
        t.i1 = (t.i0 + 1) % width;
        t.fx = px - t.i0;
        t.valid0 = t.valid1 = true;
    } else {
        const double f = std::floor(px);
        t.i0 = static_cast<int>(f);
        t.i1 = t.i0 + 1;
        t.fx = px - f;
        t.valid0 = t.i0 >= 0 && t.i0 < width;
        t.valid1 = t.i1 >= 0 && t.i1 < width;
    }
    return t;
}

struct TapY {
    int j0, j1;
    double fy;
};

inline TapY resolve_y(double py, int height) {
    TapY t;
    if (py <= 0.0) {
        t.j0 = t.j1 = 0;
        t.fy = 0.0;
    } else if (py >= height - 1) {
        t.j0 = t.j1 = height - 1;
        t.fy = 0.0;
    } else {
        t.j0 = static_cast<int>(py);
        t.j1 = t.j0 + 1;
        t.fy = py - t.j0;
    }
    return t;
}

inline void sample_pixel(const Raster& src, Vec2 coord, bool wrap_x, double* out) {
    const double px = coord.x * src.width - 0.5;
    const double py = coord.y * src.height - 0.5;
    const TapX tx = resolve_x(px, src.width, wrap_x);
    const TapY ty = resolve_y(py, src.height);
    for (int ch = 0; ch < src.channels; ++ch) {
        const double v00 = tx.valid0 ? src.at(ty.j0, tx.i0, ch) : 0.0;
        const double v01 = tx.valid1 ? src.at(ty.j0, tx.i1, ch) : 0.0;
        const double v10 = tx.valid0 ? src.at(ty.j1, tx.i0, ch) : 0.0;
        const double v11 = tx.valid1 ? src.at(ty.j1, tx.i1, ch) : 0.0;
        const double top = v00 + tx.fx * (v01 - v00);
        const double bot = v10 + tx.fx * (v11 - v10);
        out[ch] = top + ty.fy * (bot - top);
    }
}

inline Vec2 sample_pixel_grad(const Raster& src, Vec2 coord, const double* upstream,
                              bool wrap_x) {
    const double px = coord.x * src.width - 0.5;
    const double py = coord.y * src.height - 0.5;
    const TapX tx = resolve_x(px, src.width, wrap_x);
    const TapY ty = resolve_y(py, src.height);
    // clamped rows contribute no vertical slope
    const bool y_clamped = py <= 0.0 || py >= src.height - 1;
    double gx = 0.0;
    double gy = 0.0;
    for (int ch = 0; ch < src.channels; ++ch) {
        const double v00 = tx.valid0 ? src.at(ty.j0, tx.i0, ch) : 0.0;
        const double v01 = tx.valid1 ? src.at(ty.j0, tx.i1, ch) : 0.0;
        const double v10 = tx.valid0 ? src.at(ty.j1, tx.i0, ch) : 0.0;
        const double v11 = tx.valid1 ? src.at(ty.j1, tx.i1, ch) : 0.0;
        const double d_px = (1.0 - ty.fy) * (v01 - v00) + ty.fy * (v11 - v10);
        const double d_py = y_clamped ? 0.0
                                      : (1.0 - tx.fx) * (v10 - v00) + tx.fx * (v11 - v01);
        gx += upstream[ch] * d_px;
        gy += upstream[ch] * d_py;
    }
    return {gx * src.width, gy * src.height};
}

constexpr size_t kReductionBlock = 4096;

inline double huber_term(double e, double delta) {
    const double a = std::abs(e);
    if (a <= delta) return 0.5 * e * e;
    return delta * (a - 0.5 * delta);
}

std::vector<double> gaussian_taps(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> w(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        w[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += w[i + radius];
    }
    for (double& v : w) v /= sum;
    return w;
}

inline void blur_pixel_h(const Raster& src, const std::vector<double>& taps, int r, int c,
                         double* out) {
    const int radius = static_cast<int>(taps.size()) / 2;
    for (int ch = 0; ch < src.channels; ++ch) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
            int cc = c + k;
            cc -= src.width * static_cast<int>(std::floor(static_cast<double>(cc) / src.width));
            acc += taps[k + radius] * src.at(r, cc, ch);
        }
        out[ch] = acc;
    }
}

inline void blur_pixel_v(const Raster& src, const std::vector<double>& taps, int r, int c,
                         double* out) {
    const int radius = static_cast<int>(taps.size()) / 2;
    for (int ch = 0; ch < src.channels; ++ch) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
            const int rr = std::clamp(r + k, 0, src.height - 1);
            acc += taps[k + radius] * src.at(rr, c, ch);
        }
        out[ch] = acc;
    }
}

inline void downsample_pixel(const Raster& src, int r, int c, double* out) {
    for (int ch = 0; ch < src.channels; ++ch) {
        out[ch] = 0.25 * (src.at(2 * r, 2 * c, ch) + src.at(2 * r, 2 * c + 1, ch) +
                          src.at(2 * r + 1, 2 * c, ch) + src.at(2 * r + 1, 2 * c + 1, ch));
    }
}

} // namespace

// --- TPS evaluation ---------------------------------------------------------

void tps_grid_eval_serial(const tps::Coefficients& coef, const tps::ControlGrid& grid,
                          int width, int height, Vec2* out) {
    const Vec2* sources = grid.source_points.data();
    const int n = grid.size();
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            out[static_cast<size_t>(r) * width + c] =
                eval_point(coef, sources, n, {(c + 0.5) / width, (r + 0.5) / height});
        }
    }
}

void tps_grid_eval_parallel(const tps::Coefficients& coef, const tps::ControlGrid& grid,
                            int width, int height, Vec2* out) {
    const Vec2* sources = grid.source_points.data();
    const int n = grid.size();
#pragma omp parallel for schedule(static)
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            out[static_cast<size_t>(r) * width + c] =
                eval_point(coef, sources, n, {(c + 0.5) / width, (r + 0.5) / height});
        }
    }
}

void tps_grid_eval(const tps::Coefficients& coef, const tps::ControlGrid& grid,
                   int width, int height, Vec2* out, Exec mode) {
    if (mode == Exec::parallel) {
        tps_grid_eval_parallel(coef, grid, width, height, out);
    } else {
        tps_grid_eval_serial(coef, grid, width, height, out);
    }
}

namespace {

inline void basis_eval_row(const Vec2* sources, int n, const Eigen::MatrixXd& w,
                           Vec2 q, double* row) {
    // u(q), then row = u^T w; w is column-major so scan columns contiguously
    std::vector<double> u(static_cast<size_t>(n) + 3);
    for (int i = 0; i < n; ++i) {
        const double r_sq = (q - sources[i]).norm_sq();
        u[i] = r_sq <= 0.0 ? 0.0 : r_sq * std::log(r_sq);
    }
    u[n + 0] = 1.0;
    u[n + 1] = q.x;
    u[n + 2] = q.y;
    for (int j = 0; j < n; ++j) {
        const double* col = w.col(j).data();
        double acc = 0.0;
        for (int k = 0; k < n + 3; ++k) acc += u[k] * col[k];
        row[j] = acc;
    }
}

} // namespace

void basis_eval_serial(const Vec2* sources, int n_ctrl, const Eigen::MatrixXd& w,
                       const Vec2* queries, size_t n_queries, tps::RowMatrixXd& phi) {
    for (size_t p = 0; p < n_queries; ++p) {
        basis_eval_row(sources, n_ctrl, w, queries[p], phi.data() + p * n_ctrl);
    }
}

void basis_eval_parallel(const Vec2* sources, int n_ctrl, const Eigen::MatrixXd& w,
                         const Vec2* queries, size_t n_queries, tps::RowMatrixXd& phi) {
#pragma omp parallel for schedule(static)
    for (long p = 0; p < static_cast<long>(n_queries); ++p) {
        basis_eval_row(sources, n_ctrl, w, queries[p],
                       phi.data() + static_cast<size_t>(p) * n_ctrl);
    }
}

void basis_eval(const Vec2* sources, int n_ctrl, const Eigen::MatrixXd& w,
                const Vec2* queries, size_t n_queries, tps::RowMatrixXd& phi, Exec mode) {
    if (mode == Exec::parallel) {
        basis_eval_parallel(sources, n_ctrl, w, queries, n_queries, phi);
    } else {
        basis_eval_serial(sources, n_ctrl, w, queries, n_queries, phi);
    }
}

void basis_apply_serial(const tps::RowMatrixXd& phi, const Vec2* targets, Vec2* out) {
    const long rows = phi.rows();
    const int n = static_cast<int>(phi.cols());
    for (long p = 0; p < rows; ++p) {
        const double* row = phi.data() + static_cast<size_t>(p) * n;
        double ox = 0.0;
        double oy = 0.0;
        for (int i = 0; i < n; ++i) {
            ox += row[i] * targets[i].x;
            oy += row[i] * targets[i].y;
        }
        out[p] = {ox, oy};
    }
}

void basis_apply_parallel(const tps::RowMatrixXd& phi, const Vec2* targets, Vec2* out) {
    const long rows = phi.rows();
    const int n = static_cast<int>(phi.cols());
#pragma omp parallel for schedule(static)
    for (long p = 0; p < rows; ++p) {
        const double* row = phi.data() + static_cast<size_t>(p) * n;
        double ox = 0.0;
        double oy = 0.0;
        for (int i = 0; i < n; ++i) {
            ox += row[i] * targets[i].x;
            oy += row[i] * targets[i].y;
        }
        out[p] = {ox, oy};
    }
}

void basis_apply(const tps::RowMatrixXd& phi, const Vec2* targets, Vec2* out, Exec mode) {
    if (mode == Exec::parallel) {
        basis_apply_parallel(phi, targets, out);
    } else {
        basis_apply_serial(phi, targets, out);
    }
}

namespace {

// one N x 2 partial per fixed-size row block; blocks combined in order
void basis_accumulate_block(const tps::RowMatrixXd& phi, const Vec2* grads, long begin,
                            long end, double* acc) {
    const int n = static_cast<int>(phi.cols());
    for (long p = begin; p < end; ++p) {
        const double* row = phi.data() + static_cast<size_t>(p) * n;
        const Vec2 g = grads[p];
        for (int i = 0; i < n; ++i) {
            acc[2 * i + 0] += row[i] * g.x;
            acc[2 * i + 1] += row[i] * g.y;
        }
    }
}

void basis_accumulate_blocks(const tps::RowMatrixXd& phi, const Vec2* grads,
                             Eigen::MatrixX2d& out, bool parallel) {
    const long rows = phi.rows();
    const int n = static_cast<int>(phi.cols());
    const long n_blocks = (rows + static_cast<long>(kReductionBlock) - 1) /
                          static_cast<long>(kReductionBlock);
    std::vector<double> partials(static_cast<size_t>(n_blocks) * n * 2, 0.0);

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long b = 0; b < n_blocks; ++b) {
            const long begin = b * static_cast<long>(kReductionBlock);
            const long end = std::min(rows, begin + static_cast<long>(kReductionBlock));
            basis_accumulate_block(phi, grads, begin, end,
                                   partials.data() + static_cast<size_t>(b) * n * 2);
        }
    } else {
        for (long b = 0; b < n_blocks; ++b) {
            const long begin = b * static_cast<long>(kReductionBlock);
            const long end = std::min(rows, begin + static_cast<long>(kReductionBlock));
            basis_accumulate_block(phi, grads, begin, end,
                                   partials.data() + static_cast<size_t>(b) * n * 2);
        }
    }

    out.setZero(n, 2);
    for (long b = 0; b < n_blocks; ++b) {
        const double* acc = partials.data() + static_cast<size_t>(b) * n * 2;
        for (int i = 0; i < n; ++i) {
            out(i, 0) += acc[2 * i + 0];
            out(i, 1) += acc[2 * i + 1];
        }
    }
}

} // namespace

void basis_accumulate_serial(const tps::RowMatrixXd& phi, const Vec2* point_grads,
                             Eigen::MatrixX2d& out) {
    basis_accumulate_blocks(phi, point_grads, out, false);
}

void basis_accumulate_parallel(const tps::RowMatrixXd& phi, const Vec2* point_grads,
                               Eigen::MatrixX2d& out) {
    basis_accumulate_blocks(phi, point_grads, out, true);
}

void basis_accumulate(const tps::RowMatrixXd& phi, const Vec2* point_grads,
                      Eigen::MatrixX2d& out, Exec mode) {
    basis_accumulate_blocks(phi, point_grads, out, mode == Exec::parallel);
}

// --- Sampling ---------------------------------------------------------------

void bilinear_serial(const Raster& src, const Vec2* coords, bool wrap_x, Raster& out) {
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            const size_t p = static_cast<size_t>(r) * out.width + c;
            sample_pixel(src, coords[p], wrap_x, &out.data[p * out.channels]);
        }
    }
}

void bilinear_parallel(const Raster& src, const Vec2* coords, bool wrap_x, Raster& out) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            const size_t p = static_cast<size_t>(r) * out.width + c;
            sample_pixel(src, coords[p], wrap_x, &out.data[p * out.channels]);
        }
    }
}

void bilinear(const Raster& src, const Vec2* coords, bool wrap_x, Raster& out, Exec mode) {
    if (mode == Exec::parallel) {
        bilinear_parallel(src, coords, wrap_x, out);
    } else {
        bilinear_serial(src, coords, wrap_x, out);
    }
}

void bilinear_grad_serial(const Raster& src, const Vec2* coords, const Raster& upstream,
                          bool wrap_x, Vec2* out_grads) {
    const size_t count = static_cast<size_t>(upstream.width) * upstream.height;
    for (size_t p = 0; p < count; ++p) {
        out_grads[p] = sample_pixel_grad(src, coords[p],
                                         &upstream.data[p * upstream.channels], wrap_x);
    }
}

void bilinear_grad_parallel(const Raster& src, const Vec2* coords, const Raster& upstream,
                            bool wrap_x, Vec2* out_grads) {
    const long count = static_cast<long>(upstream.width) * upstream.height;
#pragma omp parallel for schedule(static)
    for (long p = 0; p < count; ++p) {
        out_grads[p] = sample_pixel_grad(
            src, coords[p], &upstream.data[static_cast<size_t>(p) * upstream.channels],
            wrap_x);
    }
}

void bilinear_grad(const Raster& src, const Vec2* coords, const Raster& upstream,
                   bool wrap_x, Vec2* out_grads, Exec mode) {
    if (mode == Exec::parallel) {
        bilinear_grad_parallel(src, coords, upstream, wrap_x, out_grads);
    } else {
        bilinear_grad_serial(src, coords, upstream, wrap_x, out_grads);
    }
}

// --- Reductions and pyramid helpers ------------------------------------------

namespace {

double huber_blocks(const Raster& pred, const Raster& gt, double delta, Raster* grad,
                    bool parallel) {
    if (!pred.same_shape(gt)) {
        throw std::invalid_argument("huber: shape mismatch");
    }
    const long count = static_cast<long>(pred.size());
    const double inv = 1.0 / static_cast<double>(count);
    const long n_blocks = (count + static_cast<long>(kReductionBlock) - 1) /
                          static_cast<long>(kReductionBlock);
    std::vector<double> partials(static_cast<size_t>(n_blocks), 0.0);

    auto block = [&](long b) {
        const long begin = b * static_cast<long>(kReductionBlock);
        const long end = std::min(count, begin + static_cast<long>(kReductionBlock));
        double acc = 0.0;
        for (long i = begin; i < end; ++i) {
            const double e = pred.data[i] - gt.data[i];
            acc += huber_term(e, delta);
            if (grad) grad->data[i] = std::clamp(e, -delta, delta) * inv;
        }
        partials[static_cast<size_t>(b)] = acc;
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long b = 0; b < n_blocks; ++b) block(b);
    } else {
        for (long b = 0; b < n_blocks; ++b) block(b);
    }

    double total = 0.0;
    for (double v : partials) total += v;
    return total * inv;
}

} // namespace

double huber_sum_serial(const Raster& pred, const Raster& gt, double delta, Raster* grad) {
    return huber_blocks(pred, gt, delta, grad, false);
}

double huber_sum_parallel(const Raster& pred, const Raster& gt, double delta, Raster* grad) {
    return huber_blocks(pred, gt, delta, grad, true);
}

double huber_sum(const Raster& pred, const Raster& gt, double delta, Raster* grad,
                 Exec mode) {
    return huber_blocks(pred, gt, delta, grad, mode == Exec::parallel);
}

namespace {

Raster blur_impl(const Raster& src, double sigma, bool parallel) {
    if (sigma <= 0.0) return src;
    const auto taps = gaussian_taps(sigma);
    Raster mid(src.width, src.height, src.channels);
    Raster out(src.width, src.height, src.channels);

    auto h_row = [&](int r) {
        for (int c = 0; c < src.width; ++c) {
            blur_pixel_h(src, taps, r, c, &mid.data[mid.index(r, c)]);
        }
    };
    auto v_row = [&](int r) {
        for (int c = 0; c < src.width; ++c) {
            blur_pixel_v(mid, taps, r, c, &out.data[out.index(r, c)]);
        }
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int r = 0; r < src.height; ++r) h_row(r);
#pragma omp parallel for schedule(static)
        for (int r = 0; r < src.height; ++r) v_row(r);
    } else {
        for (int r = 0; r < src.height; ++r) h_row(r);
        for (int r = 0; r < src.height; ++r) v_row(r);
    }
    return out;
}

Raster downsample_impl(const Raster& src, bool parallel) {
    if (src.width % 2 != 0 || src.height % 2 != 0) {
        throw std::invalid_argument("downsample2: dimensions must be even");
    }
    Raster out(src.width / 2, src.height / 2, src.channels);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int r = 0; r < out.height; ++r) {
            for (int c = 0; c < out.width; ++c) {
                downsample_pixel(src, r, c, &out.data[out.index(r, c)]);
            }
        }
    } else {
        for (int r = 0; r < out.height; ++r) {
            for (int c = 0; c < out.width; ++c) {
                downsample_pixel(src, r, c, &out.data[out.index(r, c)]);
            }
        }
    }
    return out;
}

} // namespace

Raster gaussian_blur_serial(const Raster& src, double sigma) {
    return blur_impl(src, sigma, false);
}

Raster gaussian_blur_parallel(const Raster& src, double sigma) {
    return blur_impl(src, sigma, true);
}

Raster gaussian_blur(const Raster& src, double sigma, Exec mode) {
    return blur_impl(src, sigma, mode == Exec::parallel);
}

Raster downsample2_serial(const Raster& src) { return downsample_impl(src, false); }

Raster downsample2_parallel(const Raster& src) { return downsample_impl(src, true); }

Raster downsample2(const Raster& src, Exec mode) {
    return downsample_impl(src, mode == Exec::parallel);
}

} // namespace panowarp::kernels
