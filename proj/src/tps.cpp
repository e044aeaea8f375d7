// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/tps.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

#include "panowarp/errors.hpp"
#include "panowarp/kernels.hpp"

namespace panowarp::tps {

double kernel(double r_sq) {
    if (r_sq <= 0.0) return 0.0;
    return r_sq * std::log(r_sq);
}

ControlGrid ControlGrid::regular(int n_side) {
    if (n_side < 3) {
        throw std::invalid_argument("ControlGrid: n_side must be >= 3");
    }
    ControlGrid g;
    g.n_side = n_side;
    g.source_points.reserve(static_cast<size_t>(n_side) * n_side);
    for (int i = 0; i < n_side; ++i) {
        for (int j = 0; j < n_side; ++j) {
            g.source_points.push_back({(j + 0.5) / n_side, (i + 0.5) / n_side});
        }
    }
    g.target_points = g.source_points;
    return g;
}

void ControlGrid::validate() const {
    if (n_side < 3) throw std::invalid_argument("ControlGrid: n_side must be >= 3");
    const size_t n = static_cast<size_t>(n_side) * n_side;
    if (source_points.size() != n || target_points.size() != n) {
        throw std::invalid_argument("ControlGrid: point count != n_side^2");
    }
    for (int i = 0; i < n_side; ++i) {
        for (int j = 0; j < n_side; ++j) {
            const Vec2 expect{(j + 0.5) / n_side, (i + 0.5) / n_side};
            const Vec2 got = source_points[static_cast<size_t>(i) * n_side + j];
            if (std::abs(got.x - expect.x) > 1e-12 || std::abs(got.y - expect.y) > 1e-12) {
                throw std::invalid_argument("ControlGrid: sources are not the regular lattice");
            }
        }
    }
}

namespace {

// [[K + kI, P],[P^T, 0]], symmetric, (N+3)^2
Eigen::MatrixXd system_matrix(const ControlGrid& grid, double smoothing) {
    const int n = grid.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 3, n + 3);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double r_sq = (grid.source_points[i] - grid.source_points[j]).norm_sq();
            m(i, j) = kernel(r_sq);
        }
        m(i, i) += smoothing;
        m(i, n + 0) = m(n + 0, i) = 1.0;
        m(i, n + 1) = m(n + 1, i) = grid.source_points[i].x;
        m(i, n + 2) = m(n + 2, i) = grid.source_points[i].y;
    }
    return m;
}

Eigen::FullPivLU<Eigen::MatrixXd> factorize(const ControlGrid& grid, double smoothing) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system_matrix(grid, smoothing));
    if (!lu.isInvertible()) {
        throw NumericError("tps: singular system (collinear or duplicate source points)");
    }
    return lu;
}

} // namespace

Coefficients solve_coefficients(const ControlGrid& grid, double smoothing) {
    grid.validate();
    if (smoothing < 0.0) throw std::invalid_argument("tps: smoothing must be >= 0");
    const int n = grid.size();
    const auto lu = factorize(grid, smoothing);

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 3, 2);
    for (int i = 0; i < n; ++i) {
        rhs(i, 0) = grid.target_points[i].x;
        rhs(i, 1) = grid.target_points[i].y;
    }
    const Eigen::MatrixXd sol = lu.solve(rhs);

    Coefficients coef;
    coef.smoothing = smoothing;
    coef.weights = sol.topRows(n);
    for (int k = 0; k < 2; ++k) {
        coef.affine(k, 0) = sol(n + 0, k);
        coef.affine(k, 1) = sol(n + 1, k);
        coef.affine(k, 2) = sol(n + 2, k);
    }
    return coef;
}

Vec2 evaluate_map(const Coefficients& coef, const ControlGrid& grid, Vec2 q) {
    const int n = grid.size();
    double out_x = coef.affine(0, 0) + coef.affine(0, 1) * q.x + coef.affine(0, 2) * q.y;
    double out_y = coef.affine(1, 0) + coef.affine(1, 1) * q.x + coef.affine(1, 2) * q.y;
    for (int i = 0; i < n; ++i) {
        const double u = kernel((q - grid.source_points[i]).norm_sq());
        out_x += coef.weights(i, 0) * u;
        out_y += coef.weights(i, 1) * u;
    }
    return {out_x, out_y};
}

std::vector<Vec2> evaluate_map(const Coefficients& coef, const ControlGrid& grid,
                               std::span<const Vec2> points) {
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const Vec2& q : points) out.push_back(evaluate_map(coef, grid, q));
    return out;
}

SamplingGrid make_sampling_grid(const Coefficients& coef, const ControlGrid& grid,
                                int width, int height, Exec mode) {
    if (width < 2 || height < 2) {
        throw std::invalid_argument("make_sampling_grid: raster must be at least 2x2");
    }
    SamplingGrid out;
    out.width = width;
    out.height = height;
    out.coords.resize(static_cast<size_t>(width) * height);
    kernels::tps_grid_eval(coef, grid, width, height, out.coords.data(), mode);
    return out;
}

std::vector<Vec2> Basis::apply(std::span<const Vec2> targets, Exec mode) const {
    if (static_cast<int>(targets.size()) != n_ctrl) {
        throw std::invalid_argument("Basis::apply: target count mismatch");
    }
    std::vector<Vec2> out(static_cast<size_t>(phi.rows()));
    kernels::basis_apply(phi, targets.data(), out.data(), mode);
    return out;
}

Eigen::MatrixX2d Basis::accumulate(std::span<const Vec2> point_grads, Exec mode) const {
    if (static_cast<Eigen::Index>(point_grads.size()) != phi.rows()) {
        throw std::invalid_argument("Basis::accumulate: gradient count mismatch");
    }
    Eigen::MatrixX2d out(n_ctrl, 2);
    kernels::basis_accumulate(phi, point_grads.data(), out, mode);
    return out;
}

namespace {

Basis basis_from_queries(const ControlGrid& grid, double smoothing,
                         std::span<const Vec2> queries, Exec mode) {
    grid.validate();
    const int n = grid.size();
    const auto lu = factorize(grid, smoothing);

    // W = M^-1 [I_N; 0], so phi(q) = W^T u(q) with
    // u(q) = [U(|q-p_1|^2) ... U(|q-p_N|^2), 1, q.x, q.y].
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 3, n);
    rhs.topRows(n).setIdentity();
    const Eigen::MatrixXd w = lu.solve(rhs);

    Basis basis;
    basis.n_ctrl = n;
    basis.phi.resize(static_cast<Eigen::Index>(queries.size()), n);
    kernels::basis_eval(grid.source_points.data(), n, w, queries.data(),
                        queries.size(), basis.phi, mode);
    return basis;
}

} // namespace

Basis map_jacobian_wrt_targets(const ControlGrid& grid, double smoothing,
                               std::span<const Vec2> query_points, Exec mode) {
    return basis_from_queries(grid, smoothing, query_points, mode);
}

Basis grid_basis(const ControlGrid& grid, double smoothing, int width, int height,
                 Exec mode) {
    std::vector<Vec2> centers(static_cast<size_t>(width) * height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            centers[static_cast<size_t>(r) * width + c] = {(c + 0.5) / width,
                                                           (r + 0.5) / height};
        }
    }
    return basis_from_queries(grid, smoothing, centers, mode);
}

double bending_energy(const ControlGrid& grid, const Coefficients& coef) {
    const int n = grid.size();
    double acc = 0.0;
    for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < n; ++i) {
            double row = 0.0;
            for (int j = 0; j < n; ++j) {
                row += kernel((grid.source_points[i] - grid.source_points[j]).norm_sq()) *
                       coef.weights(j, k);
            }
            acc += coef.weights(i, k) * row;
        }
    }
    return acc;
}

} // namespace panowarp::tps
