// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/warp.hpp"

#include <stdexcept>

#include "panowarp/kernels.hpp"

namespace panowarp::warp {

Raster sample_bilinear(const Raster& src, const tps::SamplingGrid& grid, bool wrap_x,
                       Exec mode) {
    if (src.size() == 0) throw std::invalid_argument("sample_bilinear: empty source");
    if (grid.coords.size() != static_cast<size_t>(grid.width) * grid.height) {
        throw std::invalid_argument("sample_bilinear: grid coordinate count mismatch");
    }
    Raster out(grid.width, grid.height, src.channels);
    kernels::bilinear(src, grid.coords.data(), wrap_x, out, mode);
    return out;
}

std::vector<Vec2> sample_gradient(const Raster& src, const tps::SamplingGrid& grid,
                                  const Raster& upstream, bool wrap_x, Exec mode) {
    if (upstream.width != grid.width || upstream.height != grid.height ||
        upstream.channels != src.channels) {
        throw std::invalid_argument("sample_gradient: upstream shape mismatch");
    }
    std::vector<Vec2> grads(grid.coords.size());
    kernels::bilinear_grad(src, grid.coords.data(), upstream, wrap_x, grads.data(), mode);
    return grads;
}

} // namespace panowarp::warp
