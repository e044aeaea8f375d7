// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "panowarp/parallel.hpp"
#include "panowarp/raster.hpp"
#include "panowarp/tps.hpp"

namespace panowarp::warp {

// Backward warp of src through the sampling grid: each output pixel reads
// the source at its grid coordinate with bilinear interpolation. With
// wrap_x the x coordinate wraps modulo the source width (the left and right
// edges of an equirectangular panorama are adjacent); without it,
// out-of-range columns read zero. The y coordinate always clamps.
Raster sample_bilinear(const Raster& src, const tps::SamplingGrid& grid, bool wrap_x = true,
                       Exec mode = default_exec());

// Gradient of sum(upstream .* sample_bilinear(src, grid)) with respect to
// the grid coordinates, in normalized units. Piecewise-bilinear with the
// right-limit convention at integer breakpoints.
std::vector<Vec2> sample_gradient(const Raster& src, const tps::SamplingGrid& grid,
                                  const Raster& upstream, bool wrap_x = true,
                                  Exec mode = default_exec());

} // namespace panowarp::warp
