// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace panowarp {

// Dense row-major raster with interleaved channels, values in [0, 1].
// Channel count is 1 for corner maps and 3 for edge maps.
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    Raster() = default;
    Raster(int w, int h, int c) : width(w), height(h), channels(c) {
        if (w <= 0 || h <= 0 || (c != 1 && c != 3)) {
            throw std::invalid_argument("Raster: bad dimensions");
        }
        data.assign(static_cast<size_t>(w) * h * c, 0.0);
    }

    size_t index(int row, int col, int ch = 0) const {
        return (static_cast<size_t>(row) * width + col) * channels + ch;
    }
    double& at(int row, int col, int ch = 0) { return data[index(row, col, ch)]; }
    double at(int row, int col, int ch = 0) const { return data[index(row, col, ch)]; }

    size_t size() const { return data.size(); }
    bool same_shape(const Raster& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// The pair of rasters the warp operates on: an RGB edge map (wall-wall
// boundaries in red, wall-ceiling in green, wall-floor in blue) and a
// grayscale corner map with a blob per projected room corner.
struct LayoutMaps {
    Raster edge;
    Raster corner;
};

} // namespace panowarp
