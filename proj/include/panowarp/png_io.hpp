// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "panowarp/raster.hpp"

namespace panowarp {

// 8-bit PNG, grayscale for single-channel rasters and RGB for 3-channel
// ones. Values map linearly [0,1] <-> [0,255]. The encoder always emits the
// same bytes for the same raster.
void write_png(const std::filesystem::path& path, const Raster& raster);

// Reads 8-bit grayscale or RGB PNGs (the subset the encoder writes).
Raster read_png(const std::filesystem::path& path);

} // namespace panowarp
