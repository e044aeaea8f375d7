// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "panowarp/geometry.hpp"
#include "panowarp/raster.hpp"

namespace panowarp::postproc {

// One connected region of a binarized map. Horizontal extent is stored as
// (x0, x_width) so regions that straddle the panorama seam keep a sensible
// bounding box: columns are x0 .. x0 + x_width - 1 modulo the raster width.
struct Component {
    int label = 0;
    int x0 = 0;
    int x_width = 0;
    int y0 = 0;
    int y1 = 0; // inclusive
    long pixel_count = 0;
    Vec2 centroid; // continuous pixel coords, wrap-aware in x
};

struct ComponentSet {
    int width = 0;
    int height = 0;
    std::vector<int> labels; // 0 = background, components numbered from 1
    std::vector<Component> components;
};

// pixel >= threshold -> 1 else 0; single-channel input.
Raster binarize(const Raster& gray, double threshold);

// Two-pass labeling, 4- or 8-connectivity. With wrap_x, pixels in the first
// and last column are neighbors (panorama seam).
ComponentSet connected_components(const Raster& binary, int connectivity = 8,
                                  bool wrap_x = true);

struct SplitParams {
    double unit_width = 75.0; // expected single-corner width in px at 1024x512
    int separator = 5;        // width of the zeroed band between split parts
    double tolerance = 25.0;  // |w - m*unit_width| acceptance band
    // Width analysis happens at the blob's visible footprint level: a
    // rendered corner is a Gaussian with 4*sigma ~ 75 px support, so its
    // footprint (value exp(-2) of peak) is what the 75-px unit refers to.
    // Binarizing at 0.5 of peak would shrink a single corner to ~44 px and
    // the multiplicity test would never fire on real merges.
    double threshold = 0.135;
    int horizon_row = -1; // ceiling/floor divider; -1 means height/2
    bool wrap_x = true;
};

// Splits merged ceiling corners: every upper component whose width is close
// to a multiple m >= 2 of unit_width is cut into m equal parts by zeroed
// vertical bands, and the same column bands are cleared in the floor half of
// the corner map and in the edge map. Everything else passes through
// unchanged; applying the split twice equals applying it once.
LayoutMaps split_corners(const LayoutMaps& maps, const SplitParams& params = {});

} // namespace panowarp::postproc
