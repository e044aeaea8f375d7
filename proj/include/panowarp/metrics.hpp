// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "panowarp/geometry.hpp"
#include "panowarp/layout.hpp"
#include "panowarp/raster.hpp"

namespace panowarp::metrics {

struct Report {
    double iou3d = 0.0;
    double iou2d = 0.0;
    double ce_pct = 0.0;
    double pe_pct = 0.0;
};

std::string to_json_string(const Report& report);
Report report_from_json_string(const std::string& text);

// Area of the intersection of two simple polygons, computed by ear-clipping
// both and clipping triangle pairs. Rejects self-intersecting input.
double polygon_intersection_area(const Polygon& a, const Polygon& b);

// Floor-area intersection over union.
double iou_2d(const layout::RoomLayout& pred, const layout::RoomLayout& gt);

// Volume IoU for vertical prisms on a common ground plane:
// vol_inter = area(floor intersection) * min(height_pred, height_gt).
double iou_3d(const layout::RoomLayout& pred, const layout::RoomLayout& gt);

// Mean Euclidean pixel distance over matched corner points, normalized by
// the image diagonal, in percent. Prediction and ground-truth corner
// sequences are cyclically aligned (both orientations) to minimize the
// total distance; horizontal distances respect the panorama seam.
// Throws on corner-count mismatch.
double corner_error(const layout::CornerAnnotation& pred, const layout::CornerAnnotation& gt,
                    int width, int height);

enum class RegionClass : uint8_t { ceiling = 0, wall = 1, floor = 2 };

// Per-pixel {ceiling, wall, floor} labels induced by the edge map: in each
// column the wall band lies between the green (wall-ceiling) and blue
// (wall-floor) boundary strokes; columns without a stroke interpolate from
// their neighbors.
std::vector<RegionClass> classify_regions(const Raster& edge);

// Fraction of pixels whose class labels differ, in percent.
double pixel_error(std::span<const RegionClass> pred, std::span<const RegionClass> gt);

} // namespace panowarp::metrics
