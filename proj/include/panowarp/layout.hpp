// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "panowarp/geometry.hpp"
#include "panowarp/raster.hpp"

namespace panowarp::layout {

// Vector room model. The camera sits at the origin of the x-z ground plane,
// camera_height meters above the floor; the floor polygon is simple,
// counterclockwise (positive shoelace in x-z) and strictly contains the
// origin.
struct RoomLayout {
    Polygon floor_polygon;
    double camera_height = 1.6;
    double ceiling_height = 3.0;
    bool manhattan = false;

    void validate() const; // throws std::invalid_argument
};

// Equirectangular direction: longitude in [-pi, pi), latitude in
// (-pi/2, pi/2); longitude 0 looks along +z, latitude grows upward (+y).
struct SphericalPoint {
    double longitude = 0.0;
    double latitude = 0.0;
};

struct CornerColumn {
    double u = 0.0;         // pixel column of the wall-wall edge
    double v_ceiling = 0.0; // row of the ceiling corner
    double v_floor = 0.0;   // row of the floor corner
};

struct CornerAnnotation {
    std::vector<CornerColumn> corners; // sorted by u
    int width = 1024;
    int height = 512;
};

struct RenderStyle {
    // both defaults are stated at 1024x512 and scale with width/1024
    double stroke_px = 5.0;
    double corner_sigma_px = 18.75;
};

struct RecoverParams {
    double threshold = 0.5;       // corner-map binarization level
    double pair_tolerance = 10.0; // max |du| between ceiling and floor blobs
    // components smaller than this (in px at 1024x512, scaled by area) are
    // shards a warp can leave above threshold, not corners
    double min_blob_px = 150.0;
};

// theta = atan2(x, z), phi = asin(y / |p|). Rejects the origin.
SphericalPoint project(const Vec3& point);

// u = (theta + pi) / 2pi * width, v = (pi/2 - phi) / pi * height.
Vec2 pixel(const SphericalPoint& s, int width, int height);
SphericalPoint unpixel(Vec2 px, int width, int height);

// Renders the RGB edge map (wall-wall red, wall-ceiling green, wall-floor
// blue) and the grayscale corner map (Gaussian blob per projected corner,
// ceiling and floor).
LayoutMaps render_maps(const RoomLayout& room, int width, int height,
                       const RenderStyle& style = {});

// The canonical reference room: 4m x 4m x 3m cuboid, camera centered at
// 1.6m, wall-wall edges at azimuths +-45 and +-135 degrees.
RoomLayout reference_room();
LayoutMaps reference_layout(int width, int height, const RenderStyle& style = {});

// Projected corner columns of a room, sorted by u.
CornerAnnotation annotate(const RoomLayout& room, int width, int height);

// Recovers the room from rendered or predicted maps: corner-blob centroids
// via connected components, ceiling/floor pairing by column, depth from the
// floor corner latitude at the given camera height. Throws DataError when
// fewer than 4 corner pairs survive or a blob cannot be paired.
RoomLayout maps_to_layout(const LayoutMaps& maps, double camera_height,
                          const RecoverParams& params = {});

// Watertight prism mesh (triangles only), floor at y = 0.
void export_obj(const RoomLayout& room, const std::filesystem::path& path);

std::string to_json_string(const RoomLayout& room);
RoomLayout room_from_json_string(const std::string& text);
std::string to_json_string(const CornerAnnotation& ann);
CornerAnnotation annotation_from_json_string(const std::string& text);

void save_room(const RoomLayout& room, const std::filesystem::path& path);
RoomLayout load_room(const std::filesystem::path& path);
void save_annotation(const CornerAnnotation& ann, const std::filesystem::path& path);
CornerAnnotation load_annotation(const std::filesystem::path& path);

} // namespace panowarp::layout
