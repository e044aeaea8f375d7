// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace panowarp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

    bool operator==(const Vec2&) const = default;

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    // z-component of the 2-D cross product
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm_sq()); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Ground-plane polygon in meters, stored as (x, z) pairs with the camera at
// the origin. Counterclockwise means positive shoelace area.
using Polygon = std::vector<Vec2>;

using Triangle = std::array<Vec2, 3>;

// Signed shoelace area; positive for counterclockwise order.
double polygon_area_signed(const Polygon& poly);

inline double polygon_area(const Polygon& poly) {
    return std::abs(polygon_area_signed(poly));
}

// True when no two non-adjacent edges intersect and no edge degenerates.
bool polygon_is_simple(const Polygon& poly);

// Even-odd rule; points on the boundary count as inside.
bool point_in_polygon(const Polygon& poly, Vec2 p);

// Distance from p to the nearest boundary segment.
double distance_to_boundary(const Polygon& poly, Vec2 p);

// True when p lies at least `margin` inside every edge's supporting
// half-plane of a counterclockwise polygon. Points in the kernel see the
// whole boundary, so sorting vertices by azimuth around p is well defined.
bool point_in_kernel(const Polygon& poly, Vec2 p, double margin = 0.0);

// Ear-clipping triangulation of a simple polygon (any orientation).
// Returns exactly size()-2 triangles.
std::vector<Triangle> triangulate(const Polygon& poly);

// Sutherland-Hodgman clip of an arbitrary polygon against a convex,
// counterclockwise clip polygon.
Polygon clip_convex(const Polygon& subject, const Polygon& convex_clip);

} // namespace panowarp
