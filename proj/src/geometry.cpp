// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace panowarp {

double polygon_area_signed(const Polygon& poly) {
    const size_t n = poly.size();
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        acc += a.cross(b);
    }
    return 0.5 * acc;
}

namespace {

// Proper or touching intersection of segments [a,b] and [c,d].
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
        const double v = (q - p).cross(r - p);
        if (v > 0) return 1;
        if (v < 0) return -1;
        return 0;
    };
    auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
        return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
               std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
    };
    const int o1 = orient(a, b, c);
    const int o2 = orient(a, b, d);
    const int o3 = orient(c, d, a);
    const int o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len_sq = ab.norm_sq();
    if (len_sq == 0.0) return (p - a).norm();
    double t = (p - a).dot(ab) / len_sq;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

} // namespace

bool polygon_is_simple(const Polygon& poly) {
    const size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        if ((poly[(i + 1) % n] - poly[i]).norm_sq() == 0.0) return false;
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (they share an endpoint)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j],
                                   poly[(j + 1) % n])) {
                return false;
            }
        }
    }
    return true;
}

bool point_in_polygon(const Polygon& poly, Vec2 p) {
    const size_t n = poly.size();
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if (point_segment_distance(p, a, b) == 0.0) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

double distance_to_boundary(const Polygon& poly, Vec2 p) {
    const size_t n = poly.size();
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
        best = std::min(best,
                        point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    }
    return best;
}

bool point_in_kernel(const Polygon& poly, Vec2 p, double margin) {
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % n];
        const Vec2 e = b - a;
        const double len = e.norm();
        if (len == 0.0) return false;
        // signed distance of p left of the directed supporting line
        const double d = e.cross(p - a) / len;
        if (d < margin) return false;
    }
    return true;
}

std::vector<Triangle> triangulate(const Polygon& poly) {
    const size_t n = poly.size();
    if (n < 3) throw std::invalid_argument("triangulate: polygon has < 3 vertices");

    // work on a counterclockwise copy
    Polygon pts = poly;
    if (polygon_area_signed(pts) < 0.0) std::reverse(pts.begin(), pts.end());

    std::vector<int> idx(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) idx[i] = static_cast<int>(i);

    auto is_convex = [&](int a, int b, int c) {
        return (pts[b] - pts[a]).cross(pts[c] - pts[b]) > 0.0;
    };
    auto in_triangle = [&](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
        const double d1 = (b - a).cross(p - a);
        const double d2 = (c - b).cross(p - b);
        const double d3 = (a - c).cross(p - c);
        return d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0;
    };

    std::vector<Triangle> tris;
    tris.reserve(pts.size() - 2);
    size_t guard = 0;
    while (idx.size() > 3) {
        bool clipped = false;
        for (size_t i = 0; i < idx.size(); ++i) {
            const int ia = idx[(i + idx.size() - 1) % idx.size()];
            const int ib = idx[i];
            const int ic = idx[(i + 1) % idx.size()];
            if (!is_convex(ia, ib, ic)) continue;
            bool ear = true;
            for (int other : idx) {
                if (other == ia || other == ib || other == ic) continue;
                if (in_triangle(pts[other], pts[ia], pts[ib], pts[ic])) {
                    ear = false;
                    break;
                }
            }
            if (!ear) continue;
            tris.push_back({pts[ia], pts[ib], pts[ic]});
            idx.erase(idx.begin() + static_cast<long>(i));
            clipped = true;
            break;
        }
        if (!clipped) {
            throw std::invalid_argument(
                "triangulate: no ear found (polygon not simple?)");
        }
        if (++guard > 4 * n) {
            throw std::invalid_argument("triangulate: did not terminate");
        }
    }
    tris.push_back({pts[idx[0]], pts[idx[1]], pts[idx[2]]});
    return tris;
}

Polygon clip_convex(const Polygon& subject, const Polygon& convex_clip) {
    Polygon output = subject;
    const size_t m = convex_clip.size();
    for (size_t i = 0; i < m && !output.empty(); ++i) {
        const Vec2 a = convex_clip[i];
        const Vec2 b = convex_clip[(i + 1) % m];
        const Vec2 e = b - a;

        Polygon input;
        input.swap(output);
        const size_t k = input.size();
        for (size_t j = 0; j < k; ++j) {
            const Vec2 cur = input[j];
            const Vec2 nxt = input[(j + 1) % k];
            const double dc = e.cross(cur - a);
            const double dn = e.cross(nxt - a);
            auto intersect = [&]() {
                const double t = dc / (dc - dn);
                return cur + (nxt - cur) * t;
            };
            if (dc >= 0.0) {
                output.push_back(cur);
                if (dn < 0.0) output.push_back(intersect());
            } else if (dn >= 0.0) {
                output.push_back(intersect());
            }
        }
    }
    return output;
}

} // namespace panowarp
