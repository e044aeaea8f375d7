// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "panowarp/errors.hpp"

namespace panowarp::metrics {

using json = nlohmann::json;

std::string to_json_string(const Report& report) {
    json j;
    j["iou3d"] = report.iou3d;
    j["iou2d"] = report.iou2d;
    j["ce_pct"] = report.ce_pct;
    j["pe_pct"] = report.pe_pct;
    return j.dump(2);
}

Report report_from_json_string(const std::string& text) {
    try {
        const json j = json::parse(text);
        Report r;
        r.iou3d = j.at("iou3d").get<double>();
        r.iou2d = j.at("iou2d").get<double>();
        r.ce_pct = j.at("ce_pct").get<double>();
        r.pe_pct = j.at("pe_pct").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("metrics JSON: ") + e.what());
    }
}

double polygon_intersection_area(const Polygon& a, const Polygon& b) {
    if (!polygon_is_simple(a) || !polygon_is_simple(b)) {
        throw std::invalid_argument("polygon_intersection_area: input not simple");
    }
    const auto tris_a = triangulate(a);
    const auto tris_b = triangulate(b);
    double area = 0.0;
    for (const Triangle& ta : tris_a) {
        const Polygon pa{ta[0], ta[1], ta[2]};
        for (const Triangle& tb : tris_b) {
            const Polygon clipped = clip_convex(pa, {tb[0], tb[1], tb[2]});
            if (clipped.size() >= 3) area += polygon_area(clipped);
        }
    }
    return area;
}

double iou_2d(const layout::RoomLayout& pred, const layout::RoomLayout& gt) {
    const double inter = polygon_intersection_area(pred.floor_polygon, gt.floor_polygon);
    const double a = polygon_area(pred.floor_polygon);
    const double b = polygon_area(gt.floor_polygon);
    const double uni = a + b - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

double iou_3d(const layout::RoomLayout& pred, const layout::RoomLayout& gt) {
    const double inter_area = polygon_intersection_area(pred.floor_polygon, gt.floor_polygon);
    const double vol_inter = inter_area * std::min(pred.ceiling_height, gt.ceiling_height);
    const double vol_pred = polygon_area(pred.floor_polygon) * pred.ceiling_height;
    const double vol_gt = polygon_area(gt.floor_polygon) * gt.ceiling_height;
    const double vol_union = vol_pred + vol_gt - vol_inter;
    return vol_union <= 0.0 ? 0.0 : vol_inter / vol_union;
}

namespace {

double wrapped_dx(double a, double b, int width) {
    double d = a - b;
    d -= width * std::floor((d + width / 2.0) / width);
    return d;
}

} // namespace

double corner_error(const layout::CornerAnnotation& pred, const layout::CornerAnnotation& gt,
                    int width, int height) {
    const size_t n = gt.corners.size();
    if (pred.corners.size() != n) {
        throw DataError("corner_error: corner count mismatch (" +
                        std::to_string(pred.corners.size()) + " vs " + std::to_string(n) + ")");
    }
    if (n == 0) return 0.0;

    auto total_for = [&](bool reversed, size_t shift) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const size_t j = reversed ? (n - 1 - ((i + shift) % n)) : (i + shift) % n;
            const auto& p = pred.corners[j];
            const auto& g = gt.corners[i];
            const double du = wrapped_dx(p.u, g.u, width);
            const double dc = p.v_ceiling - g.v_ceiling;
            const double df = p.v_floor - g.v_floor;
            total += std::sqrt(du * du + dc * dc) + std::sqrt(du * du + df * df);
        }
        return total;
    };

    double best = std::numeric_limits<double>::infinity();
    for (int rev = 0; rev < 2; ++rev) {
        for (size_t shift = 0; shift < n; ++shift) {
            best = std::min(best, total_for(rev == 1, shift));
        }
    }
    const double diag = std::sqrt(static_cast<double>(width) * width +
                                  static_cast<double>(height) * height);
    const double mean = best / static_cast<double>(2 * n);
    return mean / diag * 100.0;
}

std::vector<RegionClass> classify_regions(const Raster& edge) {
    if (edge.channels != 3) throw std::invalid_argument("classify_regions: RGB edge map required");
    const int w = edge.width;
    const int h = edge.height;

    // per column: mean row of green (wall-ceiling) and blue (wall-floor) strokes
    std::vector<double> v_ceil(w, -1.0);
    std::vector<double> v_floor(w, -1.0);
    for (int c = 0; c < w; ++c) {
        double g_sum = 0.0, g_w = 0.0, b_sum = 0.0, b_w = 0.0;
        for (int r = 0; r < h; ++r) {
            const double g = edge.at(r, c, 1);
            const double b = edge.at(r, c, 2);
            g_sum += g * r;
            g_w += g;
            b_sum += b * r;
            b_w += b;
        }
        if (g_w > 0.0) v_ceil[c] = g_sum / g_w;
        if (b_w > 0.0) v_floor[c] = b_sum / b_w;
    }

    // fill gaps from the nearest populated column (wrapping)
    auto fill = [&](std::vector<double>& v) {
        if (std::all_of(v.begin(), v.end(), [](double x) { return x < 0.0; })) {
            throw DataError("classify_regions: edge map has no boundary stroke");
        }
        std::vector<double> out = v;
        for (int c = 0; c < w; ++c) {
            if (v[c] >= 0.0) continue;
            for (int d = 1; d <= w / 2; ++d) {
                const int left = ((c - d) % w + w) % w;
                const int right = (c + d) % w;
                if (v[left] >= 0.0) {
                    out[c] = v[left];
                    break;
                }
                if (v[right] >= 0.0) {
                    out[c] = v[right];
                    break;
                }
            }
        }
        v = out;
    };
    fill(v_ceil);
    fill(v_floor);

    std::vector<RegionClass> classes(static_cast<size_t>(w) * h, RegionClass::wall);
    for (int c = 0; c < w; ++c) {
        for (int r = 0; r < h; ++r) {
            RegionClass cls = RegionClass::wall;
            if (r < v_ceil[c]) {
                cls = RegionClass::ceiling;
            } else if (r > v_floor[c]) {
                cls = RegionClass::floor;
            }
            classes[static_cast<size_t>(r) * w + c] = cls;
        }
    }
    return classes;
}

double pixel_error(std::span<const RegionClass> pred, std::span<const RegionClass> gt) {
    if (pred.size() != gt.size()) throw DataError("pixel_error: size mismatch");
    if (pred.empty()) return 0.0;
    size_t diff = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] != gt[i]) ++diff;
    }
    return static_cast<double>(diff) / static_cast<double>(pred.size()) * 100.0;
}

} // namespace panowarp::metrics
