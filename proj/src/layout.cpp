// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/layout.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "panowarp/errors.hpp"
#include "panowarp/postproc.hpp"

namespace panowarp::layout {

using json = nlohmann::json;

namespace {
constexpr double kPi = std::numbers::pi;
}

void RoomLayout::validate() const {
    if (floor_polygon.size() < 4) {
        throw std::invalid_argument("RoomLayout: fewer than 4 floor vertices");
    }
    if (!(camera_height > 0.0) || !(ceiling_height > camera_height)) {
        throw std::invalid_argument("RoomLayout: need ceiling_height > camera_height > 0");
    }
    if (!polygon_is_simple(floor_polygon)) {
        throw std::invalid_argument("RoomLayout: floor polygon self-intersects");
    }
    if (polygon_area_signed(floor_polygon) <= 0.0) {
        throw std::invalid_argument("RoomLayout: floor polygon must be counterclockwise");
    }
    if (!point_in_polygon(floor_polygon, {0.0, 0.0}) ||
        distance_to_boundary(floor_polygon, {0.0, 0.0}) <= 0.0) {
        throw std::invalid_argument("RoomLayout: camera not strictly inside the room");
    }
    if (manhattan) {
        const size_t n = floor_polygon.size();
        for (size_t i = 0; i < n; ++i) {
            const Vec2 e = floor_polygon[(i + 1) % n] - floor_polygon[i];
            if (std::abs(e.x) > 1e-9 && std::abs(e.y) > 1e-9) {
                throw std::invalid_argument("RoomLayout: manhattan room has a slanted edge");
            }
        }
    }
}

SphericalPoint project(const Vec3& p) {
    const double norm = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    if (norm == 0.0) throw std::invalid_argument("project: origin has no direction");
    SphericalPoint s;
    s.longitude = std::atan2(p.x, p.z);
    s.latitude = std::asin(std::clamp(p.y / norm, -1.0, 1.0));
    return s;
}

Vec2 pixel(const SphericalPoint& s, int width, int height) {
    return {(s.longitude + kPi) / (2.0 * kPi) * width,
            (kPi / 2.0 - s.latitude) / kPi * height};
}

SphericalPoint unpixel(Vec2 px, int width, int height) {
    SphericalPoint s;
    s.longitude = px.x / width * 2.0 * kPi - kPi;
    s.latitude = kPi / 2.0 - px.y / height * kPi;
    return s;
}

namespace {

// stamps a filled disc; columns wrap, rows clamp by skipping
void stamp_disc(Raster& raster, int ch, Vec2 center, double radius) {
    const int w = raster.width;
    const int r_lo = static_cast<int>(std::floor(center.y - radius - 0.5));
    const int r_hi = static_cast<int>(std::ceil(center.y + radius - 0.5));
    const int c_lo = static_cast<int>(std::floor(center.x - radius - 0.5));
    const int c_hi = static_cast<int>(std::ceil(center.x + radius - 0.5));
    const double r_sq = radius * radius;
    for (int r = r_lo; r <= r_hi; ++r) {
        if (r < 0 || r >= raster.height) continue;
        for (int c = c_lo; c <= c_hi; ++c) {
            const double dx = c + 0.5 - center.x;
            const double dy = r + 0.5 - center.y;
            if (dx * dx + dy * dy > r_sq) continue;
            int cc = c % w;
            if (cc < 0) cc += w;
            raster.at(r, cc, ch) = 1.0;
        }
    }
}

void stamp_gaussian(Raster& raster, Vec2 center, double sigma) {
    const int w = raster.width;
    const double reach = 3.0 * sigma;
    const int r_lo = static_cast<int>(std::floor(center.y - reach - 0.5));
    const int r_hi = static_cast<int>(std::ceil(center.y + reach - 0.5));
    const int c_lo = static_cast<int>(std::floor(center.x - reach - 0.5));
    const int c_hi = static_cast<int>(std::ceil(center.x + reach - 0.5));
    for (int r = r_lo; r <= r_hi; ++r) {
        if (r < 0 || r >= raster.height) continue;
        for (int c = c_lo; c <= c_hi; ++c) {
            const double dx = c + 0.5 - center.x;
            const double dy = r + 0.5 - center.y;
            const double d_sq = dx * dx + dy * dy;
            if (d_sq > reach * reach) continue;
            int cc = c % w;
            if (cc < 0) cc += w;
            const double v = std::exp(-0.5 * d_sq / (sigma * sigma));
            raster.at(r, cc) = std::max(raster.at(r, cc), v);
        }
    }
}

double wrapped_du(double a, double b, int width) {
    double d = a - b;
    d -= width * std::floor((d + width / 2.0) / width);
    return d;
}

// projects the 3-D segment a->b and stamps it as a stroke, subdividing
// until consecutive samples are sub-pixel apart
void stroke_segment(Raster& raster, int ch, const Vec3& a, const Vec3& b, double radius,
                    int width, int height) {
    struct Item {
        Vec3 p0, p1;
        Vec2 px0, px1;
        int depth;
    };
    auto to_px = [&](const Vec3& p) { return pixel(project(p), width, height); };
    std::vector<Item> stack;
    stack.push_back({a, b, to_px(a), to_px(b), 0});
    stamp_disc(raster, ch, stack.back().px0, radius);
    stamp_disc(raster, ch, stack.back().px1, radius);
    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        const double du = wrapped_du(it.px0.x, it.px1.x, width);
        const double dv = it.px0.y - it.px1.y;
        if ((du * du + dv * dv <= 0.5 || it.depth > 24)) continue;
        const Vec3 mid{0.5 * (it.p0.x + it.p1.x), 0.5 * (it.p0.y + it.p1.y),
                       0.5 * (it.p0.z + it.p1.z)};
        const Vec2 mid_px = to_px(mid);
        stamp_disc(raster, ch, mid_px, radius);
        stack.push_back({it.p0, mid, it.px0, mid_px, it.depth + 1});
        stack.push_back({mid, it.p1, mid_px, it.px1, it.depth + 1});
    }
}

} // namespace

LayoutMaps render_maps(const RoomLayout& room, int width, int height,
                       const RenderStyle& style) {
    room.validate();
    const double scale = width / 1024.0;
    const double stroke_r = 0.5 * style.stroke_px * scale;
    const double sigma = style.corner_sigma_px * scale;

    LayoutMaps maps;
    maps.edge = Raster(width, height, 3);
    maps.corner = Raster(width, height, 1);

    const auto& poly = room.floor_polygon;
    const size_t n = poly.size();
    const double y_floor = -room.camera_height;
    const double y_ceil = room.ceiling_height - room.camera_height;

    for (size_t i = 0; i < n; ++i) {
        const Vec2 v0 = poly[i];
        const Vec2 v1 = poly[(i + 1) % n];
        const Vec3 f0{v0.x, y_floor, v0.y};
        const Vec3 f1{v1.x, y_floor, v1.y};
        const Vec3 c0{v0.x, y_ceil, v0.y};
        const Vec3 c1{v1.x, y_ceil, v1.y};

        stroke_segment(maps.edge, 0, f0, c0, stroke_r, width, height); // wall-wall, red
        stroke_segment(maps.edge, 1, c0, c1, stroke_r, width, height); // wall-ceiling, green
        stroke_segment(maps.edge, 2, f0, f1, stroke_r, width, height); // wall-floor, blue

        stamp_gaussian(maps.corner, pixel(project(f0), width, height), sigma);
        stamp_gaussian(maps.corner, pixel(project(c0), width, height), sigma);
    }
    return maps;
}

RoomLayout reference_room() {
    RoomLayout room;
    room.floor_polygon = {{2.0, -2.0}, {2.0, 2.0}, {-2.0, 2.0}, {-2.0, -2.0}};
    room.camera_height = 1.6;
    room.ceiling_height = 3.0;
    room.manhattan = true;
    return room;
}

LayoutMaps reference_layout(int width, int height, const RenderStyle& style) {
    return render_maps(reference_room(), width, height, style);
}

CornerAnnotation annotate(const RoomLayout& room, int width, int height) {
    room.validate();
    CornerAnnotation ann;
    ann.width = width;
    ann.height = height;
    const double y_floor = -room.camera_height;
    const double y_ceil = room.ceiling_height - room.camera_height;
    for (const Vec2& v : room.floor_polygon) {
        const Vec2 pf = pixel(project({v.x, y_floor, v.y}), width, height);
        const Vec2 pc = pixel(project({v.x, y_ceil, v.y}), width, height);
        ann.corners.push_back({pf.x, pc.y, pf.y});
    }
    std::sort(ann.corners.begin(), ann.corners.end(),
              [](const CornerColumn& a, const CornerColumn& b) { return a.u < b.u; });
    return ann;
}

RoomLayout maps_to_layout(const LayoutMaps& maps, double camera_height,
                          const RecoverParams& params) {
    const Raster& corner = maps.corner;
    if (corner.channels != 1) throw DataError("maps_to_layout: corner map must be grayscale");
    const int w = corner.width;
    const int h = corner.height;
    const double horizon = h / 2.0;

    const auto comps =
        postproc::connected_components(postproc::binarize(corner, params.threshold), 8, true);

    // intensity-weighted centroids over each component; plain pixel
    // centroids drift when the warp skews a blob
    std::vector<double> weight(comps.components.size(), 0.0);
    std::vector<double> acc_dx(comps.components.size(), 0.0);
    std::vector<double> acc_y(comps.components.size(), 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const int lab = comps.labels[static_cast<size_t>(r) * w + c];
            if (lab == 0) continue;
            const double v = corner.at(r, c) - params.threshold;
            if (v <= 0.0) continue;
            const size_t k = static_cast<size_t>(lab - 1);
            const double anchor = comps.components[k].centroid.x;
            double dx = c + 0.5 - anchor;
            dx -= w * std::floor((dx + w / 2.0) / w);
            weight[k] += v;
            acc_dx[k] += v * dx;
            acc_y[k] += v * (r + 0.5);
        }
    }

    const double min_blob =
        params.min_blob_px * (static_cast<double>(w) * h) / (1024.0 * 512.0);
    std::vector<Vec2> ceil_pts;
    std::vector<Vec2> floor_pts;
    for (size_t k = 0; k < comps.components.size(); ++k) {
        if (static_cast<double>(comps.components[k].pixel_count) < min_blob) continue;
        Vec2 center = comps.components[k].centroid;
        if (weight[k] > 0.0) {
            double cx = center.x + acc_dx[k] / weight[k];
            cx -= w * std::floor(cx / w);
            center = {cx, acc_y[k] / weight[k]};
        }
        if (center.y < horizon) {
            ceil_pts.push_back(center);
        } else {
            floor_pts.push_back(center);
        }
    }
    if (floor_pts.size() < 4 || ceil_pts.size() < 4) {
        throw DataError("maps_to_layout: fewer than 4 corner pairs found");
    }

    // Ceiling/floor pairing by column, closest pairs first. The ceiling
    // ring is the authoritative corner count (corner splitting operates on
    // it), so an unmatched ceiling is an error, while leftover floor
    // fragments (mirrored split bands can shave them off) are dropped.
    struct Candidate {
        double du;
        size_t ceil, floor;
    };
    std::vector<Candidate> candidates;
    for (size_t c = 0; c < ceil_pts.size(); ++c) {
        for (size_t f = 0; f < floor_pts.size(); ++f) {
            const double du = std::abs(wrapped_du(ceil_pts[c].x, floor_pts[f].x, w));
            if (du <= params.pair_tolerance) candidates.push_back({du, c, f});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return a.du != b.du ? a.du < b.du : (a.ceil != b.ceil ? a.ceil < b.ceil : a.floor < b.floor);
    });
    std::vector<bool> ceil_used(ceil_pts.size(), false);
    std::vector<bool> floor_used(floor_pts.size(), false);
    struct Pair {
        Vec2 floor, ceil;
    };
    std::vector<Pair> pairs;
    for (const Candidate& cand : candidates) {
        if (ceil_used[cand.ceil] || floor_used[cand.floor]) continue;
        ceil_used[cand.ceil] = true;
        floor_used[cand.floor] = true;
        pairs.push_back({floor_pts[cand.floor], ceil_pts[cand.ceil]});
    }
    for (size_t c = 0; c < ceil_pts.size(); ++c) {
        if (!ceil_used[c]) {
            throw DataError("maps_to_layout: unpaired ceiling corner at u=" +
                            std::to_string(ceil_pts[c].x));
        }
    }

    RoomLayout room;
    room.camera_height = camera_height;
    double height_acc = 0.0;
    std::vector<std::pair<double, Vec2>> by_theta;
    for (const Pair& pr : pairs) {
        const SphericalPoint sf = unpixel(pr.floor, w, h);
        const SphericalPoint sc = unpixel(pr.ceil, w, h);
        if (!(sf.latitude < 0.0)) {
            throw DataError("maps_to_layout: floor corner above the horizon");
        }
        const double depth = camera_height / std::tan(-sf.latitude);
        height_acc += camera_height + depth * std::tan(sc.latitude);
        const Vec2 vertex{depth * std::sin(sf.longitude), depth * std::cos(sf.longitude)};
        by_theta.push_back({sf.longitude, vertex});
    }
    // descending azimuth gives counterclockwise order in the x-z plane
    std::sort(by_theta.begin(), by_theta.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [theta, vertex] : by_theta) room.floor_polygon.push_back(vertex);
    room.ceiling_height = height_acc / static_cast<double>(pairs.size());

    try {
        room.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("maps_to_layout: recovered room invalid: ") + e.what());
    }
    return room;
}

void export_obj(const RoomLayout& room, const std::filesystem::path& path) {
    room.validate();
    const auto& poly = room.floor_polygon;
    const int n = static_cast<int>(poly.size());

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("export_obj: cannot open " + path.string());
    f.precision(9);

    // floor ring then ceiling ring, floor at y = 0
    for (const Vec2& v : poly) f << "v " << v.x << " 0 " << v.y << "\n";
    for (const Vec2& v : poly) f << "v " << v.x << " " << room.ceiling_height << " " << v.y << "\n";

    // vertex index in the polygon, for cap triangles from ear clipping
    auto index_of = [&](Vec2 p) {
        for (int i = 0; i < n; ++i) {
            if (poly[i].x == p.x && poly[i].y == p.y) return i;
        }
        throw std::logic_error("export_obj: triangulation vertex not in polygon");
    };

    const auto tris = triangulate(poly);
    for (const Triangle& t : tris) {
        const int a = index_of(t[0]) + 1;
        const int b = index_of(t[1]) + 1;
        const int c = index_of(t[2]) + 1;
        // counterclockwise floor faces down (outward); ceiling reversed
        f << "f " << a << " " << b << " " << c << "\n";
        f << "f " << (a + n) << " " << (c + n) << " " << (b + n) << "\n";
    }
    for (int i = 0; i < n; ++i) {
        const int f0 = i + 1;
        const int f1 = (i + 1) % n + 1;
        const int c0 = f0 + n;
        const int c1 = f1 + n;
        f << "f " << f1 << " " << f0 << " " << c0 << "\n";
        f << "f " << f1 << " " << c0 << " " << c1 << "\n";
    }
    if (!f) throw DataError("export_obj: write failed for " + path.string());
}

std::string to_json_string(const RoomLayout& room) {
    json j;
    j["floor_polygon"] = json::array();
    for (const Vec2& v : room.floor_polygon) j["floor_polygon"].push_back({v.x, v.y});
    j["camera_height"] = room.camera_height;
    j["ceiling_height"] = room.ceiling_height;
    j["manhattan"] = room.manhattan;
    return j.dump(2);
}

RoomLayout room_from_json_string(const std::string& text) {
    try {
        const json j = json::parse(text);
        RoomLayout room;
        for (const auto& v : j.at("floor_polygon")) {
            room.floor_polygon.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }
        room.camera_height = j.at("camera_height").get<double>();
        room.ceiling_height = j.at("ceiling_height").get<double>();
        room.manhattan = j.value("manhattan", false);
        room.validate();
        return room;
    } catch (const json::exception& e) {
        throw DataError(std::string("room JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("room JSON: ") + e.what());
    }
}

std::string to_json_string(const CornerAnnotation& ann) {
    json j;
    j["corners"] = json::array();
    for (const CornerColumn& c : ann.corners) {
        j["corners"].push_back({c.u, c.v_ceiling, c.v_floor});
    }
    j["width"] = ann.width;
    j["height"] = ann.height;
    return j.dump(2);
}

CornerAnnotation annotation_from_json_string(const std::string& text) {
    try {
        const json j = json::parse(text);
        CornerAnnotation ann;
        for (const auto& c : j.at("corners")) {
            ann.corners.push_back(
                {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()});
        }
        ann.width = j.at("width").get<int>();
        ann.height = j.at("height").get<int>();
        return ann;
    } catch (const json::exception& e) {
        throw DataError(std::string("annotation JSON: ") + e.what());
    }
}

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path.string());
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void spit(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot open " + path.string());
    f << text << "\n";
    if (!f) throw DataError("write failed for " + path.string());
}

} // namespace

void save_room(const RoomLayout& room, const std::filesystem::path& path) {
    spit(path, to_json_string(room));
}

RoomLayout load_room(const std::filesystem::path& path) {
    return room_from_json_string(slurp(path));
}

void save_annotation(const CornerAnnotation& ann, const std::filesystem::path& path) {
    spit(path, to_json_string(ann));
}

CornerAnnotation load_annotation(const std::filesystem::path& path) {
    return annotation_from_json_string(slurp(path));
}

} // namespace panowarp::layout
