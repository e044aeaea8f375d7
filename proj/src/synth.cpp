// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "panowarp/errors.hpp"
#include "panowarp/png_io.hpp"

namespace panowarp::synth {

using json = nlohmann::json;

void CorpusSpec::validate() const {
    if (count < 1) throw std::invalid_argument("CorpusSpec: count must be >= 1");
    if (kind == Kind::manhattan) {
        if (min_corners < 4 || max_corners > 12 || min_corners > max_corners ||
            min_corners % 2 != 0 || max_corners % 2 != 0) {
            throw std::invalid_argument(
                "CorpusSpec: corner counts must be even, within [4,12], min <= max");
        }
    }
    if (!(min_size >= 1.0) || !(max_size >= min_size)) {
        throw std::invalid_argument("CorpusSpec: bad size range");
    }
    if (!(min_ceiling > 1.6) || !(max_ceiling >= min_ceiling)) {
        throw std::invalid_argument("CorpusSpec: ceiling range must exceed camera height");
    }
    if (camera_jitter < 0.0 || !(wall_clearance > 0.0)) {
        throw std::invalid_argument("CorpusSpec: bad camera parameters");
    }
    if (width < 64 || height < 32 || width % 2 != 0 || height % 2 != 0) {
        throw std::invalid_argument("CorpusSpec: resolution must be even and at least 64x32");
    }
}

std::string CorpusSpec::to_json_string() const {
    json j;
    j["count"] = count;
    j["seed"] = seed;
    j["kind"] = kind == Kind::cuboid ? "cuboid" : "manhattan";
    j["min_corners"] = min_corners;
    j["max_corners"] = max_corners;
    j["min_size"] = min_size;
    j["max_size"] = max_size;
    j["min_ceiling"] = min_ceiling;
    j["max_ceiling"] = max_ceiling;
    j["camera_jitter"] = camera_jitter;
    j["wall_clearance"] = wall_clearance;
    j["width"] = width;
    j["height"] = height;
    return j.dump(2);
}

CorpusSpec CorpusSpec::from_json_string(const std::string& text) {
    try {
        const json j = json::parse(text);
        CorpusSpec spec;
        spec.count = j.value("count", spec.count);
        spec.seed = j.value("seed", spec.seed);
        const std::string kind = j.value("kind", std::string("cuboid"));
        if (kind == "cuboid") {
            spec.kind = Kind::cuboid;
        } else if (kind == "manhattan") {
            spec.kind = Kind::manhattan;
        } else {
            throw DataError("CorpusSpec: unknown kind " + kind);
        }
        spec.min_corners = j.value("min_corners", spec.min_corners);
        spec.max_corners = j.value("max_corners", spec.max_corners);
        spec.min_size = j.value("min_size", spec.min_size);
        spec.max_size = j.value("max_size", spec.max_size);
        spec.min_ceiling = j.value("min_ceiling", spec.min_ceiling);
        spec.max_ceiling = j.value("max_ceiling", spec.max_ceiling);
        spec.camera_jitter = j.value("camera_jitter", spec.camera_jitter);
        spec.wall_clearance = j.value("wall_clearance", spec.wall_clearance);
        spec.width = j.value("width", spec.width);
        spec.height = j.value("height", spec.height);
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw DataError(std::string("corpus spec JSON: ") + e.what());
    }
}

namespace {

constexpr double kCameraHeight = 1.6;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::mt19937_64 rng_for(uint64_t seed, int index) {
    std::seed_seq seq{static_cast<uint64_t>(0x70616e6f77617270ULL), seed,
                      static_cast<uint64_t>(index)};
    return std::mt19937_64(seq);
}

// rectangle corners counterclockwise: (+x,-z), (+x,+z), (-x,+z), (-x,-z)
Polygon base_rectangle(double half_w, double half_d) {
    return {{half_w, -half_d}, {half_w, half_d}, {-half_w, half_d}, {-half_w, -half_d}};
}

// cuts a t_in x t_out notch out of corner k of a counterclockwise rectangle
Polygon cut_corners(const Polygon& rect, const std::vector<int>& which,
                    const std::vector<std::pair<double, double>>& sizes) {
    Polygon out;
    const size_t n = rect.size();
    for (size_t k = 0; k < n; ++k) {
        auto it = std::find(which.begin(), which.end(), static_cast<int>(k));
        if (it == which.end()) {
            out.push_back(rect[k]);
            continue;
        }
        const auto [t_in, t_out] = sizes[static_cast<size_t>(it - which.begin())];
        const Vec2 p = rect[k];
        const Vec2 prev = rect[(k + n - 1) % n];
        const Vec2 next = rect[(k + 1) % n];
        auto unit = [](Vec2 v) {
            const double len = v.norm();
            return Vec2{v.x / len, v.y / len};
        };
        const Vec2 din = unit(p - prev);
        const Vec2 dout = unit(next - p);
        out.push_back(p - din * t_in);
        out.push_back(p - din * t_in + dout * t_out);
        out.push_back(p + dout * t_out);
    }
    return out;
}

// Projected corner blobs must stay apart for rendering and recovery to be
// well posed: distinct wall-wall columns separated in u (so ceiling/floor
// pairing is unambiguous) and all blob centers far enough apart that their
// binarized discs stay disjoint.
bool blobs_separated(const layout::CornerAnnotation& ann, int width) {
    const double scale = width / 1024.0;
    // distinct wall-wall columns stay at least one corner footprint apart,
    // close to the splitting rule's 75 px unit; anything closer counts as
    // occluded geometry, which is out of scope
    const double min_du = 60.0 * scale;
    const double min_dist = 48.0 * scale;
    const size_t n = ann.corners.size();
    auto wrap_du = [&](double a, double b) {
        double d = a - b;
        d -= width * std::floor((d + width / 2.0) / width);
        return std::abs(d);
    };
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (wrap_du(ann.corners[i].u, ann.corners[j].u) < min_du) return false;
        }
    }
    std::vector<Vec2> centers;
    for (const auto& c : ann.corners) {
        centers.push_back({c.u, c.v_ceiling});
        centers.push_back({c.u, c.v_floor});
    }
    for (size_t i = 0; i < centers.size(); ++i) {
        for (size_t j = i + 1; j < centers.size(); ++j) {
            const double du = wrap_du(centers[i].x, centers[j].x);
            const double dv = centers[i].y - centers[j].y;
            if (std::sqrt(du * du + dv * dv) < min_dist) return false;
        }
    }
    return true;
}

bool camera_ok(const Polygon& poly, Vec2 cam, const CorpusSpec& spec, double ceiling,
               layout::RoomLayout* out) {
    if (!point_in_polygon(poly, cam)) return false;
    if (distance_to_boundary(poly, cam) < spec.wall_clearance) return false;
    if (!point_in_kernel(poly, cam, 0.15)) return false;

    layout::RoomLayout room;
    room.camera_height = kCameraHeight;
    room.ceiling_height = ceiling;
    room.manhattan = true;
    room.floor_polygon.reserve(poly.size());
    for (const Vec2& v : poly) room.floor_polygon.push_back(v - cam);

    const auto ann = layout::annotate(room, spec.width, spec.height);
    if (!blobs_separated(ann, spec.width)) return false;
    *out = room;
    return true;
}

} // namespace

layout::RoomLayout generate_layout(const CorpusSpec& spec, int index) {
    spec.validate();
    auto rng = rng_for(spec.seed, index);

    // dimensions are drawn once and kept; rejections only ever resample the
    // camera and the notch geometry, so size marginals stay uniform
    const double w = uniform(rng, spec.min_size, spec.max_size);
    const double d = uniform(rng, spec.min_size, spec.max_size);
    const double ceiling = uniform(rng, spec.min_ceiling, spec.max_ceiling);

    int corners = 4;
    if (spec.kind == CorpusSpec::Kind::manhattan) {
        const int n_choices = (spec.max_corners - spec.min_corners) / 2 + 1;
        corners = spec.min_corners +
                  2 * std::uniform_int_distribution<int>(0, n_choices - 1)(rng);
    }
    const int n_cuts = (corners - 4) / 2;

    const Polygon rect = base_rectangle(w / 2.0, d / 2.0);
    for (int shape_try = 0; shape_try < 64; ++shape_try) {
        Polygon poly = rect;
        if (n_cuts > 0) {
            std::vector<int> all{0, 1, 2, 3};
            std::shuffle(all.begin(), all.end(), rng);
            std::vector<int> which(all.begin(), all.begin() + n_cuts);
            std::sort(which.begin(), which.end());
            std::vector<std::pair<double, double>> sizes;
            bool feasible = true;
            for (int k : which) {
                // notch depths along the incoming and outgoing rectangle
                // edges; capped below half so notches never meet
                const Vec2 p = rect[static_cast<size_t>(k)];
                const Vec2 prev = rect[(static_cast<size_t>(k) + 3) % 4];
                const Vec2 next = rect[(static_cast<size_t>(k) + 1) % 4];
                const double in_len = (p - prev).norm();
                const double out_len = (next - p).norm();
                if (in_len / 2.0 - 0.5 < 0.5 || out_len / 2.0 - 0.5 < 0.5) {
                    feasible = false;
                    break;
                }
                sizes.push_back({uniform(rng, 0.5, in_len / 2.0 - 0.5),
                                 uniform(rng, 0.5, out_len / 2.0 - 0.5)});
            }
            if (!feasible) {
                // room too small for the requested corner count
                throw DataError("generate_layout: room too small for " +
                                std::to_string(corners) + " corners at index " +
                                std::to_string(index));
            }
            poly = cut_corners(rect, which, sizes);
        }

        for (int cam_try = 0; cam_try < 128; ++cam_try) {
            Vec2 cam{0.0, 0.0};
            if (cam_try + 1 < 128) { // last attempt falls back to the center
                const double r = spec.camera_jitter * std::sqrt(uniform(rng, 0.0, 1.0));
                const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                cam = {r * std::cos(a), r * std::sin(a)};
            }
            layout::RoomLayout room;
            if (camera_ok(poly, cam, spec, ceiling, &room)) {
                room.validate();
                return room;
            }
        }
        if (n_cuts == 0) break; // nothing else to resample for a cuboid
    }
    throw DataError("generate_layout: rejection sampling failed at index " +
                    std::to_string(index));
}

std::vector<Sample> generate(const CorpusSpec& spec) {
    spec.validate();
    std::vector<Sample> samples(static_cast<size_t>(spec.count));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < spec.count; ++i) {
        Sample& s = samples[static_cast<size_t>(i)];
        s.room = generate_layout(spec, i);
        s.maps = layout::render_maps(s.room, spec.width, spec.height);
        s.corners = layout::annotate(s.room, spec.width, spec.height);
    }
    return samples;
}

void write_corpus(const CorpusSpec& spec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto samples = generate(spec);

    json manifest;
    manifest["spec"] = json::parse(spec.to_json_string());
    manifest["entries"] = json::array();
    for (size_t i = 0; i < samples.size(); ++i) {
        std::ostringstream name;
        name.width(4);
        name.fill('0');
        name << i;
        const std::string entry = name.str();
        write_png(dir / (entry + ".edge.png"), samples[i].maps.edge);
        write_png(dir / (entry + ".corner.png"), samples[i].maps.corner);
        layout::save_room(samples[i].room, dir / (entry + ".layout.json"));
        layout::save_annotation(samples[i].corners, dir / (entry + ".corners.json"));
        manifest["entries"].push_back(entry);
    }
    std::ofstream f(dir / "index.json", std::ios::trunc);
    if (!f) throw DataError("write_corpus: cannot open manifest in " + dir.string());
    f << manifest.dump(2) << "\n";
}

std::vector<std::string> read_manifest(const std::filesystem::path& dir) {
    std::ifstream f(dir / "index.json");
    if (!f) throw DataError("read_manifest: no index.json in " + dir.string());
    try {
        const json j = json::parse(f);
        std::vector<std::string> entries;
        for (const auto& e : j.at("entries")) entries.push_back(e.get<std::string>());
        return entries;
    } catch (const json::exception& e) {
        throw DataError(std::string("read_manifest: ") + e.what());
    }
}

} // namespace panowarp::synth
