// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "panowarp/errors.hpp"
#include "panowarp/metrics.hpp"
#include "panowarp/png_io.hpp"
#include "panowarp/warp.hpp"

namespace panowarp::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

LayoutMaps load_maps(const std::string& prefix) {
    LayoutMaps maps;
    maps.edge = read_png(prefix + ".edge.png");
    maps.corner = read_png(prefix + ".corner.png");
    if (maps.edge.channels != 3) throw DataError(prefix + ".edge.png: expected RGB");
    if (maps.corner.channels != 1) throw DataError(prefix + ".corner.png: expected grayscale");
    if (!maps.edge.same_shape(Raster(maps.corner.width, maps.corner.height, 3))) {
        throw DataError(prefix + ": edge and corner map resolutions differ");
    }
    return maps;
}

void save_maps(const LayoutMaps& maps, const std::string& prefix) {
    write_png(prefix + ".edge.png", maps.edge);
    write_png(prefix + ".corner.png", maps.corner);
}

bool is_corpus_dir(const std::string& path) {
    return fs::is_directory(path) && fs::exists(fs::path(path) / "index.json");
}

// batch inputs are corpus directories, single inputs are map path prefixes
std::vector<std::pair<std::string, std::string>> input_entries(const std::string& input) {
    std::vector<std::pair<std::string, std::string>> entries; // (name, prefix)
    if (is_corpus_dir(input)) {
        for (const std::string& name : synth::read_manifest(input)) {
            entries.push_back({name, (fs::path(input) / name).string()});
        }
    } else {
        entries.push_back({fs::path(input).filename().string(), input});
    }
    return entries;
}

void write_entry_manifest(const fs::path& dir, const std::vector<std::string>& names) {
    json manifest;
    manifest["entries"] = names;
    std::ofstream f(dir / "index.json", std::ios::trunc);
    if (!f) throw DataError("cannot write manifest in " + dir.string());
    f << manifest.dump(2) << "\n";
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path.string());
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void require(bool ok, const std::string& what) {
    if (!ok) throw DataError(what);
}

} // namespace

std::string grid_to_json_string(const tps::ControlGrid& grid) {
    json j;
    j["n_side"] = grid.n_side;
    j["source_points"] = json::array();
    j["target_points"] = json::array();
    for (const Vec2& p : grid.source_points) j["source_points"].push_back({p.x, p.y});
    for (const Vec2& p : grid.target_points) j["target_points"].push_back({p.x, p.y});
    return j.dump(2);
}

tps::ControlGrid grid_from_json_string(const std::string& text) {
    try {
        const json j = json::parse(text);
        tps::ControlGrid grid;
        grid.n_side = j.at("n_side").get<int>();
        for (const auto& p : j.at("source_points")) {
            grid.source_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
        for (const auto& p : j.at("target_points")) {
            grid.target_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
        grid.validate();
        return grid;
    } catch (const json::exception& e) {
        throw DataError(std::string("control grid JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("control grid JSON: ") + e.what());
    }
}

int cmd_gen_reference(const RunConfig& cfg) {
    require(!cfg.output.empty(), "gen-reference: --output directory required");
    fs::create_directories(cfg.output);
    const auto maps = layout::reference_layout(cfg.width, cfg.height);
    const auto room = layout::reference_room();
    const std::string prefix = (fs::path(cfg.output) / "reference").string();
    save_maps(maps, prefix);
    layout::save_room(room, prefix + ".layout.json");
    layout::save_annotation(layout::annotate(room, cfg.width, cfg.height),
                            prefix + ".corners.json");
    std::cout << "reference maps written to " << prefix << ".{edge,corner}.png\n";
    return 0;
}

int cmd_synth(const RunConfig& cfg) {
    require(!cfg.output.empty(), "synth: --output directory required");
    synth::CorpusSpec spec;
    spec.count = cfg.count;
    spec.seed = cfg.seed;
    spec.kind = cfg.mode == Mode::cuboid ? synth::CorpusSpec::Kind::cuboid
                                         : synth::CorpusSpec::Kind::manhattan;
    spec.min_corners = cfg.min_corners;
    spec.max_corners = cfg.max_corners;
    spec.width = cfg.width;
    spec.height = cfg.height;
    spec.validate();
    synth::write_corpus(spec, cfg.output);
    std::cout << "wrote " << spec.count << " rooms to " << cfg.output << "\n";
    return 0;
}

int cmd_warp(const RunConfig& cfg, const std::string& grid_path) {
    require(!cfg.input.empty(), "warp: --input maps prefix required");
    require(!cfg.output.empty(), "warp: --output prefix required");
    require(!grid_path.empty(), "warp: --grid control-grid JSON required");
    const LayoutMaps maps = load_maps(cfg.input);
    const auto grid = grid_from_json_string(slurp(grid_path));
    const auto coef = tps::solve_coefficients(grid, cfg.fit.smoothing);
    const auto sg = tps::make_sampling_grid(coef, grid, maps.edge.width, maps.edge.height);
    LayoutMaps warped;
    warped.edge = warp::sample_bilinear(maps.edge, sg, cfg.fit.wrap_x);
    warped.corner = warp::sample_bilinear(maps.corner, sg, cfg.fit.wrap_x);
    if (const fs::path parent = fs::path(cfg.output).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    save_maps(warped, cfg.output);
    return 0;
}

int cmd_fit(const RunConfig& cfg) {
    require(!cfg.input.empty(), "fit: --input target maps required");
    require(!cfg.output.empty(), "fit: --output directory required");
    fs::create_directories(cfg.output);

    fit::FitConfig fit_cfg = cfg.fit;
    fit_cfg.n_side = cfg.grid_side ? *cfg.grid_side : cfg.effective_grid_side();
    fit_cfg.validate();

    const auto entries = input_entries(cfg.input);
    std::optional<LayoutMaps> reference;
    std::vector<std::string> names;
    for (const auto& [name, prefix] : entries) {
        const LayoutMaps target = load_maps(prefix);
        if (!reference) {
            reference = cfg.reference.empty()
                            ? layout::reference_layout(target.edge.width, target.edge.height)
                            : load_maps(cfg.reference);
        }
        if (!reference->edge.same_shape(target.edge)) {
            throw DataError("fit: reference/target resolution mismatch for " + name);
        }
        const fit::FitTrace trace = fit::fit_tps(*reference, target, fit_cfg);
        const std::string out_prefix = (fs::path(cfg.output) / name).string();
        save_maps(trace.warped, out_prefix);
        std::ofstream g(out_prefix + ".grid.json", std::ios::trunc);
        g << grid_to_json_string(trace.grid) << "\n";
        trace.write_loss_csv(out_prefix + ".loss.csv");
        names.push_back(name);
        std::cout << "fit " << name << ": final loss " << trace.losses.back() << "\n";
    }
    if (entries.size() > 1 || is_corpus_dir(cfg.input)) {
        write_entry_manifest(cfg.output, names);
    }
    return 0;
}

int cmd_postprocess(const RunConfig& cfg) {
    require(!cfg.input.empty(), "postprocess: --input required");
    require(!cfg.output.empty(), "postprocess: --output required");
    fs::create_directories(cfg.output);

    postproc::SplitParams params;
    params.unit_width = cfg.unit_width;
    params.separator = static_cast<int>(std::lround(cfg.separator));

    const bool split = cfg.mode == Mode::noncuboid || !cfg.mode_given;
    if (!split) {
        std::cerr << "postprocess: cuboid mode, maps pass through unchanged\n";
    }

    const auto entries = input_entries(cfg.input);
    std::vector<std::string> names;
    for (const auto& [name, prefix] : entries) {
        const LayoutMaps maps = load_maps(prefix);
        const LayoutMaps out = split ? postproc::split_corners(maps, params) : maps;
        save_maps(out, (fs::path(cfg.output) / name).string());
        names.push_back(name);
    }
    if (entries.size() > 1 || is_corpus_dir(cfg.input)) {
        write_entry_manifest(cfg.output, names);
    }
    return 0;
}

namespace {

metrics::Report evaluate_pair(const LayoutMaps& pred, const LayoutMaps& gt,
                              double camera_height) {
    // warped predictions skew ceiling against floor blobs and corner
    // splitting shifts part centroids, so pairing gets extra slack here;
    // rendered ground truth aligns sub-pixel either way, and closest-first
    // matching keeps the slack from crossing distinct columns
    layout::RecoverParams params;
    params.pair_tolerance = 40.0;
    const auto pred_room = layout::maps_to_layout(pred, camera_height, params);
    const auto gt_room = layout::maps_to_layout(gt, camera_height, params);
    const int w = gt.edge.width;
    const int h = gt.edge.height;

    metrics::Report report;
    report.iou3d = metrics::iou_3d(pred_room, gt_room);
    report.iou2d = metrics::iou_2d(pred_room, gt_room);
    report.ce_pct = metrics::corner_error(layout::annotate(pred_room, w, h),
                                          layout::annotate(gt_room, w, h), w, h);
    report.pe_pct = metrics::pixel_error(metrics::classify_regions(pred.edge),
                                         metrics::classify_regions(gt.edge));
    return report;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

int cmd_evaluate(const RunConfig& cfg) {
    require(!cfg.input.empty(), "evaluate: --input prediction maps required");
    require(!cfg.gt.empty(), "evaluate: --gt ground-truth maps required");
    require(!cfg.output.empty(), "evaluate: --output required");

    const auto pred_entries = input_entries(cfg.input);
    const bool batch = pred_entries.size() > 1 || is_corpus_dir(cfg.input);

    if (!batch) {
        const auto report = evaluate_pair(load_maps(pred_entries[0].second),
                                          load_maps(cfg.gt), cfg.camera_height);
        if (const fs::path parent = fs::path(cfg.output).parent_path(); !parent.empty()) {
            fs::create_directories(parent);
        }
        std::ofstream f(cfg.output, std::ios::trunc);
        if (!f) throw DataError("evaluate: cannot open " + cfg.output);
        f << metrics::to_json_string(report) << "\n";
        std::cout << metrics::to_json_string(report) << "\n";
        return 0;
    }

    require(is_corpus_dir(cfg.gt), "evaluate: --gt must be a corpus directory in batch mode");
    fs::create_directories(cfg.output);

    std::vector<double> iou3d, iou2d, ce, pe;
    int failed = 0;
    for (const auto& [name, prefix] : pred_entries) {
        const std::string gt_prefix = (fs::path(cfg.gt) / name).string();
        const fs::path out_path = fs::path(cfg.output) / (name + ".metrics.json");
        try {
            const auto report =
                evaluate_pair(load_maps(prefix), load_maps(gt_prefix), cfg.camera_height);
            std::ofstream f(out_path, std::ios::trunc);
            f << metrics::to_json_string(report) << "\n";
            iou3d.push_back(report.iou3d);
            iou2d.push_back(report.iou2d);
            ce.push_back(report.ce_pct);
            pe.push_back(report.pe_pct);
        } catch (const std::exception& e) {
            // a failed reconstruction scores zero overlap and is reported
            ++failed;
            iou3d.push_back(0.0);
            iou2d.push_back(0.0);
            json j;
            j["error"] = e.what();
            std::ofstream f(out_path, std::ios::trunc);
            f << j.dump(2) << "\n";
            std::cerr << "evaluate " << name << ": " << e.what() << "\n";
        }
    }

    json summary;
    summary["count"] = pred_entries.size();
    summary["failed"] = failed;
    summary["mean_iou3d"] = mean_of(iou3d);
    summary["median_iou3d"] = median_of(iou3d);
    summary["mean_iou2d"] = mean_of(iou2d);
    summary["median_iou2d"] = median_of(iou2d);
    summary["mean_ce_pct"] = mean_of(ce);
    summary["mean_pe_pct"] = mean_of(pe);
    std::ofstream f(fs::path(cfg.output) / "summary.json", std::ios::trunc);
    if (!f) throw DataError("evaluate: cannot write summary in " + cfg.output);
    f << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_reconstruct(const RunConfig& cfg) {
    require(!cfg.input.empty(), "reconstruct: --input required");
    require(!cfg.output.empty(), "reconstruct: --output OBJ path required");
    layout::RoomLayout room;
    if (cfg.input.ends_with(".json")) {
        room = layout::load_room(cfg.input);
    } else {
        room = layout::maps_to_layout(load_maps(cfg.input), cfg.camera_height);
    }
    if (const fs::path parent = fs::path(cfg.output).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    layout::export_obj(room, cfg.output);
    std::cout << "wrote " << cfg.output << "\n";
    return 0;
}

namespace {

layout::RoomLayout load_room_or_maps(const std::string& path, double camera_height) {
    if (path.ends_with(".json")) return layout::load_room(path);
    return layout::maps_to_layout(load_maps(path), camera_height);
}

void draw_polygon(Raster& img, const Polygon& poly, double scale, Vec2 origin_px,
                  int channel) {
    const size_t n = poly.size();
    auto to_px = [&](Vec2 v) {
        // +x right, +z up in the floor plan
        return Vec2{origin_px.x + v.x * scale, origin_px.y - v.y * scale};
    };
    auto stamp = [&](Vec2 p) {
        for (int r = static_cast<int>(p.y) - 2; r <= static_cast<int>(p.y) + 2; ++r) {
            for (int c = static_cast<int>(p.x) - 2; c <= static_cast<int>(p.x) + 2; ++c) {
                if (r < 0 || r >= img.height || c < 0 || c >= img.width) continue;
                const double dx = c + 0.5 - p.x;
                const double dy = r + 0.5 - p.y;
                if (dx * dx + dy * dy > 1.5 * 1.5) continue;
                img.at(r, c, 0) = img.at(r, c, 1) = img.at(r, c, 2) = 0.0;
                img.at(r, c, channel) = 1.0;
            }
        }
    };
    for (size_t i = 0; i < n; ++i) {
        const Vec2 a = to_px(poly[i]);
        const Vec2 b = to_px(poly[(i + 1) % n]);
        const double len = (b - a).norm();
        const int steps = std::max(2, static_cast<int>(std::ceil(len * 2.0)));
        for (int s = 0; s <= steps; ++s) {
            stamp(a + (b - a) * (static_cast<double>(s) / steps));
        }
    }
}

} // namespace

int cmd_floorplan(const RunConfig& cfg) {
    require(!cfg.input.empty(), "floorplan: --input prediction required");
    require(!cfg.gt.empty(), "floorplan: --gt ground truth required");
    require(!cfg.output.empty(), "floorplan: --output PNG path required");

    const auto pred = load_room_or_maps(cfg.input, cfg.camera_height);
    const auto gt = load_room_or_maps(cfg.gt, cfg.camera_height);

    double extent = 1.0;
    for (const auto* poly : {&pred.floor_polygon, &gt.floor_polygon}) {
        for (const Vec2& v : *poly) {
            extent = std::max({extent, std::abs(v.x), std::abs(v.y)});
        }
    }
    const int size = 800;
    const double scale = (size / 2.0 - 20.0) / extent;
    const Vec2 center{size / 2.0, size / 2.0};

    Raster img(size, size, 3);
    std::fill(img.data.begin(), img.data.end(), 1.0); // white background

    draw_polygon(img, gt.floor_polygon, scale, center, 2);   // ground truth in blue
    draw_polygon(img, pred.floor_polygon, scale, center, 1); // prediction in green
    // camera dot in red
    for (int r = size / 2 - 4; r <= size / 2 + 4; ++r) {
        for (int c = size / 2 - 4; c <= size / 2 + 4; ++c) {
            const double dx = c + 0.5 - center.x;
            const double dy = r + 0.5 - center.y;
            if (dx * dx + dy * dy > 16.0) continue;
            img.at(r, c, 0) = 1.0;
            img.at(r, c, 1) = 0.0;
            img.at(r, c, 2) = 0.0;
        }
    }
    if (const fs::path parent = fs::path(cfg.output).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    write_png(cfg.output, img);
    return 0;
}

} // namespace panowarp::cli
