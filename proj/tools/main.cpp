// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "panowarp/errors.hpp"

namespace {

using panowarp::cli::Mode;
using panowarp::cli::RunConfig;
using json = nlohmann::json;

bool parse_resolution(const std::string& text, int& width, int& height) {
    const auto x = text.find('x');
    if (x == std::string::npos) return false;
    try {
        width = std::stoi(text.substr(0, x));
        height = std::stoi(text.substr(x + 1));
    } catch (...) {
        return false;
    }
    return width >= 2 && height >= 2 && width % 2 == 0 && height % 2 == 0;
}

// Config file keys mirror the flag names; flags that were actually passed
// win over file values.
void apply_config_file(const std::string& path, CLI::App& cmd, RunConfig& cfg,
                       std::string& resolution, std::string& mode_text) {
    std::ifstream f(path);
    if (!f) throw panowarp::DataError("config: cannot open " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw panowarp::DataError(std::string("config: ") + e.what());
    }

    auto unset = [&](const std::string& flag) {
        const CLI::Option* opt = cmd.get_option_no_throw(flag);
        return opt == nullptr || opt->count() == 0;
    };
    auto take = [&](const char* key, auto& slot, const std::string& flag) {
        if (j.contains(key) && unset(flag)) {
            j.at(key).get_to(slot);
        }
    };

    take("input", cfg.input, "--input");
    take("output", cfg.output, "--output");
    take("gt", cfg.gt, "--gt");
    take("reference", cfg.reference, "--reference");
    take("seed", cfg.seed, "--seed");
    take("count", cfg.count, "--count");
    take("min-corners", cfg.min_corners, "--min-corners");
    take("max-corners", cfg.max_corners, "--max-corners");
    take("camera-height", cfg.camera_height, "--camera-height");
    take("unit-width", cfg.unit_width, "--unit-width");
    take("separator", cfg.separator, "--separator");
    take("alpha", cfg.fit.alpha, "--alpha");
    take("beta", cfg.fit.beta, "--beta");
    take("delta", cfg.fit.delta, "--delta");
    take("steps", cfg.fit.steps, "--steps");
    if (j.contains("mode") && unset("--mode")) {
        mode_text = j.at("mode").get<std::string>();
    }
    if (j.contains("resolution") && unset("--resolution")) {
        resolution = j.at("resolution").get<std::string>();
    }
    if (j.contains("grid-side") && unset("--grid-side")) {
        cfg.grid_side = j.at("grid-side").get<int>();
    }
    // remaining optimizer knobs use the FitConfig field names directly
    for (const char* key : {"step_size", "decay1", "decay2", "weight_decay", "smoothing",
                            "pyramid_blur"}) {
        if (!j.contains(key)) continue;
        const double v = j.at(key).get<double>();
        if (std::string(key) == "step_size") cfg.fit.step_size = v;
        if (std::string(key) == "decay1") cfg.fit.decay1 = v;
        if (std::string(key) == "decay2") cfg.fit.decay2 = v;
        if (std::string(key) == "weight_decay") cfg.fit.weight_decay = v;
        if (std::string(key) == "smoothing") cfg.fit.smoothing = v;
        if (std::string(key) == "pyramid_blur") cfg.fit.pyramid_blur = v;
    }
    if (j.contains("pyramid")) cfg.fit.pyramid = j.at("pyramid").get<bool>();
    if (j.contains("pyramid_levels")) cfg.fit.pyramid_levels = j.at("pyramid_levels").get<int>();
    if (j.contains("wrap_x")) cfg.fit.wrap_x = j.at("wrap_x").get<bool>();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"panoramic room-layout warping toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string resolution;
    std::string mode_text;
    std::string grid_path;
    int grid_side = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--input", cfg.input, "input path (maps prefix or corpus directory)");
        cmd->add_option("--output", cfg.output, "output path");
        cmd->add_option("--config", config_path, "JSON config file; keys mirror the flags");
        cmd->add_option("--mode", mode_text, "cuboid or noncuboid")
            ->check(CLI::IsMember({"cuboid", "noncuboid"}));
        cmd->add_option("--resolution", resolution, "working resolution WxH (default 1024x512)");
        cmd->add_option("--seed", cfg.seed, "random seed");
        return cmd;
    };

    auto* gen = add_common(app.add_subcommand("gen-reference", "render the reference layout"));
    (void)gen;
    auto* syn = add_common(app.add_subcommand("synth", "generate a synthetic room corpus"));
    syn->add_option("--count", cfg.count, "number of rooms");
    syn->add_option("--min-corners", cfg.min_corners, "min corners (manhattan)");
    syn->add_option("--max-corners", cfg.max_corners, "max corners (manhattan)");

    auto* wrp = add_common(app.add_subcommand("warp", "warp maps through a control grid"));
    wrp->add_option("--grid", grid_path, "control-grid JSON")->required();

    auto* fit_cmd = add_common(app.add_subcommand("fit", "fit the warp to target maps"));
    fit_cmd->add_option("--reference", cfg.reference, "reference maps prefix (default: built-in)");
    fit_cmd->add_option("--grid-side", grid_side, "control grid side (default 4 cuboid, 8 noncuboid)");
    fit_cmd->add_option("--alpha", cfg.fit.alpha, "edge-map loss weight");
    fit_cmd->add_option("--beta", cfg.fit.beta, "corner-map loss weight");
    fit_cmd->add_option("--delta", cfg.fit.delta, "Huber threshold");
    fit_cmd->add_option("--steps", cfg.fit.steps, "iteration budget");

    auto* post = add_common(app.add_subcommand("postprocess", "split merged corner blobs"));
    post->add_option("--unit-width", cfg.unit_width, "expected corner width in px");
    post->add_option("--separator", cfg.separator, "separator band width in px");

    auto* eval = add_common(app.add_subcommand("evaluate", "compare predictions to ground truth"));
    eval->add_option("--gt", cfg.gt, "ground-truth maps prefix or corpus directory");
    eval->add_option("--camera-height", cfg.camera_height, "camera height in meters");

    auto* rec = add_common(app.add_subcommand("reconstruct", "export a room mesh as OBJ"));
    rec->add_option("--camera-height", cfg.camera_height, "camera height in meters");

    auto* plan = add_common(app.add_subcommand("floorplan", "render a top-view comparison"));
    plan->add_option("--gt", cfg.gt, "ground-truth layout JSON or maps prefix");
    plan->add_option("--camera-height", cfg.camera_height, "camera height in meters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        if (!config_path.empty()) {
            apply_config_file(config_path, *cmd, cfg, resolution, mode_text);
        }
        if (!mode_text.empty()) {
            cfg.mode = mode_text == "noncuboid" ? Mode::noncuboid : Mode::cuboid;
            cfg.mode_given = true;
        }
        if (!resolution.empty() && !parse_resolution(resolution, cfg.width, cfg.height)) {
            std::cerr << "error: bad --resolution, expected even WxH\n";
            return 2;
        }
        if (cmd->get_option_no_throw("--grid-side") != nullptr && grid_side > 0) {
            cfg.grid_side = grid_side;
        }

        const std::string name = cmd->get_name();
        if (name == "gen-reference") return panowarp::cli::cmd_gen_reference(cfg);
        if (name == "synth") return panowarp::cli::cmd_synth(cfg);
        if (name == "warp") return panowarp::cli::cmd_warp(cfg, grid_path);
        if (name == "fit") return panowarp::cli::cmd_fit(cfg);
        if (name == "postprocess") return panowarp::cli::cmd_postprocess(cfg);
        if (name == "evaluate") return panowarp::cli::cmd_evaluate(cfg);
        if (name == "reconstruct") return panowarp::cli::cmd_reconstruct(cfg);
        if (name == "floorplan") return panowarp::cli::cmd_floorplan(cfg);
        std::cerr << "error: unknown command " << name << "\n";
        return 2;
    } catch (const panowarp::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const panowarp::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    }
}
