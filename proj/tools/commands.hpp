// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "panowarp/fit.hpp"
#include "panowarp/postproc.hpp"
#include "panowarp/synth.hpp"

namespace panowarp::cli {

enum class Mode { cuboid, noncuboid };

// One parsed invocation; flags override --config file keys which override
// the defaults here.
struct RunConfig {
    std::string input;
    std::string output;
    std::string gt;
    std::string reference; // optional maps prefix for cmd_fit
    Mode mode = Mode::cuboid;
    bool mode_given = false;
    std::optional<int> grid_side; // overrides the mode default (4 or 8)
    int width = 1024;
    int height = 512;
    uint64_t seed = 0;
    int count = 10;
    int min_corners = 6;
    int max_corners = 8;
    double camera_height = 1.6;
    double unit_width = 75.0;
    double separator = 5.0;
    fit::FitConfig fit;

    int effective_grid_side() const {
        if (grid_side) return *grid_side;
        return mode == Mode::cuboid ? 4 : 8;
    }
};

int cmd_gen_reference(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);
int cmd_warp(const RunConfig& cfg, const std::string& grid_path);
int cmd_fit(const RunConfig& cfg);
int cmd_postprocess(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);
int cmd_reconstruct(const RunConfig& cfg);
int cmd_floorplan(const RunConfig& cfg);

// {"n_side":..,"source_points":[[x,y]..],"target_points":[[x,y]..]}
std::string grid_to_json_string(const tps::ControlGrid& grid);
tps::ControlGrid grid_from_json_string(const std::string& text);

} // namespace panowarp::cli
