// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "panowarp/layout.hpp"
#include "panowarp/raster.hpp"

namespace panowarp::synth {

// Recipe for a synthetic room corpus. Rooms are cuboid or Manhattan
// rectilinear with an even corner count; the camera is jittered inside the
// room while keeping wall clearance, staying in the polygon kernel (every
// corner visible) and keeping projected corner blobs separated enough that
// rendering and recovery stay well posed.
struct CorpusSpec {
    enum class Kind { cuboid, manhattan };

    int count = 10;
    uint64_t seed = 0;
    Kind kind = Kind::cuboid;
    int min_corners = 6; // manhattan only; even, >= 4
    int max_corners = 8;
    double min_size = 2.0; // room extent range, meters
    double max_size = 8.0;
    double min_ceiling = 2.4;
    double max_ceiling = 3.5;
    double camera_jitter = 0.8;  // max offset from the room center, meters
    double wall_clearance = 0.5; // min camera-to-wall distance, meters
    int width = 1024;
    int height = 512;

    void validate() const;
    std::string to_json_string() const;
    static CorpusSpec from_json_string(const std::string& text);
};

struct Sample {
    layout::RoomLayout room;
    LayoutMaps maps;
    layout::CornerAnnotation corners;
};

// Deterministic per (seed, index); safe to call concurrently for different
// indices. Throws DataError after a bounded number of rejected attempts.
layout::RoomLayout generate_layout(const CorpusSpec& spec, int index);

// Layouts plus rendered maps and corner annotations for the whole corpus.
std::vector<Sample> generate(const CorpusSpec& spec);

// Writes NNNN.edge.png, NNNN.corner.png, NNNN.layout.json, NNNN.corners.json
// per entry plus an index.json manifest listing the entries and the spec.
void write_corpus(const CorpusSpec& spec, const std::filesystem::path& dir);

// Entry names listed in a corpus manifest.
std::vector<std::string> read_manifest(const std::filesystem::path& dir);

} // namespace panowarp::synth
