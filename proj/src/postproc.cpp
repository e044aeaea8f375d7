// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace panowarp::postproc {

Raster binarize(const Raster& gray, double threshold) {
    if (gray.channels != 1) throw std::invalid_argument("binarize: single-channel input required");
    Raster out(gray.width, gray.height, 1);
    for (size_t i = 0; i < gray.data.size(); ++i) {
        out.data[i] = gray.data[i] >= threshold ? 1.0 : 0.0;
    }
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    int make() {
        parent.push_back(static_cast<int>(parent.size()));
        return parent.back();
    }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

ComponentSet connected_components(const Raster& binary, int connectivity, bool wrap_x) {
    if (binary.channels != 1) {
        throw std::invalid_argument("connected_components: single-channel input required");
    }
    if (connectivity != 4 && connectivity != 8) {
        throw std::invalid_argument("connected_components: connectivity must be 4 or 8");
    }
    const int w = binary.width;
    const int h = binary.height;

    ComponentSet set;
    set.width = w;
    set.height = h;
    set.labels.assign(static_cast<size_t>(w) * h, 0);

    UnionFind uf;
    uf.make(); // background slot so provisional labels start at 1
    std::vector<int> prov(static_cast<size_t>(w) * h, 0);

    auto at = [&](int r, int c) -> int& { return prov[static_cast<size_t>(r) * w + c]; };
    auto fg = [&](int r, int c) { return binary.at(r, c) != 0.0; };

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!fg(r, c)) continue;
            int neighbors[8];
            int count = 0;
            auto consider = [&](int rr, int cc) {
                if (rr < 0) return;
                if (cc < 0) {
                    if (!wrap_x) return;
                    cc += w;
                }
                if (cc >= w) {
                    if (!wrap_x) return;
                    cc -= w;
                }
                if (fg(rr, cc) && at(rr, cc) != 0) neighbors[count++] = at(rr, cc);
            };
            consider(r, c - 1);
            consider(r - 1, c);
            if (connectivity == 8) {
                consider(r - 1, c - 1);
                consider(r - 1, c + 1);
            }
            // the last column joins the first within the same row
            if (wrap_x && c == w - 1 && w > 1) {
                consider(r, c + 1);
                if (connectivity == 8) consider(r - 1, c + 1);
            }
            if (count == 0) {
                at(r, c) = uf.make();
            } else {
                int m = neighbors[0];
                for (int i = 1; i < count; ++i) m = std::min(m, neighbors[i]);
                at(r, c) = m;
                for (int i = 0; i < count; ++i) uf.unite(m, neighbors[i]);
            }
        }
    }
    // seam merge for rows whose wrap neighbor was labeled later in the scan
    if (wrap_x && w > 1) {
        for (int r = 0; r < h; ++r) {
            if (fg(r, 0) && fg(r, w - 1)) uf.unite(at(r, 0), at(r, w - 1));
            if (connectivity == 8 && r > 0) {
                if (fg(r, 0) && fg(r - 1, w - 1)) uf.unite(at(r, 0), at(r - 1, w - 1));
                if (fg(r, w - 1) && fg(r - 1, 0)) uf.unite(at(r, w - 1), at(r - 1, 0));
            }
        }
    }

    // compact to labels 1..K in scan order of first appearance
    std::vector<int> remap(uf.parent.size(), 0);
    int next = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!fg(r, c)) continue;
            const int root = uf.find(at(r, c));
            if (remap[root] == 0) remap[root] = ++next;
            set.labels[static_cast<size_t>(r) * w + c] = remap[root];
        }
    }

    set.components.resize(next);
    std::vector<std::vector<bool>> cols(next, std::vector<bool>(w, false));
    std::vector<double> sum_dx(next, 0.0), sum_y(next, 0.0);
    std::vector<int> anchor(next, -1);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const int lab = set.labels[static_cast<size_t>(r) * w + c];
            if (lab == 0) continue;
            Component& comp = set.components[lab - 1];
            if (comp.pixel_count == 0) {
                comp.label = lab;
                comp.y0 = comp.y1 = r;
                anchor[lab - 1] = c;
            }
            comp.y0 = std::min(comp.y0, r);
            comp.y1 = std::max(comp.y1, r);
            comp.pixel_count++;
            cols[lab - 1][c] = true;
            // offset from the anchor column, wrapped to (-w/2, w/2]
            double dx = c - anchor[lab - 1];
            if (wrap_x) {
                dx -= w * std::floor((dx + w / 2.0) / w);
            }
            sum_dx[lab - 1] += dx;
            sum_y[lab - 1] += r;
        }
    }
    for (int k = 0; k < next; ++k) {
        Component& comp = set.components[k];
        if (!wrap_x) {
            int lo = w;
            int hi = -1;
            for (int c = 0; c < w; ++c) {
                if (cols[k][c]) {
                    lo = std::min(lo, c);
                    hi = std::max(hi, c);
                }
            }
            comp.x0 = lo;
            comp.x_width = hi - lo + 1;
        } else {
            // x extent: occupied columns treated circularly; the bounding
            // run is the circle minus the longest empty gap.
            int best_gap = 0;
            int best_gap_end = 0;
            int gap = 0;
            for (int i = 0; i < 2 * w; ++i) {
                const int c = i % w;
                if (!cols[k][c]) {
                    if (++gap > best_gap && gap <= w) {
                        best_gap = gap;
                        best_gap_end = i;
                    }
                } else {
                    gap = 0;
                }
            }
            if (best_gap == 0) {
                comp.x0 = 0;
                comp.x_width = w;
            } else {
                comp.x0 = (best_gap_end + 1) % w;
                comp.x_width = w - best_gap;
            }
        }
        double cx = anchor[k] + sum_dx[k] / comp.pixel_count + 0.5;
        if (wrap_x) {
            cx -= w * std::floor(cx / w);
        }
        comp.centroid = {cx, sum_y[k] / comp.pixel_count + 0.5};
    }
    return set;
}

LayoutMaps split_corners(const LayoutMaps& maps, const SplitParams& params) {
    if (maps.corner.channels != 1 || maps.edge.channels != 3 ||
        maps.corner.width != maps.edge.width || maps.corner.height != maps.edge.height) {
        return maps; // malformed input passes through untouched
    }
    const int w = maps.corner.width;
    const int h = maps.corner.height;
    const int horizon = params.horizon_row >= 0 ? params.horizon_row : h / 2;

    const Raster binary = binarize(maps.corner, params.threshold);
    const ComponentSet comps = connected_components(binary, 8, params.wrap_x);

    LayoutMaps out = maps;
    for (const Component& comp : comps.components) {
        if (comp.centroid.y >= horizon) continue; // upper corners only
        const double width_px = comp.x_width;
        const int m = static_cast<int>(std::lround(width_px / params.unit_width));
        if (m < 2) continue;
        if (std::abs(width_px - m * params.unit_width) > params.tolerance) continue;

        // equal parts on the post-gap width, remainder pixels left to right
        const int usable = comp.x_width - (m - 1) * params.separator;
        if (usable < m) continue;
        const int base = usable / m;
        const int remainder = usable - base * m;

        int offset = 0;
        for (int part = 0; part < m - 1; ++part) {
            offset += base + (part < remainder ? 1 : 0);
            for (int g = 0; g < params.separator; ++g) {
                const int col = (comp.x0 + offset + g) % w;
                for (int r = 0; r < h; ++r) {
                    out.corner.at(r, col) = 0.0;
                    out.edge.at(r, col, 0) = 0.0;
                    out.edge.at(r, col, 1) = 0.0;
                    out.edge.at(r, col, 2) = 0.0;
                }
            }
            offset += params.separator;
        }
    }
    return out;
}

} // namespace panowarp::postproc
