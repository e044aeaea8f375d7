// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/png_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "panowarp/errors.hpp"

namespace panowarp {

namespace {

constexpr unsigned char kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

void put_u32(std::vector<unsigned char>& out, uint32_t v) {
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>(v & 0xff));
}

uint32_t get_u32(const unsigned char* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

void append_chunk(std::vector<unsigned char>& out, const char type[4],
                  const std::vector<unsigned char>& payload) {
    put_u32(out, static_cast<uint32_t>(payload.size()));
    std::vector<unsigned char> body(type, type + 4);
    body.insert(body.end(), payload.begin(), payload.end());
    out.insert(out.end(), body.begin(), body.end());
    const auto crc = crc32(0L, body.data(), static_cast<uInt>(body.size()));
    put_u32(out, static_cast<uint32_t>(crc));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

} // namespace

void write_png(const std::filesystem::path& path, const Raster& raster) {
    if (raster.width <= 0 || raster.height <= 0) {
        throw std::invalid_argument("write_png: empty raster");
    }
    const int bpp = raster.channels;
    const size_t stride = static_cast<size_t>(raster.width) * bpp;

    // scanlines with filter byte 0 (no per-row filtering; zlib does the rest)
    std::vector<unsigned char> raw((stride + 1) * raster.height);
    size_t pos = 0;
    for (int r = 0; r < raster.height; ++r) {
        raw[pos++] = 0;
        for (int c = 0; c < raster.width; ++c) {
            for (int ch = 0; ch < bpp; ++ch) {
                const double v = std::clamp(raster.at(r, c, ch), 0.0, 1.0);
                raw[pos++] = static_cast<unsigned char>(std::lround(v * 255.0));
            }
        }
    }

    uLongf comp_cap = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> comp(comp_cap);
    if (compress2(comp.data(), &comp_cap, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
        throw NumericError("write_png: compression failed");
    }
    comp.resize(comp_cap);

    std::vector<unsigned char> ihdr;
    put_u32(ihdr, static_cast<uint32_t>(raster.width));
    put_u32(ihdr, static_cast<uint32_t>(raster.height));
    ihdr.push_back(8);                                   // bit depth
    ihdr.push_back(raster.channels == 1 ? 0 : 2);        // gray or RGB
    ihdr.push_back(0);                                   // deflate
    ihdr.push_back(0);                                   // adaptive filtering
    ihdr.push_back(0);                                   // no interlace

    std::vector<unsigned char> out(kSignature, kSignature + 8);
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", comp);
    append_chunk(out, "IEND", {});

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("write_png: cannot open " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("write_png: write failed for " + path.string());
}

Raster read_png(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("read_png: cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0) {
        throw DataError("read_png: not a PNG: " + path.string());
    }

    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<unsigned char> idat;

    size_t pos = 8;
    bool saw_end = false;
    while (pos + 12 <= bytes.size() && !saw_end) {
        const uint32_t len = get_u32(&bytes[pos]);
        if (pos + 12 + len > bytes.size()) {
            throw DataError("read_png: truncated chunk in " + path.string());
        }
        const unsigned char* type = &bytes[pos + 4];
        const unsigned char* payload = &bytes[pos + 8];
        const uint32_t stored_crc = get_u32(&bytes[pos + 8 + len]);
        const auto crc = crc32(0L, &bytes[pos + 4], 4 + len);
        if (static_cast<uint32_t>(crc) != stored_crc) {
            throw DataError("read_png: CRC mismatch in " + path.string());
        }

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw DataError("read_png: bad IHDR");
            width = static_cast<int>(get_u32(payload));
            height = static_cast<int>(get_u32(payload + 4));
            const int depth = payload[8];
            const int color = payload[9];
            if (depth != 8 || (color != 0 && color != 2) || payload[12] != 0) {
                throw DataError("read_png: unsupported format (need 8-bit gray/RGB): " +
                                path.string());
            }
            channels = (color == 0) ? 1 : 3;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_end = true;
        }
        pos += 12 + len;
    }
    if (width <= 0 || height <= 0 || channels == 0 || idat.empty()) {
        throw DataError("read_png: missing IHDR/IDAT in " + path.string());
    }

    const size_t stride = static_cast<size_t>(width) * channels;
    std::vector<unsigned char> raw((stride + 1) * height);
    uLongf raw_len = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        raw_len != raw.size()) {
        throw DataError("read_png: inflate failed for " + path.string());
    }

    // undo per-row filters
    const int bpp = channels;
    std::vector<unsigned char> prev(stride, 0);
    Raster raster(width, height, channels);
    for (int r = 0; r < height; ++r) {
        const unsigned char filter = raw[r * (stride + 1)];
        unsigned char* row = &raw[r * (stride + 1) + 1];
        for (size_t i = 0; i < stride; ++i) {
            const int left = (i >= static_cast<size_t>(bpp)) ? row[i - bpp] : 0;
            const int up = prev[i];
            const int upleft = (i >= static_cast<size_t>(bpp)) ? prev[i - bpp] : 0;
            int v = row[i];
            switch (filter) {
                case 0: break;
                case 1: v += left; break;
                case 2: v += up; break;
                case 3: v += (left + up) / 2; break;
                case 4: v += paeth(left, up, upleft); break;
                default: throw DataError("read_png: bad filter type");
            }
            row[i] = static_cast<unsigned char>(v & 0xff);
        }
        std::copy(row, row + stride, prev.begin());
        for (int c = 0; c < width; ++c) {
            for (int ch = 0; ch < channels; ++ch) {
                raster.at(r, c, ch) = row[c * bpp + ch] / 255.0;
            }
        }
    }
    return raster;
}

} // namespace panowarp
