#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "holescope/bifset.hpp"

namespace holescope {

/// PGM P5 bytes: 0 = in-set, 255 = out, 128 = excluded band. Rows run from
/// b = 1 down to b = 0 so the diagonal rises left-to-right in viewers.
inline std::vector<std::uint8_t> raster_to_pgm(const BifRaster& r) {
    std::string head = "P5\n" + std::to_string(r.R) + " " + std::to_string(r.R) + "\n255\n";
    std::vector<std::uint8_t> out(head.begin(), head.end());
    for (long j = r.R - 1; j >= 0; --j)
        for (long i = 0; i < r.R; ++i) {
            std::uint8_t v = r.excluded(i, j) ? 128 : (r.in_set(i, j) ? 0 : 255);
            out.push_back(v);
        }
    return out;
}

namespace detail {
inline void png_chunk(std::vector<std::uint8_t>& out, const char tag[4],
                      const std::vector<std::uint8_t>& data) {
    auto be32 = [&](std::uint32_t v) {
        out.push_back(v >> 24);
        out.push_back(v >> 16);
        out.push_back(v >> 8);
        out.push_back(v);
    };
    be32(static_cast<std::uint32_t>(data.size()));
    std::size_t crc_from = out.size();
    out.insert(out.end(), tag, tag + 4);
    out.insert(out.end(), data.begin(), data.end());
    std::uint32_t crc = ::crc32(0, out.data() + crc_from, static_cast<uInt>(out.size() - crc_from));
    be32(crc);
}
} // namespace detail

/// 8-bit grayscale PNG with the same palette as the PGM export.
inline std::vector<std::uint8_t> raster_to_png(const BifRaster& r) {
    std::vector<std::uint8_t> raw; // filter byte 0 per row
    for (long j = r.R - 1; j >= 0; --j) {
        raw.push_back(0);
        for (long i = 0; i < r.R; ++i)
            raw.push_back(r.excluded(i, j) ? 128 : (r.in_set(i, j) ? 0 : 255));
    }
    uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> z(zlen);
    if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw AssertionError("png export: deflate failed");
    z.resize(zlen);

    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    std::vector<std::uint8_t> ihdr;
    auto be32 = [&](std::uint32_t v) {
        ihdr.push_back(v >> 24);
        ihdr.push_back(v >> 16);
        ihdr.push_back(v >> 8);
        ihdr.push_back(v);
    };
    be32(static_cast<std::uint32_t>(r.R));
    be32(static_cast<std::uint32_t>(r.R));
    ihdr.push_back(8); // bit depth
    ihdr.push_back(0); // grayscale
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    detail::png_chunk(out, "IHDR", ihdr);
    detail::png_chunk(out, "IDAT", z);
    detail::png_chunk(out, "IEND", {});
    return out;
}

inline void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw UsageError("write failed: " + path);
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file: " + path);
    f << text;
    if (!f) throw UsageError("write failed: " + path);
}

inline std::uint64_t digest_bytes(const std::vector<std::uint8_t>& bytes) {
    return fnv1a64(bytes.data(), bytes.size());
}

inline std::uint64_t digest_text(const std::string& text) {
    return fnv1a64(text.data(), text.size());
}

} // namespace holescope
