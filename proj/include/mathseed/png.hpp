#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mathseed/raster.hpp"

namespace mathseed {

// 8-bit grayscale, non-interlaced, filter type 0 on every row.
std::vector<std::uint8_t> encode_png(const Bitmap& img);

// Accepts 8-bit grayscale non-interlaced PNGs with any standard row filter.
Bitmap decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const std::filesystem::path& path, const Bitmap& img);
Bitmap read_png(const std::filesystem::path& path);

}  // namespace mathseed
