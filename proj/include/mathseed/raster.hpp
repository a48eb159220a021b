#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mathseed/layout.hpp"

namespace mathseed {

// Row-major 8-bit luminance; 0 is ink, 255 is background.
struct Bitmap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Bitmap() = default;
  Bitmap(int w, int h, std::uint8_t fill = 255)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const Bitmap&) const = default;
};

struct RenderConfig {
  int target_long_side_px = 1024;
  int margin_px = 16;
  double base_size_px = 32;
  int supersample = 4;
};

// Throws InvalidConfig when the config violates its invariants.
void validate(const RenderConfig& cfg);

// Same config at another resolution with margin and font size scaled proportionally.
RenderConfig scaled_to(const RenderConfig& cfg, int target_long_side_px);

inline constexpr int kDefaultResolutions[] = {512, 768, 1024};

// The content's longer extent is fitted to the drawable span (long side minus
// both margins); the shorter canvas side is the scaled content extent plus
// margins. Fits requiring a scale below 0.5 raise ContentOverflow.
Bitmap rasterize(const LayoutNode& root, const RenderConfig& cfg);

// Parses, lays out at cfg.base_size_px with lines wrapped to the drawable width, and rasterizes.
Bitmap render_problem(std::string_view source, const RenderConfig& cfg);

// Fit scale rasterize would use for this root; 0 for empty content.
double fit_scale(const LayoutNode& root, const RenderConfig& cfg);

enum class EncoderKind { GeneralViT, LatexTransformer, HighResConv };

struct EncoderSpec {
  EncoderKind name;
  int input_side_px;
};

EncoderSpec encoder_spec(EncoderKind kind);
std::string_view to_string(EncoderKind kind);

// Bilinear resampling with corner alignment to input_side_px squared.
Bitmap resize_for_encoder(const Bitmap& img, const EncoderSpec& spec);
Bitmap resize_bilinear(const Bitmap& img, int width, int height);

// FNV-1a 64 over the raw pixel bytes.
std::uint64_t pixel_checksum(const Bitmap& img);
std::string hex64(std::uint64_t v);

}  // namespace mathseed
