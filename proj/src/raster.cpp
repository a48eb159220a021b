#include "mathseed/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mathseed/error.hpp"
#include "mathseed/stroke_font.hpp"

namespace mathseed {

void validate(const RenderConfig& cfg) {
  if (cfg.margin_px < 0) throw Error(ErrorKind::InvalidConfig, "margin must be non-negative");
  if (cfg.target_long_side_px < 2 * cfg.margin_px + 1) {
    throw Error(ErrorKind::InvalidConfig, "long side " + std::to_string(cfg.target_long_side_px) +
                                              " leaves no drawable area with margin " + std::to_string(cfg.margin_px));
  }
  if (!(cfg.base_size_px > 0) || !std::isfinite(cfg.base_size_px)) {
    throw Error(ErrorKind::InvalidConfig, "base size must be positive");
  }
  if (cfg.supersample != 1 && cfg.supersample != 2 && cfg.supersample != 4) {
    throw Error(ErrorKind::InvalidConfig, "supersample must be 1, 2 or 4");
  }
}

RenderConfig scaled_to(const RenderConfig& cfg, int target) {
  RenderConfig out = cfg;
  const double k = static_cast<double>(target) / cfg.target_long_side_px;
  out.target_long_side_px = target;
  out.margin_px = static_cast<int>(std::lround(cfg.margin_px * k));
  out.base_size_px = cfg.base_size_px * k;
  return out;
}

namespace {

struct Canvas {
  int ss;
  int gw;  // supersampled grid
  int gh;
  int clip_x0, clip_y0, clip_x1, clip_y1;  // supersampled clip rectangle, half-open
  std::vector<std::uint8_t> cover;

  void mark(int i, int j) { cover[static_cast<std::size_t>(j) * gw + i] = 1; }

  // Sample (i, j) sits at ((i + 0.5) / ss, (j + 0.5) / ss) in pixel coordinates.
  void capsule(double x0, double y0, double x1, double y1, double r) {
    const double lo_x = std::min(x0, x1) - r, hi_x = std::max(x0, x1) + r;
    const double lo_y = std::min(y0, y1) - r, hi_y = std::max(y0, y1) + r;
    const int i0 = std::max(clip_x0, static_cast<int>(std::floor(lo_x * ss - 0.5)));
    const int i1 = std::min(clip_x1 - 1, static_cast<int>(std::ceil(hi_x * ss - 0.5)));
    const int j0 = std::max(clip_y0, static_cast<int>(std::floor(lo_y * ss - 0.5)));
    const int j1 = std::min(clip_y1 - 1, static_cast<int>(std::ceil(hi_y * ss - 0.5)));
    const double dx = x1 - x0, dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    const double r2 = r * r;
    const double eps = 1e-9 * std::max(1.0, r2);
    for (int j = j0; j <= j1; ++j) {
      const double py = (j + 0.5) / ss;
      for (int i = i0; i <= i1; ++i) {
        const double px = (i + 0.5) / ss;
        double t = len2 > 0 ? ((px - x0) * dx + (py - y0) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double ex = px - (x0 + t * dx);
        const double ey = py - (y0 + t * dy);
        const double d2 = ex * ex + ey * ey;
        // Samples on the boundary count only on the +y (or, level, +x) side, so
        // grid-aligned strokes cover their true width.
        if (d2 < r2 - eps || (d2 <= r2 + eps && (ey > 1e-9 || (std::fabs(ey) <= 1e-9 && ex > 0)))) mark(i, j);
      }
    }
  }

  // Half-open rectangle [x0, x1) x [y0, y1) tested at sample centres.
  void rect(double x0, double y0, double x1, double y1) {
    const int i0 = std::max(clip_x0, static_cast<int>(std::ceil(x0 * ss - 0.5)));
    const int i1 = std::min(clip_x1, static_cast<int>(std::ceil(x1 * ss - 0.5)));
    const int j0 = std::max(clip_y0, static_cast<int>(std::ceil(y0 * ss - 0.5)));
    const int j1 = std::min(clip_y1, static_cast<int>(std::ceil(y1 * ss - 0.5)));
    for (int j = j0; j < j1; ++j) {
      for (int i = i0; i < i1; ++i) mark(i, j);
    }
  }
};

struct Painter {
  Canvas& canvas;
  const StrokeFont& font;
  double scale;     // layout px -> canvas px
  double origin_x;  // canvas px of layout x = 0
  double origin_y;  // canvas px of layout y = 0

  void draw(const LayoutNode& n, double ax, double ay) {
    if (const auto* g = std::get_if<GlyphBox>(&n.content)) {
      const StrokeGlyph* glyph = font.find(g->symbol);
      if (!glyph) throw Error(ErrorKind::MissingGlyph, g->symbol);
      const double k = g->size_px * g->scale / StrokeFont::kUnitsPerEm;
      const double r = StrokeFont::kStrokeWidth / 2 * k * scale;
      auto map_x = [&](double x) { return origin_x + (ax + x * k) * scale; };
      auto map_y = [&](double y) { return origin_y + (ay + y * k * g->stretch_y) * scale; };
      for (const auto& line : glyph->strokes) {
        if (line.size() == 1) {
          canvas.capsule(map_x(line[0].x), map_y(line[0].y), map_x(line[0].x), map_y(line[0].y), r);
        }
        for (std::size_t i = 1; i < line.size(); ++i) {
          canvas.capsule(map_x(line[i - 1].x), map_y(line[i - 1].y), map_x(line[i].x), map_y(line[i].y), r);
        }
      }
    } else if (std::holds_alternative<RuleBox>(n.content)) {
      canvas.rect(origin_x + ax * scale, origin_y + (ay - n.height) * scale, origin_x + (ax + n.width) * scale,
                  origin_y + (ay + n.depth) * scale);
    } else if (const auto* h = std::get_if<HBox>(&n.content)) {
      for (const auto& c : h->children) draw(c, ax + c.x, ay + c.y);
    } else if (const auto* v = std::get_if<VBox>(&n.content)) {
      for (const auto& c : v->children) draw(c, ax + c.x, ay + c.y);
    }
  }
};

}  // namespace

double fit_scale(const LayoutNode& root, const RenderConfig& cfg) {
  const double extent = std::max(root.width, root.height + root.depth);
  if (!(extent > 0)) return 0;
  return (cfg.target_long_side_px - 2.0 * cfg.margin_px) / extent;
}

Bitmap rasterize(const LayoutNode& root, const RenderConfig& cfg) {
  validate(cfg);
  const int T = cfg.target_long_side_px;
  const int m = cfg.margin_px;
  const double s = fit_scale(root, cfg);
  if (s == 0) return Bitmap(T, T, 255);
  if (s < 0.5) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "content needs scale %.4f, minimum is 0.5", s);
    throw Error(ErrorKind::ContentOverflow, buf);
  }
  const double w = root.width, h = root.height + root.depth;
  auto side = [&](double extent) { return std::max(1, static_cast<int>(std::ceil(extent * s - 1e-9)) + 2 * m); };
  const int width = w >= h ? T : side(w);
  const int height = w >= h ? side(h) : T;

  const int ss = cfg.supersample;
  Canvas canvas{ss,
                width * ss,
                height * ss,
                m * ss,
                m * ss,
                (width - m) * ss,
                (height - m) * ss,
                std::vector<std::uint8_t>(static_cast<std::size_t>(width) * ss * height * ss, 0)};
  Painter painter{canvas, StrokeFont::builtin(), s, static_cast<double>(m), m + root.height * s};
  painter.draw(root, 0, 0);

  Bitmap out(width, height, 255);
  const int n = ss * ss;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      int count = 0;
      for (int j = 0; j < ss; ++j) {
        const std::uint8_t* row = &canvas.cover[static_cast<std::size_t>(y * ss + j) * canvas.gw + x * ss];
        for (int i = 0; i < ss; ++i) count += row[i];
      }
      out.at(x, y) = static_cast<std::uint8_t>(255 - (2 * 255 * count + n) / (2 * n));
    }
  }
  return out;
}

Bitmap render_problem(std::string_view source, const RenderConfig& cfg) {
  validate(cfg);
  const ProblemDocument doc = parse_document(source);
  const double line_width = cfg.target_long_side_px - 2.0 * cfg.margin_px;
  const LayoutNode root =
      layout_document(doc, {Style::Text, cfg.base_size_px}, FontMetricsTable::builtin(), line_width);
  return rasterize(root, cfg);
}

EncoderSpec encoder_spec(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::GeneralViT: return {kind, 448};
    case EncoderKind::LatexTransformer: return {kind, 420};
    case EncoderKind::HighResConv: return {kind, 1024};
  }
  return {kind, 448};
}

std::string_view to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::GeneralViT: return "GeneralViT";
    case EncoderKind::LatexTransformer: return "LatexTransformer";
    case EncoderKind::HighResConv: return "HighResConv";
  }
  return "?";
}

Bitmap resize_bilinear(const Bitmap& img, int width, int height) {
  if (width <= 0 || height <= 0 || img.width <= 0 || img.height <= 0) {
    throw Error(ErrorKind::InvalidConfig, "resize dimensions must be positive");
  }
  Bitmap out(width, height, 255);
  auto source = [](int i, int dst, int src) {
    return dst > 1 ? static_cast<double>(i) * (src - 1) / (dst - 1) : 0.0;
  };
  for (int y = 0; y < height; ++y) {
    const double sy = source(y, height, img.height);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < width; ++x) {
      const double sx = source(x, width, img.width);
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double fx = sx - x0;
      const double top = img.at(x0, y0) * (1 - fx) + img.at(x1, y0) * fx;
      const double bot = img.at(x0, y1) * (1 - fx) + img.at(x1, y1) * fx;
      const double v = top * (1 - fy) + bot * fy;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

Bitmap resize_for_encoder(const Bitmap& img, const EncoderSpec& spec) {
  return resize_bilinear(img, spec.input_side_px, spec.input_side_px);
}

std::uint64_t pixel_checksum(const Bitmap& img) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : img.pixels) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace mathseed
