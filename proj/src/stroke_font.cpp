#include "mathseed/stroke_font.hpp"

#include <algorithm>
#include <stdexcept>

namespace mathseed {

namespace {

constexpr double kBaseline = 9.0;

double coord(char c) { return static_cast<double>(static_cast<int>(c) - static_cast<int>('R')); }

}  // namespace

StrokeGlyph decode_hershey(std::string_view data) {
  if (data.size() < 2 || data.size() % 2 != 0) throw std::invalid_argument("malformed glyph record");
  StrokeGlyph g;
  const double left = coord(data[0]);
  const double right = coord(data[1]);
  g.advance = right - left;

  Polyline current;
  double min_y = 0, max_y = 0;
  bool any = false;
  for (std::size_t i = 2; i + 1 < data.size(); i += 2) {
    if (data[i] == ' ' && data[i + 1] == 'R') {
      if (!current.empty()) g.strokes.push_back(std::move(current));
      current.clear();
      continue;
    }
    StrokePoint p{coord(data[i]) - left, coord(data[i + 1]) - kBaseline};
    if (!any) {
      min_y = max_y = p.y;
      any = true;
    }
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
    current.push_back(p);
  }
  if (!current.empty()) g.strokes.push_back(std::move(current));

  const double r = StrokeFont::kStrokeWidth / 2;
  if (any) {
    g.ascent = std::max(0.0, -min_y + r);
    g.descent = std::max(0.0, max_y + r);
  }
  return g;
}

std::string_view glyph_key(std::string_view symbol) {
  if (symbol.size() == 2 && symbol[0] == '\\') {
    switch (symbol[1]) {
      case '{': case '}': case '$': case '%': case '&': case '#': case '_':
        return symbol.substr(1);
      default:
        break;
    }
  }
  return symbol;
}

StrokeFont::StrokeFont() {
  for (const auto& rec : detail::hershey_records()) {
    glyphs_.emplace(std::string(rec.name), decode_hershey(rec.data));
  }
}

const StrokeFont& StrokeFont::builtin() {
  static const StrokeFont font;
  return font;
}

const StrokeGlyph* StrokeFont::find(std::string_view symbol) const {
  auto it = glyphs_.find(glyph_key(symbol));
  return it == glyphs_.end() ? nullptr : &it->second;
}

}  // namespace mathseed
