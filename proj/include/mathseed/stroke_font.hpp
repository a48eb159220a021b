#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mathseed {

namespace detail {
struct HersheyRecord {
  std::string_view name;
  std::string_view data;
};
const std::vector<HersheyRecord>& hershey_records();
}  // namespace detail

// Font units: origin at the left bearing on the baseline, y grows downward.
struct StrokePoint {
  double x = 0;
  double y = 0;
};

using Polyline = std::vector<StrokePoint>;

struct StrokeGlyph {
  std::vector<Polyline> strokes;
  double advance = 0;
  double ascent = 0;   // ink above the baseline including the pen radius
  double descent = 0;  // ink below the baseline including the pen radius
};

class StrokeFont {
 public:
  static constexpr double kUnitsPerEm = 32.0;
  static constexpr double kStrokeWidth = 2.0;
  static constexpr double kAxisHeight = 9.0;
  static constexpr double kXHeight = 14.0;

  static const StrokeFont& builtin();

  // Resolves escaped forms such as "\{" to their base glyph.
  const StrokeGlyph* find(std::string_view symbol) const;
  const std::map<std::string, StrokeGlyph, std::less<>>& glyphs() const { return glyphs_; }

 private:
  StrokeFont();
  std::map<std::string, StrokeGlyph, std::less<>> glyphs_;
};

// Decodes one record in Hershey vertex encoding into font units.
StrokeGlyph decode_hershey(std::string_view data);

// Maps "\{" to "{" and similar; returns the input unchanged otherwise.
std::string_view glyph_key(std::string_view symbol);

}  // namespace mathseed
