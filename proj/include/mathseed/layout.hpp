#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mathseed/latex.hpp"

namespace mathseed {

struct GlyphMetrics {
  double advance = 0;
  double ascent = 0;
  double descent = 0;
};

struct FontMetricsTable {
  std::map<std::string, GlyphMetrics, std::less<>> glyphs;
  double units_per_em = 32;
  double rule_thickness = 2;
  double axis_height = 9;
  double x_height = 14;

  // Built from the embedded stroke font; verifies every whitelist symbol has an entry.
  static const FontMetricsTable& builtin();

  const GlyphMetrics* find(std::string_view symbol) const;

  // Throws MissingGlyph naming the first whitelist symbol without metrics.
  void check_totality() const;
};

enum class Style { Display, Text, Script, ScriptScript };

struct LayoutStyle {
  Style style = Style::Text;
  double base_size_px = 32;
};

double style_scale(Style style);

struct LayoutNode;

struct GlyphBox {
  std::string symbol;
  double scale = 1.0;     // one of 1, script scale, scriptscript scale
  double size_px = 32;    // em size before scale
  double stretch_y = 1.0; // vertical stretch, used only by radical signs
  bool operator==(const GlyphBox&) const = default;
};

struct RuleBox {
  double thickness = 0;
  bool operator==(const RuleBox&) const = default;
};

struct HBox {
  std::vector<LayoutNode> children;
  bool operator==(const HBox& other) const;
};

struct VBox {
  std::vector<LayoutNode> children;
  bool operator==(const VBox& other) const;
};

// Child x, y are offsets of the child's reference point (left edge, baseline)
// from the parent's reference point; y grows downward. All lengths are pixels.
struct LayoutNode {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;
  double depth = 0;
  std::variant<GlyphBox, RuleBox, HBox, VBox> content;

  bool operator==(const LayoutNode&) const = default;
};

inline bool HBox::operator==(const HBox& other) const { return children == other.children; }
inline bool VBox::operator==(const VBox& other) const { return children == other.children; }

LayoutNode layout_math(const MathNode& node, const LayoutStyle& style,
                       const FontMetricsTable& metrics = FontMetricsTable::builtin());

// Returns a VBox of lines whose reference point is its top-left corner
// (height 0, depth equal to the full stacked extent) and whose width is
// max_line_width_px.
LayoutNode layout_document(const ProblemDocument& doc, const LayoutStyle& style,
                           const FontMetricsTable& metrics, double max_line_width_px);

// Glyph names for a text run: one entry per printable unit, "" for spaces.
std::vector<std::string> text_glyphs(std::string_view text);

}  // namespace mathseed
