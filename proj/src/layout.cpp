#include "mathseed/layout.hpp"

#include <algorithm>
#include <array>

#include "mathseed/error.hpp"
#include "mathseed/layout_constants.hpp"
#include "mathseed/stroke_font.hpp"

namespace mathseed {

namespace lc = layout_constants;

const FontMetricsTable& FontMetricsTable::builtin() {
  static const FontMetricsTable table = [] {
    FontMetricsTable t;
    t.units_per_em = StrokeFont::kUnitsPerEm;
    t.rule_thickness = StrokeFont::kStrokeWidth;
    t.axis_height = StrokeFont::kAxisHeight;
    t.x_height = StrokeFont::kXHeight;
    for (const auto& [name, g] : StrokeFont::builtin().glyphs()) {
      t.glyphs.emplace(name, GlyphMetrics{g.advance, g.ascent, g.descent});
    }
    t.check_totality();
    return t;
  }();
  return table;
}

const GlyphMetrics* FontMetricsTable::find(std::string_view symbol) const {
  auto it = glyphs.find(glyph_key(symbol));
  return it == glyphs.end() ? nullptr : &it->second;
}

void FontMetricsTable::check_totality() const {
  auto symbols = whitelist_symbols();
  symbols.push_back("\\surd");
  symbols.push_back("\\tofu");
  for (const auto& s : symbols) {
    if (!find(s)) throw Error(ErrorKind::MissingGlyph, s);
  }
}

double style_scale(Style style) {
  switch (style) {
    case Style::Display:
    case Style::Text:
      return 1.0;
    case Style::Script:
      return lc::kScriptScale;
    case Style::ScriptScript:
      return lc::kScriptScriptScale;
  }
  return 1.0;
}

namespace {

enum class SpaceClass { Ord = 0, Op, Bin, Rel, Open, Close, Punct, Inner };

SpaceClass space_class(AtomClass c) {
  switch (c) {
    case AtomClass::Ord: return SpaceClass::Ord;
    case AtomClass::Op: return SpaceClass::Op;
    case AtomClass::Bin: return SpaceClass::Bin;
    case AtomClass::Rel: return SpaceClass::Rel;
    case AtomClass::Open: return SpaceClass::Open;
    case AtomClass::Close: return SpaceClass::Close;
    case AtomClass::Punct: return SpaceClass::Punct;
  }
  return SpaceClass::Ord;
}

SpaceClass node_class(const MathNode& n) {
  if (const auto* a = std::get_if<Atom>(&n.v)) return space_class(a->cls);
  if (n.is<BigOp>()) return SpaceClass::Op;
  if (n.is<Frac>()) return SpaceClass::Inner;
  if (const auto* s = std::get_if<Script>(&n.v)) return node_class(*s->base);
  return SpaceClass::Ord;
}

// Rows: left class; columns: right class. '0' none, '1' thin unless script
// style, '2' thin, '3' medium unless script style, '4' thick unless script
// style. '*' pairs cannot occur after binary-operator demotion.
constexpr std::array<std::string_view, 8> kSpacing = {
    "02340001", "22*40001", "33**3**3", "44*04004", "00*00000", "02340001", "11*11111", "12341011",
};

double inter_atom_space(SpaceClass left, SpaceClass right, Style style, double em) {
  const char code = kSpacing[static_cast<std::size_t>(left)][static_cast<std::size_t>(right)];
  const bool script = style == Style::Script || style == Style::ScriptScript;
  const double mu = em / 18.0;
  switch (code) {
    case '1': return script ? 0.0 : lc::kThinMu * mu;
    case '2': return lc::kThinMu * mu;
    case '3': return script ? 0.0 : lc::kMediumMu * mu;
    case '4': return script ? 0.0 : lc::kThickMu * mu;
    default: return 0.0;
  }
}

Style script_style(Style s) {
  return (s == Style::Display || s == Style::Text) ? Style::Script : Style::ScriptScript;
}

Style frac_style(Style s) {
  switch (s) {
    case Style::Display: return Style::Text;
    case Style::Text: return Style::Script;
    default: return Style::ScriptScript;
  }
}

LayoutNode make_hbox(std::vector<LayoutNode> children) {
  LayoutNode box;
  for (const auto& c : children) {
    box.width = std::max(box.width, c.x + c.width);
    box.height = std::max(box.height, c.height - c.y);
    box.depth = std::max(box.depth, c.depth + c.y);
  }
  box.content = HBox{std::move(children)};
  return box;
}

LayoutNode make_vbox(std::vector<LayoutNode> children, double width) {
  LayoutNode box;
  box.width = width;
  for (const auto& c : children) {
    box.width = std::max(box.width, c.x + c.width);
    box.height = std::max(box.height, c.height - c.y);
    box.depth = std::max(box.depth, c.depth + c.y);
  }
  box.content = VBox{std::move(children)};
  return box;
}

LayoutNode make_rule(double width, double thickness, double x, double y) {
  LayoutNode r;
  r.x = x;
  r.y = y;
  r.width = width;
  r.height = thickness;
  r.depth = 0;
  r.content = RuleBox{thickness};
  return r;
}

class MathLayout {
 public:
  MathLayout(const FontMetricsTable& m, double base) : m_(m), base_(base) {}

  LayoutNode node(const MathNode& n, Style style) {
    return std::visit([&](const auto& v) { return lay(v, style); }, n.v);
  }

  LayoutNode glyph(const std::string& symbol, Style style, double stretch_y = 1.0) {
    const GlyphMetrics* g = m_.find(symbol);
    if (!g) throw Error(ErrorKind::MissingGlyph, symbol);
    const double k = em(style) / m_.units_per_em;
    LayoutNode box;
    box.width = g->advance * k;
    box.height = g->ascent * k * stretch_y;
    box.depth = g->descent * k * stretch_y;
    box.content = GlyphBox{symbol, style_scale(style), base_, stretch_y};
    return box;
  }

 private:
  const FontMetricsTable& m_;
  double base_;

  double em(Style s) const { return base_ * style_scale(s); }
  double unit(Style s) const { return em(s) / m_.units_per_em; }
  double theta(Style s) const { return m_.rule_thickness * unit(s); }
  double axis(Style s) const { return m_.axis_height * unit(s); }
  double xheight(Style s) const { return m_.x_height * unit(s); }

  LayoutNode lay(const Atom& a, Style style) { return glyph(a.symbol, style); }

  LayoutNode lay(const Row& r, Style style) {
    std::vector<SpaceClass> cls;
    cls.reserve(r.children.size());
    for (const auto& c : r.children) cls.push_back(node_class(c));
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (cls[i] == SpaceClass::Bin) {
        if (i == 0) {
          cls[i] = SpaceClass::Ord;
        } else {
          const SpaceClass p = cls[i - 1];
          if (p == SpaceClass::Bin || p == SpaceClass::Op || p == SpaceClass::Rel || p == SpaceClass::Open ||
              p == SpaceClass::Punct) {
            cls[i] = SpaceClass::Ord;
          }
        }
      } else if ((cls[i] == SpaceClass::Rel || cls[i] == SpaceClass::Close || cls[i] == SpaceClass::Punct) &&
                 i > 0 && cls[i - 1] == SpaceClass::Bin) {
        cls[i - 1] = SpaceClass::Ord;
      }
    }
    if (!cls.empty() && cls.back() == SpaceClass::Bin) cls.back() = SpaceClass::Ord;

    std::vector<LayoutNode> kids;
    double x = 0;
    for (std::size_t i = 0; i < r.children.size(); ++i) {
      if (i > 0) x += inter_atom_space(cls[i - 1], cls[i], style, em(style));
      LayoutNode c = node(r.children[i], style);
      c.x = x;
      c.y = 0;
      x += c.width;
      kids.push_back(std::move(c));
    }
    return make_hbox(std::move(kids));
  }

  LayoutNode lay(const Frac& f, Style style) {
    const Style inner = frac_style(style);
    LayoutNode num = node(*f.numerator, inner);
    LayoutNode den = node(*f.denominator, inner);
    const double t = theta(style);
    const double gap = (style == Style::Display ? lc::kFracGapDisplay : lc::kFracGapOther) * t;
    const double a = axis(style);
    const double width = std::max(num.width, den.width) + 2 * lc::kFracPad * t;

    num.x = (width - num.width) / 2;
    num.y = -(a + t / 2 + gap + num.depth);
    den.x = (width - den.width) / 2;
    den.y = -a + t / 2 + gap + den.height;
    std::vector<LayoutNode> kids;
    kids.push_back(std::move(num));
    kids.push_back(make_rule(width, t, 0, -a + t / 2));
    kids.push_back(std::move(den));
    return make_vbox(std::move(kids), width);
  }

  LayoutNode attach_scripts(LayoutNode base, const std::optional<NodePtr>& sup,
                            const std::optional<NodePtr>& sub, Style style) {
    const Style ss = script_style(style);
    double u = lc::kSuperscriptShift * base.height;
    double v = lc::kSubscriptDepthShift * base.depth + lc::kSubscriptXHeightShift * xheight(style);
    std::vector<LayoutNode> scripts;
    std::optional<LayoutNode> sup_box;
    std::optional<LayoutNode> sub_box;
    if (sup) sup_box = node(**sup, ss);
    if (sub) sub_box = node(**sub, ss);
    if (sup_box && sub_box) {
      const double gap = (v - sub_box->height) - (sup_box->depth - u);
      const double need = lc::kScriptClearance * theta(style);
      if (gap < need) v += need - gap;
    }
    if (sup_box) {
      sup_box->x = 0;
      sup_box->y = -u;
      scripts.push_back(std::move(*sup_box));
    }
    if (sub_box) {
      sub_box->x = 0;
      sub_box->y = v;
      scripts.push_back(std::move(*sub_box));
    }
    LayoutNode col = make_vbox(std::move(scripts), 0);
    base.x = 0;
    base.y = 0;
    col.x = base.width;
    col.y = 0;
    std::vector<LayoutNode> kids;
    kids.push_back(std::move(base));
    kids.push_back(std::move(col));
    return make_hbox(std::move(kids));
  }

  LayoutNode lay(const Script& s, Style style) {
    return attach_scripts(node(*s.base, style), s.superscript, s.subscript, style);
  }

  LayoutNode lay(const Sqrt& s, Style style) {
    LayoutNode body = node(*s.radicand, style);
    const double t = theta(style);
    const double gap = lc::kRadicalGap * t;
    const double total = body.height + gap + t + body.depth;

    const GlyphMetrics* surd = m_.find("\\surd");
    if (!surd) throw Error(ErrorKind::MissingGlyph, "\\surd");
    const double natural = (surd->ascent + surd->descent) * unit(style);
    LayoutNode sign = glyph("\\surd", style, total / natural);
    sign.y = body.depth - sign.depth;

    const double bar_width = body.width + t;
    body.x = 0;
    body.y = 0;
    std::vector<LayoutNode> under;
    under.push_back(make_rule(bar_width, t, 0, -(body.height + gap)));
    under.push_back(std::move(body));
    LayoutNode covered = make_vbox(std::move(under), bar_width);

    std::vector<LayoutNode> kids;
    double x = 0;
    if (s.index) {
      LayoutNode idx = node(**s.index, Style::ScriptScript);
      idx.x = 0;
      idx.y = sign.y + sign.depth - 0.6 * total - idx.depth;
      x = idx.width;
      kids.push_back(std::move(idx));
    }
    sign.x = x;
    x += sign.width;
    covered.x = x;
    covered.y = 0;
    kids.push_back(std::move(sign));
    kids.push_back(std::move(covered));
    return make_hbox(std::move(kids));
  }

  LayoutNode lay(const Group& g, Style style) { return node(*g.child, style); }

  // The operator glyph centred on the math axis, wrapped so the shift survives placement.
  LayoutNode centred_op(const std::string& symbol, Style style) {
    LayoutNode op = glyph(symbol, style);
    op.y = -axis(style) + (op.height - op.depth) / 2;
    std::vector<LayoutNode> kids;
    kids.push_back(std::move(op));
    return make_hbox(std::move(kids));
  }

  LayoutNode lay(const BigOp& b, Style style) {
    LayoutNode op = centred_op(b.symbol, style);
    if (!b.lower && !b.upper) return op;
    const bool stack = style == Style::Display && b.symbol != "\\int";
    if (!stack) return attach_scripts(std::move(op), b.upper, b.lower, style);

    const Style ls = script_style(style);
    const double gap = lc::kLimitGap * theta(style);
    std::optional<LayoutNode> up;
    std::optional<LayoutNode> lo;
    if (b.upper) up = node(**b.upper, ls);
    if (b.lower) lo = node(**b.lower, ls);
    double width = op.width;
    if (up) width = std::max(width, up->width);
    if (lo) width = std::max(width, lo->width);

    std::vector<LayoutNode> kids;
    if (up) {
      up->x = (width - up->width) / 2;
      up->y = -op.height - gap - up->depth;
      kids.push_back(std::move(*up));
    }
    const double op_depth = op.depth;
    op.x = (width - op.width) / 2;
    op.y = 0;
    kids.push_back(std::move(op));
    if (lo) {
      lo->x = (width - lo->width) / 2;
      lo->y = op_depth + gap + lo->height;
      kids.push_back(std::move(*lo));
    }
    return make_vbox(std::move(kids), width);
  }
};

struct Word {
  std::vector<LayoutNode> items;
  double width = 0;
};

LayoutNode word_box(Word w) {
  double x = 0;
  for (auto& it : w.items) {
    it.x = x;
    it.y = 0;
    x += it.width;
  }
  return make_hbox(std::move(w.items));
}

}  // namespace

std::vector<std::string> text_glyphs(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(text)) {
    switch (tok.kind) {
      case TokenKind::Whitespace:
        out.emplace_back();
        break;
      case TokenKind::Command: {
        const CommandInfo* info = lookup_command(tok.lexeme);
        out.emplace_back(info ? info->canonical : tok.lexeme);
        break;
      }
      case TokenKind::Text: {
        const auto c = static_cast<unsigned char>(tok.lexeme[0]);
        out.push_back(tok.lexeme.size() == 1 && c >= 0x20 && c < 0x7f ? tok.lexeme : "\\tofu");
        break;
      }
      default:
        out.push_back(tok.lexeme);
        break;
    }
  }
  return out;
}

LayoutNode layout_math(const MathNode& node, const LayoutStyle& style, const FontMetricsTable& metrics) {
  MathLayout ml(metrics, style.base_size_px);
  return ml.node(node, style.style);
}

LayoutNode layout_document(const ProblemDocument& doc, const LayoutStyle& style, const FontMetricsTable& metrics,
                           double max_line_width_px) {
  if (!(max_line_width_px > 0)) throw Error(ErrorKind::InvalidConfig, "max line width must be positive");
  MathLayout ml(metrics, style.base_size_px);
  const Style text_style = style.style == Style::Display ? Style::Text : style.style;

  struct Entry {
    Word word;
    bool display = false;
  };
  std::vector<Entry> entries;
  Word current;
  auto flush = [&] {
    if (!current.items.empty()) entries.push_back({std::move(current), false});
    current = Word{};
  };
  auto add = [&](LayoutNode box) {
    current.width += box.width;
    current.items.push_back(std::move(box));
  };

  for (const auto& seg : doc.segments) {
    if (const auto* t = std::get_if<TextRun>(&seg)) {
      for (const auto& g : text_glyphs(t->text)) {
        if (g.empty()) {
          flush();
        } else {
          add(ml.glyph(metrics.find(g) ? g : std::string("\\tofu"), text_style));
        }
      }
    } else if (const auto* im = std::get_if<InlineMath>(&seg)) {
      add(ml.node(im->node, text_style));
    } else {
      flush();
      Word w;
      LayoutNode box = ml.node(std::get<DisplayMath>(seg).node, Style::Display);
      w.width = box.width;
      w.items.push_back(std::move(box));
      entries.push_back({std::move(w), true});
    }
  }
  flush();

  const GlyphMetrics* space = metrics.find(" ");
  const double space_w = space ? space->advance * style.base_size_px * style_scale(text_style) / metrics.units_per_em : 0;

  std::vector<LayoutNode> lines;
  std::vector<LayoutNode> line_words;
  double line_x = 0;
  auto finish_line = [&] {
    if (line_words.empty()) return;
    lines.push_back(make_hbox(std::move(line_words)));
    line_words.clear();
    line_x = 0;
  };
  for (auto& e : entries) {
    if (e.word.width > max_line_width_px) {
      throw Error(ErrorKind::BoxTooWide, std::to_string(e.word.width) + "px exceeds line width " +
                                             std::to_string(max_line_width_px) + "px");
    }
    if (e.display) {
      finish_line();
      LayoutNode box = std::move(e.word.items.front());
      box.x = (max_line_width_px - box.width) / 2;
      box.y = 0;
      lines.push_back(std::move(box));
      continue;
    }
    const double w = e.word.width;
    if (!line_words.empty() && line_x + space_w + w > max_line_width_px) finish_line();
    const double x = line_words.empty() ? 0 : line_x + space_w;
    LayoutNode wb = word_box(std::move(e.word));
    wb.x = x;
    wb.y = 0;
    line_x = x + w;
    line_words.push_back(std::move(wb));
  }
  finish_line();

  double baseline = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == 0) {
      baseline = lines[i].height;
    } else {
      const LayoutNode& p = lines[i - 1];
      const LayoutNode& c = lines[i];
      const double taller = std::max(p.height + p.depth, c.height + c.depth);
      baseline += std::max(lc::kLineSpacing * taller, p.depth + c.height);
    }
    lines[i].y = baseline;
  }
  return make_vbox(std::move(lines), max_line_width_px);
}

}  // namespace mathseed
