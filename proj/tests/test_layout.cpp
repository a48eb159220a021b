#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "mathseed/error.hpp"
#include "mathseed/layout.hpp"
#include "mathseed/layout_constants.hpp"
#include "support/ast_gen.hpp"

using namespace mathseed;

namespace {

const FontMetricsTable& M() { return FontMetricsTable::builtin(); }

struct Extent {
  double h = 0;
  double d = 0;
};

// Independent vertical measurement for trees of atoms, rows and fractions.
// level: 0 display, 1 text, 2 script, 3 scriptscript.
Extent oracle_extent(const MathNode& n, int level, double base) {
  const double scales[] = {1.0, 1.0, layout_constants::kScriptScale, layout_constants::kScriptScriptScale};
  const double em = base * scales[level];
  const double u = em / M().units_per_em;
  if (const auto* a = std::get_if<Atom>(&n.v)) {
    const auto* g = M().find(a->symbol);
    REQUIRE(g != nullptr);
    return {g->ascent * u, g->descent * u};
  }
  if (const auto* r = std::get_if<Row>(&n.v)) {
    Extent e;
    for (const auto& c : r->children) {
      const Extent ce = oracle_extent(c, level, base);
      e.h = std::max(e.h, ce.h);
      e.d = std::max(e.d, ce.d);
    }
    return e;
  }
  const auto& f = std::get<Frac>(n.v);
  const int inner = std::min(level + 1, 3);
  const Extent num = oracle_extent(*f.numerator, inner, base);
  const Extent den = oracle_extent(*f.denominator, inner, base);
  const double t = M().rule_thickness * u;
  const double gap = (level == 0 ? layout_constants::kFracGapDisplay : layout_constants::kFracGapOther) * t;
  const double a = M().axis_height * u;
  return {a + t / 2 + gap + num.d + num.h, -a + t / 2 + gap + den.h + den.d};
}

void walk(const LayoutNode& n, const std::function<void(const LayoutNode&, const LayoutNode*)>& fn,
          const LayoutNode* parent = nullptr) {
  fn(n, parent);
  if (const auto* h = std::get_if<HBox>(&n.content)) {
    for (const auto& c : h->children) walk(c, fn, &n);
  } else if (const auto* v = std::get_if<VBox>(&n.content)) {
    for (const auto& c : v->children) walk(c, fn, &n);
  }
}

void check_structure(const LayoutNode& root) {
  constexpr double eps = 1e-9;
  walk(root, [&](const LayoutNode& n, const LayoutNode* parent) {
    CHECK(n.width >= 0);
    CHECK(n.height >= 0);
    CHECK(n.depth >= 0);
    if (const auto* g = std::get_if<GlyphBox>(&n.content)) {
      CHECK((g->scale == 1.0 || g->scale == layout_constants::kScriptScale ||
             g->scale == layout_constants::kScriptScriptScale));
    }
    if (parent) {
      CHECK(n.x >= -eps);
      CHECK(n.x + n.width <= parent->width + eps);
      CHECK(n.height - n.y <= parent->height + eps);
      CHECK(n.depth + n.y <= parent->depth + eps);
    }
    if (const auto* h = std::get_if<HBox>(&n.content)) {
      double hmax = 0, dmax = 0;
      for (std::size_t i = 0; i < h->children.size(); ++i) {
        const auto& c = h->children[i];
        hmax = std::max(hmax, c.height - c.y);
        dmax = std::max(dmax, c.depth + c.y);
        if (i > 0) {
          const auto& p = h->children[i - 1];
          CHECK(c.x >= p.x + p.width - eps);
        }
      }
      if (!h->children.empty()) {
        const auto& last = h->children.back();
        CHECK(n.width == doctest::Approx(last.x + last.width).epsilon(1e-12));
      }
      CHECK(n.height == doctest::Approx(hmax).epsilon(1e-12));
      CHECK(n.depth == doctest::Approx(dmax).epsilon(1e-12));
    }
  });
}

void check_scaled(const LayoutNode& a, const LayoutNode& b, double k) {
  auto close = [](double x, double y) { return std::fabs(x - y) <= 1e-9 * std::max(1.0, std::fabs(y)); };
  CHECK(close(b.x, k * a.x));
  CHECK(close(b.y, k * a.y));
  CHECK(close(b.width, k * a.width));
  CHECK(close(b.height, k * a.height));
  CHECK(close(b.depth, k * a.depth));
  REQUIRE(a.content.index() == b.content.index());
  const std::vector<LayoutNode>* ca = nullptr;
  const std::vector<LayoutNode>* cb = nullptr;
  if (const auto* h = std::get_if<HBox>(&a.content)) {
    ca = &h->children;
    cb = &std::get<HBox>(b.content).children;
  } else if (const auto* v = std::get_if<VBox>(&a.content)) {
    ca = &v->children;
    cb = &std::get<VBox>(b.content).children;
  }
  if (ca) {
    REQUIRE(ca->size() == cb->size());
    for (std::size_t i = 0; i < ca->size(); ++i) check_scaled((*ca)[i], (*cb)[i], k);
  }
}

double word_width_oracle(const std::string& word, double size) {
  double w = 0;
  for (char c : word) w += M().find(std::string(1, c))->advance * size / M().units_per_em;
  return w;
}

}  // namespace

TEST_CASE("metrics table is total and positive") {
  CHECK_NOTHROW(M().check_totality());
  for (const auto& [name, g] : M().glyphs) {
    INFO(name);
    CHECK(g.advance > 0);
    CHECK(g.ascent >= 0);
    CHECK(g.descent >= 0);
  }
  FontMetricsTable partial = M();
  partial.glyphs.erase("\\alpha");
  CHECK_THROWS_AS(partial.check_totality(), Error);
}

TEST_CASE("single atom glyph box") {
  auto box = layout_math(parse_math("x"), {Style::Text, 32}, M());
  REQUIRE(std::holds_alternative<GlyphBox>(box.content));
  CHECK(box.width == doctest::Approx(M().find("x")->advance / M().units_per_em * 32));
  CHECK(std::get<GlyphBox>(box.content).scale == 1.0);
}

TEST_CASE("script style glyph scale") {
  auto box = layout_math(parse_math("x"), {Style::Script, 32}, M());
  CHECK(std::get<GlyphBox>(box.content).scale == layout_constants::kScriptScale);
  box = layout_math(parse_math("x^{y^{z}}"), {Style::Text, 32}, M());
  std::vector<double> scales;
  walk(box, [&](const LayoutNode& n, const LayoutNode*) {
    if (const auto* g = std::get_if<GlyphBox>(&n.content)) scales.push_back(g->scale);
  });
  CHECK(scales == std::vector<double>{1.0, 0.7, 0.5});
}

TEST_CASE("fraction matches independent measurement") {
  const char* cases[] = {"\\frac{1}{2}", "\\frac{ab}{c}", "\\frac{\\frac{x}{y}}{2}", "\\frac{g}{\\alpha\\beta}"};
  for (const char* src : cases) {
    for (bool display : {false, true}) {
      INFO(src, " display=", display);
      const MathNode node = parse_math(src);
      const auto box = layout_math(node, {display ? Style::Display : Style::Text, 32}, M());
      REQUIRE(std::holds_alternative<VBox>(box.content));
      const auto& kids = std::get<VBox>(box.content).children;
      REQUIRE(kids.size() == 3);
      CHECK(std::holds_alternative<RuleBox>(kids[1].content));
      const Extent e = oracle_extent(node, display ? 0 : 1, 32);
      CHECK(box.height == doctest::Approx(e.h).epsilon(1e-12));
      CHECK(box.depth == doctest::Approx(e.d).epsilon(1e-12));
      // Bar centred on the axis.
      const double a = M().axis_height / M().units_per_em * 32;
      const double t = M().rule_thickness / M().units_per_em * 32;
      CHECK(kids[1].y - t / 2 == doctest::Approx(-a));
    }
  }
}

TEST_CASE("script shifts follow pinned constants") {
  const auto box = layout_math(parse_math("x^2"), {Style::Text, 32}, M());
  const auto& kids = std::get<HBox>(box.content).children;
  REQUIRE(kids.size() == 2);
  const auto& col = std::get<VBox>(kids[1].content).children;
  REQUIRE(col.size() == 1);
  CHECK(col[0].y == doctest::Approx(-layout_constants::kSuperscriptShift * kids[0].height));

  const auto sub = layout_math(parse_math("x_2"), {Style::Text, 32}, M());
  const auto& sk = std::get<HBox>(sub.content).children;
  const auto& scol = std::get<VBox>(sk[1].content).children;
  const double xh = M().x_height / M().units_per_em * 32;
  CHECK(scol[0].y == doctest::Approx(layout_constants::kSubscriptDepthShift * sk[0].depth +
                                     layout_constants::kSubscriptXHeightShift * xh));

  const auto both = layout_math(parse_math("x_2^2"), {Style::Text, 32}, M());
  const auto& bcol = std::get<VBox>(std::get<HBox>(both.content).children[1].content).children;
  REQUIRE(bcol.size() == 2);
  const double gap = (bcol[1].y - bcol[1].height) - (bcol[0].y + bcol[0].depth);
  const double t = M().rule_thickness / M().units_per_em * 32;
  CHECK(gap >= layout_constants::kScriptClearance * t - 1e-9);
}

TEST_CASE("big operator limits stack in display and attach in text") {
  const auto node = parse_math("\\sum_{i=1}^{n}");
  const auto d = layout_math(node, {Style::Display, 32}, M());
  CHECK(std::holds_alternative<VBox>(d.content));
  CHECK(std::get<VBox>(d.content).children.size() == 3);
  const auto t = layout_math(node, {Style::Text, 32}, M());
  CHECK(std::holds_alternative<HBox>(t.content));
  CHECK(std::get<HBox>(t.content).children.size() == 2);
}

TEST_CASE("structural invariants over random trees") {
  testing::AstGenerator gen(11);
  for (int i = 0; i < 300; ++i) {
    const MathNode node = gen.node(5);
    INFO(canonical_form(node));
    for (Style s : {Style::Display, Style::Text, Style::Script}) {
      const auto box = layout_math(node, {s, 32}, M());
      check_structure(box);
      CHECK(layout_math(node, {s, 32}, M()) == box);
      check_scaled(box, layout_math(node, {s, 64}, M()), 2.0);
      check_scaled(box, layout_math(node, {s, 48}, M()), 1.5);
    }
  }
}

TEST_CASE("missing glyph is reported") {
  FontMetricsTable t = M();
  t.glyphs.erase("y");
  CHECK_THROWS_AS(layout_math(parse_math("x+y"), {Style::Text, 32}, t), Error);
  try {
    layout_math(parse_math("x+y"), {Style::Text, 32}, t);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingGlyph);
  }
}

TEST_CASE("document line breaking") {
  const double size = 32;
  auto one = layout_document(parse_document("hello"), {Style::Text, size}, M(), 1000);
  CHECK(std::get<VBox>(one.content).children.size() == 1);
  CHECK(one.width == 1000);

  const double w1 = word_width_oracle("abc", size);
  const double w2 = word_width_oracle("defg", size);
  const double max_w = std::max(w1, w2) + 1;
  REQUIRE(w1 + w2 > max_w);
  auto two = layout_document(parse_document("abc defg"), {Style::Text, size}, M(), max_w);
  CHECK(std::get<VBox>(two.content).children.size() == 2);

  auto err = [&] { layout_document(parse_document("abcdefghij"), {Style::Text, size}, M(), 50); };
  CHECK_THROWS_AS(err(), Error);
  try {
    err();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BoxTooWide);
  }
}

TEST_CASE("forty-word paragraph matches brute-force greedy oracle") {
  std::mt19937_64 rng(5);
  const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  const double size = 24;
  const double space = M().find(" ")->advance * size / M().units_per_em;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> words;
    std::string text;
    for (int i = 0; i < 40; ++i) {
      std::string w;
      const int len = 1 + static_cast<int>(rng() % 9);
      for (int k = 0; k < len; ++k) w += letters[rng() % letters.size()];
      words.push_back(w);
      text += (i ? " " : "") + w;
    }
    const double max_w = 300 + static_cast<double>(rng() % 400);
    // Oracle: try every prefix length for each line and keep the longest that fits.
    std::size_t lines = 0;
    std::size_t i = 0;
    while (i < words.size()) {
      std::size_t best = i + 1;
      for (std::size_t j = i + 1; j <= words.size(); ++j) {
        double w = 0;
        for (std::size_t k = i; k < j; ++k) w += word_width_oracle(words[k], size) + (k > i ? space : 0);
        if (w <= max_w) best = j;
        else break;
      }
      ++lines;
      i = best;
    }
    auto box = layout_document(parse_document(text), {Style::Text, size}, M(), max_w);
    CHECK(std::get<VBox>(box.content).children.size() == lines);
    check_structure(box);
  }
}

TEST_CASE("display math is centred on its own line") {
  auto box = layout_document(parse_document("Find \\[x^2\\] now"), {Style::Text, 32}, M(), 800);
  const auto& lines = std::get<VBox>(box.content).children;
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].x == doctest::Approx((800 - lines[1].width) / 2));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double dist = lines[i].y - lines[i - 1].y;
    const double taller = std::max(lines[i].height + lines[i].depth, lines[i - 1].height + lines[i - 1].depth);
    CHECK(dist >= layout_constants::kLineSpacing * taller - 1e-9);
    CHECK(dist >= lines[i - 1].depth + lines[i].height - 1e-9);
  }
  check_structure(box);
}

TEST_CASE("text glyphs map commands and unknown characters") {
  auto g = text_glyphs("a \\le \xce\xb1\\$");
  CHECK(g == std::vector<std::string>{"a", "", "\\leq", "", "\\tofu", "\\$"});
}
