#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zlib.h>

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "mathseed/error.hpp"
#include "mathseed/png.hpp"
#include "mathseed/raster.hpp"
#include "support/ink.hpp"

using namespace mathseed;
using testing::ink_bbox;

namespace {

const FontMetricsTable& M() { return FontMetricsTable::builtin(); }

LayoutNode formula(const char* src, double size = 32) {
  return layout_math(parse_math(src), {Style::Display, size}, M());
}

const char* kFixtures[] = {
    "\\frac{1}{2}",
    "x^2+y^2=z^2",
    "\\sqrt[3]{\\frac{a+b}{c}}",
    "\\sum_{i=1}^{n} i^2 = \\frac{n(n+1)(2n+1)}{6}",
    "\\int_0^1 x\\,dx",
    "\\alpha\\beta\\gamma \\leq \\Omega",
    "a_{ij} \\cdot b_{jk}",
};

// Independent PNG writer exercising every row filter type.
std::vector<std::uint8_t> filtered_png(const Bitmap& img) {
  auto u32 = [](std::vector<std::uint8_t>& o, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) o.push_back(static_cast<std::uint8_t>(v >> s));
  };
  auto chunk = [&](std::vector<std::uint8_t>& o, const char* t, const std::vector<std::uint8_t>& d) {
    u32(o, static_cast<std::uint32_t>(d.size()));
    std::vector<std::uint8_t> body(t, t + 4);
    body.insert(body.end(), d.begin(), d.end());
    o.insert(o.end(), body.begin(), body.end());
    u32(o, static_cast<std::uint32_t>(crc32(0, body.data(), static_cast<uInt>(body.size()))));
  };
  std::vector<std::uint8_t> raw;
  for (int y = 0; y < img.height; ++y) {
    const int f = y % 5;
    raw.push_back(static_cast<std::uint8_t>(f));
    for (int x = 0; x < img.width; ++x) {
      const int cur = img.at(x, y);
      const int a = x ? img.at(x - 1, y) : 0;
      const int b = y ? img.at(x, y - 1) : 0;
      const int c = (x && y) ? img.at(x - 1, y - 1) : 0;
      int pred = 0;
      if (f == 1) pred = a;
      if (f == 2) pred = b;
      if (f == 3) pred = (a + b) / 2;
      if (f == 4) {
        const int p = a + b - c;
        const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
        pred = (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
      }
      raw.push_back(static_cast<std::uint8_t>(cur - pred));
    }
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(len);
  compress(z.data(), &len, raw.data(), static_cast<uLong>(raw.size()));
  z.resize(len);
  std::vector<std::uint8_t> o = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  u32(ihdr, static_cast<std::uint32_t>(img.width));
  u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});
  chunk(o, "IHDR", ihdr);
  chunk(o, "IDAT", z);
  chunk(o, "IEND", {});
  return o;
}

}  // namespace

TEST_CASE("empty layout renders a blank canvas") {
  LayoutNode empty;
  empty.content = VBox{};
  const Bitmap b = rasterize(empty, {512, 8, 32, 4});
  CHECK(b.width == 512);
  CHECK(b.height == 512);
  CHECK(std::all_of(b.pixels.begin(), b.pixels.end(), [](auto p) { return p == 255; }));
}

TEST_CASE("full-width rule fills exactly two rows") {
  RenderConfig cfg{256, 10, 32, 1};
  LayoutNode rule;
  rule.width = 256 - 20;
  rule.height = 2;
  rule.content = RuleBox{2};
  const Bitmap b = rasterize(rule, cfg);
  CHECK(b.width == 256);
  int black_rows = 0;
  for (int y = 0; y < b.height; ++y) {
    int zeros = 0;
    for (int x = 0; x < b.width; ++x) {
      const auto p = b.at(x, y);
      CHECK((p == 0 || p == 255));
      if (p == 0) {
        ++zeros;
        CHECK(x >= 10);
        CHECK(x < 246);
      }
    }
    if (zeros) {
      CHECK(zeros == 236);
      ++black_rows;
    }
  }
  CHECK(black_rows == 2);
}

TEST_CASE("long side equals target and rendering is deterministic") {
  for (const char* src : kFixtures) {
    INFO(std::string(src));
    const auto box = formula(src);
    for (int T : {256, 512, 1024}) {
      const Bitmap a = rasterize(box, {T, T / 32, 32, 4});
      CHECK(std::max(a.width, a.height) == T);
      CHECK(rasterize(box, {T, T / 32, 32, 4}) == a);
      CHECK(testing::margins_pure(a, T / 32));
    }
  }
}

TEST_CASE("ink bounding box scales with resolution") {
  for (const char* src : kFixtures) {
    INFO(std::string(src));
    const auto box = formula(src);
    const auto lo = ink_bbox(rasterize(box, {512, 8, 32, 4}));
    const auto hi = ink_bbox(rasterize(box, {1024, 16, 32, 4}));
    REQUIRE(!lo.empty());
    // Pixel i at 512 covers [2i, 2i+2) at 1024; compare covered spans.
    CHECK(std::abs(hi.x0 - 2 * lo.x0) <= 1);
    CHECK(std::abs(hi.y0 - 2 * lo.y0) <= 1);
    CHECK(std::abs((hi.x1 + 1) - 2 * (lo.x1 + 1)) <= 1);
    CHECK(std::abs((hi.y1 + 1) - 2 * (lo.y1 + 1)) <= 1);
  }
}

TEST_CASE("supersampling conserves ink") {
  for (const char* src : kFixtures) {
    INFO(std::string(src));
    const auto box = formula(src);
    const double ink1 = static_cast<double>(testing::total_ink(rasterize(box, {1024, 16, 32, 1})));
    const double ink4 = static_cast<double>(testing::total_ink(rasterize(box, {1024, 16, 32, 4})));
    REQUIRE(ink1 > 0);
    CHECK(std::fabs(ink4 - ink1) / ink1 < 0.05);
  }
  std::ifstream corpus(std::string(MATHSEED_TEST_DATA) + "/fixtures/corpus50.jsonl");
  int n = 0;
  for (std::string line; std::getline(corpus, line); ++n) {
    const auto problem = nlohmann::json::parse(line).at("problem").get<std::string>();
    INFO(problem);
    RenderConfig cfg;
    cfg.supersample = 1;
    const double ink1 = static_cast<double>(testing::total_ink(render_problem(problem, cfg)));
    cfg.supersample = 4;
    const double ink4 = static_cast<double>(testing::total_ink(render_problem(problem, cfg)));
    REQUIRE(ink1 > 0);
    CHECK(std::fabs(ink4 - ink1) / ink1 < 0.05);
  }
  CHECK(n == 50);
}

TEST_CASE("one-pixel strokes cover one row at any vertical offset") {
  // A 2-unit stroke at 16px is exactly 1px wide; offset 0.5 puts its edges on sample centres.
  for (double offset : {0.0, 0.25, 0.5, 0.75}) {
    INFO(offset);
    LayoutNode glyph;
    glyph.x = 2;
    glyph.y = offset;
    glyph.content = GlyphBox{"-", 1.0, 16, 1.0};
    LayoutNode root;
    root.width = 20;
    root.height = 10;
    root.content = HBox{{glyph}};
    const auto ink = ink_bbox(rasterize(root, {28, 4, 16, 1}));
    REQUIRE(!ink.empty());
    CHECK(ink.y1 == ink.y0);
  }
}

TEST_CASE("overflow and config validation") {
  std::string tall;
  for (int i = 0; i < 40; ++i) tall += "line\\[x\\]";
  CHECK_THROWS_AS(render_problem(tall, {256, 8, 32, 2}), Error);
  try {
    render_problem(tall, {256, 8, 32, 2});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ContentOverflow);
  }
  const auto box = formula("x");
  for (RenderConfig bad : {RenderConfig{10, 5, 32, 1}, RenderConfig{64, 4, 32, 3}, RenderConfig{64, 4, 0, 1},
                           RenderConfig{64, -1, 32, 1}}) {
    try {
      rasterize(box, bad);
      FAIL("expected InvalidConfig");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidConfig);
    }
  }
}

TEST_CASE("render_problem wraps to the drawable width") {
  const RenderConfig cfg{512, 8, 16, 2};
  const Bitmap b = render_problem("Compute $\\frac{1}{2}+\\frac{1}{3}$ and simplify.", cfg);
  CHECK(b.width == 512);
  CHECK(b.height < 512);
  CHECK(testing::margins_pure(b, 8));
  const RenderConfig hi = scaled_to(cfg, 1024);
  CHECK(hi.margin_px == 16);
  CHECK(hi.base_size_px == 32);
}

TEST_CASE("resize for encoders") {
  Bitmap img(448, 448);
  std::mt19937 rng(3);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  CHECK(resize_for_encoder(img, encoder_spec(EncoderKind::GeneralViT)) == img);
  const Bitmap hi = resize_for_encoder(img, encoder_spec(EncoderKind::HighResConv));
  CHECK(hi.width == 1024);
  CHECK(hi.height == 1024);
  const Bitmap lt = resize_for_encoder(img, encoder_spec(EncoderKind::LatexTransformer));
  CHECK(lt.width == 420);
  CHECK(encoder_spec(EncoderKind::GeneralViT).input_side_px == 448);

  Bitmap cb(2, 2);
  cb.pixels = {0, 255, 255, 0};
  const Bitmap up = resize_bilinear(cb, 4, 4);
  CHECK(up.at(0, 0) == 0);
  CHECK(up.at(3, 0) == 255);
  CHECK(up.at(0, 3) == 255);
  CHECK(up.at(3, 3) == 0);
  // Interior sample at source (1/3, 1/3): hand-computed bilinear value.
  const double v = 0 * (2.0 / 3) * (2.0 / 3) + 255 * (1.0 / 3) * (2.0 / 3) * 2 + 0 * (1.0 / 3) * (1.0 / 3);
  CHECK(up.at(1, 1) == static_cast<int>(std::floor(v + 0.5)));
}

TEST_CASE("png round trip and determinism") {
  Bitmap white(1, 1, 255);
  CHECK(decode_png(encode_png(white)).pixels == std::vector<std::uint8_t>{255});

  const Bitmap frac = rasterize(formula("\\frac{1}{2}"), {256, 8, 32, 4});
  const auto bytes = encode_png(frac);
  CHECK(decode_png(bytes) == frac);
  CHECK(encode_png(frac) == bytes);

  Bitmap noise(37, 23);
  std::mt19937 rng(9);
  for (auto& p : noise.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  CHECK(decode_png(filtered_png(noise)) == noise);

  auto corrupt = bytes;
  corrupt[20] ^= 0x01;
  try {
    decode_png(corrupt);
    FAIL("expected PngDecode");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PngDecode);
  }
}

TEST_CASE("fnv1a checksum") {
  Bitmap empty;
  CHECK(pixel_checksum(empty) == 0xcbf29ce484222325ULL);
  Bitmap a(1, 1, 'a');
  CHECK(pixel_checksum(a) == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
  CHECK(hex64(1) == "0000000000000001");
}
