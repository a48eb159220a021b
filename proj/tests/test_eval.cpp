#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mathseed/error.hpp"
#include "mathseed/eval.hpp"
#include "support/extraction_cases.hpp"
#include "support/tmpdir.hpp"

using namespace mathseed;

namespace {

double hand_population_std(const std::vector<double>& v) {
  long double mean = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  long double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return static_cast<double>(std::sqrt(ss / v.size()));
}

}  // namespace

TEST_CASE("appendix generations") {
  const std::string longer = testing::slurp(testing::test_data("fixtures/docvqa_long_generation.txt"));
  const auto a = extract_answer(longer);
  CHECK(a.value == "0.28");
  CHECK(a.rule == ExtractRule::AnswerMarker);
  CHECK(longer.substr(a.span_begin, a.span_end - a.span_begin) == "0.28");
  CHECK(a.span_end == longer.size() - 1);

  const auto b = extract_answer(testing::slurp(testing::test_data("fixtures/docvqa_short_generation.txt")));
  CHECK(b.value == "0.28");
  CHECK(b.rule == ExtractRule::WholeShort);
}

TEST_CASE("synthetic extraction suite") {
  const auto& cases = testing::extraction_cases();
  REQUIRE(cases.size() == 30);
  for (const auto& c : cases) {
    INFO(std::string(c.text));
    const auto got = extract_answer(c.text);
    CHECK(got.value == c.value);
    CHECK(got.rule == c.rule);
    if (got.rule != ExtractRule::None) {
      CHECK(got.span_begin < got.span_end);
      CHECK(got.span_end <= c.text.size());
    } else {
      CHECK(got.value.empty());
    }
    CHECK(extract_answer(c.text) == got);
  }
}

TEST_CASE("boxed wins over an answer line") {
  CHECK(extract_answer("Answer: 1\n\\boxed{2}").rule == ExtractRule::Boxed);
  CHECK(extract_answer("\\boxed{2}\nAnswer: 1").value == "2");
  CHECK(extract_answer("\\boxed{42} and then a long paragraph of prose follows here.").value == "42");
}

TEST_CASE("normalization") {
  CHECK(normalize_answer("  1,000.  ") == "1000");
  CHECK(normalize_answer("2.500") == "2.5");
  CHECK(normalize_answer("+3.0") == "3");
  CHECK(normalize_answer("-0.0") == "0");
  CHECK(normalize_answer("007") == "7");
  CHECK(normalize_answer("$42$") == "42");
  CHECK(normalize_answer("\\(x+1\\)") == "x+1");
  CHECK(normalize_answer("New   York\tCity!") == "new york city");
  CHECK(normalize_answer("1,00") == "1,00");
  CHECK(!canonical_number("1.2.3"));
  CHECK(!canonical_number("."));
  CHECK(canonical_number("12,345,678") == "12345678");
}

TEST_CASE("exact scoring") {
  CHECK(answers_match("0.28", "0.28"));
  CHECK(answers_match("1,000", "1000"));
  CHECK(answers_match("3.0000001", "3"));
  CHECK(!answers_match("3.00001", "3"));
  CHECK(answers_match("Paris", "paris"));
  CHECK(!answers_match("", ""));

  const std::vector<ModelOutput> outs = {
      {"q2", "The value is 1,000 overall.", 0}, {"q1", "0.28", 0}, {"q3", "I do not know the answer here at all.", 0}};
  const std::map<std::string, std::string> refs = {{"q1", "0.28"}, {"q2", "1000"}, {"q3", "anything"}};
  for (int workers : {1, 3}) {
    const auto r = score_exact(outs, refs, workers);
    CHECK(r.n == 3);
    CHECK(r.exact_acc == doctest::Approx(2.0 / 3).epsilon(1e-15));
    REQUIRE(r.per_item.size() == 3);
    CHECK(r.per_item[0].id == "q1");
    CHECK(r.per_item[2].id == "q3");
    CHECK(r.per_item[2].rule == ExtractRule::None);
    CHECK(!r.per_item[2].correct);
  }
  try {
    score_exact({{"missing", "1", 0}}, refs);
    FAIL("expected MissingReference");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingReference);
  }
}

TEST_CASE("synthetic suite scores perfectly against its own references") {
  std::vector<ModelOutput> outs;
  std::map<std::string, std::string> refs;
  int i = 0;
  for (const auto& c : testing::extraction_cases()) {
    if (c.rule == ExtractRule::None) continue;
    const std::string id = "c" + std::to_string(i++);
    outs.push_back({id, std::string(c.text), 0});
    refs[id] = std::string(c.value);
  }
  CHECK(score_exact(outs, refs).exact_acc == 1.0);
}

TEST_CASE("strict and loose") {
  auto sl = strict_loose_from_correctness({{true, true}, {true, false}});
  CHECK(sl.strict == 0.5);
  CHECK(sl.loose == 0.75);
  sl = strict_loose_from_correctness({{true}, {true, true, true}});
  CHECK(sl.strict == 1.0);
  CHECK(sl.loose == 1.0);
  sl = strict_loose_from_correctness({{true}, {false}, {true}, {true}});
  CHECK(sl.strict == 0.75);
  CHECK(sl.loose == 0.75);
  CHECK_THROWS_AS(strict_loose_from_correctness({{true}, {}}), Error);

  const std::vector<ScoringGroup> groups = {
      {"g1", {{{"a", "\\boxed{1}", 0}, "1"}, {{"b", "2", 0}, "2"}}},
      {"g2", {{{"c", "Answer: 5", 0}, "5"}, {{"d", "Answer: 6", 0}, "7"}}},
  };
  sl = score_strict_loose(groups);
  CHECK(sl.strict == 0.5);
  CHECK(sl.loose == 0.75);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<bool>> g(1 + rng() % 8);
    for (auto& items : g) {
      items.resize(1 + rng() % 5);
      for (std::size_t k = 0; k < items.size(); ++k) items[k] = rng() % 3 != 0;
    }
    const auto r = strict_loose_from_correctness(g);
    CHECK(r.strict <= r.loose);
    CHECK(r.strict >= 0);
    CHECK(r.loose <= 1);
  }
}

TEST_CASE("stability statistics") {
  const auto r = stability({{"MathVista", {75.96, 75.96, 75.96}},
                            {"spread", {23.66, 23.77, 23.88}},
                            {"zeros", {0, 0}},
                            {"pair", {1, 3}},
                            {"five", {60.6, 60.7, 60.75, 60.58, 60.72}}});
  REQUIRE(r.per_metric.size() == 5);
  CHECK(format_mean_std(r.per_metric[0].mean, r.per_metric[0].std) == "75.96 \xC2\xB1 0.00");
  CHECK(r.per_metric[0].std == 0.0);
  CHECK(r.per_metric[1].mean == doctest::Approx(23.77).epsilon(1e-12));
  CHECK(std::fabs(r.per_metric[1].std - hand_population_std({23.66, 23.77, 23.88})) < 1e-9);
  CHECK(std::fabs(r.per_metric[1].std - std::sqrt(2 * 0.11 * 0.11 / 3)) < 1e-9);
  CHECK(format_mean_std(r.per_metric[2].mean, r.per_metric[2].std) == "0.00 \xC2\xB1 0.00");
  CHECK(r.per_metric[3].std == 1.0);
  CHECK(std::fabs(r.per_metric[4].std - hand_population_std({60.6, 60.7, 60.75, 60.58, 60.72})) < 1e-9);
  CHECK(r.per_metric[4].runs == 5);
  try {
    stability({{"one", {1.0}}});
    FAIL("expected TooFewRuns");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewRuns);
  }
}
