#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mathseed {

struct ModelOutput {
  std::string id;
  std::string text;
  int run_index = 0;
};

enum class ExtractRule { Boxed, AnswerMarker, WholeShort, LastNumber, LastOption, None };
std::string_view to_string(ExtractRule r);

struct ExtractedAnswer {
  std::string value;  // normalized; empty iff rule is None
  ExtractRule rule = ExtractRule::None;
  std::size_t span_begin = 0;  // byte range of the raw answer in the text
  std::size_t span_end = 0;

  bool operator==(const ExtractedAnswer&) const = default;
};

inline constexpr std::size_t kWholeShortMaxChars = 20;
inline constexpr double kNumericRelTolerance = 1e-6;

// First rule that yields a non-empty value, in order: last \boxed{...};
// remainder of the last line holding "final answer is", "final answer:" or
// "answer:" (case-insensitive); the whole text when it is at most 20
// characters on one line; the last standalone number; the last option letter
// A-E when the text mentions "option" or a parenthesized letter.
ExtractedAnswer extract_answer(std::string_view text);
inline ExtractedAnswer extract_answer(const ModelOutput& out) { return extract_answer(out.text); }

// Trims, unwraps $...$ and \(...\), strips trailing punctuation, collapses
// whitespace, canonicalizes numbers (no sign '+', commas, leading or trailing
// zeros) and lowercases anything non-numeric.
std::string normalize_answer(std::string_view raw);

// Canonical numeric form, or nullopt when the string is not a plain number.
std::optional<std::string> canonical_number(std::string_view s);

// Numeric values compare with relative tolerance 1e-6, everything else by normalized equality.
bool answers_match(std::string_view extracted, std::string_view reference);

struct ItemScore {
  std::string id;
  int run_index = 0;
  std::string extracted;
  ExtractRule rule = ExtractRule::None;
  std::string reference;
  bool correct = false;
};

struct ScoreReport {
  std::size_t n = 0;
  double exact_acc = 0;
  std::vector<ItemScore> per_item;  // sorted by (id, run_index)
};

// Throws MissingReference for an output whose id has no reference.
ScoreReport score_exact(const std::vector<ModelOutput>& outputs, const std::map<std::string, std::string>& refs,
                        int workers = 1);

struct StrictLoose {
  double strict = 0;
  double loose = 0;
};

using ScoringGroup = std::pair<std::string, std::vector<std::pair<ModelOutput, std::string>>>;

// strict: fraction of groups with every item correct; loose: mean per-group fraction correct.
// Throws EmptyGroup for a group without items.
StrictLoose score_strict_loose(const std::vector<ScoringGroup>& groups);
StrictLoose strict_loose_from_correctness(const std::vector<std::vector<bool>>& groups);

struct MetricStability {
  std::string name;
  double mean = 0;
  double std = 0;  // population
  int runs = 0;
};

struct StabilityReport {
  std::vector<MetricStability> per_metric;
};

// Throws TooFewRuns when a metric has fewer than two values.
StabilityReport stability(const std::vector<std::pair<std::string, std::vector<double>>>& metrics);

// "NN.NN ± N.NN"
std::string format_mean_std(double mean, double std);

}  // namespace mathseed
