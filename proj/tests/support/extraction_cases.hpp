#pragma once

#include <string_view>
#include <vector>

#include "mathseed/eval.hpp"

namespace mathseed::testing {

struct ExtractionCase {
  std::string_view text;
  std::string_view value;
  ExtractRule rule;
};

// Six cases per rule family: boxed, marker, number, option, none.
inline const std::vector<ExtractionCase>& extraction_cases() {
  using R = ExtractRule;
  static const std::vector<ExtractionCase> cases = {
      {"We compute 6*7. \\boxed{42} is the result, as verified.", "42", R::Boxed},
      {"First \\boxed{3}, then correcting the slip: \\boxed{5}.", "5", R::Boxed},
      {"So the midpoint is x = \\boxed{\\frac{1}{2}}", "\\frac{1}{2}", R::Boxed},
      {"Answer: 7\nOn reflection the boxed value is \\boxed{8}", "8", R::Boxed},
      {"The total cost is \\boxed{1,000} dollars.", "1000", R::Boxed},
      {"Hence the choice is \\boxed{ B }.", "b", R::Boxed},

      {"Step 1: read the chart.\nAnswer: 0.28", "0.28", R::AnswerMarker},
      {"Reasoning about 3 and 4 together.\nFinal answer: 12", "12", R::AnswerMarker},
      {"After simplification, the final answer is 2.50.", "2.5", R::AnswerMarker},
      {"ANSWER: Paris", "paris", R::AnswerMarker},
      {"Answer: 3\nWe double-check that 5 + 6 = 11.", "3", R::AnswerMarker},
      {"so the answer: -4", "-4", R::AnswerMarker},

      {"Adding the two parts gives 15 apples in total, which we confirm.", "15", R::LastNumber},
      {"The area equals 3.50 square units after rounding", "3.5", R::LastNumber},
      {"Between x2 and y3 the gap is 1,250 meters", "1250", R::LastNumber},
      {"We get -7 after subtracting 10 from 3.", "3", R::LastNumber},
      {"The probability is .75 in this long explanation", "0.75", R::LastNumber},
      {"Velocity v1 changes; the result is 9 m/s today.", "9", R::LastNumber},

      {"Comparing the choices, option C fits the data best.", "c", R::LastOption},
      {"Choices (A) and (D) remain; after elimination we pick (D).", "d", R::LastOption},
      {"The correct option is B because it matches the graph.", "b", R::LastOption},
      {"Looking at (A), (B), (E), the last one (E) is right here", "e", R::LastOption},
      {"Option E is consistent with every observation given.", "e", R::LastOption},
      {"Not (A), so we choose the option labelled C in the figure.", "c", R::LastOption},

      {"", "", R::None},
      {"   \n  ", "", R::None},
      {"I cannot determine this from the image provided, sorry.", "", R::None},
      {"The graph shows a steady rise across all of the years.", "", R::None},
      {"This question has no clear resolution in the given text.", "", R::None},
      {"Answer:\nThere is not enough information to decide here.", "", R::None},
  };
  return cases;
}

}  // namespace mathseed::testing
