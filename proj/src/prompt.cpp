#include "mathseed/prompt.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "mathseed/error.hpp"

namespace mathseed {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view suffix_text(SuffixVersion v) {
  switch (v) {
    case SuffixVersion::V1:
      return "You are given a math problem image, read and understand this task, analyze it, and provide step by "
             "step solution.";
    case SuffixVersion::V2:
      return "You are given an image containing a math problem. Read the image, identify the problem statement and "
             "all important data, then produce a clear step-by-step solution and the final answer. Use concise steps "
             "and label the final answer.";
    case SuffixVersion::V3:
      return "You are an expert math tutor. Your goal is to help a student understand the problem in the image. "
             "Carefully examine the task. Provide a detailed, step-by-step solution. Explain the logic behind each "
             "step in simple and clear language. Make sure your explanation helps to understand the topic, not just "
             "to get the answer. At the end, highlight the final answer.";
  }
  return {};
}

std::string_view to_string(Placement p) {
  switch (p) {
    case Placement::Between: return "between";
    case Placement::Before: return "before";
    case Placement::After: return "after";
    case Placement::NoSuffix: return "none";
  }
  return "?";
}

std::string_view to_string(SuffixVersion v) {
  switch (v) {
    case SuffixVersion::V1: return "v1";
    case SuffixVersion::V2: return "v2";
    case SuffixVersion::V3: return "v3";
  }
  return "?";
}

std::optional<Placement> parse_placement(std::string_view name) {
  const std::string n = lower(name);
  if (n == "between") return Placement::Between;
  if (n == "before") return Placement::Before;
  if (n == "after") return Placement::After;
  if (n == "none" || n == "nosuffix") return Placement::NoSuffix;
  return std::nullopt;
}

std::optional<SuffixVersion> parse_suffix(std::string_view name) {
  const std::string n = lower(name);
  if (n == "v1") return SuffixVersion::V1;
  if (n == "v2") return SuffixVersion::V2;
  if (n == "v3") return SuffixVersion::V3;
  return std::nullopt;
}

ComposedPrompt compose(std::string_view question, std::optional<SuffixVersion> suffix, Placement placement,
                       std::string_view image_sentinel) {
  if (question.empty()) throw Error(ErrorKind::EmptyQuestion, "question must be non-empty");
  if (placement == Placement::NoSuffix && suffix) {
    throw Error(ErrorKind::UnexpectedSuffix, "placement 'none' takes no suffix");
  }
  if (placement != Placement::NoSuffix && !suffix) {
    throw Error(ErrorKind::MissingSuffix, "placement '" + std::string(to_string(placement)) + "' needs a suffix");
  }

  const PromptPart img = ImageToken{};
  const PromptPart q = Literal{std::string(question)};
  ComposedPrompt out;
  switch (placement) {
    case Placement::Between: out.parts = {img, Literal{std::string(suffix_text(*suffix))}, q}; break;
    case Placement::Before: out.parts = {Literal{std::string(suffix_text(*suffix))}, img, q}; break;
    case Placement::After: out.parts = {img, q, Literal{std::string(suffix_text(*suffix))}}; break;
    case Placement::NoSuffix: out.parts = {img, q}; break;
  }
  for (std::size_t i = 0; i < out.parts.size(); ++i) {
    if (i) out.rendered += '\n';
    if (const auto* lit = std::get_if<Literal>(&out.parts[i])) {
      out.rendered += lit->text;
    } else {
      out.rendered += image_sentinel;
    }
  }
  return out;
}

std::string suffixes_json() {
  nlohmann::ordered_json j;
  for (auto v : {SuffixVersion::V1, SuffixVersion::V2, SuffixVersion::V3}) {
    std::string key(to_string(v));
    key[0] = 'V';
    j[key] = suffix_text(v);
  }
  return j.dump(2) + "\n";
}

}  // namespace mathseed
