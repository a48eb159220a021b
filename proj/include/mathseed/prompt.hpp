#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mathseed {

enum class Placement { Between, Before, After, NoSuffix };

enum class SuffixVersion { V1, V2, V3 };

inline constexpr std::string_view kDefaultImageSentinel = "<image>";

std::string_view suffix_text(SuffixVersion v);
std::string_view to_string(Placement p);
std::string_view to_string(SuffixVersion v);

// Case-insensitive names: "between", "before", "after", "none"/"nosuffix"; "v1".."v3".
std::optional<Placement> parse_placement(std::string_view name);
std::optional<SuffixVersion> parse_suffix(std::string_view name);

struct ImageToken {
  bool operator==(const ImageToken&) const = default;
};

struct Literal {
  std::string text;
  bool operator==(const Literal&) const = default;
};

using PromptPart = std::variant<ImageToken, Literal>;

struct ComposedPrompt {
  std::vector<PromptPart> parts;  // exactly one ImageToken
  std::string rendered;           // parts joined by '\n', image token as the sentinel

  bool operator==(const ComposedPrompt&) const = default;
};

// Throws EmptyQuestion, MissingSuffix (suffix required by placement) or
// UnexpectedSuffix (suffix given with NoSuffix).
ComposedPrompt compose(std::string_view question, std::optional<SuffixVersion> suffix, Placement placement,
                       std::string_view image_sentinel = kDefaultImageSentinel);

// {"V1": "...", "V2": "...", "V3": "..."} pretty-printed with a trailing newline.
std::string suffixes_json();

}  // namespace mathseed
