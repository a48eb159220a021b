#include "mathseed/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <thread>
#include <tuple>

#include "mathseed/error.hpp"

namespace mathseed {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool is_trailing_punct(char c) { return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?'; }

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

std::pair<std::size_t, std::size_t> trimmed(std::string_view s, std::size_t b, std::size_t e) {
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return {b, e};
}

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

ExtractedAnswer make(std::string_view text, std::size_t b, std::size_t e, ExtractRule rule) {
  return {normalize_answer(text.substr(b, e - b)), rule, b, e};
}

std::optional<ExtractedAnswer> boxed(std::string_view text) {
  static constexpr std::string_view kTag = "\\boxed{";
  std::size_t pos = text.rfind(kTag);
  while (pos != std::string_view::npos) {
    const std::size_t open = pos + kTag.size();
    int depth = 1;
    std::size_t i = open;
    for (; i < text.size() && depth > 0; ++i) {
      if (text[i] == '\\' && i + 1 < text.size()) {
        ++i;
        continue;
      }
      if (text[i] == '{') ++depth;
      if (text[i] == '}') --depth;
    }
    if (depth == 0) {
      const auto [b, e] = trimmed(text, open, i - 1);
      auto ans = make(text, b, e, ExtractRule::Boxed);
      if (!ans.value.empty()) return ans;
    }
    if (pos == 0) break;
    pos = text.rfind(kTag, pos - 1);
  }
  return std::nullopt;
}

std::optional<ExtractedAnswer> answer_marker(std::string_view text) {
  static constexpr std::string_view kMarkers[] = {"final answer is", "final answer:", "answer:"};
  std::size_t line_end = text.size();
  while (true) {
    const std::size_t nl = line_end == 0 ? std::string_view::npos : text.rfind('\n', line_end - 1);
    const std::size_t line_begin = nl == std::string_view::npos ? 0 : nl + 1;
    const std::string line = lower(text.substr(line_begin, line_end - line_begin));
    std::size_t best_end = std::string::npos;
    for (auto m : kMarkers) {
      const std::size_t at = line.rfind(m);
      if (at == std::string::npos) continue;
      const std::size_t end = at + m.size();
      if (best_end == std::string::npos || end > best_end) best_end = end;
    }
    if (best_end != std::string::npos) {
      const auto [b, e] = trimmed(text, line_begin + best_end, line_end);
      auto ans = make(text, b, e, ExtractRule::AnswerMarker);
      if (!ans.value.empty()) return ans;
    }
    if (line_begin == 0) break;
    line_end = line_begin - 1;
  }
  return std::nullopt;
}

std::optional<ExtractedAnswer> whole_short(std::string_view text) {
  const auto [b, e] = trimmed(text, 0, text.size());
  if (b == e) return std::nullopt;
  const std::string_view body = text.substr(b, e - b);
  if (body.find('\n') != std::string_view::npos || code_points(body) > kWholeShortMaxChars) return std::nullopt;
  auto ans = make(text, b, e, ExtractRule::WholeShort);
  if (ans.value.empty()) return std::nullopt;
  return ans;
}

// Standalone number: optional sign, digits with optional thousands commas,
// optional fraction; not glued to letters, digits, underscores or a leading '.'.
std::optional<ExtractedAnswer> last_number(std::string_view text) {
  std::optional<std::pair<std::size_t, std::size_t>> last;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    std::size_t j = i;
    if ((text[j] == '-' || text[j] == '+') && j + 1 < text.size() &&
        (is_digit(text[j + 1]) || (text[j + 1] == '.' && j + 2 < text.size() && is_digit(text[j + 2])))) {
      ++j;
    }
    const bool starts = is_digit(text[j]) || (text[j] == '.' && j + 1 < text.size() && is_digit(text[j + 1]));
    const bool free_left = start == 0 || (!is_alnum(text[start - 1]) && text[start - 1] != '.');
    if (!starts || !free_left) {
      ++i;
      continue;
    }
    std::size_t k = j;
    while (k < text.size() && is_digit(text[k])) ++k;
    while (k + 3 < text.size() && text[k] == ',' && is_digit(text[k + 1]) && is_digit(text[k + 2]) &&
           is_digit(text[k + 3]) && (k + 4 >= text.size() || !is_digit(text[k + 4]))) {
      k += 4;
    }
    if (k + 1 < text.size() && text[k] == '.' && is_digit(text[k + 1])) {
      ++k;
      while (k < text.size() && is_digit(text[k])) ++k;
    }
    if (k < text.size() && is_alnum(text[k])) {
      while (k < text.size() && is_alnum(text[k])) ++k;
      i = k;
      continue;
    }
    last = {start, k};
    i = k;
  }
  if (!last) return std::nullopt;
  return make(text, last->first, last->second, ExtractRule::LastNumber);
}

std::optional<ExtractedAnswer> last_option(std::string_view text) {
  bool cue = lower(text).find("option") != std::string::npos;
  for (std::size_t i = 0; !cue && i + 2 < text.size(); ++i) {
    cue = text[i] == '(' && text[i + 1] >= 'A' && text[i + 1] <= 'E' && text[i + 2] == ')';
  }
  if (!cue) return std::nullopt;
  for (std::size_t i = text.size(); i-- > 0;) {
    if (text[i] < 'A' || text[i] > 'E') continue;
    if (i > 0 && is_alnum(text[i - 1])) continue;
    if (i + 1 < text.size() && is_alnum(text[i + 1])) continue;
    return make(text, i, i + 1, ExtractRule::LastOption);
  }
  return std::nullopt;
}

std::string strip_edges(std::string s) {
  bool changed = true;
  while (changed) {
    changed = false;
    const auto [b, e] = trimmed(s, 0, s.size());
    if (b != 0 || e != s.size()) {
      s = s.substr(b, e - b);
      changed = true;
    }
    while (!s.empty() && is_trailing_punct(s.back())) {
      s.pop_back();
      changed = true;
    }
    if (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
      const auto first = s.find_first_not_of('$');
      const auto lastc = s.find_last_not_of('$');
      s = first == std::string::npos ? std::string() : s.substr(first, lastc - first + 1);
      changed = true;
    }
    if (s.size() >= 4 && s.rfind("\\(", 0) == 0 && s.compare(s.size() - 2, 2, "\\)") == 0) {
      s = s.substr(2, s.size() - 4);
      changed = true;
    }
  }
  return s;
}

}  // namespace

std::string_view to_string(ExtractRule r) {
  switch (r) {
    case ExtractRule::Boxed: return "Boxed";
    case ExtractRule::AnswerMarker: return "AnswerMarker";
    case ExtractRule::WholeShort: return "WholeShort";
    case ExtractRule::LastNumber: return "LastNumber";
    case ExtractRule::LastOption: return "LastOption";
    case ExtractRule::None: return "None";
  }
  return "?";
}

std::optional<std::string> canonical_number(std::string_view s) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  std::string int_part;
  std::size_t group = 0;
  bool grouped = false;
  for (; i < s.size() && (is_digit(s[i]) || s[i] == ','); ++i) {
    if (s[i] == ',') {
      if (int_part.empty() || (grouped && group != 3) || (!grouped && group > 3)) return std::nullopt;
      grouped = true;
      group = 0;
      continue;
    }
    int_part += s[i];
    ++group;
  }
  if (grouped && group != 3) return std::nullopt;
  std::string frac;
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && is_digit(s[i]); ++i) frac += s[i];
    if (frac.empty()) return std::nullopt;
  }
  if (i != s.size() || (int_part.empty() && frac.empty())) return std::nullopt;
  int_part.erase(0, std::min(int_part.find_first_not_of('0'), int_part.size()));
  if (int_part.empty()) int_part = "0";
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string out = int_part;
  if (!frac.empty()) out += "." + frac;
  if (negative && out != "0") out.insert(0, "-");
  return out;
}

std::string normalize_answer(std::string_view raw) {
  const std::string stripped = strip_edges(std::string(raw));
  std::string collapsed;
  bool space = false;
  for (char c : stripped) {
    if (is_space(c)) {
      space = true;
      continue;
    }
    if (space && !collapsed.empty()) collapsed += ' ';
    space = false;
    collapsed += c;
  }
  if (auto num = canonical_number(collapsed)) return *num;
  return lower(collapsed);
}

bool answers_match(std::string_view extracted, std::string_view reference) {
  const std::string a = normalize_answer(extracted);
  const std::string b = normalize_answer(reference);
  if (a.empty()) return false;
  const auto na = canonical_number(a);
  const auto nb = canonical_number(b);
  if (na && nb) {
    double x = 0, y = 0;
    std::from_chars(na->data(), na->data() + na->size(), x);
    std::from_chars(nb->data(), nb->data() + nb->size(), y);
    if (x == y) return true;
    return std::fabs(x - y) <= kNumericRelTolerance * std::max(std::fabs(x), std::fabs(y));
  }
  return a == b;
}

ExtractedAnswer extract_answer(std::string_view text) {
  if (auto a = boxed(text)) return *a;
  if (auto a = answer_marker(text)) return *a;
  if (auto a = whole_short(text)) return *a;
  if (auto a = last_number(text)) return *a;
  if (auto a = last_option(text)) return *a;
  return {};
}

ScoreReport score_exact(const std::vector<ModelOutput>& outputs, const std::map<std::string, std::string>& refs,
                        int workers) {
  for (const auto& o : outputs) {
    if (!refs.count(o.id)) throw Error(ErrorKind::MissingReference, "no reference for id " + o.id);
  }
  ScoreReport report;
  report.n = outputs.size();
  report.per_item.resize(outputs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < outputs.size(); i = next++) {
      const auto& o = outputs[i];
      const auto ans = extract_answer(o.text);
      const auto& ref = refs.at(o.id);
      report.per_item[i] = {o.id, o.run_index, ans.value, ans.rule, ref,
                            ans.rule != ExtractRule::None && answers_match(ans.value, ref)};
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(outputs.size())));
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::stable_sort(report.per_item.begin(), report.per_item.end(), [](const ItemScore& a, const ItemScore& b) {
    return std::tie(a.id, a.run_index) < std::tie(b.id, b.run_index);
  });
  const auto correct = std::count_if(report.per_item.begin(), report.per_item.end(), [](const auto& s) { return s.correct; });
  report.exact_acc = report.n ? static_cast<double>(correct) / static_cast<double>(report.n) : 0.0;
  return report;
}

StrictLoose strict_loose_from_correctness(const std::vector<std::vector<bool>>& groups) {
  StrictLoose out;
  if (groups.empty()) return out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& items = groups[g];
    if (items.empty()) throw Error(ErrorKind::EmptyGroup, "group " + std::to_string(g) + " has no items");
    const auto ok = static_cast<std::size_t>(std::count(items.begin(), items.end(), true));
    out.strict += ok == items.size() ? 1.0 : 0.0;
    out.loose += static_cast<double>(ok) / static_cast<double>(items.size());
  }
  out.strict /= static_cast<double>(groups.size());
  out.loose /= static_cast<double>(groups.size());
  return out;
}

StrictLoose score_strict_loose(const std::vector<ScoringGroup>& groups) {
  std::vector<std::vector<bool>> correctness;
  for (const auto& [gid, items] : groups) {
    if (items.empty()) throw Error(ErrorKind::EmptyGroup, "group " + gid + " has no items");
    std::vector<bool> row;
    for (const auto& [out, ref] : items) {
      const auto ans = extract_answer(out.text);
      row.push_back(ans.rule != ExtractRule::None && answers_match(ans.value, ref));
    }
    correctness.push_back(std::move(row));
  }
  return strict_loose_from_correctness(correctness);
}

StabilityReport stability(const std::vector<std::pair<std::string, std::vector<double>>>& metrics) {
  StabilityReport report;
  for (const auto& [name, values] : metrics) {
    if (values.size() < 2) {
      throw Error(ErrorKind::TooFewRuns, name + " has " + std::to_string(values.size()) + " run(s); need at least 2");
    }
    // Shifting by the first value keeps identical runs at exactly zero spread.
    const double shift = values[0];
    double acc = 0;
    for (double v : values) acc += v - shift;
    const double n = static_cast<double>(values.size());
    const double mean = shift + acc / n;
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    report.per_metric.push_back({name, mean, std::sqrt(ss / n), static_cast<int>(values.size())});
  }
  return report;
}

std::string format_mean_std(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f \xC2\xB1 %.2f", mean, std);
  return buf;
}

}  // namespace mathseed
