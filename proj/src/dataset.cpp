#include "mathseed/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <tuple>
#include <variant>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "mathseed/png.hpp"

namespace mathseed {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (f.bad()) throw Error(ErrorKind::Io, "failed reading " + path.string());
  return lines;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

nlohmann::json parse_json_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
}

std::optional<std::string> text_field(const nlohmann::json& obj, const std::string& key, bool allow_number) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (allow_number && it->is_number_integer()) return std::to_string(it->get<long long>());
  if (allow_number && it->is_number()) return it->dump();
  throw Error(ErrorKind::InvalidRecord, "field '" + key + "' has the wrong type");
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Unbiased draw from [0, n) by rejection on the full 64-bit range.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <class T>
void shuffle_prefix(std::vector<T>& v, std::size_t k, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(rng, v.size() - i));
    std::swap(v[i], v[j]);
  }
}

}  // namespace

FieldMapping FieldMapping::load(const fs::path& path) {
  const auto j = parse_json_file(path);
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, path.string() + ": mapping must be a JSON object");
  FieldMapping m;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) throw Error(ErrorKind::InvalidConfig, "mapping value for '" + key + "' must be a string");
    auto name = value.get<std::string>();
    if (key == "id") m.id = name;
    else if (key == "problem") m.problem = name;
    else if (key == "solution") m.solution = name;
    else if (key == "final_answer") m.final_answer = name;
    else if (key == "source") m.source = name;
    else throw Error(ErrorKind::InvalidConfig, "unknown mapping key '" + key + "'");
  }
  return m;
}

ProblemRecord parse_record(std::string_view line, const FieldMapping& mapping) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidRecord, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidRecord, "record is not a JSON object");
  ProblemRecord r;
  auto id = text_field(j, mapping.id, true);
  if (!id || id->empty()) throw Error(ErrorKind::InvalidRecord, "missing id");
  r.id = std::move(*id);
  auto problem = text_field(j, mapping.problem, false);
  if (!problem || problem->empty()) throw Error(ErrorKind::InvalidRecord, "record " + r.id + " has no problem");
  r.problem = std::move(*problem);
  auto solution = text_field(j, mapping.solution, false);
  if (!solution) throw Error(ErrorKind::InvalidRecord, "record " + r.id + " has no solution");
  r.solution = std::move(*solution);
  r.final_answer = text_field(j, mapping.final_answer, true);
  if (auto src = text_field(j, mapping.source, false)) r.source = std::move(*src);
  return r;
}

std::string_view to_string(DatasetVariant v) {
  return v == DatasetVariant::ImageLatexSolution ? "image-latex-solution" : "image-solution";
}

std::optional<DatasetVariant> parse_variant(std::string_view name) {
  if (name == "image-latex-solution") return DatasetVariant::ImageLatexSolution;
  if (name == "image-solution") return DatasetVariant::ImageSolution;
  return std::nullopt;
}

std::string make_target(const ProblemRecord& rec, DatasetVariant variant) {
  if (variant == DatasetVariant::ImageSolution) return rec.solution;
  return rec.problem + "\n\n" + rec.solution;
}

std::string image_relpath(std::string_view id, int resolution_px) {
  std::string safe;
  bool replaced = false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    safe += ok ? c : '_';
    replaced |= !ok;
  }
  if (safe.find_first_not_of('.') == std::string::npos) {
    safe.assign(safe.size(), '_');
    replaced = true;
  }
  if (replaced) safe += "-" + hex64(fnv1a(id)).substr(0, 8);
  return "images/" + safe + "_" + std::to_string(resolution_px) + ".png";
}

std::string manifest_line(const ManifestEntry& e) {
  ojson j;
  j["id"] = e.id;
  j["image_path"] = e.image_path;
  j["resolution_px"] = e.resolution_px;
  j["prompt"] = e.prompt;
  j["target"] = e.target;
  j["source"] = e.source;
  j["render_checksum"] = e.render_checksum;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string reject_line(const RejectEntry& r) {
  ojson j;
  j["line"] = r.line;
  j["id"] = r.id;
  j["resolution_px"] = r.resolution_px;
  j["error"] = to_string(r.kind);
  j["message"] = r.message;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

BuildReport build_dataset(const fs::path& input, const fs::path& out_dir, const BuildConfig& cfg,
                          const FieldMapping& mapping) {
  if (cfg.workers < 1) throw Error(ErrorKind::InvalidConfig, "workers must be at least 1");
  if (cfg.resolutions.empty()) throw Error(ErrorKind::InvalidConfig, "no resolutions given");
  validate(cfg.render);
  std::vector<int> resolutions = cfg.resolutions;
  std::sort(resolutions.begin(), resolutions.end());
  resolutions.erase(std::unique(resolutions.begin(), resolutions.end()), resolutions.end());
  for (int res : resolutions) validate(scaled_to(cfg.render, res));
  const std::string prompt = compose(cfg.question, cfg.suffix, cfg.placement, cfg.image_sentinel).rendered;

  const auto lines = read_lines(input);
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + (out_dir / "images").string() + ": " + ec.message());

  struct Parsed {
    std::size_t line;
    std::variant<ProblemRecord, RejectEntry> value;
  };
  std::vector<Parsed> parsed;
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    try {
      ProblemRecord rec = parse_record(lines[i], mapping);
      const auto pos = std::lower_bound(seen.begin(), seen.end(), rec.id);
      if (pos != seen.end() && *pos == rec.id) {
        parsed.push_back({i + 1, RejectEntry{i + 1, rec.id, 0, ErrorKind::DuplicateId, "duplicate id " + rec.id}});
      } else {
        seen.insert(pos, rec.id);
        parsed.push_back({i + 1, std::move(rec)});
      }
    } catch (const Error& e) {
      parsed.push_back({i + 1, RejectEntry{i + 1, "", 0, e.kind(), e.what()}});
    }
  }

  BuildReport report;
  report.records = parsed.size();
  const std::size_t n_tasks = parsed.size() * resolutions.size();
  std::vector<std::variant<std::monostate, ManifestEntry, RejectEntry>> results(n_tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  auto work = [&] {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      const Parsed& p = parsed[t / resolutions.size()];
      const int res = resolutions[t % resolutions.size()];
      if (const auto* bad = std::get_if<RejectEntry>(&p.value)) {
        RejectEntry r = *bad;
        r.resolution_px = res;
        results[t] = std::move(r);
        continue;
      }
      const auto& rec = std::get<ProblemRecord>(p.value);
      try {
        const Bitmap img = render_problem(rec.problem, scaled_to(cfg.render, res));
        ManifestEntry e{rec.id, image_relpath(rec.id, res), res, prompt, make_target(rec, cfg.variant), rec.source,
                        hex64(pixel_checksum(img))};
        write_png(out_dir / e.image_path, img);
        results[t] = std::move(e);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Io) {
          std::lock_guard lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          next = n_tasks;
          return;
        }
        spdlog::debug("reject {} at {}px: {}", rec.id, res, e.what());
        results[t] = RejectEntry{p.line, rec.id, res, e.kind(), e.what()};
      }
    }
  };

  const int n_threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), std::max<std::size_t>(n_tasks, 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);

  for (auto& r : results) {
    if (auto* e = std::get_if<ManifestEntry>(&r)) report.entries.push_back(std::move(*e));
    else if (auto* j = std::get_if<RejectEntry>(&r)) report.rejects.push_back(std::move(*j));
  }
  std::sort(report.entries.begin(), report.entries.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
    return std::tie(a.id, a.resolution_px) < std::tie(b.id, b.resolution_px);
  });
  std::sort(report.rejects.begin(), report.rejects.end(), [](const RejectEntry& a, const RejectEntry& b) {
    return std::tie(a.line, a.resolution_px) < std::tie(b.line, b.resolution_px);
  });

  std::string manifest, rejects;
  for (const auto& e : report.entries) manifest += manifest_line(e) + "\n";
  for (const auto& r : report.rejects) rejects += reject_line(r) + "\n";
  write_text(out_dir / "manifest.jsonl", manifest);
  write_text(out_dir / "rejects.jsonl", rejects);
  spdlog::info("dataset: {} records x {} resolutions -> {} entries, {} rejects", report.records, resolutions.size(),
               report.entries.size(), report.rejects.size());
  return report;
}

MixConfig MixConfig::load(const fs::path& path) {
  const auto j = parse_json_file(path);
  MixConfig cfg;
  try {
    for (const auto& s : j.at("sources")) {
      fs::path p = s.at("path").get<std::string>();
      if (p.is_relative()) p = path.parent_path() / p;
      cfg.sources.push_back({p, s.value("weight", 1.0)});
    }
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("total") && !j.at("total").is_null()) cfg.total = j.at("total").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
  return cfg;
}

std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> rema;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] / sum * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    rema.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total && k < rema.size(); ++k, ++assigned) ++counts[rema[k].second];
  return counts;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MixResult mix_corpora(const MixConfig& cfg) {
  if (cfg.sources.empty()) throw Error(ErrorKind::InvalidConfig, "mix needs at least one source");
  std::vector<double> weights;
  std::vector<std::vector<std::string>> corpora;
  for (const auto& s : cfg.sources) {
    if (!(s.weight > 0) || !std::isfinite(s.weight)) {
      throw Error(ErrorKind::InvalidWeights, "weight for " + s.path.string() + " must be positive");
    }
    weights.push_back(s.weight);
    std::vector<std::string> recs;
    std::size_t line_no = 0;
    for (auto& line : read_lines(s.path)) {
      ++line_no;
      if (blank(line)) continue;
      if (!nlohmann::json::accept(line)) {
        throw Error(ErrorKind::InvalidRecord, s.path.string() + " line " + std::to_string(line_no) + " is not JSON");
      }
      recs.push_back(std::move(line));
    }
    corpora.push_back(std::move(recs));
  }

  std::vector<std::size_t> counts(corpora.size());
  if (cfg.total) {
    counts = apportion(weights, *cfg.total);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] > corpora[i].size()) {
        throw Error(ErrorKind::SourceExhausted, cfg.sources[i].path.string() + " must supply " +
                                                    std::to_string(counts[i]) + " records but has " +
                                                    std::to_string(corpora[i].size()));
      }
    }
  } else {
    for (std::size_t i = 0; i < corpora.size(); ++i) counts[i] = corpora[i].size();
  }

  std::uint64_t state = cfg.seed;
  MixResult out;
  out.counts = counts;
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    std::mt19937_64 rng(splitmix64(state));
    shuffle_prefix(corpora[i], counts[i], rng);
    out.lines.insert(out.lines.end(), corpora[i].begin(), corpora[i].begin() + static_cast<std::ptrdiff_t>(counts[i]));
  }
  std::mt19937_64 rng(splitmix64(state));
  shuffle_prefix(out.lines, out.lines.size(), rng);
  return out;
}

}  // namespace mathseed
