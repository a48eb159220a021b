#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mathseed/error.hpp"
#include "mathseed/prompt.hpp"
#include "mathseed/raster.hpp"

namespace mathseed {

struct ProblemRecord {
  std::string id;
  std::string problem;
  std::string solution;
  std::optional<std::string> final_answer;
  std::string source = "unknown";

  bool operator==(const ProblemRecord&) const = default;
};

// Names of the input fields carrying each record field, for foreign corpora.
struct FieldMapping {
  std::string id = "id";
  std::string problem = "problem";
  std::string solution = "solution";
  std::string final_answer = "final_answer";
  std::string source = "source";

  // JSON object whose keys are record field names and values the corpus field names; missing keys keep defaults.
  static FieldMapping load(const std::filesystem::path& path);
};

// Throws InvalidRecord when the line is not a JSON object with non-empty string id and problem.
ProblemRecord parse_record(std::string_view line, const FieldMapping& mapping = {});

enum class DatasetVariant { ImageLatexSolution, ImageSolution };

std::string_view to_string(DatasetVariant v);
std::optional<DatasetVariant> parse_variant(std::string_view name);

inline constexpr std::string_view kDefaultQuestion = "Solve the problem shown in the image.";

// ImageLatexSolution: problem, blank line, solution. ImageSolution: solution only.
std::string make_target(const ProblemRecord& rec, DatasetVariant variant);

// images/<id with unsafe bytes replaced by '_'>[-<8 hex of id hash> when replaced]_<res>.png
std::string image_relpath(std::string_view id, int resolution_px);

struct BuildConfig {
  RenderConfig render;  // geometry at render.target_long_side_px; other resolutions are scaled copies
  std::vector<int> resolutions{512, 1024};
  DatasetVariant variant = DatasetVariant::ImageLatexSolution;
  Placement placement = Placement::NoSuffix;
  std::optional<SuffixVersion> suffix;
  std::string question{kDefaultQuestion};
  std::string image_sentinel{kDefaultImageSentinel};
  int workers = 1;
};

struct ManifestEntry {
  std::string id;
  std::string image_path;
  int resolution_px = 0;
  std::string prompt;
  std::string target;
  std::string source;
  std::string render_checksum;

  bool operator==(const ManifestEntry&) const = default;
};

struct RejectEntry {
  std::size_t line = 0;  // 1-based input line
  std::string id;        // empty when the line did not yield one
  int resolution_px = 0;
  ErrorKind kind = ErrorKind::InvalidRecord;
  std::string message;
};

struct BuildReport {
  std::size_t records = 0;  // non-blank input lines
  std::vector<ManifestEntry> entries;  // sorted by (id, resolution)
  std::vector<RejectEntry> rejects;    // sorted by (line, resolution)
};

std::string manifest_line(const ManifestEntry& e);
std::string reject_line(const RejectEntry& r);

// Writes out_dir/images/*.png, out_dir/manifest.jsonl and out_dir/rejects.jsonl.
// Every (record, resolution) pair yields exactly one manifest or reject entry.
// Throws Io for an unreadable input or unwritable output directory and
// InvalidConfig for a bad render, prompt or worker configuration.
BuildReport build_dataset(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                          const BuildConfig& cfg, const FieldMapping& mapping = {});

struct MixSource {
  std::filesystem::path path;
  double weight = 1;
};

struct MixConfig {
  std::vector<MixSource> sources;
  std::uint64_t seed = 0;
  std::optional<std::size_t> total;  // all records of every source when absent

  // {"sources": [{"path": ..., "weight": ...}], "seed": N, "total": N}; relative paths resolve against the file.
  static MixConfig load(const std::filesystem::path& path);
};

// Largest-remainder apportionment of total over normalized weights; ties go to the earlier source.
std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t total);

struct MixResult {
  std::vector<std::string> lines;  // merged corpus, one JSON record per line
  std::vector<std::size_t> counts;  // per source
};

// Samples without replacement from each source and shuffles the union, all
// driven by cfg.seed. Throws SourceExhausted when a quota exceeds a source,
// InvalidWeights for non-positive weights and Io for unreadable sources.
MixResult mix_corpora(const MixConfig& cfg);

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace mathseed
