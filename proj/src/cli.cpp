#include "mathseed/cli.hpp"

#include <spdlog/fmt/fmt.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mathseed/dataset.hpp"
#include "mathseed/error.hpp"
#include "mathseed/eval.hpp"
#include "mathseed/fusion.hpp"
#include "mathseed/latex.hpp"
#include "mathseed/layout.hpp"
#include "mathseed/png.hpp"
#include "mathseed/prompt.hpp"
#include "mathseed/raster.hpp"

namespace mathseed {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// Nested objects name subcommands; scalars and arrays are option values keyed by long name.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return section(app, default_also).dump();
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    ordered_json j;
    try {
      j = ordered_json::parse(input);
    } catch (const ordered_json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config values must be scalars or arrays of scalars");
  }

  static void collect(const ordered_json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        collect(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static ordered_json section(const CLI::App* app, bool default_also) {
    ordered_json j = ordered_json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (name == "help" || name == "config") {
        if (name == "config" && opt->count() > 0) j[name] = opt->results().front();
        continue;
      }
      if (opt->get_items_expected_max() == 0) {
        if (opt->count() > 0 || default_also) j[name] = opt->count() > 0 && opt->as<bool>();
      } else if (opt->count() == 1 && opt->get_items_expected_max() <= 1) {
        j[name] = opt->results().front();
      } else if (opt->count() > 0) {
        j[name] = opt->results();
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands()) j[sub->get_name()] = section(sub, default_also);
    return j;
  }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_usage_kind(ErrorKind k) {
  return k == ErrorKind::InvalidConfig || k == ErrorKind::MissingSuffix || k == ErrorKind::UnexpectedSuffix ||
         k == ErrorKind::EmptyQuestion;
}

struct Globals {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string log_level = "info";
  bool json = false;
};

struct Context {
  Globals g;
  bool seed_given = false;
  std::ostream& out;
  std::ostream& err;

  void emit(const ordered_json& j) const { out << j.dump(2) << "\n"; }
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f || !f.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    throw Error(ErrorKind::Io, "cannot write " + path.string());
  }
}

struct JsonLine {
  std::size_t line = 0;
  json value;
};

std::vector<JsonLine> read_jsonl(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<JsonLine> rows;
  std::string text;
  for (std::size_t n = 1; std::getline(in, text); ++n) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json v = json::parse(text);
      if (!v.is_object()) throw Error(ErrorKind::InvalidRecord, "not a JSON object");
      rows.push_back({n, std::move(v)});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidRecord, path.string() + ":" + std::to_string(n) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ":" + std::to_string(n) + ": " + e.detail());
    }
  }
  return rows;
}

std::string id_field(const json& v, const std::string& where) {
  const auto it = v.find("id");
  if (it != v.end() && it->is_string() && !it->get<std::string>().empty()) return it->get<std::string>();
  if (it != v.end() && it->is_number_integer()) return it->dump();
  throw Error(ErrorKind::InvalidRecord, where + ": missing id");
}

std::string string_field(const json& v, std::initializer_list<const char*> keys, const std::string& where) {
  for (const char* k : keys) {
    const auto it = v.find(k);
    if (it == v.end()) continue;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number()) return it->dump();
  }
  throw Error(ErrorKind::InvalidRecord, where + ": missing field " + *keys.begin());
}

std::string where(const fs::path& p, std::size_t line) { return p.string() + ":" + std::to_string(line); }

// ---- render

struct RenderOpts {
  std::string latex;
  std::string problem;
  std::string out;
  int size = 1024;
  std::optional<int> margin;
  std::optional<double> base_size;
  std::optional<int> supersample;
};

RenderConfig render_config(int size, const std::optional<int>& margin, const std::optional<double>& base,
                           const std::optional<int>& ss) {
  RenderConfig cfg = scaled_to(RenderConfig{}, size);
  if (margin) cfg.margin_px = *margin;
  if (base) cfg.base_size_px = *base;
  if (ss) cfg.supersample = *ss;
  validate(cfg);
  return cfg;
}

int run_render(const RenderOpts& o, const Context& ctx) {
  if (o.latex.empty() == o.problem.empty()) throw UsageError("exactly one of --latex or --problem is required");
  const RenderConfig cfg = render_config(o.size, o.margin, o.base_size, o.supersample);
  Bitmap img;
  if (!o.latex.empty()) {
    const LayoutNode root = layout_math(parse_math(o.latex), {Style::Display, cfg.base_size_px});
    img = rasterize(root, cfg);
  } else {
    img = render_problem(o.problem, cfg);
  }
  if (!o.out.empty()) {
    if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
    write_png(o.out, img);
  }
  const std::string checksum = hex64(pixel_checksum(img));
  spdlog::info("rendered {}x{} checksum {}", img.width, img.height, checksum);
  if (ctx.g.json) {
    ordered_json j;
    j["width"] = img.width;
    j["height"] = img.height;
    j["checksum"] = checksum;
    j["out"] = o.out.empty() ? ordered_json(nullptr) : ordered_json(o.out);
    ctx.emit(j);
  } else {
    ctx.out << img.width << "x" << img.height << " " << checksum;
    if (!o.out.empty()) ctx.out << " " << o.out;
    ctx.out << "\n";
  }
  return kExitOk;
}

// ---- build-dataset

struct BuildOpts {
  std::string input;
  std::string out;
  std::vector<int> resolutions{512, 1024};
  std::string variant = "image-latex-solution";
  std::string prompt = "none";
  std::string suffix;
  std::string question{kDefaultQuestion};
  std::string sentinel{kDefaultImageSentinel};
  std::string mapping;
  int reference_size = RenderConfig{}.target_long_side_px;
  std::optional<int> margin;
  std::optional<double> base_size;
  std::optional<int> supersample;
};

int run_build(const BuildOpts& o, const Context& ctx) {
  BuildConfig cfg;
  cfg.render = render_config(o.reference_size, o.margin, o.base_size, o.supersample);
  cfg.resolutions = o.resolutions;
  cfg.variant = *parse_variant(o.variant);
  cfg.placement = *parse_placement(o.prompt);
  if (!o.suffix.empty()) cfg.suffix = parse_suffix(o.suffix);
  cfg.question = o.question;
  cfg.image_sentinel = o.sentinel;
  cfg.workers = ctx.g.workers;
  const FieldMapping mapping = o.mapping.empty() ? FieldMapping{} : FieldMapping::load(o.mapping);
  const BuildReport r = build_dataset(o.input, o.out, cfg, mapping);
  for (const auto& rej : r.rejects) {
    spdlog::warn("rejected line {} at {}px: {}", rej.line, rej.resolution_px, rej.message);
  }
  if (ctx.g.json) {
    ordered_json j;
    j["records"] = r.records;
    j["entries"] = r.entries.size();
    j["rejects"] = r.rejects.size();
    j["manifest"] = (fs::path(o.out) / "manifest.jsonl").string();
    j["rejects_file"] = (fs::path(o.out) / "rejects.jsonl").string();
    ctx.emit(j);
  } else {
    ctx.out << "records " << r.records << " entries " << r.entries.size() << " rejects " << r.rejects.size()
            << "\n";
  }
  return r.rejects.empty() ? kExitOk : kExitData;
}

// ---- mix

struct MixOpts {
  std::string config;
  std::string out;
  std::optional<std::size_t> total;
};

int run_mix(const MixOpts& o, const Context& ctx) {
  MixConfig cfg = MixConfig::load(o.config);
  if (ctx.seed_given) cfg.seed = ctx.g.seed;
  if (o.total) cfg.total = *o.total;
  const MixResult r = mix_corpora(cfg);
  std::string text;
  for (const auto& line : r.lines) text += line + "\n";
  write_text(o.out, text);
  if (ctx.g.json) {
    ordered_json j;
    j["out"] = o.out;
    j["seed"] = cfg.seed;
    j["total"] = r.lines.size();
    ordered_json counts = ordered_json::array();
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
      counts.push_back({{"path", cfg.sources[i].path.string()}, {"count", r.counts[i]}});
    }
    j["sources"] = counts;
    ctx.emit(j);
  } else {
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
      ctx.out << cfg.sources[i].path.string() << " " << r.counts[i] << "\n";
    }
  }
  return kExitOk;
}

// ---- compose-prompt

struct ComposeOpts {
  std::string question{kDefaultQuestion};
  std::string placement = "none";
  std::string suffix;
  std::string sentinel{kDefaultImageSentinel};
};

int run_compose(const ComposeOpts& o, const Context& ctx) {
  std::optional<SuffixVersion> suffix;
  if (!o.suffix.empty()) suffix = parse_suffix(o.suffix);
  const Placement placement = *parse_placement(o.placement);
  const ComposedPrompt p = compose(o.question, suffix, placement, o.sentinel);
  if (ctx.g.json) {
    ordered_json parts = ordered_json::array();
    for (const auto& part : p.parts) {
      if (const auto* lit = std::get_if<Literal>(&part)) {
        parts.push_back({{"type", "text"}, {"text", lit->text}});
      } else {
        parts.push_back({{"type", "image"}});
      }
    }
    ordered_json j;
    j["placement"] = to_string(placement);
    j["suffix"] = suffix ? ordered_json(to_string(*suffix)) : ordered_json(nullptr);
    j["parts"] = parts;
    j["rendered"] = p.rendered;
    ctx.emit(j);
  } else {
    ctx.out << p.rendered << "\n";
  }
  return kExitOk;
}

// ---- fuse-demo

struct FuseOpts {
  std::string mode = "sequence";
  std::size_t li = 4;
  std::size_t lt = 3;
  std::optional<std::size_t> lc;
  std::size_t di = 6;
  std::size_t dt = 5;
  std::size_t dc = 10;
  std::size_t dllm = 8;
  std::size_t samples = 2;
  double epsilon = 1e-5;
};

inline constexpr double kGradCheckTolerance = 1e-4;

FusionMode parse_mode(const std::string& s) {
  return s == "feature" ? FusionMode::FeatureLevel : FusionMode::SequenceLevel;
}

int run_fuse_demo(const FuseOpts& o, const Context& ctx) {
  const FusionMode mode = parse_mode(o.mode);
  const bool feature = mode == FusionMode::FeatureLevel;
  const std::size_t d_b = feature ? o.dc : o.dt;
  const std::size_t rows_b = feature ? o.lc.value_or(o.li) : o.lt;
  const std::size_t out_rows = feature ? o.li : o.li + o.lt;

  const FusionModel model = init_model(mode, o.di, d_b, o.dllm, ctx.g.seed);
  Rng rng(ctx.g.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Sample> batch;
  for (std::size_t s = 0; s < o.samples; ++s) {
    Sample smp;
    smp.a = random_normal(o.li, o.di, 1.0, rng);
    smp.b = random_normal(rows_b, d_b, 1.0, rng);
    if (feature && rows_b != o.li) smp.b = align_token_count(smp.b, o.li);
    smp.target = random_normal(out_rows, o.dllm, 1.0, rng);
    batch.push_back(std::move(smp));
  }
  const Matrix y = forward(model, batch.front());
  const double err = grad_check(model, batch, o.epsilon);
  const bool shape_ok = y.rows == out_rows && y.cols == o.dllm;
  const bool grad_ok = err < kGradCheckTolerance;

  ordered_json j;
  j["mode"] = to_string(mode);
  j["output_rows"] = y.rows;
  j["output_cols"] = y.cols;
  j["expected_rows"] = out_rows;
  j["expected_cols"] = o.dllm;
  j["shape_ok"] = shape_ok;
  if (feature) j["aligned_from_rows"] = rows_b;
  j["grad_check_epsilon"] = o.epsilon;
  j["grad_check_max_rel_error"] = err;
  j["grad_check_ok"] = grad_ok;
  ctx.emit(j);
  return shape_ok && grad_ok ? kExitOk : kExitData;
}

// ---- train-adapters

struct TrainOpts {
  std::string mode = "sequence";
  std::string stage = "adapter-only";
  std::size_t li = 3;
  std::size_t lt = 3;
  std::size_t di = 4;
  std::size_t dt = 4;
  std::size_t dc = 4;
  std::size_t dllm = 8;
  std::size_t samples = 64;
  int steps = 500;
  std::optional<double> lr;
  double embed_std = 20.0;
  double noise = 0.01;
  std::string out;
  std::string loss_trace;
};

int run_train(const TrainOpts& o, const Context& ctx) {
  const FusionMode mode = parse_mode(o.mode);
  const bool feature = mode == FusionMode::FeatureLevel;
  const std::size_t d_b = feature ? o.dc : o.dt;
  const std::size_t rows_b = feature ? o.li : o.lt;
  const TeacherProblem problem =
      make_teacher_problem(mode, o.di, d_b, o.dllm, o.li, rows_b, o.samples, ctx.g.seed, o.embed_std, o.noise);
  const FusionModel start = init_model(mode, o.di, d_b, o.dllm, ctx.g.seed + 1);

  TrainConfig cfg;
  cfg.stage = o.stage == "joint" ? Stage::Joint : Stage::AdapterOnly;
  cfg.base_lr = o.lr.value_or(cfg.stage == Stage::Joint ? kJointStageLr : kAdapterStageLr);
  cfg.total_steps = o.steps;
  cfg.seed = ctx.g.seed;
  const TrainResult res = train_adapters(start, problem.data, cfg);
  const double final_loss = mse(res.model, problem.data);

  if (!o.out.empty()) {
    if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
    save_weights(o.out, res.model);
  }
  if (!o.loss_trace.empty()) {
    std::string trace = "step,lr,loss\n";
    for (std::size_t s = 0; s < res.losses.size(); ++s) {
      trace += fmt::format("{},{:.17g},{:.17g}\n", s, cosine_lr(static_cast<int>(s), cfg), res.losses[s]);
    }
    write_text(o.loss_trace, trace);
  }
  spdlog::info("trained {} steps, loss {:.6g} -> {:.6g}", o.steps, res.losses.empty() ? final_loss : res.losses[0],
               final_loss);

  ordered_json j;
  j["mode"] = to_string(mode);
  j["stage"] = o.stage;
  j["steps"] = o.steps;
  j["base_lr"] = cfg.base_lr;
  j["initial_loss"] = res.losses.empty() ? final_loss : res.losses.front();
  j["final_loss"] = final_loss;
  j["weights"] = o.out.empty() ? ordered_json(nullptr) : ordered_json(o.out);
  j["loss_trace"] = o.loss_trace.empty() ? ordered_json(nullptr) : ordered_json(o.loss_trace);
  ctx.emit(j);
  return kExitOk;
}

// ---- eval

struct EvalOpts {
  std::string outputs;
  std::string refs;
  std::string groups;
  std::optional<int> runs;
  std::string report;
};

double pct(double x) { return 100.0 * x; }

int run_eval(const EvalOpts& o, const Context& ctx) {
  std::vector<ModelOutput> outputs;
  for (const auto& row : read_jsonl(o.outputs)) {
    const std::string at = where(o.outputs, row.line);
    ModelOutput m;
    m.id = id_field(row.value, at);
    m.text = string_field(row.value, {"text", "output", "response"}, at);
    for (const char* k : {"run_index", "run"}) {
      const auto it = row.value.find(k);
      if (it == row.value.end()) continue;
      if (!it->is_number_integer() || it->get<long long>() < 0) {
        throw Error(ErrorKind::InvalidRecord, at + ": run index must be a non-negative integer");
      }
      m.run_index = it->get<int>();
      break;
    }
    outputs.push_back(std::move(m));
  }
  std::map<std::string, std::string> refs;
  for (const auto& row : read_jsonl(o.refs)) {
    const std::string at = where(o.refs, row.line);
    refs[id_field(row.value, at)] = string_field(row.value, {"answer", "final_answer", "reference"}, at);
  }

  std::set<int> run_ids;
  for (const auto& m : outputs) run_ids.insert(m.run_index);
  if (o.runs && static_cast<int>(run_ids.size()) != *o.runs) {
    throw Error(ErrorKind::InvalidRecord,
                fmt::format("expected {} runs in outputs, found {}", *o.runs, run_ids.size()));
  }

  const ScoreReport report = score_exact(outputs, refs, ctx.g.workers);
  std::map<int, std::pair<std::size_t, std::size_t>> per_run;  // run -> (correct, n)
  std::map<std::pair<std::string, int>, bool> correct_of;
  for (const auto& it : report.per_item) {
    auto& [c, n] = per_run[it.run_index];
    c += it.correct ? 1 : 0;
    ++n;
    correct_of[{it.id, it.run_index}] = it.correct;
  }

  struct RunSL {
    int run;
    StrictLoose sl;
  };
  std::vector<RunSL> sl_runs;
  if (!o.groups.empty()) {
    std::vector<std::vector<std::string>> groups;
    for (const auto& row : read_jsonl(o.groups)) {
      const std::string at = where(o.groups, row.line);
      const auto ids = row.value.find("ids");
      if (ids == row.value.end() || !ids->is_array()) throw Error(ErrorKind::InvalidRecord, at + ": missing ids");
      std::vector<std::string> g;
      for (const auto& id : *ids) g.push_back(id.is_string() ? id.get<std::string>() : id.dump());
      groups.push_back(std::move(g));
    }
    for (int run : run_ids) {
      std::vector<std::vector<bool>> correctness;
      for (const auto& g : groups) {
        std::vector<bool> items;
        for (const auto& id : g) {
          const auto it = correct_of.find({id, run});
          if (it == correct_of.end()) {
            throw Error(ErrorKind::MissingReference, fmt::format("group item {} has no output in run {}", id, run));
          }
          items.push_back(it->second);
        }
        correctness.push_back(std::move(items));
      }
      sl_runs.push_back({run, strict_loose_from_correctness(correctness)});
    }
  }

  std::vector<std::pair<std::string, std::vector<double>>> metrics(1, {"exact_acc", {}});
  for (const auto& [run, cn] : per_run) {
    metrics[0].second.push_back(pct(static_cast<double>(cn.first) / static_cast<double>(cn.second)));
  }
  if (!sl_runs.empty()) {
    metrics.push_back({"strict", {}});
    metrics.push_back({"loose", {}});
    for (const auto& r : sl_runs) {
      metrics[1].second.push_back(pct(r.sl.strict));
      metrics[2].second.push_back(pct(r.sl.loose));
    }
  }
  std::optional<StabilityReport> stab;
  if (run_ids.size() >= 2) stab = stability(metrics);

  ordered_json j;
  j["n"] = report.n;
  j["exact_acc"] = report.exact_acc;
  ordered_json runs = ordered_json::array();
  for (const auto& [run, cn] : per_run) {
    ordered_json r;
    r["run"] = run;
    r["n"] = cn.second;
    r["exact_acc"] = static_cast<double>(cn.first) / static_cast<double>(cn.second);
    for (const auto& s : sl_runs) {
      if (s.run != run) continue;
      r["strict"] = s.sl.strict;
      r["loose"] = s.sl.loose;
    }
    runs.push_back(r);
  }
  j["runs"] = runs;
  if (stab) {
    ordered_json st = ordered_json::array();
    for (const auto& m : stab->per_metric) {
      st.push_back({{"name", m.name}, {"mean", m.mean}, {"std", m.std}, {"runs", m.runs},
                    {"formatted", format_mean_std(m.mean, m.std)}});
    }
    j["stability"] = st;
  }
  ordered_json items = ordered_json::array();
  for (const auto& it : report.per_item) {
    items.push_back({{"id", it.id}, {"run", it.run_index}, {"rule", to_string(it.rule)},
                     {"extracted", it.extracted}, {"reference", it.reference}, {"correct", it.correct}});
  }
  j["items"] = items;
  if (!o.report.empty()) write_text(o.report, j.dump(2) + "\n");

  if (ctx.g.json) {
    ctx.emit(j);
    return kExitOk;
  }
  ctx.out << fmt::format("{:<20} {:>4}  {:<13} {:<7}  {:<16}  {}\n", "id", "run", "rule", "correct", "extracted",
                         "reference");
  for (const auto& it : report.per_item) {
    ctx.out << fmt::format("{:<20} {:>4}  {:<13} {:<7}  {:<16}  {}\n", it.id, it.run_index, to_string(it.rule),
                           it.correct ? "yes" : "no", it.extracted, it.reference);
  }
  for (const auto& [run, cn] : per_run) {
    ctx.out << fmt::format("{:<20} {:>4}  {:>6.2f}  ({}/{})\n", "exact_acc", run,
                           pct(static_cast<double>(cn.first) / static_cast<double>(cn.second)), cn.first,
                           cn.second);
  }
  for (const auto& s : sl_runs) {
    ctx.out << fmt::format("{:<20} {:>4}  {:>6.2f}\n", "strict", s.run, pct(s.sl.strict));
    ctx.out << fmt::format("{:<20} {:>4}  {:>6.2f}\n", "loose", s.run, pct(s.sl.loose));
  }
  if (stab) {
    for (const auto& m : stab->per_metric) {
      ctx.out << fmt::format("{:<20} {:>4}  {}\n", m.name, "all", format_mean_std(m.mean, m.std));
    }
  }
  return kExitOk;
}

// ---- stability

struct StabilityOpts {
  std::vector<std::string> metrics;
  std::string input;
};

std::vector<double> parse_values(const std::string& list, const std::string& name) {
  std::vector<double> values;
  std::istringstream in(list);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw UsageError("metric " + name + ": not a number: '" + tok + "'");
    }
  }
  return values;
}

int run_stability(const StabilityOpts& o, const Context& ctx) {
  std::vector<std::pair<std::string, std::vector<double>>> metrics;
  for (const auto& spec : o.metrics) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--metric expects NAME=V1,V2,...: " + spec);
    const std::string name = spec.substr(0, eq);
    metrics.push_back({name, parse_values(spec.substr(eq + 1), name)});
  }
  if (!o.input.empty()) {
    ordered_json j;
    try {
      j = ordered_json::parse(read_text(o.input));
    } catch (const ordered_json::exception& e) {
      throw Error(ErrorKind::InvalidRecord, o.input + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::InvalidRecord, o.input + ": expected an object of metric arrays");
    for (const auto& [name, values] : j.items()) {
      if (!values.is_array()) throw Error(ErrorKind::InvalidRecord, o.input + ": " + name + " is not an array");
      std::vector<double> v;
      for (const auto& x : values) {
        if (!x.is_number()) throw Error(ErrorKind::InvalidRecord, o.input + ": " + name + " has a non-number");
        v.push_back(x.get<double>());
      }
      metrics.push_back({name, std::move(v)});
    }
  }
  if (metrics.empty()) throw UsageError("no metrics given; use --metric or --input");
  const StabilityReport r = stability(metrics);
  if (ctx.g.json) {
    ordered_json arr = ordered_json::array();
    for (const auto& m : r.per_metric) {
      arr.push_back({{"name", m.name}, {"mean", m.mean}, {"std", m.std}, {"runs", m.runs},
                     {"formatted", format_mean_std(m.mean, m.std)}});
    }
    ctx.emit(arr);
  } else {
    for (const auto& m : r.per_metric) {
      ctx.out << fmt::format("{:<20} {}  (n={})\n", m.name, format_mean_std(m.mean, m.std), m.runs);
    }
  }
  return kExitOk;
}

// Installs a stderr logger for one invocation and restores the previous default.
class LoggerScope {
 public:
  explicit LoggerScope(std::ostream& err) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    logger_ = std::make_shared<spdlog::logger>("mathseed", sink);
    logger_->set_pattern("[%l] %v");
    logger_->set_level(spdlog::level::info);
    spdlog::set_default_logger(logger_);
  }
  ~LoggerScope() { spdlog::set_default_logger(previous_); }
  LoggerScope(const LoggerScope&) = delete;
  LoggerScope& operator=(const LoggerScope&) = delete;

  void set_level(const std::string& name) { logger_->set_level(spdlog::level::from_str(name)); }

 private:
  std::shared_ptr<spdlog::logger> previous_;
  std::shared_ptr<spdlog::logger> logger_;
};

// First bare word that is not the value of a global option.
std::optional<std::string> stray_word(const std::vector<std::string>& args) {
  static const std::set<std::string> takes_value{"--config", "--seed", "--workers", "--log-level"};
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (takes_value.count(args[i])) {
      ++i;
    } else if (args[i].empty() || args[i][0] != '-') {
      return args[i];
    }
  }
  return std::nullopt;
}

template <class T>
CLI::Option* add_optional(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& desc) {
  return app->add_option_function<T>(name, [&target](const T& v) { target = v; }, desc);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  LoggerScope logging(err);

  CLI::App app{"Rendered-math dataset builder, fusion toy trainer and evaluator", "mathseed"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file: top-level keys set global options, objects named after a "
                                 "subcommand set its options; flags on the command line take precedence");
  app.option_defaults()->always_capture_default();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--workers", g.workers, "Parallel workers for dataset and eval")->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, critical or off")
      ->envname("MATHSEED_LOG")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "warning", "error", "critical", "off"}));
  app.add_flag("--json", g.json, "Print machine-readable JSON on stdout");

  const std::vector<std::string> placements{"between", "before", "after", "none", "nosuffix"};
  const std::vector<std::string> suffixes{"v1", "v2", "v3"};
  const std::vector<std::string> modes{"sequence", "feature"};

  RenderOpts ro;
  auto* render = app.add_subcommand("render", "Render one problem to a PNG");
  render->add_option("--latex", ro.latex, "Display math source without delimiters");
  render->add_option("--problem", ro.problem, "Problem text with $...$ math");
  render->add_option("--out", ro.out, "PNG path; omitted means render and report only");
  render->add_option("--size", ro.size, "Target long side in pixels")->check(CLI::PositiveNumber);
  add_optional(render, "--margin", ro.margin, "Margin in pixels (default scales with --size)");
  add_optional(render, "--base-size", ro.base_size, "Font size in pixels (default scales with --size)");
  add_optional(render, "--supersample", ro.supersample, "Samples per pixel side");

  BuildOpts bo;
  auto* build = app.add_subcommand("build-dataset", "Render a JSONL corpus into images and a manifest");
  build->add_option("--input", bo.input, "Input JSONL corpus")->required();
  build->add_option("--out", bo.out, "Output directory")->required();
  build->add_option("--resolutions", bo.resolutions, "Comma-separated target long sides")->delimiter(',');
  build->add_option("--variant", bo.variant, "Training target variant")
      ->check(CLI::IsMember({"image-latex-solution", "image-solution"}));
  build->add_option("--prompt", bo.prompt, "Suffix placement")->check(CLI::IsMember(placements));
  build->add_option("--suffix", bo.suffix, "Suffix version")->check(CLI::IsMember(suffixes));
  build->add_option("--question", bo.question, "Question text");
  build->add_option("--sentinel", bo.sentinel, "Image placeholder in rendered prompts");
  build->add_option("--mapping", bo.mapping, "JSON field mapping for foreign corpora");
  build->add_option("--reference-size", bo.reference_size, "Long side at which margin and font size apply")
      ->check(CLI::PositiveNumber);
  add_optional(build, "--margin", bo.margin, "Margin in pixels at the reference size");
  add_optional(build, "--base-size", bo.base_size, "Font size in pixels at the reference size");
  add_optional(build, "--supersample", bo.supersample, "Samples per pixel side");

  MixOpts mo;
  auto* mix = app.add_subcommand("mix", "Merge corpora by weight");
  mix->add_option("--config", mo.config, "Mix config JSON: sources with weights, seed, optional total")->required();
  mix->add_option("--out", mo.out, "Merged JSONL output")->required();
  add_optional(mix, "--total", mo.total, "Override the total record count");

  ComposeOpts co;
  auto* comp = app.add_subcommand("compose-prompt", "Assemble a prompt around the image token");
  comp->add_option("--question", co.question, "Question text");
  comp->add_option("--placement", co.placement, "Suffix placement")->check(CLI::IsMember(placements));
  comp->add_option("--suffix", co.suffix, "Suffix version")->check(CLI::IsMember(suffixes));
  comp->add_option("--sentinel", co.sentinel, "Image placeholder in the rendered prompt");

  FuseOpts fo;
  auto* fuse = app.add_subcommand("fuse-demo", "Check fusion output shapes and gradients on random inputs");
  fuse->add_option("--mode", fo.mode, "Fusion mode")->check(CLI::IsMember(modes));
  fuse->add_option("--li", fo.li, "Image tokens")->check(CLI::PositiveNumber);
  fuse->add_option("--lt", fo.lt, "Text tokens (sequence mode)")->check(CLI::PositiveNumber);
  add_optional(fuse, "--lc", fo.lc, "Code tokens before alignment (feature mode, default --li)")
      ->check(CLI::PositiveNumber);
  fuse->add_option("--di", fo.di, "Image embedding width")->check(CLI::PositiveNumber);
  fuse->add_option("--dt", fo.dt, "Text embedding width")->check(CLI::PositiveNumber);
  fuse->add_option("--dc", fo.dc, "Code embedding width")->check(CLI::PositiveNumber);
  fuse->add_option("--dllm", fo.dllm, "Language model width")->check(CLI::PositiveNumber);
  fuse->add_option("--samples", fo.samples, "Samples in the gradient-check batch")->check(CLI::PositiveNumber);
  fuse->add_option("--epsilon", fo.epsilon, "Finite-difference step")->check(CLI::Range(1e-7, 1e-3));

  TrainOpts to;
  auto* train = app.add_subcommand("train-adapters", "Fit adapters to a synthetic teacher");
  train->add_option("--mode", to.mode, "Fusion mode")->check(CLI::IsMember(modes));
  train->add_option("--stage", to.stage, "adapter-only freezes the backbone, joint trains it")
      ->check(CLI::IsMember({"adapter-only", "joint"}));
  train->add_option("--li", to.li, "Image tokens")->check(CLI::PositiveNumber);
  train->add_option("--lt", to.lt, "Text tokens (sequence mode)")->check(CLI::PositiveNumber);
  train->add_option("--di", to.di, "Image embedding width")->check(CLI::PositiveNumber);
  train->add_option("--dt", to.dt, "Text embedding width")->check(CLI::PositiveNumber);
  train->add_option("--dc", to.dc, "Code embedding width")->check(CLI::PositiveNumber);
  train->add_option("--dllm", to.dllm, "Language model width")->check(CLI::PositiveNumber);
  train->add_option("--samples", to.samples, "Training samples")->check(CLI::PositiveNumber);
  train->add_option("--steps", to.steps, "Gradient steps")->check(CLI::PositiveNumber);
  add_optional(train, "--lr", to.lr, "Base learning rate (default depends on --stage)")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--embed-std", to.embed_std, "Std of synthetic embeddings")->check(CLI::PositiveNumber);
  train->add_option("--noise", to.noise, "Std of target noise")->check(CLI::NonNegativeNumber);
  train->add_option("--out", to.out, "Weights file; a .json sidecar is written next to it");
  train->add_option("--loss-trace", to.loss_trace, "CSV of step, learning rate and loss");

  EvalOpts eo;
  auto* eval = app.add_subcommand("eval", "Score model outputs against references");
  eval->add_option("--outputs", eo.outputs, "JSONL of {id, text, run_index}")->required();
  eval->add_option("--refs", eo.refs, "JSONL of {id, answer}")->required();
  eval->add_option("--groups", eo.groups, "JSONL of {group, ids} for strict and loose scores");
  add_optional(eval, "--runs", eo.runs, "Expected number of runs in the outputs")->check(CLI::PositiveNumber);
  eval->add_option("--report", eo.report, "Also write the JSON report to this path");

  StabilityOpts so;
  auto* stab = app.add_subcommand("stability", "Mean and population std across runs");
  stab->add_option("--metric", so.metrics, "NAME=V1,V2,... (repeatable)");
  stab->add_option("--input", so.input, "JSON object mapping metric names to value arrays");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    if (app.get_subcommands().empty()) {
      if (const auto name = stray_word(args)) {
        err << "unknown subcommand '" << *name << "'\n" << app.help();
        return kExitUsage;
      }
    }
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  }
  logging.set_level(g.log_level);

  CLI::App* cmd = app.get_subcommands().front();
  const CLI::Option* seed_opt = app.get_option("--seed");
  Context ctx{g, seed_opt->count() > 0, out, err};

  err << "# mathseed " << cmd->get_name() << " effective config " << app.config_to_str(true, false) << "\n";

  try {
    if (cmd == render) return run_render(ro, ctx);
    if (cmd == build) return run_build(bo, ctx);
    if (cmd == mix) return run_mix(mo, ctx);
    if (cmd == comp) return run_compose(co, ctx);
    if (cmd == fuse) return run_fuse_demo(fo, ctx);
    if (cmd == train) return run_train(to, ctx);
    if (cmd == eval) return run_eval(eo, ctx);
    if (cmd == stab) return run_stability(so, ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << cmd->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_usage_kind(e.kind()) ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace mathseed
