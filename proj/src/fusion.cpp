#include "mathseed/fusion.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>

#include <json.hpp>

#include "mathseed/error.hpp"

namespace mathseed {

namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows) + "x" + std::to_string(m.cols); }

void require_finite(const Matrix& m, const char* what) {
  for (double v : m.data) {
    if (!std::isfinite(v)) throw Error(ErrorKind::ShapeMismatch, std::string(what) + " has a non-finite entry");
  }
}

void check_sample(const FusionModel& model, const Sample& s) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::ShapeMismatch, why); };
  std::size_t rows = 0;
  if (model.mode == FusionMode::SequenceLevel) {
    if (s.a.cols != model.adapters[0].in_dim()) fail("e_I is " + shape(s.a) + ", W_I expects " + std::to_string(model.adapters[0].in_dim()) + " columns");
    if (s.b.cols != model.adapters[1].in_dim()) fail("e_T is " + shape(s.b) + ", W_T expects " + std::to_string(model.adapters[1].in_dim()) + " columns");
    rows = s.a.rows + s.b.rows;
  } else {
    if (s.a.rows != s.b.rows) fail("e_I has " + std::to_string(s.a.rows) + " rows, e_C has " + std::to_string(s.b.rows));
    if (s.a.cols + s.b.cols != model.adapters[0].in_dim()) fail("e_I|e_C width does not match W_F");
    rows = s.a.rows;
  }
  if (s.target.rows != rows || s.target.cols != model.d_llm) {
    fail("target is " + shape(s.target) + ", expected " + std::to_string(rows) + "x" + std::to_string(model.d_llm));
  }
  require_finite(s.a, "embedding");
  require_finite(s.b, "embedding");
  require_finite(s.target, "target");
}

void check_model(const FusionModel& m) {
  const std::size_t want = m.mode == FusionMode::SequenceLevel ? 2 : 1;
  if (m.adapters.size() != want) throw Error(ErrorKind::ShapeMismatch, "wrong adapter count for fusion mode");
  for (const auto& a : m.adapters) {
    if (a.out_dim() != m.d_llm) throw Error(ErrorKind::ShapeMismatch, "adapter " + a.name + " does not map to d_llm");
  }
  if (m.backbone.rows != m.d_llm || m.backbone.cols != m.d_llm) {
    throw Error(ErrorKind::ShapeMismatch, "backbone must be d_llm x d_llm");
  }
}

// acc += a^T b
void add_at_b(Matrix& acc, const Matrix& a, const Matrix& b, std::size_t b_row0 = 0) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double x = a(r, i);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) acc(i, j) += x * b(b_row0 + r, j);
    }
  }
}

std::vector<double*> trainable(FusionModel& m) {
  std::vector<double*> out;
  for (auto& a : m.adapters) {
    if (a.frozen) continue;
    for (auto& v : a.w.data) out.push_back(&v);
  }
  if (!m.backbone_frozen) {
    for (auto& v : m.backbone.data) out.push_back(&v);
  }
  return out;
}

std::vector<double> flat(const FusionModel& m, const Gradients& g) {
  std::vector<double> out;
  for (std::size_t i = 0; i < m.adapters.size(); ++i) {
    if (m.adapters[i].frozen) continue;
    out.insert(out.end(), g.adapters[i].data.begin(), g.adapters[i].data.end());
  }
  if (!m.backbone_frozen) out.insert(out.end(), g.backbone.data.begin(), g.backbone.data.end());
  return out;
}

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    std::memcpy(&bits, &v, sizeof bits);
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

struct Reader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  template <class T>
  T get() {
    if (pos + sizeof(T) > bytes.size()) throw Error(ErrorKind::InvalidWeights, "truncated weights file");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t{bytes[pos + i]} << (8 * i);
    pos += sizeof(T);
    if constexpr (std::is_same_v<T, double>) {
      double v;
      std::memcpy(&v, &bits, sizeof v);
      return v;
    } else {
      return static_cast<T>(bits);
    }
  }

  Matrix matrix(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20) || rows * cols * 8 > bytes.size() - pos) {
      throw Error(ErrorKind::InvalidWeights, "implausible matrix dimensions " + std::to_string(rows) + "x" +
                                                 std::to_string(cols));
    }
    Matrix m(rows, cols);
    for (auto& v : m.data) v = get<double>();
    return m;
  }
};

constexpr char kMagic[4] = {'M', 'S', 'F', 'W'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

Matrix random_normal(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (auto& v : m.data) v = stddev * rng.normal();
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw Error(ErrorKind::DimensionMismatch, "cannot multiply " + shape(a) + " by " + shape(b));
  }
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double x = a(i, k);
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += x * b(k, j);
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
  }
  return out;
}

Matrix concat_rows(const Matrix& top, const Matrix& bottom) {
  if (top.cols != bottom.cols) {
    throw Error(ErrorKind::DimensionMismatch, "cannot stack " + shape(top) + " on " + shape(bottom));
  }
  Matrix out(top.rows + bottom.rows, top.cols);
  std::copy(top.data.begin(), top.data.end(), out.data.begin());
  std::copy(bottom.data.begin(), bottom.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(top.data.size()));
  return out;
}

Matrix concat_cols(const Matrix& left, const Matrix& right) {
  if (left.rows != right.rows) {
    throw Error(ErrorKind::RowMismatch, "cannot join " + shape(left) + " beside " + shape(right));
  }
  Matrix out(left.rows, left.cols + right.cols);
  for (std::size_t r = 0; r < left.rows; ++r) {
    for (std::size_t c = 0; c < left.cols; ++c) out(r, c) = left(r, c);
    for (std::size_t c = 0; c < right.cols; ++c) out(r, left.cols + c) = right(r, c);
  }
  return out;
}

Adapter init_adapter(std::string name, std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  Adapter a{std::move(name), Matrix(in_dim, out_dim), false};
  const double s = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  for (auto& v : a.w.data) v = (2.0 * rng.uniform() - 1.0) * s;
  return a;
}

Matrix project(const Matrix& e, const Adapter& w) {
  if (e.cols != w.in_dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "embedding is " + shape(e) + " but adapter " + w.name + " expects " + std::to_string(w.in_dim()) + " columns");
  }
  return matmul(e, w.w);
}

Matrix fuse_sequence(const Matrix& z_i, const Matrix& z_t) { return concat_rows(z_i, z_t); }

Matrix fuse_feature(const Matrix& e_i, const Matrix& e_c, const Adapter& w_f) {
  const Matrix joined = concat_cols(e_i, e_c);
  return project(joined, w_f);
}

Matrix align_token_count(const Matrix& e, std::size_t target_rows) {
  if (e.rows == 0 || target_rows == 0) throw Error(ErrorKind::DimensionMismatch, "token counts must be positive");
  if (e.rows == target_rows) return e;
  Matrix out(target_rows, e.cols);
  for (std::size_t k = 0; k < target_rows; ++k) {
    const double pos = target_rows == 1 ? (static_cast<double>(e.rows) - 1) / 2
                                        : static_cast<double>(k) * static_cast<double>(e.rows - 1) /
                                              static_cast<double>(target_rows - 1);
    const std::size_t r0 = std::min(static_cast<std::size_t>(std::floor(pos)), e.rows - 1);
    const std::size_t r1 = std::min(r0 + 1, e.rows - 1);
    const double f = pos - static_cast<double>(r0);
    for (std::size_t c = 0; c < e.cols; ++c) out(k, c) = f == 0 ? e(r0, c) : e(r0, c) * (1 - f) + e(r1, c) * f;
  }
  return out;
}

std::string_view to_string(FusionMode m) { return m == FusionMode::SequenceLevel ? "sequence" : "feature"; }

FusionModel init_model(FusionMode mode, std::size_t d_a, std::size_t d_b, std::size_t d_llm, std::uint64_t seed) {
  if (d_a == 0 || d_b == 0 || d_llm == 0) throw Error(ErrorKind::DimensionMismatch, "dimensions must be positive");
  Rng rng(seed);
  FusionModel m;
  m.mode = mode;
  m.d_llm = d_llm;
  if (mode == FusionMode::SequenceLevel) {
    m.adapters.push_back(init_adapter("W_I", d_a, d_llm, rng));
    m.adapters.push_back(init_adapter("W_T", d_b, d_llm, rng));
  } else {
    m.adapters.push_back(init_adapter("W_F", d_a + d_b, d_llm, rng));
  }
  m.backbone = Matrix::identity(d_llm);
  return m;
}

Matrix fused(const FusionModel& model, const Sample& s) {
  if (model.mode == FusionMode::SequenceLevel) {
    return fuse_sequence(project(s.a, model.adapters[0]), project(s.b, model.adapters[1]));
  }
  return fuse_feature(s.a, s.b, model.adapters[0]);
}

Matrix forward(const FusionModel& model, const Sample& s) { return matmul(fused(model, s), model.backbone); }

double mse(const FusionModel& model, const std::vector<Sample>& batch) {
  check_model(model);
  double sum = 0;
  std::size_t n = 0;
  for (const auto& s : batch) {
    check_sample(model, s);
    const Matrix out = forward(model, s);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      const double r = out.data[i] - s.target.data[i];
      sum += r * r;
    }
    n += out.data.size();
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

Gradients mse_gradients(const FusionModel& model, const std::vector<Sample>& batch) {
  check_model(model);
  Gradients g;
  for (const auto& a : model.adapters) g.adapters.emplace_back(a.in_dim(), a.out_dim());
  g.backbone = Matrix(model.d_llm, model.d_llm);
  std::size_t n = 0;
  for (const auto& s : batch) {
    check_sample(model, s);
    n += s.target.data.size();
  }
  if (n == 0) return g;
  const Matrix bt = transpose(model.backbone);
  for (const auto& s : batch) {
    const Matrix z = fused(model, s);
    Matrix grad_out = matmul(z, model.backbone);
    for (std::size_t i = 0; i < grad_out.data.size(); ++i) {
      grad_out.data[i] = 2.0 * (grad_out.data[i] - s.target.data[i]) / static_cast<double>(n);
    }
    if (!model.backbone_frozen) add_at_b(g.backbone, z, grad_out);
    const Matrix grad_z = matmul(grad_out, bt);
    if (model.mode == FusionMode::SequenceLevel) {
      if (!model.adapters[0].frozen) add_at_b(g.adapters[0], s.a, grad_z, 0);
      if (!model.adapters[1].frozen) add_at_b(g.adapters[1], s.b, grad_z, s.a.rows);
    } else if (!model.adapters[0].frozen) {
      add_at_b(g.adapters[0], concat_cols(s.a, s.b), grad_z);
    }
  }
  return g;
}

double cosine_lr(int step, const TrainConfig& cfg) {
  if (cfg.total_steps <= 0) throw Error(ErrorKind::InvalidConfig, "total_steps must be positive");
  if (step < 0 || step > cfg.total_steps) {
    throw Error(ErrorKind::StepOutOfRange,
                "step " + std::to_string(step) + " outside [0, " + std::to_string(cfg.total_steps) + "]");
  }
  const double c = std::cos(std::numbers::pi * static_cast<double>(step) / static_cast<double>(cfg.total_steps));
  return cfg.base_lr * 0.5 * (1.0 + c);
}

TrainResult train_adapters(const FusionModel& model, const std::vector<Sample>& data, const TrainConfig& cfg) {
  if (data.empty()) throw Error(ErrorKind::ShapeMismatch, "no training samples");
  if (cfg.total_steps <= 0) throw Error(ErrorKind::InvalidConfig, "total_steps must be positive");
  if (!(cfg.base_lr >= 0) || !std::isfinite(cfg.base_lr)) {
    throw Error(ErrorKind::InvalidConfig, "base learning rate must be finite and non-negative");
  }
  TrainResult res{model, {}};
  res.model.backbone_frozen = cfg.stage == Stage::AdapterOnly;
  check_model(res.model);
  for (const auto& s : data) check_sample(res.model, s);
  res.losses.reserve(static_cast<std::size_t>(cfg.total_steps));

  for (int step = 0; step < cfg.total_steps; ++step) {
    const double loss = mse(res.model, data);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::NonFiniteLoss, "loss became non-finite at step " + std::to_string(step));
    }
    res.losses.push_back(loss);
    const double lr = cosine_lr(step, cfg);
    if (lr == 0) continue;
    const Gradients g = mse_gradients(res.model, data);
    for (std::size_t i = 0; i < res.model.adapters.size(); ++i) {
      auto& a = res.model.adapters[i];
      if (a.frozen) continue;
      for (std::size_t k = 0; k < a.w.data.size(); ++k) a.w.data[k] -= lr * g.adapters[i].data[k];
    }
    if (!res.model.backbone_frozen) {
      for (std::size_t k = 0; k < res.model.backbone.data.size(); ++k) {
        res.model.backbone.data[k] -= lr * g.backbone.data[k];
      }
    }
  }
  return res;
}

double grad_check(const FusionModel& model, const std::vector<Sample>& batch, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) throw Error(ErrorKind::InvalidConfig, "epsilon must lie in [1e-7, 1e-3]");
  FusionModel probe = model;
  const std::vector<double> analytic = flat(model, mse_gradients(model, batch));
  const std::vector<double*> params = trainable(probe);
  double worst = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + epsilon;
    const double up = mse(probe, batch);
    *params[i] = saved - epsilon;
    const double down = mse(probe, batch);
    *params[i] = saved;
    const double fd = (up - down) / (2 * epsilon);
    const double g = analytic[i];
    worst = std::max(worst, std::fabs(g - fd) / std::max({1.0, std::fabs(g), std::fabs(fd)}));
  }
  return worst;
}

TeacherProblem make_teacher_problem(FusionMode mode, std::size_t d_a, std::size_t d_b, std::size_t d_llm,
                                    std::size_t rows_a, std::size_t rows_b, std::size_t samples, std::uint64_t seed,
                                    double embed_std, double noise_std) {
  if (mode == FusionMode::FeatureLevel && rows_a != rows_b) {
    throw Error(ErrorKind::RowMismatch, "feature-level fusion needs equal token counts");
  }
  std::uint64_t teacher_seed = seed ^ 0x7ea0c4e55eedULL;
  TeacherProblem p{init_model(mode, d_a, d_b, d_llm, teacher_seed), {}};
  Rng rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    Sample s{random_normal(rows_a, d_a, embed_std, rng), random_normal(rows_b, d_b, embed_std, rng), {}};
    s.target = forward(p.teacher, s);
    for (auto& v : s.target.data) v += noise_std * rng.normal();
    p.data.push_back(std::move(s));
  }
  return p;
}

std::vector<std::uint8_t> serialize_weights(const FusionModel& model) {
  check_model(model);
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, model.mode == FusionMode::SequenceLevel ? 0 : 1);
  put<std::uint64_t>(out, model.d_llm);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.adapters.size()));
  for (const auto& a : model.adapters) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(a.name.size()));
    out.insert(out.end(), a.name.begin(), a.name.end());
    put<std::uint64_t>(out, a.in_dim());
    put<std::uint64_t>(out, a.out_dim());
    put<std::uint8_t>(out, a.frozen ? 1 : 0);
    for (double v : a.w.data) put<double>(out, v);
  }
  put<std::uint64_t>(out, model.backbone.rows);
  put<std::uint8_t>(out, model.backbone_frozen ? 1 : 0);
  for (double v : model.backbone.data) put<double>(out, v);
  return out;
}

FusionModel deserialize_weights(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::InvalidWeights, "not a weights file (bad magic)");
  }
  Reader in{bytes, 4};
  if (const auto v = in.get<std::uint32_t>(); v != kVersion) {
    throw Error(ErrorKind::InvalidWeights, "unsupported weights version " + std::to_string(v));
  }
  FusionModel m;
  const auto mode = in.get<std::uint32_t>();
  if (mode > 1) throw Error(ErrorKind::InvalidWeights, "unknown fusion mode " + std::to_string(mode));
  m.mode = mode == 0 ? FusionMode::SequenceLevel : FusionMode::FeatureLevel;
  m.d_llm = in.get<std::uint64_t>();
  const auto count = in.get<std::uint32_t>();
  if (count > 2) throw Error(ErrorKind::InvalidWeights, "too many adapters");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = in.get<std::uint32_t>();
    if (len > 64 || in.pos + len > bytes.size()) throw Error(ErrorKind::InvalidWeights, "bad adapter name");
    Adapter a;
    a.name.assign(reinterpret_cast<const char*>(bytes.data() + in.pos), len);
    in.pos += len;
    const auto rows = in.get<std::uint64_t>();
    const auto cols = in.get<std::uint64_t>();
    a.frozen = in.get<std::uint8_t>() != 0;
    a.w = in.matrix(rows, cols);
    m.adapters.push_back(std::move(a));
  }
  const auto n = in.get<std::uint64_t>();
  m.backbone_frozen = in.get<std::uint8_t>() != 0;
  m.backbone = in.matrix(n, n);
  if (in.pos != bytes.size()) throw Error(ErrorKind::InvalidWeights, "trailing bytes after weights");
  try {
    check_model(m);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidWeights, e.detail());
  }
  return m;
}

std::string weights_sidecar_json(const FusionModel& model) {
  nlohmann::ordered_json j;
  j["magic"] = std::string(kMagic, 4);
  j["version"] = kVersion;
  j["mode"] = to_string(model.mode);
  j["d_llm"] = model.d_llm;
  j["adapters"] = nlohmann::ordered_json::array();
  for (const auto& a : model.adapters) {
    nlohmann::ordered_json e;
    e["name"] = a.name;
    e["in_dim"] = a.in_dim();
    e["out_dim"] = a.out_dim();
    e["frozen"] = a.frozen;
    j["adapters"].push_back(e);
  }
  j["backbone"] = {{"dim", model.backbone.rows}, {"frozen", model.backbone_frozen}};
  return j.dump(2) + "\n";
}

void save_weights(const std::filesystem::path& path, const FusionModel& model) {
  const auto bytes = serialize_weights(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  std::ofstream side(path.string() + ".json", std::ios::binary | std::ios::trunc);
  side << weights_sidecar_json(model);
  if (!f || !side) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

FusionModel load_weights(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize_weights(bytes);
}

}  // namespace mathseed
