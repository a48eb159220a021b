#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace mathseed {

// Dense row-major float64 matrix; rows are tokens, columns embedding features.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  static Matrix identity(std::size_t n);

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool operator==(const Matrix&) const = default;
};

// Deterministic generator: mt19937_64 words mapped to 53-bit uniforms, Box-Muller normals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();  // [0, 1)
  double normal();
  std::uint64_t next();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

Matrix random_normal(std::size_t rows, std::size_t cols, double stddev, Rng& rng);

// Throw DimensionMismatch unless a.cols == b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix concat_rows(const Matrix& top, const Matrix& bottom);   // DimensionMismatch on cols
Matrix concat_cols(const Matrix& left, const Matrix& right);   // RowMismatch on rows

struct Adapter {
  std::string name;
  Matrix w;  // in_dim x out_dim
  bool frozen = false;

  std::size_t in_dim() const { return w.rows; }
  std::size_t out_dim() const { return w.cols; }
  bool operator==(const Adapter&) const = default;
};

// Glorot-uniform: entries in [-s, s], s = sqrt(6 / (in + out)).
Adapter init_adapter(std::string name, std::size_t in_dim, std::size_t out_dim, Rng& rng);

Matrix project(const Matrix& e, const Adapter& w);
// z = [z_I; z_T]
Matrix fuse_sequence(const Matrix& z_i, const Matrix& z_t);
// [e_I | e_C] W_F; RowMismatch when token counts differ.
Matrix fuse_feature(const Matrix& e_i, const Matrix& e_c, const Adapter& w_f);

// Linear interpolation along rows; output row k samples source position k (rows-1)/(target-1),
// or the middle position (rows-1)/2 when target is 1.
Matrix align_token_count(const Matrix& e, std::size_t target_rows);

enum class FusionMode { SequenceLevel, FeatureLevel };
std::string_view to_string(FusionMode m);

// SequenceLevel adapters are {W_I, W_T}; FeatureLevel has the single shared W_F.
// The backbone is a square d_llm map standing in for the language model's
// input layer; it starts as the identity.
struct FusionModel {
  FusionMode mode = FusionMode::SequenceLevel;
  std::size_t d_llm = 0;
  std::vector<Adapter> adapters;
  Matrix backbone;
  bool backbone_frozen = true;

  bool operator==(const FusionModel&) const = default;
};

// d_a, d_b: encoder widths (d_I and d_T, or d_I and d_C).
FusionModel init_model(FusionMode mode, std::size_t d_a, std::size_t d_b, std::size_t d_llm, std::uint64_t seed);

// a: e_I; b: e_T (SequenceLevel) or e_C (FeatureLevel).
struct Sample {
  Matrix a;
  Matrix b;
  Matrix target;
};

// Fused adapter output before the backbone.
Matrix fused(const FusionModel& model, const Sample& s);
Matrix forward(const FusionModel& model, const Sample& s);

// Mean squared error over every target entry of every sample.
double mse(const FusionModel& model, const std::vector<Sample>& batch);

struct Gradients {
  std::vector<Matrix> adapters;  // zero-filled for frozen adapters
  Matrix backbone;               // zero-filled when frozen
};

Gradients mse_gradients(const FusionModel& model, const std::vector<Sample>& batch);

enum class Stage { AdapterOnly, Joint };

inline constexpr double kAdapterStageLr = 1e-3;
inline constexpr double kJointStageLr = 2e-5;

struct TrainConfig {
  double base_lr = kAdapterStageLr;
  int total_steps = 500;
  Stage stage = Stage::AdapterOnly;
  std::uint64_t seed = 0;
};

// base_lr * 0.5 * (1 + cos(pi * step / total_steps)); StepOutOfRange outside [0, total_steps].
double cosine_lr(int step, const TrainConfig& cfg);

struct TrainResult {
  FusionModel model;
  std::vector<double> losses;  // loss before each step's update
};

// Full-batch gradient descent on mse. AdapterOnly freezes the backbone; Joint
// unfreezes it. Adapters keep their own frozen flags. Throws ShapeMismatch for
// inconsistent data and NonFiniteLoss with the failing step.
TrainResult train_adapters(const FusionModel& model, const std::vector<Sample>& data, const TrainConfig& cfg);

// Max over unfrozen parameters of |g - g_fd| / max(1, |g|, |g_fd|) with central differences.
double grad_check(const FusionModel& model, const std::vector<Sample>& batch, double epsilon);

struct TeacherProblem {
  FusionModel teacher;
  std::vector<Sample> data;
};

// Samples of Gaussian embeddings (std embed_std) whose targets are the teacher's
// outputs plus Gaussian noise (std noise_std).
TeacherProblem make_teacher_problem(FusionMode mode, std::size_t d_a, std::size_t d_b, std::size_t d_llm,
                                    std::size_t rows_a, std::size_t rows_b, std::size_t samples, std::uint64_t seed,
                                    double embed_std = 20.0, double noise_std = 0.01);

// Binary container: "MSFW", u32 version, u32 mode, u64 d_llm, u32 adapter count,
// then per adapter u32 name length, name, u64 in, u64 out, u8 frozen, payload;
// then backbone u64 n, u8 frozen, payload. Integers and float64 little-endian.
std::vector<std::uint8_t> serialize_weights(const FusionModel& model);
FusionModel deserialize_weights(const std::vector<std::uint8_t>& bytes);  // InvalidWeights
std::string weights_sidecar_json(const FusionModel& model);
// Writes path and path + ".json".
void save_weights(const std::filesystem::path& path, const FusionModel& model);
FusionModel load_weights(const std::filesystem::path& path);

}  // namespace mathseed
