// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef DEPTHSWEEP_NN_HPP
#define DEPTHSWEEP_NN_HPP

#include "depthsweep/error.hpp"
#include "depthsweep/linalg.hpp"
#include "depthsweep/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace depthsweep {

inline constexpr double kDefaultDropoutRate = 0.05;
inline constexpr std::size_t kDefaultWidthMax = 256;
inline constexpr std::size_t kDefaultWidthMin = 16;
inline constexpr double kLossEpsilon = 1e-12;

enum class Activation { relu, sigmoid };

/// Weight initialisation. Both draw zero-mean normals with zero biases.
/// glorot: var = 2 / (fan_in + fan_out). he: var = 2 / fan_in for ReLU
/// layers and 1 / fan_in for the sigmoid output.
enum class InitScheme { glorot, he };

const char *init_scheme_name(InitScheme scheme) noexcept;
/// Throws ConfigError for anything but "glorot" or "he".
InitScheme parse_init_scheme(std::string_view name);

struct ModelConfig {
  std::size_t input_dim = 1;
  /// m_1 >= m_2 >= ... >= m_N. Empty means logistic regression.
  std::vector<std::size_t> hidden_widths;
  double dropout_rate = kDefaultDropoutRate;
  std::uint64_t seed = 0;
  InitScheme init = InitScheme::glorot;

  bool operator==(const ModelConfig &) const = default;
};

/// Throws ConfigError when the config violates the width ordering, has
/// a zero width or input dimension, or a dropout rate outside [0, 1).
void validate(const ModelConfig &config);

struct DenseLayer {
  Matrix weights; // out x in
  Matrix bias;    // 1 x out
  Activation activation = Activation::relu;

  std::size_t in() const noexcept { return weights.cols(); }
  std::size_t out() const noexcept { return weights.rows(); }
  bool operator==(const DenseLayer &) const = default;
};

/// ReLU hidden layers followed by a single sigmoid unit.
struct MlpModel {
  std::vector<DenseLayer> layers;
  double dropout_rate = 0.0;

  std::size_t input_dim() const { return layers.front().in(); }
  std::size_t num_layers() const noexcept { return layers.size(); }
  std::size_t parameter_count() const;
  ModelConfig config(std::uint64_t seed = 0) const;
  bool operator==(const MlpModel &) const = default;
};

/// Throws InternalError when the layer chain or activations are inconsistent.
void check_invariants(const MlpModel &model);

/// Weights drawn layer by layer from `config.seed` under `config.init`.
MlpModel build_model(const ModelConfig &config);

/// Geometric taper from width_max down to width_min over `depth` layers,
/// rounded and forced non-increasing. depth 1 yields {width_max}.
std::vector<std::size_t> taper_widths(std::size_t depth,
                                      std::size_t width_max = kDefaultWidthMax,
                                      std::size_t width_min = kDefaultWidthMin);

double relu(double x) noexcept;
/// Logistic function, overflow free, clamped to the open interval (0, 1).
double sigmoid(double x) noexcept;

/// Ties (exactly 0.5) are classified as deleted.
inline int classify(double probability) noexcept {
  return probability >= 0.5 ? 1 : 0;
}

enum class Mode { train, eval };

struct LayerTrace {
  Matrix input;          // what the layer consumed (masked previous output)
  Matrix pre_activation; // input * W^T + b
  Matrix activation;     // f(pre_activation), before any dropout mask
  Matrix mask;           // inverted dropout mask; empty when not applied
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;
};

struct ForwardResult {
  Matrix predictions; // b x 1
  ForwardTrace trace;
};

/// Train mode draws an inverted-dropout mask for every hidden activation
/// from `rng` (one uniform per hidden unit per row, layer order). Eval mode
/// applies no mask and does not touch `rng`.
ForwardResult forward(const MlpModel &model, const Matrix &batch, Mode mode,
                      Rng &rng);

/// Eval-mode predictions without keeping a trace.
Matrix predict(const MlpModel &model, const Matrix &batch);

/// Mean binary cross-entropy with predictions clamped to [eps, 1 - eps].
double bce_loss(const Matrix &predictions, const Matrix &labels);

struct LayerGradient {
  Matrix weights;
  Matrix bias;
  bool operator==(const LayerGradient &) const = default;
};

struct Gradients {
  std::vector<LayerGradient> layers;
  bool operator==(const Gradients &) const = default;
};

/// Exact gradients of bce_loss over the traced batch. A prediction in the
/// clamped region contributes zero, matching the clamped loss.
Gradients backward(const MlpModel &model, const ForwardTrace &trace,
                   const Matrix &labels);

MlpModel sgd_step(const MlpModel &model, const Gradients &grads,
                  double learning_rate);
void apply_sgd_step(MlpModel &model, const Gradients &grads,
                    double learning_rate);

/// L2 norm of each layer's weight gradient, first layer first.
std::vector<double> gradient_layer_norms(const Gradients &grads);

/// Versioned text checkpoint. Reals are written as hexadecimal floats so
/// that save -> load -> save is byte identical.
struct Checkpoint {
  MlpModel model;
  std::uint64_t seed = 0;
  std::size_t max_words = 0;
  bool operator==(const Checkpoint &) const = default;
};

std::string checkpoint_to_string(const Checkpoint &checkpoint);
Checkpoint checkpoint_from_string(const std::string &text);
void save_checkpoint(const Checkpoint &checkpoint,
                     const std::filesystem::path &path);
Checkpoint load_checkpoint(const std::filesystem::path &path);

} // namespace depthsweep

#endif // DEPTHSWEEP_NN_HPP
