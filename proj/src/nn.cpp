// SPDX-FileCopyrightText: (c) 2026 depthsweep contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "depthsweep/nn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace depthsweep {

void validate(const ModelConfig &config) {
  if (config.input_dim == 0) {
    throw ConfigError("model input_dim must be positive");
  }
  for (std::size_t i = 0; i < config.hidden_widths.size(); ++i) {
    if (config.hidden_widths[i] == 0) {
      throw ConfigError("hidden width " + std::to_string(i + 1) + " is zero");
    }
    if (i > 0 && config.hidden_widths[i] > config.hidden_widths[i - 1]) {
      throw ConfigError("hidden widths must be non-increasing, but m" +
                        std::to_string(i) + "=" +
                        std::to_string(config.hidden_widths[i - 1]) + " < m" +
                        std::to_string(i + 1) + "=" +
                        std::to_string(config.hidden_widths[i]));
    }
  }
  if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0)) {
    throw ConfigError("dropout_rate must lie in [0, 1)");
  }
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto &layer : layers) {
    n += layer.weights.size() + layer.bias.size();
  }
  return n;
}

ModelConfig MlpModel::config(std::uint64_t seed) const {
  ModelConfig c;
  c.input_dim = input_dim();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    c.hidden_widths.push_back(layers[l].out());
  }
  c.dropout_rate = dropout_rate;
  c.seed = seed;
  return c;
}

void check_invariants(const MlpModel &model) {
  if (model.layers.empty()) {
    throw InternalError("model has no layers");
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto &layer = model.layers[l];
    const bool last = l + 1 == model.layers.size();
    if (layer.weights.empty() || layer.bias.rows() != 1 ||
        layer.bias.cols() != layer.out()) {
      throw InternalError("layer " + std::to_string(l) +
                          " has inconsistent weight/bias shapes");
    }
    if (l > 0 && model.layers[l - 1].out() != layer.in()) {
      throw InternalError("layer " + std::to_string(l) +
                          " does not chain to its predecessor");
    }
    if (last && (layer.out() != 1 || layer.activation != Activation::sigmoid)) {
      throw InternalError("output layer must be a single sigmoid unit");
    }
    if (!last && layer.activation != Activation::relu) {
      throw InternalError("hidden layers must use ReLU");
    }
  }
}

const char *init_scheme_name(InitScheme scheme) noexcept {
  return scheme == InitScheme::he ? "he" : "glorot";
}

InitScheme parse_init_scheme(std::string_view name) {
  if (name == "glorot") {
    return InitScheme::glorot;
  }
  if (name == "he") {
    return InitScheme::he;
  }
  throw ConfigError("unknown init scheme '" + std::string(name) +
                    "' (expected glorot or he)");
}

MlpModel build_model(const ModelConfig &config) {
  validate(config);
  Rng rng(config.seed);
  MlpModel model;
  model.dropout_rate = config.dropout_rate;
  std::size_t fan_in = config.input_dim;
  auto add_layer = [&](std::size_t out, Activation act) {
    double variance = 0.0;
    if (config.init == InitScheme::glorot) {
      variance = 2.0 / static_cast<double>(fan_in + out);
    } else {
      const double gain = act == Activation::relu ? 2.0 : 1.0;
      variance = gain / static_cast<double>(fan_in);
    }
    const double stddev = std::sqrt(variance);
    DenseLayer layer{Matrix(out, fan_in), Matrix(1, out), act};
    for (double &w : layer.weights.data()) {
      w = stddev * rng.normal();
    }
    model.layers.push_back(std::move(layer));
    fan_in = out;
  };
  for (std::size_t width : config.hidden_widths) {
    add_layer(width, Activation::relu);
  }
  add_layer(1, Activation::sigmoid);
  return model;
}

std::vector<std::size_t> taper_widths(std::size_t depth, std::size_t width_max,
                                      std::size_t width_min) {
  if (width_min == 0 || width_min > width_max) {
    throw ConfigError("taper needs 0 < width_min <= width_max, got " +
                      std::to_string(width_min) + " and " +
                      std::to_string(width_max));
  }
  std::vector<std::size_t> widths;
  widths.reserve(depth);
  const double ratio =
      static_cast<double>(width_min) / static_cast<double>(width_max);
  for (std::size_t i = 0; i < depth; ++i) {
    const double t =
        depth == 1 ? 0.0
                   : static_cast<double>(i) / static_cast<double>(depth - 1);
    auto w = static_cast<std::size_t>(
        std::llround(static_cast<double>(width_max) * std::pow(ratio, t)));
    w = std::clamp(w, width_min, width_max);
    if (!widths.empty()) {
      w = std::min(w, widths.back());
    }
    widths.push_back(w);
  }
  return widths;
}

double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

double sigmoid(double x) noexcept {
  double p;
  if (x >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(p, lo, hi);
}

namespace {

void require_input(const MlpModel &model, const Matrix &batch) {
  if (model.layers.empty()) {
    throw InternalError("forward on an empty model");
  }
  if (batch.cols() != model.input_dim()) {
    throw ShapeError("batch has " + std::to_string(batch.cols()) +
                     " columns but the model expects " +
                     std::to_string(model.input_dim()) + " (batch " +
                     batch.shape_string() + ")");
  }
}

Matrix dense(const DenseLayer &layer, const Matrix &input) {
  return add_row_broadcast(matmul_nt(input, layer.weights), layer.bias);
}

Matrix activate(const DenseLayer &layer, const Matrix &z) {
  return layer.activation == Activation::relu
             ? map_elementwise(z, relu)
             : map_elementwise(z, sigmoid);
}

} // namespace

ForwardResult forward(const MlpModel &model, const Matrix &batch, Mode mode,
                      Rng &rng) {
  require_input(model, batch);
  ForwardResult result;
  result.trace.layers.reserve(model.layers.size());
  const bool use_dropout = mode == Mode::train && model.dropout_rate > 0.0;
  const double keep_scale = 1.0 / (1.0 - model.dropout_rate);

  Matrix input = batch;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto &layer = model.layers[l];
    LayerTrace t;
    t.pre_activation = dense(layer, input);
    t.activation = activate(layer, t.pre_activation);
    const bool hidden = l + 1 < model.layers.size();
    Matrix next;
    if (hidden && use_dropout) {
      t.mask = Matrix(t.activation.rows(), t.activation.cols());
      for (double &m : t.mask.data()) {
        m = rng.uniform() < model.dropout_rate ? 0.0 : keep_scale;
      }
      next = hadamard(t.activation, t.mask);
    } else {
      next = t.activation;
    }
    t.input = std::move(input);
    result.trace.layers.push_back(std::move(t));
    input = std::move(next);
  }
  result.predictions = std::move(input);
  return result;
}

Matrix predict(const MlpModel &model, const Matrix &batch) {
  require_input(model, batch);
  Matrix x = batch;
  for (const auto &layer : model.layers) {
    x = activate(layer, dense(layer, x));
  }
  return x;
}

double bce_loss(const Matrix &predictions, const Matrix &labels) {
  if (predictions.rows() != labels.rows() || predictions.cols() != 1 ||
      labels.cols() != 1) {
    throw ShapeError("bce_loss: predictions " + predictions.shape_string() +
                     " vs labels " + labels.shape_string());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.rows(); ++i) {
    const double p =
        std::clamp(predictions(i, 0), kLossEpsilon, 1.0 - kLossEpsilon);
    const double y = labels(i, 0);
    total -= y * std::log(p) + (1.0 - y) * std::log1p(-p);
  }
  const double loss = total / static_cast<double>(predictions.rows());
  if (!std::isfinite(loss)) {
    throw NumericError("bce_loss is not finite");
  }
  return loss;
}

Gradients backward(const MlpModel &model, const ForwardTrace &trace,
                   const Matrix &labels) {
  const std::size_t depth = model.layers.size();
  if (trace.layers.size() != depth) {
    throw InternalError("trace has " + std::to_string(trace.layers.size()) +
                        " layers, model has " + std::to_string(depth));
  }
  const Matrix &out = trace.layers.back().activation;
  if (labels.rows() != out.rows() || labels.cols() != 1) {
    throw ShapeError("backward: labels " + labels.shape_string() +
                     " vs predictions " + out.shape_string());
  }
  for (std::size_t l = 0; l < depth; ++l) {
    const auto &t = trace.layers[l];
    const auto &layer = model.layers[l];
    if (t.input.cols() != layer.in() || t.pre_activation.cols() != layer.out() ||
        t.input.rows() != out.rows()) {
      throw InternalError("trace layer " + std::to_string(l) +
                          " does not match the model");
    }
  }

  const std::size_t batch = out.rows();
  const double inv_batch = 1.0 / static_cast<double>(batch);

  // d loss / d z at the output. Clamped predictions have zero slope.
  Matrix dz(batch, 1);
  for (std::size_t i = 0; i < batch; ++i) {
    const double p = out(i, 0);
    if (p >= kLossEpsilon && p <= 1.0 - kLossEpsilon) {
      dz(i, 0) = (p - labels(i, 0)) * inv_batch;
    }
  }

  Gradients grads;
  grads.layers.resize(depth);
  for (std::size_t l = depth; l-- > 0;) {
    const auto &t = trace.layers[l];
    grads.layers[l].weights = matmul_tn(dz, t.input);
    grads.layers[l].bias = column_sums(dz);
    if (l == 0) {
      break;
    }
    Matrix d_input = matmul(dz, model.layers[l].weights);
    const auto &prev = trace.layers[l - 1];
    if (!prev.mask.empty()) {
      d_input = hadamard(d_input, prev.mask);
    }
    auto d = d_input.data();
    const auto z = prev.pre_activation.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!(z[i] > 0.0)) {
        d[i] = 0.0;
      }
    }
    dz = std::move(d_input);
  }
  return grads;
}

void apply_sgd_step(MlpModel &model, const Gradients &grads,
                    double learning_rate) {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be a finite non-negative number");
  }
  if (grads.layers.size() != model.layers.size()) {
    throw ShapeError("gradient has " + std::to_string(grads.layers.size()) +
                     " layers, model has " +
                     std::to_string(model.layers.size()));
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto &g = grads.layers[l];
    auto &layer = model.layers[l];
    if (g.weights.rows() != layer.weights.rows() ||
        g.weights.cols() != layer.weights.cols() ||
        g.bias.cols() != layer.bias.cols() || g.bias.rows() != 1) {
      throw ShapeError("gradient shape mismatch at layer " + std::to_string(l));
    }
    ensure_finite(g.weights, "weight gradient of layer " + std::to_string(l));
    ensure_finite(g.bias, "bias gradient of layer " + std::to_string(l));
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto update = [learning_rate](std::span<double> theta,
                                  std::span<const double> d) {
      for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] -= learning_rate * d[i];
      }
    };
    update(model.layers[l].weights.data(), grads.layers[l].weights.data());
    update(model.layers[l].bias.data(), grads.layers[l].bias.data());
    ensure_finite(model.layers[l].weights,
                  "weights of layer " + std::to_string(l));
    ensure_finite(model.layers[l].bias, "bias of layer " + std::to_string(l));
  }
}

MlpModel sgd_step(const MlpModel &model, const Gradients &grads,
                  double learning_rate) {
  MlpModel next = model;
  apply_sgd_step(next, grads, learning_rate);
  return next;
}

std::vector<double> gradient_layer_norms(const Gradients &grads) {
  std::vector<double> norms;
  norms.reserve(grads.layers.size());
  for (const auto &g : grads.layers) {
    norms.push_back(g.weights.empty() ? 0.0 : frobenius_norm(g.weights));
  }
  return norms;
}

// ---------------------------------------------------------------------------
// Checkpoint

namespace {

constexpr const char *kCheckpointMagic = "depthsweep-checkpoint";
constexpr int kCheckpointVersion = 1;

void write_hex(std::ostream &out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  out.write(buf, res.ptr - buf);
}

void write_matrix_rows(std::ostream &out, const Matrix &m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) {
        out << ' ';
      }
      write_hex(out, row[c]);
    }
    out << '\n';
  }
}

class CheckpointReader {
public:
  explicit CheckpointReader(const std::string &text) : in_(text) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) {
      throw ParseError("checkpoint truncated");
    }
    return w;
  }

  void expect(const std::string &keyword) {
    const std::string w = word();
    if (w != keyword) {
      throw ParseError("checkpoint: expected '" + keyword + "', found '" + w +
                       "'");
    }
  }

  std::uint64_t integer() {
    const std::string w = word();
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      throw ParseError("checkpoint: bad integer '" + w + "'");
    }
    return v;
  }

  double real() {
    const std::string w = word();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v,
                                           std::chars_format::hex);
    if (ec != std::errc() || ptr != w.data() + w.size() || !std::isfinite(v)) {
      throw ParseError("checkpoint: bad real '" + w + "'");
    }
    return v;
  }

  void fill(Matrix &m) {
    for (double &v : m.data()) {
      v = real();
    }
  }

private:
  std::istringstream in_;
};

} // namespace

std::string checkpoint_to_string(const Checkpoint &checkpoint) {
  const auto &model = checkpoint.model;
  check_invariants(model);
  std::ostringstream out;
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "seed " << checkpoint.seed << '\n';
  out << "max_words " << checkpoint.max_words << '\n';
  out << "dropout_rate ";
  write_hex(out, model.dropout_rate);
  out << '\n';
  out << "layers " << model.layers.size() << '\n';
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto &layer = model.layers[l];
    out << "layer " << l << ' ' << layer.out() << ' ' << layer.in() << ' '
        << (layer.activation == Activation::relu ? "relu" : "sigmoid") << '\n';
    out << "weights\n";
    write_matrix_rows(out, layer.weights);
    out << "bias\n";
    write_matrix_rows(out, layer.bias);
  }
  out << "end\n";
  return out.str();
}

Checkpoint checkpoint_from_string(const std::string &text) {
  CheckpointReader in(text);
  in.expect(kCheckpointMagic);
  if (in.integer() != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version");
  }
  Checkpoint cp;
  in.expect("seed");
  cp.seed = in.integer();
  in.expect("max_words");
  cp.max_words = in.integer();
  in.expect("dropout_rate");
  cp.model.dropout_rate = in.real();
  in.expect("layers");
  const std::uint64_t count = in.integer();
  if (count == 0 || count > 100000) {
    throw ParseError("checkpoint: implausible layer count");
  }
  for (std::uint64_t l = 0; l < count; ++l) {
    in.expect("layer");
    if (in.integer() != l) {
      throw ParseError("checkpoint: layers out of order");
    }
    const std::uint64_t out = in.integer();
    const std::uint64_t inp = in.integer();
    const std::string act = in.word();
    if (act != "relu" && act != "sigmoid") {
      throw ParseError("checkpoint: unknown activation '" + act + "'");
    }
    if (out == 0 || inp == 0 || out * inp > (std::uint64_t{1} << 34)) {
      throw ParseError("checkpoint: bad layer shape");
    }
    DenseLayer layer{Matrix(out, inp), Matrix(1, out),
                     act == "relu" ? Activation::relu : Activation::sigmoid};
    in.expect("weights");
    in.fill(layer.weights);
    in.expect("bias");
    in.fill(layer.bias);
    cp.model.layers.push_back(std::move(layer));
  }
  in.expect("end");
  try {
    check_invariants(cp.model);
  } catch (const InternalError &e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  if (!(cp.model.dropout_rate >= 0.0 && cp.model.dropout_rate < 1.0)) {
    throw ParseError("checkpoint: dropout_rate outside [0, 1)");
  }
  return cp;
}

void save_checkpoint(const Checkpoint &checkpoint,
                     const std::filesystem::path &path) {
  const std::string text = checkpoint_to_string(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    throw IoError("cannot write checkpoint '" + path.string() + "'");
  }
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open checkpoint '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

} // namespace depthsweep
