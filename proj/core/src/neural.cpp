#include "sentarl/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sentarl/error.hpp"

namespace sentarl {

std::string_view to_string(Activation activation) {
  return activation == Activation::tanh ? "tanh" : "relu";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::momentum: return "momentum";
    case OptimizerKind::rmsprop: return "rmsprop";
  }
  return "?";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "momentum") return OptimizerKind::momentum;
  if (name == "rmsprop") return OptimizerKind::rmsprop;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, Activation hidden)
    : sizes_(std::move(layer_sizes)), activation_(hidden) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  if (std::find(sizes_.begin(), sizes_.end(), 0u) != sizes_.end()) {
    throw std::invalid_argument("Mlp: layer sizes must be positive");
  }
  layers_.reserve(sizes_.size() - 1);
  for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
    DenseLayer layer;
    layer.inputs = sizes_[k];
    layer.outputs = sizes_[k + 1];
    layer.weights.assign(layer.inputs * layer.outputs, 0.0);
    layer.bias.assign(layer.outputs, 0.0);
    layers_.push_back(std::move(layer));
  }
}

Mlp Mlp::glorot(std::vector<std::size_t> layer_sizes, Activation hidden, Rng& rng) {
  Mlp net(std::move(layer_sizes), hidden);
  for (auto& layer : net.layers_) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
    for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
  }
  return net;
}

std::vector<DenseLayer>& Mlp::mutable_layers() noexcept {
  ++revision_;
  return layers_;
}

std::size_t Mlp::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void Mlp::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw std::invalid_argument("Mlp::set_parameters: wrong parameter count");
  }
  std::size_t i = 0;
  for (auto& l : mutable_layers()) {
    for (auto& w : l.weights) w = values[i++];
    for (auto& b : l.bias) b = values[i++];
  }
}

bool Mlp::all_finite() const noexcept {
  for (const auto& l : layers_) {
    for (double w : l.weights)
      if (!std::isfinite(w)) return false;
    for (double b : l.bias)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.sizes_ != b.sizes_ || a.activation_ != b.activation_) return false;
  for (std::size_t k = 0; k < a.layers_.size(); ++k) {
    if (a.layers_[k].weights != b.layers_[k].weights || a.layers_[k].bias != b.layers_[k].bias) {
      return false;
    }
  }
  return true;
}

namespace {

double activate(Activation act, double x) {
  return act == Activation::tanh ? std::tanh(x) : (x > 0.0 ? x : 0.0);
}

// Derivative expressed through the activation's output y.
double activate_grad(Activation act, double y) {
  return act == Activation::tanh ? 1.0 - y * y : (y > 0.0 ? 1.0 : 0.0);
}

}  // namespace

ForwardCache forward(const Mlp& net, std::span<const double> input) {
  if (input.size() != net.input_size()) {
    throw std::invalid_argument("forward: input has " + std::to_string(input.size()) +
                                " values, network expects " + std::to_string(net.input_size()));
  }
  for (double x : input) {
    if (!std::isfinite(x)) throw NumericError("forward: non-finite input");
  }

  ForwardCache cache;
  cache.net = &net;
  cache.revision = net.revision();
  cache.values.reserve(net.layers().size() + 1);
  cache.values.emplace_back(input.begin(), input.end());

  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& layer = layers[k];
    const auto& x = cache.values.back();
    std::vector<double> y(layer.outputs);
    const bool hidden = k + 1 < layers.size();
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* row = layer.weights.data() + o * layer.inputs;
      double acc = 0.0;
      for (std::size_t i = 0; i < layer.inputs; ++i) acc += row[i] * x[i];
      acc += layer.bias[o];
      y[o] = hidden ? activate(net.activation(), acc) : acc;
    }
    cache.values.push_back(std::move(y));
  }
  return cache;
}

std::vector<double> predict(const Mlp& net, std::span<const double> input) {
  return std::move(forward(net, input).values.back());
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  g.layers.reserve(net.layers().size());
  for (const auto& l : net.layers()) {
    DenseLayer z;
    z.inputs = l.inputs;
    z.outputs = l.outputs;
    z.weights.assign(l.weights.size(), 0.0);
    z.bias.assign(l.bias.size(), 0.0);
    g.layers.push_back(std::move(z));
  }
  return g;
}

void Gradients::add(const Gradients& other, double scale) {
  if (other.layers.size() != layers.size()) throw std::invalid_argument("Gradients::add: shape");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& a = layers[k];
    const auto& b = other.layers[k];
    if (a.weights.size() != b.weights.size() || a.bias.size() != b.bias.size()) {
      throw std::invalid_argument("Gradients::add: shape");
    }
    for (std::size_t i = 0; i < a.weights.size(); ++i) a.weights[i] += scale * b.weights[i];
    for (std::size_t i = 0; i < a.bias.size(); ++i) a.bias[i] += scale * b.bias[i];
  }
}

void Gradients::scale(double factor) {
  for (auto& l : layers) {
    for (auto& w : l.weights) w *= factor;
    for (auto& b : l.bias) b *= factor;
  }
}

double Gradients::norm() const {
  double sq = 0.0;
  for (const auto& l : layers) {
    for (double w : l.weights) sq += w * w;
    for (double b : l.bias) sq += b * b;
  }
  return std::sqrt(sq);
}

bool Gradients::all_finite() const {
  for (const auto& l : layers) {
    for (double w : l.weights)
      if (!std::isfinite(w)) return false;
    for (double b : l.bias)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

std::vector<double> Gradients::flatten() const {
  std::vector<double> out;
  for (const auto& l : layers) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void backward_accumulate(const Mlp& net, const ForwardCache& cache,
                         std::span<const double> output_grad, Gradients& into) {
  if (cache.net != &net || cache.revision != net.revision() ||
      cache.values.size() != net.layers().size() + 1) {
    throw std::invalid_argument("backward: cache does not match the network");
  }
  if (output_grad.size() != net.output_size()) {
    throw std::invalid_argument("backward: output gradient has wrong size");
  }
  if (into.layers.size() != net.layers().size()) {
    throw std::invalid_argument("backward: gradient accumulator has wrong shape");
  }

  const auto& layers = net.layers();
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  for (std::size_t k = layers.size(); k-- > 0;) {
    const auto& layer = layers[k];
    auto& g = into.layers[k];
    const auto& x = cache.values[k];
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      double* grow = g.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) grow[i] += d * x[i];
      g.bias[o] += d;
    }
    if (k == 0) break;
    std::vector<double> prev(layer.inputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = layer.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) prev[i] += row[i] * d;
    }
    for (std::size_t i = 0; i < layer.inputs; ++i) {
      prev[i] *= activate_grad(net.activation(), x[i]);
    }
    delta = std::move(prev);
  }
}

Gradients backward(const Mlp& net, const ForwardCache& cache,
                   std::span<const double> output_grad) {
  Gradients g = Gradients::zeros_like(net);
  backward_accumulate(net, cache, output_grad, g);
  return g;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("log_softmax: empty logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - m);
  const double log_z = m + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

CategoricalSample softmax_sample(std::span<const double> logits, Rng& rng) {
  for (double l : logits) {
    if (!std::isfinite(l)) throw NumericError("softmax_sample: non-finite logit");
  }
  CategoricalSample s;
  s.probs = softmax(logits);
  const double u = rng.uniform();
  double cum = 0.0;
  s.index = s.probs.size() - 1;
  for (std::size_t i = 0; i < s.probs.size(); ++i) {
    cum += s.probs[i];
    if (u < cum) {
      s.index = i;
      break;
    }
  }
  // Rounding can leave cum slightly below 1; never return a zero-mass index.
  while (s.probs[s.index] == 0.0 && s.index > 0) --s.index;
  s.log_prob = log_softmax(logits)[s.index];
  return s;
}

UpdateResult apply_update(Mlp& net, const Gradients& grads, OptimizerState& state,
                          const OptimizerConfig& config, double lr, UpdateDirection direction) {
  if (!(lr > 0.0)) throw std::invalid_argument("apply_update: learning rate must be positive");
  const auto& layers = net.layers();
  if (grads.layers.size() != layers.size()) {
    throw std::invalid_argument("apply_update: gradient shape mismatch");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (grads.layers[k].weights.size() != layers[k].weights.size() ||
        grads.layers[k].bias.size() != layers[k].bias.size()) {
      throw std::invalid_argument("apply_update: gradient shape mismatch");
    }
  }

  UpdateResult result;
  result.grad_norm = grads.norm();
  if (!grads.all_finite() || !std::isfinite(result.grad_norm)) return result;

  double scale = 1.0;
  if (config.clip_norm > 0.0 && result.grad_norm > config.clip_norm) {
    scale = config.clip_norm / result.grad_norm;
  }
  if (!state.initialized && config.kind != OptimizerKind::sgd) {
    state.buffer = Gradients::zeros_like(net);
    state.initialized = true;
  }

  const double sign = direction == UpdateDirection::ascent ? 1.0 : -1.0;
  auto& params = net.mutable_layers();
  const auto step = [&](double& param, double g, double& buf) {
    g *= scale;
    double s = g;
    switch (config.kind) {
      case OptimizerKind::sgd: break;
      case OptimizerKind::momentum:
        buf = config.momentum * buf + g;
        s = buf;
        break;
      case OptimizerKind::rmsprop:
        buf = config.rms_decay * buf + (1.0 - config.rms_decay) * g * g;
        s = g / (std::sqrt(buf) + config.epsilon);
        break;
    }
    param += sign * lr * s;
  };

  double unused = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    const auto& g = grads.layers[k];
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      step(p.weights[i], g.weights[i],
           state.initialized ? state.buffer.layers[k].weights[i] : unused);
    }
    for (std::size_t i = 0; i < p.bias.size(); ++i) {
      step(p.bias[i], g.bias[i], state.initialized ? state.buffer.layers[k].bias[i] : unused);
    }
  }
  result.applied = true;
  return result;
}

Mlp insert_zero_inputs(const Mlp& net, std::size_t position, std::size_t count) {
  if (position > net.input_size()) throw std::invalid_argument("insert_zero_inputs: bad position");
  auto sizes = net.layer_sizes();
  sizes.front() += count;
  Mlp out(sizes, net.activation());
  auto& dst = out.mutable_layers();
  const auto& src = net.layers();
  for (std::size_t k = 1; k < src.size(); ++k) dst[k] = src[k];
  const auto& s0 = src[0];
  auto& d0 = dst[0];
  for (std::size_t o = 0; o < s0.outputs; ++o) {
    for (std::size_t i = 0; i < s0.inputs; ++i) {
      d0.w(o, i < position ? i : i + count) = s0.w(o, i);
    }
  }
  d0.bias = s0.bias;
  return out;
}

std::string serialize(const Mlp& net) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["layer_sizes"] = net.layer_sizes();
  j["activation"] = std::string(to_string(net.activation()));
  auto layers = nlohmann::json::array();
  for (const auto& l : net.layers()) {
    layers.push_back({{"weights", l.weights}, {"bias", l.bias}});
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

Mlp deserialize(std::string_view text) {
  const auto fail = [](const std::string& msg) -> Mlp { throw ParseError("model", 0, msg); };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    return fail(std::string("malformed model file: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("format_version")) return fail("missing format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      return fail("unsupported model format version " + std::to_string(version));
    }
    const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    const auto activation = parse_activation(j.at("activation").get<std::string>());
    Mlp net(sizes, activation);
    const auto& layers = j.at("layers");
    if (!layers.is_array() || layers.size() != net.layers().size()) {
      return fail("layer count does not match layer_sizes");
    }
    auto& dst = net.mutable_layers();
    for (std::size_t k = 0; k < dst.size(); ++k) {
      auto w = layers[k].at("weights").get<std::vector<double>>();
      auto b = layers[k].at("bias").get<std::vector<double>>();
      if (w.size() != dst[k].weights.size() || b.size() != dst[k].bias.size()) {
        return fail("parameter count does not match layer_sizes");
      }
      dst[k].weights = std::move(w);
      dst[k].bias = std::move(b);
    }
    if (!net.all_finite()) return fail("non-finite parameter");
    return net;
  } catch (const nlohmann::json::exception& e) {
    return fail(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return fail(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const Mlp& net, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize(net) << '\n';
}

Mlp load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open model file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

}  // namespace sentarl
