#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentarl/random.hpp"

namespace sentarl {

enum class Activation { tanh, relu };

std::string_view to_string(Activation activation);
Activation parse_activation(std::string_view name);

/// Fully connected layer. `weights` is row-major, outputs x inputs.
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double& w(std::size_t out, std::size_t in) { return weights[out * inputs + in]; }
  double w(std::size_t out, std::size_t in) const { return weights[out * inputs + in]; }
};

/// Feed-forward network with a shared hidden activation and a linear output.
class Mlp {
 public:
  Mlp() = default;

  /// All parameters zero. Needs at least two layer sizes, all positive.
  explicit Mlp(std::vector<std::size_t> layer_sizes, Activation hidden = Activation::tanh);

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static Mlp glorot(std::vector<std::size_t> layer_sizes, Activation hidden, Rng& rng);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t input_size() const noexcept { return sizes_.empty() ? 0 : sizes_.front(); }
  std::size_t output_size() const noexcept { return sizes_.empty() ? 0 : sizes_.back(); }
  Activation activation() const noexcept { return activation_; }

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  /// Mutable access bumps revision(), invalidating outstanding caches.
  std::vector<DenseLayer>& mutable_layers() noexcept;

  std::size_t parameter_count() const noexcept;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);
  bool all_finite() const noexcept;

  std::uint64_t revision() const noexcept { return revision_; }

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  std::vector<std::size_t> sizes_;
  Activation activation_ = Activation::tanh;
  std::vector<DenseLayer> layers_;
  std::uint64_t revision_ = 0;
};

/// Intermediates of one forward pass. values[0] is the input, values[k] the
/// post-activation output of layer k; the last entry is the network output.
struct ForwardCache {
  const Mlp* net = nullptr;
  std::uint64_t revision = 0;
  std::vector<std::vector<double>> values;

  const std::vector<double>& output() const { return values.back(); }
};

/// Throws std::invalid_argument on a dimension mismatch and NumericError for
/// non-finite input.
ForwardCache forward(const Mlp& net, std::span<const double> input);
std::vector<double> predict(const Mlp& net, std::span<const double> input);

/// Per-parameter partials, shaped like the owning network.
struct Gradients {
  std::vector<DenseLayer> layers;

  static Gradients zeros_like(const Mlp& net);

  void add(const Gradients& other, double scale = 1.0);
  void scale(double factor);
  double norm() const;
  bool all_finite() const;
  std::vector<double> flatten() const;
};

/// Gradients of a scalar loss given d loss / d output. Throws
/// std::invalid_argument when the cache does not belong to the current
/// parameters of `net`.
Gradients backward(const Mlp& net, const ForwardCache& cache,
                   std::span<const double> output_grad);

/// Same as backward() but adds into an existing accumulator.
void backward_accumulate(const Mlp& net, const ForwardCache& cache,
                         std::span<const double> output_grad, Gradients& into);

std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

struct CategoricalSample {
  std::size_t index = 0;
  double log_prob = 0.0;
  std::vector<double> probs;
};

/// Draws from softmax(logits). Throws NumericError for non-finite logits.
CategoricalSample softmax_sample(std::span<const double> logits, Rng& rng);

enum class OptimizerKind { sgd, momentum, rmsprop };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::sgd;
  double momentum = 0.9;
  double rms_decay = 0.99;
  double epsilon = 1e-5;
  double clip_norm = 0.0;  ///< global gradient-norm clip; 0 disables
};

/// Per-network optimizer buffers; lazily sized on first use.
struct OptimizerState {
  Gradients buffer;
  bool initialized = false;
};

enum class UpdateDirection { descent, ascent };

struct UpdateResult {
  bool applied = false;
  double grad_norm = 0.0;
};

/// Moves parameters by lr times the (clipped, optimizer-transformed)
/// gradient. Non-finite gradients leave the network untouched and return
/// applied = false. Throws std::invalid_argument on a shape mismatch.
UpdateResult apply_update(Mlp& net, const Gradients& grads, OptimizerState& state,
                          const OptimizerConfig& config, double lr,
                          UpdateDirection direction = UpdateDirection::descent);

/// Copy of `net` with `count` extra inputs inserted before input `position`,
/// all wired with zero weights. The output is unchanged for any input.
Mlp insert_zero_inputs(const Mlp& net, std::size_t position, std::size_t count);

inline constexpr int kModelFormatVersion = 1;

/// JSON container `{format_version, layer_sizes, activation, layers: [{weights, bias}]}`.
/// Doubles are written in shortest round-trip form.
std::string serialize(const Mlp& net);
/// Throws ParseError for malformed or truncated input and version mismatches.
Mlp deserialize(std::string_view text);

void save_model(const Mlp& net, const std::filesystem::path& path);
Mlp load_model(const std::filesystem::path& path);

}  // namespace sentarl
