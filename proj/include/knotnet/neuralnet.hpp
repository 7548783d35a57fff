#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotnet/rng.hpp"

namespace knotnet::nn {

struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Activation { Identity, ReLU, Tanh, Sigmoid, Softmax };
enum class Loss { MeanSquared, CrossEntropy };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);
std::string to_string(Loss loss);
Loss loss_from_string(const std::string& name);

// Row-major dense matrix, sized rows x cols.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(c)];
  }
  double at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(c)];
  }
  bool operator==(const Matrix&) const = default;
};

// Layer sizes n_0..n_q plus one activation per non-input layer and one
// dropout rate per hidden layer.
struct NetworkSpec {
  std::vector<int> layer_sizes;
  std::vector<Activation> activations;
  std::vector<double> dropout_rates;

  int depth() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  void validate() const;  // throws InvalidSpec
  bool operator==(const NetworkSpec&) const = default;
};

// Convenience builder: hidden layers all ReLU with a shared dropout rate.
NetworkSpec make_spec(int input_dim, const std::vector<int>& hidden,
                      int output_dim, Activation hidden_activation,
                      Activation output_activation, double dropout_rate);

struct NetworkParams {
  std::vector<Matrix> weights;            // weights[j]: n_{j+1} x n_j
  std::vector<std::vector<double>> biases;

  bool operator==(const NetworkParams&) const = default;
};

// He initialization for ReLU layers, Glorot uniform otherwise; biases zero.
NetworkParams init_network(const NetworkSpec& spec, std::uint64_t seed);

enum class Mode { Train, Infer };

// Everything backward needs: pre-activations, activations (index 0 is the
// input), and the scaled dropout masks used on each hidden layer.
struct ForwardCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
  std::vector<std::vector<double>> masks;

  const std::vector<double>& output() const { return act.back(); }
};

// Single-sample forward pass. In Train mode inverted dropout draws masks
// from `mask_rng` and scales kept units by 1/(1-rate); in Infer mode masks
// are skipped entirely.
ForwardCache forward(const NetworkSpec& spec, const NetworkParams& params,
                     std::span<const double> input, Mode mode,
                     rng::Engine* mask_rng = nullptr);

std::vector<double> infer(const NetworkSpec& spec, const NetworkParams& params,
                          std::span<const double> input);

// Squared-error summed over components: ||pred - target||^2.
double loss_mean_squared(std::span<const double> pred,
                         std::span<const double> target);
// Cross entropy: -sum target_j ln pred_j for multi-class outputs; for a
// single sigmoid output the binary form -[y ln p + (1-y) ln(1-p)].
// Predictions are clamped to [1e-12, 1 - 1e-12] before taking logs.
double loss_cross_entropy(std::span<const double> pred,
                          std::span<const double> target);
double loss_value(Loss loss, std::span<const double> pred,
                  std::span<const double> target);

// Batch forms: the sum of per-sample losses.
double loss_value(Loss loss, const std::vector<std::vector<double>>& pred,
                  const std::vector<std::vector<double>>& target);

using Gradients = NetworkParams;

Gradients zero_gradients(const NetworkSpec& spec);

// Backpropagation for one sample; accumulates into `grads`. Softmax with
// cross entropy and sigmoid with binary cross entropy use the fused
// prediction-minus-target output delta; other pairings go through the
// activation derivative (including the full softmax Jacobian).
void backward(const NetworkSpec& spec, const NetworkParams& params,
              const ForwardCache& cache, std::span<const double> target,
              Loss loss, Gradients& grads);

struct TrainConfig {
  int epochs = 1;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Loss loss = Loss::MeanSquared;
  std::uint64_t seed = 0;

  bool operator==(const TrainConfig&) const = default;
};

struct AdamState {
  Gradients m;
  Gradients v;
  long long step = 0;
};

AdamState init_adam(const NetworkSpec& spec);

// One Adam update from summed batch gradients:
// theta -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config);

struct EpochStats {
  double mean_loss = 0.0;
  std::optional<double> accuracy;  // classification specs only
};

using TrainHistory = std::vector<EpochStats>;

// Mini-batch training with Adam. Shuffling, dropout masks, and update order
// are all driven by config.seed, so the history is reproducible bit for bit.
TrainHistory train(const NetworkSpec& spec, NetworkParams& params,
                   const std::vector<std::vector<double>>& inputs,
                   const std::vector<std::vector<double>>& targets,
                   const TrainConfig& config);

// Decision rule for sigmoid outputs. The boundary value itself counts as a
// positive.
bool classify(double probability, double cutoff = 0.5);

// Nearest integer with exact halves rounded toward +infinity.
long long round_half_up(double x);

// Compares every analytic gradient of a randomly initialized network against
// a central finite difference (step h). Returns the largest relative error
// |a - n| / max(|a|, |n|, 1e-2).
double gradient_check(const NetworkSpec& spec, Loss loss, std::uint64_t seed,
                      double h = 1e-5);

}  // namespace knotnet::nn
