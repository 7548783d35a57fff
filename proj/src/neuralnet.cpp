#include "knotnet/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace knotnet::nn {

namespace {

constexpr double kLogClamp = 1e-12;

double clamp_probability(double p) {
  return std::min(std::max(p, kLogClamp), 1.0 - kLogClamp);
}

void apply_activation(Activation a, std::vector<double>& v) {
  switch (a) {
    case Activation::Identity:
      return;
    case Activation::ReLU:
      for (double& x : v) x = x > 0.0 ? x : 0.0;
      return;
    case Activation::Tanh:
      for (double& x : v) x = std::tanh(x);
      return;
    case Activation::Sigmoid:
      for (double& x : v) x = 1.0 / (1.0 + std::exp(-x));
      return;
    case Activation::Softmax: {
      const double peak = *std::max_element(v.begin(), v.end());
      double sum = 0.0;
      for (double& x : v) {
        x = std::exp(x - peak);
        sum += x;
      }
      for (double& x : v) x /= sum;
      return;
    }
  }
}

// Derivative of the activation at pre-activation z (element-wise cases only;
// softmax is handled by its Jacobian in backward).
double activation_derivative(Activation a, double z) {
  switch (a) {
    case Activation::Identity:
      return 1.0;
    case Activation::ReLU:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::Softmax:
      throw InvalidSpec("softmax has no element-wise derivative");
  }
  return 0.0;
}

// Valid loss/output pairings for cross entropy: multi-class softmax or a
// single sigmoid unit (binary form).
void check_loss_pairing(const NetworkSpec& spec, Loss loss) {
  if (loss != Loss::CrossEntropy) return;
  const Activation out = spec.activations.back();
  if (out == Activation::Softmax) return;
  if (out == Activation::Sigmoid && spec.output_dim() == 1) return;
  throw InvalidSpec(
      "cross entropy requires a softmax output or a single sigmoid unit");
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::ReLU: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::ReLU;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "softmax") return Activation::Softmax;
  throw InvalidSpec("unknown activation: " + name);
}

std::string to_string(Loss loss) {
  return loss == Loss::MeanSquared ? "mean_squared" : "cross_entropy";
}

Loss loss_from_string(const std::string& name) {
  if (name == "mean_squared") return Loss::MeanSquared;
  if (name == "cross_entropy") return Loss::CrossEntropy;
  throw InvalidSpec("unknown loss: " + name);
}

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw InvalidSpec("a network needs at least an input and an output layer");
  }
  for (int n : layer_sizes) {
    if (n <= 0) throw InvalidSpec("layer sizes must be positive");
  }
  if (activations.size() != static_cast<std::size_t>(depth())) {
    throw InvalidSpec("expected one activation per non-input layer");
  }
  if (dropout_rates.size() != static_cast<std::size_t>(depth() - 1)) {
    throw InvalidSpec("expected one dropout rate per hidden layer");
  }
  for (double r : dropout_rates) {
    if (r < 0.0 || r >= 1.0) {
      throw InvalidSpec("dropout rates must lie in [0, 1)");
    }
  }
  for (std::size_t j = 0; j + 1 < activations.size(); ++j) {
    if (activations[j] == Activation::Softmax) {
      throw InvalidSpec("softmax is only valid on the output layer");
    }
  }
  if (activations.back() == Activation::Softmax && output_dim() < 2) {
    throw InvalidSpec("softmax output needs at least two units");
  }
}

NetworkSpec make_spec(int input_dim, const std::vector<int>& hidden,
                      int output_dim, Activation hidden_activation,
                      Activation output_activation, double dropout_rate) {
  NetworkSpec spec;
  spec.layer_sizes.push_back(input_dim);
  for (int h : hidden) spec.layer_sizes.push_back(h);
  spec.layer_sizes.push_back(output_dim);
  spec.activations.assign(hidden.size(), hidden_activation);
  spec.activations.push_back(output_activation);
  spec.dropout_rates.assign(hidden.size(), dropout_rate);
  spec.validate();
  return spec;
}

NetworkParams init_network(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  NetworkParams params;
  for (int j = 0; j < spec.depth(); ++j) {
    const int fan_in = spec.layer_sizes[static_cast<std::size_t>(j)];
    const int fan_out = spec.layer_sizes[static_cast<std::size_t>(j) + 1];
    rng::Engine eng(rng::derive_seed(seed, static_cast<std::uint64_t>(j)));
    Matrix w(fan_out, fan_in);
    if (spec.activations[static_cast<std::size_t>(j)] == Activation::ReLU) {
      const double scale = std::sqrt(2.0 / fan_in);
      for (double& x : w.data) x = scale * eng.normal();
    } else {
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& x : w.data) x = limit * (2.0 * eng.real01() - 1.0);
    }
    params.weights.push_back(std::move(w));
    params.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return params;
}

ForwardCache forward(const NetworkSpec& spec, const NetworkParams& params,
                     std::span<const double> input, Mode mode,
                     rng::Engine* mask_rng) {
  if (static_cast<int>(input.size()) != spec.input_dim()) {
    throw ShapeMismatch("input has " + std::to_string(input.size()) +
                        " values, spec expects " +
                        std::to_string(spec.input_dim()));
  }
  ForwardCache cache;
  cache.act.emplace_back(input.begin(), input.end());
  cache.masks.resize(static_cast<std::size_t>(std::max(spec.depth() - 1, 0)));
  for (int j = 0; j < spec.depth(); ++j) {
    const Matrix& w = params.weights[static_cast<std::size_t>(j)];
    const std::vector<double>& b = params.biases[static_cast<std::size_t>(j)];
    const std::vector<double>& prev = cache.act.back();
    std::vector<double> z(static_cast<std::size_t>(w.rows));
    for (int r = 0; r < w.rows; ++r) {
      const double* row = w.data.data() +
                          static_cast<std::size_t>(r) *
                              static_cast<std::size_t>(w.cols);
      double acc = b[static_cast<std::size_t>(r)];
      for (int c = 0; c < w.cols; ++c) {
        acc += row[c] * prev[static_cast<std::size_t>(c)];
      }
      z[static_cast<std::size_t>(r)] = acc;
    }
    cache.pre.push_back(z);
    apply_activation(spec.activations[static_cast<std::size_t>(j)], z);
    const bool hidden = j + 1 < spec.depth();
    if (hidden && mode == Mode::Train) {
      const double rate = spec.dropout_rates[static_cast<std::size_t>(j)];
      if (rate > 0.0) {
        if (mask_rng == nullptr) {
          throw std::invalid_argument(
              "training-mode dropout needs a mask generator");
        }
        std::vector<double> mask(z.size());
        const double scale = 1.0 / (1.0 - rate);
        for (std::size_t i = 0; i < z.size(); ++i) {
          mask[i] = mask_rng->real01() < rate ? 0.0 : scale;
          z[i] *= mask[i];
        }
        cache.masks[static_cast<std::size_t>(j)] = std::move(mask);
      }
    }
    cache.act.push_back(std::move(z));
  }
  return cache;
}

std::vector<double> infer(const NetworkSpec& spec, const NetworkParams& params,
                          std::span<const double> input) {
  return forward(spec, params, input, Mode::Infer).output();
}

double loss_mean_squared(std::span<const double> pred,
                         std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw ShapeMismatch("prediction/target size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sum += d * d;
  }
  return sum;
}

double loss_cross_entropy(std::span<const double> pred,
                          std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw ShapeMismatch("prediction/target size mismatch");
  }
  if (pred.size() == 1) {
    const double p = clamp_probability(pred[0]);
    const double y = target[0];
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum -= target[i] * std::log(clamp_probability(pred[i]));
  }
  return sum;
}

double loss_value(Loss loss, std::span<const double> pred,
                  std::span<const double> target) {
  return loss == Loss::MeanSquared ? loss_mean_squared(pred, target)
                                   : loss_cross_entropy(pred, target);
}

double loss_value(Loss loss, const std::vector<std::vector<double>>& pred,
                  const std::vector<std::vector<double>>& target) {
  if (pred.size() != target.size()) {
    throw ShapeMismatch("prediction/target batch size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += loss_value(loss, pred[i], target[i]);
  }
  return sum;
}

Gradients zero_gradients(const NetworkSpec& spec) {
  Gradients g;
  for (int j = 0; j < spec.depth(); ++j) {
    g.weights.emplace_back(spec.layer_sizes[static_cast<std::size_t>(j) + 1],
                           spec.layer_sizes[static_cast<std::size_t>(j)]);
    g.biases.emplace_back(
        static_cast<std::size_t>(
            spec.layer_sizes[static_cast<std::size_t>(j) + 1]),
        0.0);
  }
  return g;
}

void backward(const NetworkSpec& spec, const NetworkParams& params,
              const ForwardCache& cache, std::span<const double> target,
              Loss loss, Gradients& grads) {
  check_loss_pairing(spec, loss);
  const int q = spec.depth();
  const std::vector<double>& pred = cache.output();
  if (pred.size() != target.size()) {
    throw ShapeMismatch("target size does not match network output");
  }

  // delta for the output layer
  std::vector<double> delta(pred.size());
  const Activation out_act = spec.activations.back();
  if (loss == Loss::CrossEntropy) {
    // fused softmax/sigmoid + cross entropy
    for (std::size_t i = 0; i < pred.size(); ++i) {
      delta[i] = pred[i] - target[i];
    }
  } else if (out_act == Activation::Softmax) {
    // full softmax Jacobian against the squared-error gradient
    double mixed = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      mixed += 2.0 * (pred[i] - target[i]) * pred[i];
    }
    for (std::size_t i = 0; i < pred.size(); ++i) {
      delta[i] = pred[i] * (2.0 * (pred[i] - target[i]) - mixed);
    }
  } else {
    const std::vector<double>& z = cache.pre.back();
    for (std::size_t i = 0; i < pred.size(); ++i) {
      delta[i] = 2.0 * (pred[i] - target[i]) *
                 activation_derivative(out_act, z[i]);
    }
  }

  for (int j = q - 1; j >= 0; --j) {
    Matrix& dw = grads.weights[static_cast<std::size_t>(j)];
    std::vector<double>& db = grads.biases[static_cast<std::size_t>(j)];
    const std::vector<double>& prev = cache.act[static_cast<std::size_t>(j)];
    for (int r = 0; r < dw.rows; ++r) {
      const double d = delta[static_cast<std::size_t>(r)];
      db[static_cast<std::size_t>(r)] += d;
      double* row = dw.data.data() +
                    static_cast<std::size_t>(r) *
                        static_cast<std::size_t>(dw.cols);
      for (int c = 0; c < dw.cols; ++c) {
        row[c] += d * prev[static_cast<std::size_t>(c)];
      }
    }
    if (j == 0) break;

    const Matrix& w = params.weights[static_cast<std::size_t>(j)];
    std::vector<double> upstream(static_cast<std::size_t>(w.cols), 0.0);
    for (int r = 0; r < w.rows; ++r) {
      const double d = delta[static_cast<std::size_t>(r)];
      const double* row = w.data.data() +
                          static_cast<std::size_t>(r) *
                              static_cast<std::size_t>(w.cols);
      for (int c = 0; c < w.cols; ++c) {
        upstream[static_cast<std::size_t>(c)] += d * row[c];
      }
    }
    const std::vector<double>& mask =
        cache.masks[static_cast<std::size_t>(j - 1)];
    if (!mask.empty()) {
      for (std::size_t i = 0; i < upstream.size(); ++i) {
        upstream[i] *= mask[i];
      }
    }
    const std::vector<double>& z = cache.pre[static_cast<std::size_t>(j - 1)];
    const Activation act = spec.activations[static_cast<std::size_t>(j - 1)];
    delta.assign(upstream.size(), 0.0);
    for (std::size_t i = 0; i < upstream.size(); ++i) {
      delta[i] = upstream[i] * activation_derivative(act, z[i]);
    }
  }
}

AdamState init_adam(const NetworkSpec& spec) {
  return {zero_gradients(spec), zero_gradients(spec), 0};
}

namespace {

void adam_update(std::span<double> theta, std::span<const double> g,
                 std::span<double> m, std::span<double> v,
                 const TrainConfig& cfg, double bias1, double bias2) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bias1;
    const double v_hat = v[i] / bias2;
    theta[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

}  // namespace

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
  ++state.step;
  const double bias1 = 1.0 - std::pow(config.beta1, state.step);
  const double bias2 = 1.0 - std::pow(config.beta2, state.step);
  for (std::size_t j = 0; j < params.weights.size(); ++j) {
    adam_update(params.weights[j].data, grads.weights[j].data,
                state.m.weights[j].data, state.v.weights[j].data, config,
                bias1, bias2);
    adam_update(params.biases[j], grads.biases[j], state.m.biases[j],
                state.v.biases[j], config, bias1, bias2);
  }
}

TrainHistory train(const NetworkSpec& spec, NetworkParams& params,
                   const std::vector<std::vector<double>>& inputs,
                   const std::vector<std::vector<double>>& targets,
                   const TrainConfig& config) {
  spec.validate();
  check_loss_pairing(spec, config.loss);
  if (inputs.empty() || inputs.size() != targets.size()) {
    throw ShapeMismatch("training needs matching nonempty input/target sets");
  }
  if (config.batch_size <= 0 || config.epochs < 0) {
    throw std::invalid_argument("batch size must be positive, epochs >= 0");
  }

  rng::Engine shuffle_rng(rng::derive_seed(config.seed, 1));
  rng::Engine dropout_rng(rng::derive_seed(config.seed, 2));
  AdamState state = init_adam(spec);
  Gradients grads = zero_gradients(spec);
  const std::size_t n = inputs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  const bool track_accuracy = config.loss == Loss::CrossEntropy;
  TrainHistory history;
  history.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(n, start + static_cast<std::size_t>(config.batch_size));
      for (Matrix& m : grads.weights) {
        std::fill(m.data.begin(), m.data.end(), 0.0);
      }
      for (auto& b : grads.biases) std::fill(b.begin(), b.end(), 0.0);
      for (std::size_t i = start; i < stop; ++i) {
        const std::size_t idx = order[i];
        const ForwardCache cache =
            forward(spec, params, inputs[idx], Mode::Train, &dropout_rng);
        loss_sum += loss_value(config.loss, cache.output(), targets[idx]);
        if (track_accuracy) {
          const auto& pred = cache.output();
          const auto& want = targets[idx];
          bool hit;
          if (pred.size() == 1) {
            hit = classify(pred[0]) == (want[0] >= 0.5);
          } else {
            const auto arg = [](const std::vector<double>& v) {
              return std::distance(v.begin(),
                                   std::max_element(v.begin(), v.end()));
            };
            hit = arg(pred) == arg(want);
          }
          if (hit) ++correct;
        }
        backward(spec, params, cache, targets[idx], config.loss, grads);
      }
      adam_step(params, grads, state, config);
    }
    EpochStats stats;
    stats.mean_loss = loss_sum / static_cast<double>(n);
    if (track_accuracy) {
      stats.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    }
    history.push_back(stats);
  }
  return history;
}

bool classify(double probability, double cutoff) {
  return probability >= cutoff;
}

long long round_half_up(double x) {
  return static_cast<long long>(std::floor(x + 0.5));
}

double gradient_check(const NetworkSpec& spec, Loss loss, std::uint64_t seed,
                      double h) {
  spec.validate();
  check_loss_pairing(spec, loss);
  NetworkParams params = init_network(spec, rng::derive_seed(seed, 1));
  rng::Engine data_rng(rng::derive_seed(seed, 2));
  const std::uint64_t mask_seed = rng::derive_seed(seed, 3);

  std::vector<double> input(static_cast<std::size_t>(spec.input_dim()));
  for (double& x : input) x = data_rng.normal();
  std::vector<double> target(static_cast<std::size_t>(spec.output_dim()), 0.0);
  if (loss == Loss::CrossEntropy) {
    if (spec.activations.back() == Activation::Softmax) {
      target[data_rng.below(target.size())] = 1.0;
    } else {
      target[0] = data_rng.coin(0.5) ? 1.0 : 0.0;
    }
  } else {
    for (double& y : target) y = data_rng.normal();
  }

  // Re-seeding the mask generator per evaluation freezes the dropout masks,
  // so the loss is a deterministic function of the parameters.
  const auto evaluate = [&]() {
    rng::Engine mask_rng(mask_seed);
    const ForwardCache cache =
        forward(spec, params, input, Mode::Train, &mask_rng);
    return loss_value(loss, cache.output(), target);
  };

  Gradients analytic = zero_gradients(spec);
  {
    rng::Engine mask_rng(mask_seed);
    const ForwardCache cache =
        forward(spec, params, input, Mode::Train, &mask_rng);
    backward(spec, params, cache, target, loss, analytic);
  }

  double worst = 0.0;
  const auto probe = [&](double& theta, double analytic_grad) {
    const double saved = theta;
    theta = saved + h;
    const double up = evaluate();
    theta = saved - h;
    const double down = evaluate();
    theta = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double err = std::abs(analytic_grad - numeric) /
                       std::max({std::abs(analytic_grad), std::abs(numeric),
                                 1e-2});
    worst = std::max(worst, err);
  };
  for (std::size_t j = 0; j < params.weights.size(); ++j) {
    for (std::size_t i = 0; i < params.weights[j].data.size(); ++i) {
      probe(params.weights[j].data[i], analytic.weights[j].data[i]);
    }
    for (std::size_t i = 0; i < params.biases[j].size(); ++i) {
      probe(params.biases[j][i], analytic.biases[j][i]);
    }
  }
  return worst;
}

}  // namespace knotnet::nn
