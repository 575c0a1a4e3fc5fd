#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ucn {

enum class OutputActivation : uint8_t { Identity, Tanh };

/// Fully-connected network with ReLU hidden layers, flat parameter storage
/// (per layer: row-major weights, then biases).
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, OutputActivation out_act);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  OutputActivation output_activation() const { return out_act_; }

  std::size_t param_count() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  /// Uniform fan-in init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)); zero biases.
  void init_uniform_fanin(uint64_t seed);

  /// Cached activations for one sample.
  struct Tape {
    std::vector<std::vector<double>> act;  // act[0] = input, act[L] = output
    std::vector<std::vector<double>> pre;  // pre-activations, per layer
  };

  void forward(std::span<const double> x, Tape& tape) const;
  std::vector<double> forward(std::span<const double> x) const;

  /// Reverse-mode gradients for one sample; accumulates into param_grad
  /// (size param_count). Writes d(out·upstream)/dx into input_grad when
  /// non-empty.
  void backward(const Tape& tape, std::span<const double> upstream,
                std::span<double> param_grad,
                std::span<double> input_grad = {}) const;

  bool same_architecture(const Mlp& o) const {
    return sizes_ == o.sizes_ && out_act_ == o.out_act_;
  }

 private:
  std::vector<int> sizes_;
  OutputActivation out_act_ = OutputActivation::Identity;
  std::vector<double> params_;
  std::vector<std::size_t> layer_offset_;  // into params_, per layer

  double* weights(int layer) { return params_.data() + layer_offset_[layer]; }
  const double* weights(int layer) const {
    return params_.data() + layer_offset_[layer];
  }
  const double* biases(int layer) const {
    return params_.data() + layer_offset_[layer] +
           static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1];
  }
};

/// Adaptive-moment optimizer state for one parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double lr) : lr(lr), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grads);

  long step_count() const { return steps_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }
  std::span<double> first_moment() { return m_; }
  std::span<double> second_moment() { return v_; }
  void set_step_count(long s) { steps_ = s; }

  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

 private:
  long steps_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

/// target <- tau * online + (1 - tau) * target, elementwise.
/// Throws std::invalid_argument on architecture mismatch.
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace ucn
