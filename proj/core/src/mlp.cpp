#include "ucn/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ucn/rng.hpp"

namespace ucn {

Mlp::Mlp(std::vector<int> layer_sizes, OutputActivation out_act)
    : sizes_(std::move(layer_sizes)), out_act_(out_act) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs >= 2 layers");
  for (int s : sizes_)
    if (s <= 0) throw std::invalid_argument("Mlp layer sizes must be > 0");
  std::size_t total = 0;
  layer_offset_.resize(sizes_.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layer_offset_[l] = total;
    total += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

void Mlp::init_uniform_fanin(uint64_t seed) {
  auto rng = make_rng(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    int in = sizes_[l], out = sizes_[l + 1];
    double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    double* w = params_.data() + layer_offset_[l];
    for (int i = 0; i < in * out; ++i) w[i] = u(rng);
    for (int i = 0; i < out; ++i) w[in * out + i] = 0.0;
  }
}

void Mlp::forward(std::span<const double> x, Tape& tape) const {
  if (static_cast<int>(x.size()) != input_size())
    throw std::invalid_argument("Mlp::forward: input size mismatch");
  const std::size_t layers = sizes_.size() - 1;
  tape.act.resize(layers + 1);
  tape.pre.resize(layers);
  tape.act[0].assign(x.begin(), x.end());

  for (std::size_t l = 0; l < layers; ++l) {
    int in = sizes_[l], out = sizes_[l + 1];
    const double* w = weights(static_cast<int>(l));
    const double* b = w + static_cast<std::size_t>(in) * out;
    auto& pre = tape.pre[l];
    auto& act = tape.act[l + 1];
    pre.assign(static_cast<std::size_t>(out), 0.0);
    act.assign(static_cast<std::size_t>(out), 0.0);
    const auto& prev = tape.act[l];
    for (int o = 0; o < out; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * in;
      double z = b[o];
      for (int i = 0; i < in; ++i) z += row[i] * prev[static_cast<std::size_t>(i)];
      pre[static_cast<std::size_t>(o)] = z;
      bool last = l + 1 == layers;
      if (!last) {
        act[static_cast<std::size_t>(o)] = z > 0.0 ? z : 0.0;
      } else if (out_act_ == OutputActivation::Tanh) {
        act[static_cast<std::size_t>(o)] = std::tanh(z);
      } else {
        act[static_cast<std::size_t>(o)] = z;
      }
    }
  }
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  Tape tape;
  forward(x, tape);
  return tape.act.back();
}

void Mlp::backward(const Tape& tape, std::span<const double> upstream,
                   std::span<double> param_grad,
                   std::span<double> input_grad) const {
  const std::size_t layers = sizes_.size() - 1;
  if (static_cast<int>(upstream.size()) != output_size())
    throw std::invalid_argument("Mlp::backward: upstream size mismatch");
  if (param_grad.size() != params_.size())
    throw std::invalid_argument("Mlp::backward: param_grad size mismatch");

  std::vector<double> delta(upstream.begin(), upstream.end());
  // output activation derivative
  if (out_act_ == OutputActivation::Tanh) {
    for (std::size_t o = 0; o < delta.size(); ++o) {
      double y = tape.act[layers][o];
      delta[o] *= 1.0 - y * y;
    }
  }

  std::vector<double> next_delta;
  for (std::size_t l = layers; l-- > 0;) {
    int in = sizes_[l], out = sizes_[l + 1];
    const double* w = weights(static_cast<int>(l));
    double* gw = param_grad.data() + layer_offset_[l];
    double* gb = gw + static_cast<std::size_t>(in) * out;
    const auto& prev = tape.act[l];

    for (int o = 0; o < out; ++o) {
      double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      double* grow = gw + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) grow[i] += d * prev[static_cast<std::size_t>(i)];
      gb[o] += d;
    }

    bool need_input = l > 0 || !input_grad.empty();
    if (!need_input) break;
    next_delta.assign(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) next_delta[static_cast<std::size_t>(i)] += d * row[i];
    }
    if (l > 0) {
      // ReLU gate of the previous hidden layer
      const auto& pre = tape.pre[l - 1];
      for (int i = 0; i < in; ++i)
        if (pre[static_cast<std::size_t>(i)] <= 0.0) next_delta[static_cast<std::size_t>(i)] = 0.0;
    }
    delta.swap(next_delta);
  }

  if (!input_grad.empty()) {
    if (static_cast<int>(input_grad.size()) != input_size())
      throw std::invalid_argument("Mlp::backward: input_grad size mismatch");
    for (std::size_t i = 0; i < input_grad.size(); ++i) input_grad[i] = delta[i];
  }
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("Adam::step: shape mismatch");
  ++steps_;
  double b1t = 1.0 - std::pow(beta1, static_cast<double>(steps_));
  double b2t = 1.0 - std::pow(beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double g = grads[i];
    m_[i] = beta1 * m_[i] + (1.0 - beta1) * g;
    v_[i] = beta2 * v_[i] + (1.0 - beta2) * g * g;
    double mhat = m_[i] / b1t;
    double vhat = v_[i] / b2t;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (!target.same_architecture(online))
    throw std::invalid_argument("soft_update: architecture mismatch");
  auto t = target.params();
  auto o = online.params();
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = tau * o[i] + (1.0 - tau) * t[i];
}

}  // namespace ucn
