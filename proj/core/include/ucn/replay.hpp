#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <vector>

namespace ucn {

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

struct DiscreteTransition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

/// Bounded FIFO experience store. Push/sample are serialized so parallel
/// workers can append while one trainer samples.
template <class T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    ring_.reserve(capacity);
  }

  void push(T t) {
    std::lock_guard lock(mu_);
    if (ring_.size() < capacity_) {
      ring_.push_back(std::move(t));
    } else {
      ring_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
    ++pushes_;
  }

  /// Uniform sample with replacement; nullopt while size < batch.
  std::optional<std::vector<T>> sample(std::size_t batch,
                                       std::mt19937_64& rng) const {
    std::lock_guard lock(mu_);
    if (ring_.size() < batch) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, ring_.size() - 1);
    std::vector<T> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(ring_[pick(rng)]);
    return out;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return ring_.size();
  }

  std::size_t capacity() const { return capacity_; }

  uint64_t total_pushed() const {
    std::lock_guard lock(mu_);
    return pushes_;
  }

  /// Contents oldest-first (the newest `capacity` items, in insertion order).
  std::vector<T> snapshot() const {
    std::lock_guard lock(mu_);
    std::vector<T> out;
    out.reserve(ring_.size());
    std::size_t start = ring_.size() < capacity_ ? 0 : next_;
    for (std::size_t i = 0; i < ring_.size(); ++i)
      out.push_back(ring_[(start + i) % ring_.size()]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::vector<T> ring_;
  std::size_t next_ = 0;
  uint64_t pushes_ = 0;
  mutable std::mutex mu_;
};

}  // namespace ucn
