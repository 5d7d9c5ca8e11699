#pragma once

#include <cstddef>
#include <vector>

#include "malltwin/random.hpp"

namespace malltwin::dqn {

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

  // i-th oldest entry still held.
  const Transition& at(std::size_t i) const;

  // `batch` distinct indices (into at()), uniformly chosen. Requires batch <= size().
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

private:
  std::size_t capacity_;
  std::vector<Transition> entries_;
  std::size_t head_ = 0;  // slot of the oldest entry once full
};

}  // namespace malltwin::dqn
