#include "malltwin/dqn/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "malltwin/errors.hpp"

namespace malltwin::dqn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
  entries_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(t));
    return;
  }
  entries_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= entries_.size()) throw std::out_of_range("replay buffer index " + std::to_string(i) + " out of range");
  return entries_[(head_ + i) % entries_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
  const std::size_t n = entries_.size();
  if (batch > n) {
    throw ConfigError("cannot sample " + std::to_string(batch) + " transitions from a buffer of " + std::to_string(n));
  }
  // Floyd's algorithm: exactly `batch` distinct draws.
  std::vector<std::size_t> chosen;
  chosen.reserve(batch);
  for (std::size_t j = n - batch; j < n; ++j) {
    const std::size_t t = rng.below(j + 1);
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  return chosen;
}

}  // namespace malltwin::dqn
