#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace semiab {

// Recursive pairwise summation; the split points depend only on the length,
// so results are reproducible for a fixed input order.
template <class T>
T pairwise_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T acc = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Streaming pairwise accumulator: a binary counter of partial sums. Merging
// follows the insertion order only, so any partition of the stream into
// fixed blocks yields identical bits.
template <class T>
class PairwiseAccumulator {
 public:
  void add(T value) {
    std::size_t level = 0;
    while (level < slots_.size() && occupied_[level]) {
      value = slots_[level] + value;
      occupied_[level] = false;
      ++level;
    }
    if (level == slots_.size()) {
      slots_.push_back(value);
      occupied_.push_back(true);
    } else {
      slots_[level] = value;
      occupied_[level] = true;
    }
    ++count_;
  }

  T total() const {
    T acc{};
    bool first = true;
    for (std::size_t i = slots_.size(); i-- > 0;) {
      if (!occupied_[i]) continue;
      acc = first ? slots_[i] : acc + slots_[i];
      first = false;
    }
    return acc;
  }

  std::size_t count() const { return count_; }

 private:
  std::vector<T> slots_;
  std::vector<bool> occupied_;
  std::size_t count_ = 0;
};

}  // namespace semiab
