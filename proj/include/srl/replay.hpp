#pragma once

#include "srl/types.hpp"

#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace srl {

/// Fixed-capacity FIFO store. Sampling draws without replacement within one
/// batch, in random order.
template <class T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  }

  void push(T item) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(item));
  }

  std::vector<const T*> sample(std::size_t batch_size, Rng& rng) const {
    if (batch_size == 0 || batch_size > items_.size())
      throw std::invalid_argument("cannot sample " + std::to_string(batch_size) + " items from a buffer holding " +
                                  std::to_string(items_.size()));
    std::vector<std::size_t> idx(items_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<const T*> out;
    out.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
      out.push_back(&items_[idx[i]]);
    }
    return out;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  const T& operator[](std::size_t i) const { return items_[i]; }
  void clear() { items_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<T> items_;
};

}  // namespace srl
