#ifndef DESCENT_SAMPLING_HPP
#define DESCENT_SAMPLING_HPP

#include "descent/core.hpp"
#include "descent/erm.hpp"

#include <numeric>
#include <vector>

namespace descent {

/// Gradient of the mean loss over the whole dataset.
inline Vector full_batch_gradient(const ErmObjective& obj, const Vector& x) { return obj.gradient(x); }

/// Draws mini-batches without replacement from a permutation of [0, N) that
/// is reshuffled at every epoch boundary. A tail shorter than the batch size
/// is dropped.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::size_t batch_size, RngStream rng)
      : n_(n), batch_(batch_size), rng_(std::move(rng)), order_(n) {
    if (batch_size < 1 || batch_size > n) {
      throw ValidationError(detail::concat("batch size ", batch_size, " outside [1, ", n, "]"));
    }
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    reshuffle();
  }

  std::size_t batch_size() const { return batch_; }
  std::size_t epoch() const { return epoch_; }
  std::size_t batches_per_epoch() const { return n_ / batch_; }

  std::span<const std::size_t> next() {
    if (cursor_ + batch_ > n_) {
      reshuffle();
      ++epoch_;
    }
    std::span<const std::size_t> out(order_.data() + cursor_, batch_);
    cursor_ += batch_;
    return out;
  }

 private:
  void reshuffle() {
    rng_.shuffle(order_.begin(), order_.end());
    cursor_ = 0;
  }

  std::size_t n_;
  std::size_t batch_;
  RngStream rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::size_t epoch_ = 0;
};

inline Vector minibatch_gradient(const ErmObjective& obj, const Vector& x, BatchSampler& sampler) {
  return obj.subset_gradient(x, sampler.next());
}

/// One-shot mini-batch: a uniformly random subset of the given size.
inline Vector minibatch_gradient(const ErmObjective& obj, const Vector& x, std::size_t batch_size,
                                 RngStream& rng) {
  const std::size_t n = obj.size();
  if (batch_size < 1 || batch_size > n) {
    throw ValidationError(detail::concat("batch size ", batch_size, " outside [1, ", n, "]"));
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: the first batch_size slots are a uniform subset.
  for (std::size_t i = 0; i < batch_size; ++i) {
    std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
  }
  return obj.subset_gradient(x, std::span<const std::size_t>(idx.data(), batch_size));
}

/// Gradient of a single uniformly chosen example (batch size 1).
inline Vector stochastic_gradient(const ErmObjective& obj, const Vector& x, RngStream& rng) {
  const std::size_t i = rng.uniform_index(obj.size());
  return obj.subset_gradient(x, std::span<const std::size_t>(&i, 1));
}

}  // namespace descent

#endif  // DESCENT_SAMPLING_HPP
