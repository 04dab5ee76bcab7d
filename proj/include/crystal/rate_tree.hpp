#pragma once

// Binary indexed tree over nonnegative rates with O(log n) update and
// proportional selection. Incremental updates accumulate rounding error, so
// the tree is rebuilt from the stored rates every n updates.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace crystal {

class RateTree {
public:
  explicit RateTree(std::size_t n) : rates_(n, 0.0), tree_(n + 1, 0.0) {
    top_bit_ = 1;
    while (top_bit_ * 2 <= n) top_bit_ *= 2;
  }

  std::size_t size() const { return rates_.size(); }
  double rate(std::size_t i) const { return rates_[i]; }
  double total() const { return total_; }
  std::size_t active() const { return active_; }

  void set(std::size_t i, double rate) {
    const double delta = rate - rates_[i];
    if (delta == 0.0) return;
    if (rates_[i] > 0.0) --active_;
    if (rate > 0.0) ++active_;
    rates_[i] = rate;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
    total_ += delta;
    if (++updates_ >= rates_.size()) rebuild();
  }

  void rebuild() {
    std::fill(tree_.begin(), tree_.end(), 0.0);
    total_ = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) {
      total_ += rates_[i];
      for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += rates_[i];
    }
    updates_ = 0;
  }

  /// Smallest i with rate(0) + ... + rate(i) > target.
  std::size_t find(double target) const {
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
      std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return pos < rates_.size() ? pos : rates_.size() - 1;
  }

private:
  std::vector<double> rates_;
  std::vector<double> tree_;
  std::size_t top_bit_ = 1;
  double total_ = 0.0;
  std::size_t active_ = 0;
  std::size_t updates_ = 0;
};

}  // namespace crystal
