#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "langlab/error.hpp"

namespace langlab {

// Counter-based SplitMix64. Output k (k = 1, 2, ...) is
//   z = seed + k * 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
// and uniform() = (out >> 11) * 2^-53, so streams are reproducible anywhere.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next() noexcept {
    ++counter_;
    std::uint64_t z = seed_ + counter_ * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  // Uniform index in [0, n). Slight modulo bias is irrelevant at desk scale.
  std::size_t index(std::size_t n) {
    require(n > 0, Errc::InvalidArgument, "index() needs a nonempty range");
    return static_cast<std::size_t>(next() % n);
  }

  bool coin(double p_true = 0.5) noexcept { return uniform() < p_true; }

  // Inverse-CDF draw over nonnegative weights, in the order given.
  template <class Weights>
  std::size_t categorical(const Weights& weights) {
    double total = 0.0;
    for (double w : weights) total += static_cast<double>(w);
    require(total > 0.0, Errc::InvalidArgument, "categorical() needs positive mass");
    const double u = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    std::size_t i = 0;
    for (double w : weights) {
      if (w > 0) {
        acc += static_cast<double>(w);
        last_positive = i;
        if (u < acc) return i;
      }
      ++i;
    }
    return last_positive;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace langlab
