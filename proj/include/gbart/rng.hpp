#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace gbart {

/// Mixes a base seed with any number of stream labels into a new seed.
/// Depends only on its arguments, so derived streams do not depend on the
/// order in which jobs are scheduled.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels);

/// Stable 64-bit hash of a string label (FNV-1a).
std::uint64_t label_hash(std::string_view label);

/// Random stream used by all samplers. Wraps a 64-bit Mersenne twister.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  double chi_squared(double df) { return std::chi_squared_distribution<double>(df)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gbart
