#pragma once

#include <cstdint>
#include <random>

#include "msukf/linalg.hpp"

namespace msukf {

/// Standard-normal draws from mt19937_64 through Box-Muller.
/// A seed gives the same stream on every platform.
class NormalGenerator {
 public:
  explicit NormalGenerator(std::uint64_t seed) : engine_(seed) {}

  double operator()();

  /// n independent standard-normal draws.
  Vector draw(Eigen::Index n);

 private:
  double uniform_open();

  std::mt19937_64 engine_;
  double spare_{0.0};
  bool has_spare_{false};
};

}  // namespace msukf
