#include "stakesim/rng.hpp"

#include <cmath>
#include <limits>

namespace stakesim {

std::size_t Rng::index(std::size_t n) {
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

std::uint64_t Rng::geometric(double r) {
  if (r >= 1.0) return 1;
  return geometric_from_log_failure(std::log1p(-r));
}

std::uint64_t Rng::geometric_from_log_failure(double log_failure) {
  if (!(log_failure < 0.0)) {
    // r == 0: success never happens
    return std::numeric_limits<std::uint64_t>::max();
  }
  // P(T > t) = (1-r)^t  <=>  T = 1 + floor(log U / log(1-r)), U in (0, 1]
  const double u = 1.0 - uniform();
  const double t = std::floor(std::log(u) / log_failure);
  constexpr double kCap = 9.0e18;
  return t >= kCap ? static_cast<std::uint64_t>(kCap) : 1 + static_cast<std::uint64_t>(t);
}

}  // namespace stakesim
