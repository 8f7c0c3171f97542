#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stakesim {

/// Finite probability mass function over stake-share vectors (X_1, ..., X_m):
/// every support vector has m nonnegative entries summing to 1.
class StakeShareDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Throws ParamError when a vector or the masses violate the invariants.
  StakeShareDistribution(std::vector<std::vector<double>> support, std::vector<double> masses);

  static StakeShareDistribution point_mass(std::vector<double> shares);
  static StakeShareDistribution uniform(std::size_t node_count);

  std::size_t node_count() const { return node_count_; }
  std::size_t support_size() const { return support_.size(); }
  std::span<const double> shares(std::size_t i) const { return support_[i]; }
  double mass(std::size_t i) const { return masses_[i]; }
  const std::vector<std::vector<double>>& support() const { return support_; }
  const std::vector<double>& masses() const { return masses_; }

  /// Index of the support vector selected by a uniform draw u in [0, 1).
  std::size_t index_for(double u) const;

  friend bool operator==(const StakeShareDistribution&, const StakeShareDistribution&) = default;

 private:
  std::size_t node_count_ = 0;
  std::vector<std::vector<double>> support_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

}  // namespace stakesim
