#include "stakesim/share_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stakesim/params.hpp"

namespace stakesim {

StakeShareDistribution::StakeShareDistribution(std::vector<std::vector<double>> support,
                                               std::vector<double> masses)
    : support_(std::move(support)), masses_(std::move(masses)) {
  if (support_.empty()) throw ParamError("share distribution needs at least one support vector");
  if (support_.size() != masses_.size())
    throw ParamError("share distribution: " + std::to_string(support_.size()) +
                     " support vectors but " + std::to_string(masses_.size()) + " masses");
  node_count_ = support_.front().size();
  if (node_count_ < 1) throw ParamError("share vectors must be non-empty");
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const auto& x = support_[i];
    if (x.size() != node_count_)
      throw ParamError("share vector " + std::to_string(i) + " has length " +
                       std::to_string(x.size()) + ", expected " + std::to_string(node_count_));
    for (double xi : x)
      if (!(xi >= 0.0 && xi <= 1.0))
        throw ParamError("share vector " + std::to_string(i) + ": entries must lie in [0, 1]");
    const double sum = std::accumulate(x.begin(), x.end(), 0.0);
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw ParamError("share vector " + std::to_string(i) + " must sum to 1 (within 1e-12)");
    if (!(masses_[i] > 0.0)) throw ParamError("pmf masses must be > 0");
  }
  const double total = std::accumulate(masses_.begin(), masses_.end(), 0.0);
  if (std::abs(total - 1.0) > kSumTolerance)
    throw ParamError("pmf masses must sum to 1 (within 1e-12)");
  cumulative_.resize(masses_.size());
  std::partial_sum(masses_.begin(), masses_.end(), cumulative_.begin());
}

StakeShareDistribution StakeShareDistribution::point_mass(std::vector<double> shares) {
  return StakeShareDistribution({std::move(shares)}, {1.0});
}

StakeShareDistribution StakeShareDistribution::uniform(std::size_t node_count) {
  if (node_count == 0) throw ParamError("node_count >= 1");
  return point_mass(std::vector<double>(node_count, 1.0 / static_cast<double>(node_count)));
}

std::size_t StakeShareDistribution::index_for(double u) const {
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) return cumulative_.size() - 1;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

}  // namespace stakesim
