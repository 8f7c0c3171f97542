#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stakesim/params.hpp"
#include "stakesim/share_distribution.hpp"

namespace stakesim {

/// A lone node or party building a chain of `chain_length` blocks in a
/// radical or logarithmic stake system. Construction rejects other variants
/// and parameter sets whose coin threshold exceeds M anywhere on the
/// reachable stake range [0, L * StakRwd].
class AttackModel {
 public:
  AttackModel(SystemParams params, std::uint64_t chain_length);

  const SystemParams& params() const { return params_; }
  std::uint64_t chain_length() const { return chain_length_; }
  double p() const { return params_.stake_issue_ratio(); }
  double q() const { return 1.0 - p(); }

 private:
  SystemParams params_;
  std::uint64_t chain_length_;
};

/// Which block indices the party bounds sum over: n = 1..L, or n = 0..L-1
/// as in the lone-node sums. FromZero gives the larger value.
enum class IndexRange { FromOne, FromZero };

// --- binomial expectation sums ---------------------------------------------

/// sum_{k=0}^{n} (k+1)^{-a} C(n,k) p^k q^{n-k}
double inner_sum_radical(std::uint64_t n, double a, double p);

/// (1/p) (1 - q^{n+1}) / (n+1)^a, an upper bound on inner_sum_radical.
double inner_bound_radical(std::uint64_t n, double a, double p);

/// sum_{k=0}^{n} C(n,k) p^k q^{n-k} / (log2(k+1) + log2 StakRwd)
double inner_sum_log(std::uint64_t n, double stake_reward, double p);

/// (1/p) (1 - q^{n+1}) / (log2(n+1) + log2 StakRwd)
double inner_bound_log(std::uint64_t n, double stake_reward, double p);

// --- lone node -------------------------------------------------------------

double expected_time_lone_radical(const AttackModel& model);
/// Closed form for CoinD == StakD; throws ParamError otherwise.
double expected_time_lone_radical_equal(const SystemParams& params, std::uint64_t chain_length);
/// (StakD / StakRwd^a) sum_{n=0}^{L-1} (n+1)^{-a}
double lone_bound_radical(const AttackModel& model);

double expected_time_lone_log(const AttackModel& model);
double expected_time_lone_log_equal(const SystemParams& params, std::uint64_t chain_length);
/// StakD sum_{n=0}^{L-1} 1 / (log2(n+1) + log2 StakRwd)
double lone_bound_log(const AttackModel& model);

/// Exact expected hash attempts for a lone node (no stake transfers) under any
/// variant. Linear is the radical sum with exponent 1; constant and
/// proof-of-work give L * D. Throws ParamError in the saturated regime.
double expected_time_lone(const SystemParams& params, std::uint64_t chain_length);

/// Expected hash attempts for block n+1, n = 0..L-1; expected_time_lone is
/// their sum.
std::vector<double> expected_block_times_lone(const SystemParams& params,
                                              std::uint64_t chain_length);

/// Per-block terms of lone_upper_bound.
std::vector<double> block_bound_terms_lone(const SystemParams& params,
                                           std::uint64_t chain_length);

/// Upper bound matching expected_time_lone: the StakD-prefactor bound for
/// radical/logarithmic/linear, the exact value for the other variants.
double lone_upper_bound(const SystemParams& params, std::uint64_t chain_length);

// --- parties ---------------------------------------------------------------

/// E[(sum_i X_i^a)^{-1}]
double inv_power_sum_expectation(const StakeShareDistribution& dist, double a);

/// E[(sum_i log2(1 + X_i))^{-1}]
double inv_log_sum_expectation(const StakeShareDistribution& dist);

double party_bound_radical(const AttackModel& model, const StakeShareDistribution& dist,
                           IndexRange range = IndexRange::FromOne);

double party_bound_log(const AttackModel& model, const StakeShareDistribution& dist,
                       IndexRange range = IndexRange::FromOne);

/// Number of coordinates strictly above 1/m.
std::size_t count_above_fair_share(std::span<const double> shares);

struct RadicalConcentrationReport {
  bool hypothesis_holds = false;
  std::size_t min_count = 0;     // smallest count over the support
  double required_count = 0.0;   // c * m^a
  double expectation = 0.0;
  double bound = 0.0;            // 1 / c
};

/// Checks the concentration hypothesis (every support vector has at least
/// c m^a shares strictly above 1/m) and evaluates E against 1/c. Requires c > 1.
RadicalConcentrationReport concentration_check_radical(const StakeShareDistribution& dist,
                                                       double a, double c);

struct PerKViolation {
  std::size_t support_index = 0;
  std::uint64_t k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct LogConcentrationReport {
  bool hypothesis_holds = false;
  std::size_t min_count = 0;
  double required_count = 0.0;  // 2 c log2 m
  double expectation = 0.0;     // E[(sum_i log2(1 + X_i))^{-1}]
  std::uint64_t k_max = 0;
  bool per_k_holds = true;
  std::size_t violation_count = 0;
  std::vector<PerKViolation> violations;  // first kMaxReportedViolations only
  static constexpr std::size_t kMaxReportedViolations = 64;
};

/// Checks the logarithmic concentration hypothesis (at least 2 c log2 m shares
/// strictly above 1/m) and, for every support vector and k in [0, k_max],
/// whether sum_i (log2 StakRwd + log2(k x_i + 1)) >= c (log2 StakRwd + log2(k+1)).
/// Violations are reported, never thrown. Requires m > 2 and
/// 1 < c <= m / log2(m+1).
LogConcentrationReport concentration_check_log(const StakeShareDistribution& dist, double c,
                                               double stake_reward,
                                               std::uint64_t k_max = 10000);

}  // namespace stakesim
