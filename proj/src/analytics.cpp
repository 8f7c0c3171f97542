#include "stakesim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stakesim/threshold.hpp"

namespace stakesim {

namespace {

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // std::lgamma writes the global signgam
#else
  return std::lgamma(x);
#endif
}

double log_binomial_weight(std::uint64_t n, std::uint64_t k, double log_p, double log_q) {
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return log_gamma(nd + 1.0) - log_gamma(kd + 1.0) - log_gamma(nd - kd + 1.0) + kd * log_p +
         (nd - kd) * log_q;
}

/// E[g(K)] for K ~ Binomial(n, p). Weights are formed in log space relative to
/// the mode and renormalised by their own sum, so rounding shared by every
/// term (e.g. in lgamma(n+1)) cancels.
template <class Kernel>
double binomial_expectation(std::uint64_t n, double p, Kernel g) {
  if (n == 0) return g(0);
  const double q = 1.0 - p;
  if (q <= 0.0) return g(n);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const auto mode = std::min<std::uint64_t>(
      n, static_cast<std::uint64_t>(std::floor((static_cast<double>(n) + 1.0) * p)));
  const double log_peak = log_binomial_weight(n, mode, log_p, log_q);
  double num = 0.0;
  double den = 0.0;
  for (std::uint64_t k = 0; k <= n; ++k) {
    const double w = std::exp(log_binomial_weight(n, k, log_p, log_q) - log_peak);
    if (w == 0.0) continue;
    num += w * g(k);
    den += w;
  }
  return num / den;
}

double inner_sum_power(std::uint64_t n, double a, double p) {
  return binomial_expectation(
      n, p, [a](std::uint64_t k) { return std::pow(static_cast<double>(k) + 1.0, -a); });
}

double inner_bound_power(std::uint64_t n, double a, double p) {
  // 1 - q^{n+1} without cancellation for small p
  const double one_minus_q_pow =
      p >= 1.0 ? 1.0 : -std::expm1((static_cast<double>(n) + 1.0) * std::log1p(-p));
  return one_minus_q_pow / p / std::pow(static_cast<double>(n) + 1.0, a);
}

double log_kernel(std::uint64_t k, double log2_reward) {
  return 1.0 / (std::log2(static_cast<double>(k) + 1.0) + log2_reward);
}

void require_saturation_free(const SystemParams& params, std::uint64_t chain_length) {
  const double reach = static_cast<double>(chain_length);
  const double top = coin_threshold(params, reach * params.stake_reward(),
                                    reach * params.coin_reward());
  if (top > params.scale())
    throw ParamError("coin threshold exceeds scale M on the reachable stake range; "
                     "closed forms do not apply (threshold " +
                     std::to_string(top) + " > M = " + std::to_string(params.scale()) + ")");
}

void require_equal_difficulties(const SystemParams& params) {
  if (params.coin_difficulty() != params.stake_difficulty())
    throw ParamError("closed form requires coin_difficulty == stake_difficulty");
}

template <class Term>
double sum_range(std::uint64_t first, std::uint64_t last, Term term) {
  double total = 0.0;
  for (std::uint64_t n = first; n <= last; ++n) total += term(n);
  return total;
}

std::pair<std::uint64_t, std::uint64_t> party_indices(std::uint64_t L, IndexRange range) {
  return range == IndexRange::FromOne ? std::pair{std::uint64_t{1}, L}
                                        : std::pair{std::uint64_t{0}, L - 1};
}

}  // namespace

AttackModel::AttackModel(SystemParams params, std::uint64_t chain_length)
    : params_(std::move(params)), chain_length_(chain_length) {
  if (params_.variant() != Variant::Radical && params_.variant() != Variant::Logarithmic)
    throw ParamError("attack model requires the radical or logarithmic variant");
  if (chain_length_ < 1) throw ParamError("chain_length >= 1");
  require_saturation_free(params_, chain_length_);
}

double inner_sum_radical(std::uint64_t n, double a, double p) { return inner_sum_power(n, a, p); }

double inner_bound_radical(std::uint64_t n, double a, double p) {
  return inner_bound_power(n, a, p);
}

double inner_sum_log(std::uint64_t n, double stake_reward, double p) {
  const double lr = std::log2(stake_reward);
  return binomial_expectation(n, p, [lr](std::uint64_t k) { return log_kernel(k, lr); });
}

double inner_bound_log(std::uint64_t n, double stake_reward, double p) {
  return inner_bound_power(n, 0.0, p) * log_kernel(n, std::log2(stake_reward));
}

double expected_time_lone_radical(const AttackModel& model) {
  const auto& sp = model.params();
  if (sp.variant() != Variant::Radical) throw ParamError("radical variant required");
  const double a = sp.exponent();
  const double p = model.p();
  const double pref = sp.coin_difficulty() / std::pow(sp.stake_reward(), a);
  return pref * sum_range(0, model.chain_length() - 1,
                          [&](std::uint64_t n) { return inner_sum_radical(n, a, p); });
}

double expected_time_lone_radical_equal(const SystemParams& params, std::uint64_t chain_length) {
  require_equal_difficulties(params);
  const AttackModel model(params, chain_length);
  const double a = params.exponent();
  const double pref = params.coin_difficulty() / std::pow(params.stake_reward(), a);
  return pref * sum_range(0, chain_length - 1, [a](std::uint64_t n) {
           return std::pow(static_cast<double>(n) + 1.0, -a);
         });
}

double lone_bound_radical(const AttackModel& model) {
  const auto& sp = model.params();
  if (sp.variant() != Variant::Radical) throw ParamError("radical variant required");
  const double a = sp.exponent();
  const double pref = sp.stake_difficulty() / std::pow(sp.stake_reward(), a);
  return pref * sum_range(0, model.chain_length() - 1, [a](std::uint64_t n) {
           return std::pow(static_cast<double>(n) + 1.0, -a);
         });
}

double expected_time_lone_log(const AttackModel& model) {
  const auto& sp = model.params();
  if (sp.variant() != Variant::Logarithmic) throw ParamError("logarithmic variant required");
  const double p = model.p();
  return sp.coin_difficulty() *
         sum_range(0, model.chain_length() - 1,
                   [&](std::uint64_t n) { return inner_sum_log(n, sp.stake_reward(), p); });
}

double expected_time_lone_log_equal(const SystemParams& params, std::uint64_t chain_length) {
  require_equal_difficulties(params);
  const AttackModel model(params, chain_length);
  const double lr = std::log2(params.stake_reward());
  return params.coin_difficulty() *
         sum_range(0, chain_length - 1, [lr](std::uint64_t n) { return log_kernel(n, lr); });
}

double lone_bound_log(const AttackModel& model) {
  const auto& sp = model.params();
  if (sp.variant() != Variant::Logarithmic) throw ParamError("logarithmic variant required");
  const double lr = std::log2(sp.stake_reward());
  return sp.stake_difficulty() *
         sum_range(0, model.chain_length() - 1, [lr](std::uint64_t n) { return log_kernel(n, lr); });
}

std::vector<double> expected_block_times_lone(const SystemParams& params,
                                              std::uint64_t chain_length) {
  if (chain_length < 1) throw ParamError("chain_length >= 1");
  require_saturation_free(params, chain_length);
  const double p = params.stake_issue_ratio();
  std::vector<double> times(chain_length);
  for (std::uint64_t n = 0; n < chain_length; ++n) {
    const double nd = static_cast<double>(n);
    switch (params.variant()) {
      case Variant::Radical:
        times[n] = params.coin_difficulty() / std::pow(params.stake_reward(), params.exponent()) *
                   inner_sum_radical(n, params.exponent(), p);
        break;
      case Variant::Logarithmic:
        times[n] = params.coin_difficulty() * inner_sum_log(n, params.stake_reward(), p);
        break;
      case Variant::Linear:
        times[n] = params.coin_difficulty() / params.stake_reward() * inner_sum_power(n, 1.0, p);
        break;
      case Variant::ProofOfStake:
        times[n] = params.coin_difficulty() / (params.coin_reward() * (nd + 1.0));
        break;
      case Variant::ProofOfWork:
      case Variant::Constant:
        times[n] = params.coin_difficulty();
        break;
    }
  }
  return times;
}

std::vector<double> block_bound_terms_lone(const SystemParams& params,
                                           std::uint64_t chain_length) {
  if (chain_length < 1) throw ParamError("chain_length >= 1");
  require_saturation_free(params, chain_length);
  const double lr = std::log2(params.stake_reward());
  std::vector<double> terms(chain_length);
  for (std::uint64_t n = 0; n < chain_length; ++n) {
    const double nd = static_cast<double>(n);
    switch (params.variant()) {
      case Variant::Radical:
        terms[n] = params.stake_difficulty() /
                   std::pow(params.stake_reward(), params.exponent()) *
                   std::pow(nd + 1.0, -params.exponent());
        break;
      case Variant::Logarithmic:
        terms[n] = params.stake_difficulty() * log_kernel(n, lr);
        break;
      case Variant::Linear:
        terms[n] = params.stake_difficulty() / params.stake_reward() / (nd + 1.0);
        break;
      default:
        return expected_block_times_lone(params, chain_length);
    }
  }
  return terms;
}

double expected_time_lone(const SystemParams& params, std::uint64_t chain_length) {
  double total = 0.0;
  for (double t : expected_block_times_lone(params, chain_length)) total += t;
  return total;
}

double lone_upper_bound(const SystemParams& params, std::uint64_t chain_length) {
  double total = 0.0;
  for (double t : block_bound_terms_lone(params, chain_length)) total += t;
  return total;
}

double inv_power_sum_expectation(const StakeShareDistribution& dist, double a) {
  double total = 0.0;
  for (std::size_t i = 0; i < dist.support_size(); ++i) {
    double s = 0.0;
    for (double x : dist.shares(i)) s += std::pow(x, a);
    if (s < 1e-15) throw ParamError("share vector with vanishing power sum");
    total += dist.mass(i) / s;
  }
  return total;
}

double inv_log_sum_expectation(const StakeShareDistribution& dist) {
  double total = 0.0;
  for (std::size_t i = 0; i < dist.support_size(); ++i) {
    double s = 0.0;
    for (double x : dist.shares(i)) s += std::log2(1.0 + x);
    if (s < 1e-15) throw ParamError("share vector with vanishing log sum");
    total += dist.mass(i) / s;
  }
  return total;
}

double party_bound_radical(const AttackModel& model, const StakeShareDistribution& dist,
                           IndexRange range) {
  const auto& sp = model.params();
  if (sp.variant() != Variant::Radical) throw ParamError("radical variant required");
  if (dist.node_count() < 2) throw ParamError("party needs m >= 2 nodes");
  const double a = sp.exponent();
  const double p = model.p();
  const auto [first, last] = party_indices(model.chain_length(), range);
  const double sum =
      sum_range(first, last, [&](std::uint64_t n) { return inner_sum_radical(n, a, p); });
  return inv_power_sum_expectation(dist, a) * sp.coin_difficulty() /
         std::pow(sp.stake_reward(), a) * sum;
}

double party_bound_log(const AttackModel& model, const StakeShareDistribution& dist,
                       IndexRange range) {
  const auto& sp = model.params();
  if (sp.variant() != Variant::Logarithmic) throw ParamError("logarithmic variant required");
  if (dist.node_count() < 2) throw ParamError("party needs m >= 2 nodes");
  const double p = model.p();
  const auto [first, last] = party_indices(model.chain_length(), range);
  const double sum = sum_range(
      first, last, [&](std::uint64_t n) { return inner_sum_log(n, sp.stake_reward(), p); });
  return inv_log_sum_expectation(dist) * sp.coin_difficulty() * sum;
}

std::size_t count_above_fair_share(std::span<const double> shares) {
  const double fair = 1.0 / static_cast<double>(shares.size());
  return static_cast<std::size_t>(
      std::count_if(shares.begin(), shares.end(), [fair](double x) { return x > fair; }));
}

namespace {

std::size_t min_count_above_fair_share(const StakeShareDistribution& dist) {
  std::size_t lowest = std::numeric_limits<std::size_t>::max();
  for (const auto& x : dist.support()) lowest = std::min(lowest, count_above_fair_share(x));
  return lowest;
}

}  // namespace

RadicalConcentrationReport concentration_check_radical(const StakeShareDistribution& dist,
                                                       double a, double c) {
  if (!(c > 1.0)) throw ParamError("concentration constant c > 1");
  RadicalConcentrationReport r;
  const double m = static_cast<double>(dist.node_count());
  r.min_count = min_count_above_fair_share(dist);
  r.required_count = c * std::pow(m, a);
  r.hypothesis_holds = static_cast<double>(r.min_count) >= r.required_count;
  r.expectation = inv_power_sum_expectation(dist, a);
  r.bound = 1.0 / c;
  return r;
}

LogConcentrationReport concentration_check_log(const StakeShareDistribution& dist, double c,
                                               double stake_reward, std::uint64_t k_max) {
  const std::size_t m = dist.node_count();
  const double md = static_cast<double>(m);
  if (m <= 2) throw ParamError("logarithmic concentration check needs m > 2");
  if (!(c > 1.0) || c > md / std::log2(md + 1.0))
    throw ParamError("concentration constant must satisfy 1 < c <= m / log2(m+1)");
  if (!(stake_reward > 0.0)) throw ParamError("stake_reward > 0");

  LogConcentrationReport r;
  r.min_count = min_count_above_fair_share(dist);
  r.required_count = 2.0 * c * std::log2(md);
  r.hypothesis_holds = static_cast<double>(r.min_count) >= r.required_count;
  r.expectation = inv_log_sum_expectation(dist);
  r.k_max = k_max;

  const double lr = std::log2(stake_reward);
  for (std::size_t i = 0; i < dist.support_size(); ++i) {
    const auto x = dist.shares(i);
    for (std::uint64_t k = 0; k <= k_max; ++k) {
      const double kd = static_cast<double>(k);
      double lhs = 0.0;
      for (double xi : x) lhs += lr + std::log2(kd * xi + 1.0);
      const double rhs = c * (lr + std::log2(kd + 1.0));
      if (lhs >= rhs) continue;
      r.per_k_holds = false;
      ++r.violation_count;
      if (r.violations.size() < LogConcentrationReport::kMaxReportedViolations)
        r.violations.push_back({i, k, lhs, rhs});
    }
  }
  return r;
}

}  // namespace stakesim
