#include "stakesim/threshold.hpp"

#include <algorithm>
#include <cmath>

namespace stakesim {

double stake_weight(const SystemParams& params, double stake) {
  const double s = params.stake_reward() + stake;
  switch (params.variant()) {
    case Variant::Linear:
      return s;
    case Variant::Radical:
      return std::pow(s, params.exponent());
    case Variant::Logarithmic:
      return std::log2(s);
    default:
      return 1.0;
  }
}

namespace {

double threshold_with(const SystemParams& params, double difficulty, double stake,
                      double balance) {
  const double m = params.scale();
  switch (params.variant()) {
    case Variant::ProofOfWork:
      return m / params.coin_difficulty();
    case Variant::ProofOfStake:
      return m * (balance + params.coin_reward()) / params.coin_difficulty();
    default:
      return m * stake_weight(params, stake) / difficulty;
  }
}

}  // namespace

double coin_threshold(const SystemParams& params, double stake, double balance) {
  return threshold_with(params, params.coin_difficulty(), stake, balance);
}

double stake_threshold(const SystemParams& params, double stake, double balance) {
  return threshold_with(params, params.stake_difficulty(), stake, balance);
}

SuccessProbabilities success_probabilities(const SystemParams& params, double stake,
                                           double balance) {
  const double m = params.scale();
  const double coin = coin_threshold(params, stake, balance);
  const double stak = stake_threshold(params, stake, balance);
  SuccessProbabilities out;
  out.saturated = coin > m || stak > m;
  const double coin_capped = std::min(coin, m);
  out.p_block = coin_capped / m;
  // The stake condition is judged on the same hash draw, so both thresholds
  // are clipped to the hash range before taking the ratio.
  out.p_stake_given_block = std::min(1.0, std::min(stak, m) / coin_capped);
  return out;
}

}  // namespace stakesim
