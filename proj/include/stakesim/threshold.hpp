#pragma once

#include "stakesim/params.hpp"

namespace stakesim {

/// Coin-issue threshold: a block is valid when its hash is at most this value.
/// `stake` is stak(A;C), `balance` is bal(A;C) of the block creator A in the
/// chain C being extended. The result may exceed the scale M.
double coin_threshold(const SystemParams& params, double stake, double balance);

/// Stake-issue threshold. Same shape as the coin threshold with StakD in the
/// denominator; single-threshold variants return the coin threshold.
double stake_threshold(const SystemParams& params, double stake, double balance);

/// Per-attempt probabilities under the uniform hash model (hash ~ U[0, M)).
struct SuccessProbabilities {
  double p_block = 0.0;              // P(hash <= coin threshold)
  double p_stake_given_block = 0.0;  // P(hash <= stake threshold | block found)
  bool saturated = false;            // some threshold exceeded M and was capped
};

SuccessProbabilities success_probabilities(const SystemParams& params, double stake,
                                           double balance);

/// Threshold as a function of stake with the M/difficulty factor removed:
/// (StakRwd + s)^a, log2(StakRwd + s), StakRwd + s, or 1.
double stake_weight(const SystemParams& params, double stake);

}  // namespace stakesim
