#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "stakesim/ledger.hpp"
#include "stakesim/params.hpp"
#include "stakesim/rng.hpp"
#include "stakesim/share_distribution.hpp"

namespace stakesim {

// Time is counted in ticks; in one tick every mining node makes exactly one
// hash attempt.

struct LoneChainResult {
  std::uint64_t elapsed = 0;
  std::vector<std::uint64_t> per_block_times;
  std::vector<double> stake_trajectory;  // creator stake after each block
  std::uint64_t stake_rewards = 0;
  bool saturated = false;  // some attempt ran with a capped probability
};

/// A single node, starting with zero stake, mines `chain_length` blocks.
LoneChainResult mine_lone_chain(const SystemParams& params, std::uint64_t chain_length,
                                std::uint64_t seed);

enum class Redraw { PerChain, PerBlock };

/// Whether a node whose exogenous share is exactly zero takes part in mining.
enum class ZeroShareNodes { Idle, Mine };

/// Node i holds k * x_i * StakRwd stakes after the party has earned k stake
/// rewards, with x drawn from `dist`.
struct ExogenousShares {
  StakeShareDistribution dist;
  Redraw redraw = Redraw::PerChain;
  ZeroShareNodes zero_share = ZeroShareNodes::Idle;
};

/// Stakes follow the party's own ledger, starting from `initial_stakes`
/// (all zero when empty).
struct EndogenousStakes {
  std::vector<double> initial_stakes;
};

using ShareMode = std::variant<ExogenousShares, EndogenousStakes>;

class PartyConfig {
 public:
  /// Throws ParamError on a node-count/share-mode mismatch. A one-node party
  /// is a lone miner and is accepted for races.
  PartyConfig(SystemParams params, std::size_t node_count, ShareMode mode);

  const SystemParams& params() const { return params_; }
  std::size_t node_count() const { return node_count_; }
  const ShareMode& mode() const { return mode_; }

 private:
  SystemParams params_;
  std::size_t node_count_;
  ShareMode mode_;
};

/// Incremental block producer for one party. Each call to next_block() runs
/// ticks until some node succeeds; when several nodes succeed in the same
/// tick the block goes to one of them uniformly at random.
class PartyMiner {
 public:
  struct BlockEvent {
    std::uint64_t ticks = 0;
    NodeId creator = 0;
    bool stake_rewarded = false;
  };

  PartyMiner(const PartyConfig& config, std::uint64_t seed);

  BlockEvent next_block();

  std::uint64_t blocks() const { return blocks_; }
  std::uint64_t stake_rewards() const { return rewards_; }
  bool saturated() const { return saturated_; }
  const LedgerState& ledger() const { return ledger_; }

 private:
  void draw_shares();
  double node_stake(std::size_t i) const;
  double node_balance(std::size_t i) const;

  PartyConfig config_;
  Rng rng_;
  std::vector<double> shares_;  // exogenous mode
  LedgerState ledger_;          // endogenous mode
  std::uint64_t blocks_ = 0;
  std::uint64_t rewards_ = 0;
  bool saturated_ = false;
  std::vector<double> p_block_;
  std::vector<std::size_t> winners_;
};

struct PartyChainResult {
  std::uint64_t elapsed = 0;
  std::vector<std::uint64_t> per_block_times;
  std::vector<std::uint64_t> reward_count_trajectory;  // party-wide k after each block
  bool saturated = false;
};

PartyChainResult mine_party_chain(const PartyConfig& config, std::uint64_t chain_length,
                                  std::uint64_t seed);

// --- repeated trials -------------------------------------------------------

struct LoneJob {
  SystemParams params;
};
struct PartyJob {
  PartyConfig config;
};
using TrialJob = std::variant<LoneJob, PartyJob>;

struct TrialOutcome {
  std::uint64_t elapsed = 0;
  std::uint64_t stake_rewards = 0;
  bool saturated = false;
  friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

struct TrialStats {
  std::uint64_t trials = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  friend bool operator==(const TrialStats&, const TrialStats&) = default;
};

/// Sample mean, standard error of the mean and the normal 95% interval
/// (half-width 1.96 standard errors). Requires at least two samples.
TrialStats summarize(std::span<const double> samples);

/// Runs `trials` independent chains; trial t is seeded with
/// derive_seed(master_seed, t). Output is indexed by trial and does not
/// depend on `threads`.
std::vector<TrialOutcome> simulate_trials(const TrialJob& job, std::uint64_t chain_length,
                                          std::uint64_t trials, std::uint64_t master_seed,
                                          unsigned threads = 1);

TrialStats run_trials(const TrialJob& job, std::uint64_t chain_length, std::uint64_t trials,
                      std::uint64_t master_seed, unsigned threads = 1);

// --- races -----------------------------------------------------------------

/// Honest and attacker chains grow independently from a common genesis.
/// Exactly one stop criterion: a target length (the race ends when either
/// chain reaches it) or a horizon in ticks.
struct RaceConfig {
  PartyConfig honest;
  PartyConfig attacker;
  std::optional<std::uint64_t> target_length;
  std::optional<std::uint64_t> horizon;
  std::uint64_t sample_stride = 0;  // 0 disables the leader-over-time samples

  void validate() const;
};

struct LeaderSample {
  std::uint64_t tick = 0;
  std::uint64_t honest_length = 0;
  std::uint64_t attacker_length = 0;
  friend bool operator==(const LeaderSample&, const LeaderSample&) = default;
};

struct RaceRecord {
  std::uint64_t end_tick = 0;
  std::uint64_t honest_length = 0;
  std::uint64_t attacker_length = 0;
  bool attacker_ever_led = false;       // strictly longer at some tick
  bool attacker_leads_at_end = false;   // strictly longer when the race stops
  bool honest_leads_at_end = false;
  std::vector<LeaderSample> samples;
  friend bool operator==(const RaceRecord&, const RaceRecord&) = default;
};

struct RaceSummary {
  std::uint64_t trials = 0;
  double p_attacker_ever_led = 0.0;
  double p_attacker_leads_at_end = 0.0;
  double p_honest_leads_at_end = 0.0;
  double se_attacker_ever_led = 0.0;
  double se_attacker_leads_at_end = 0.0;
  friend bool operator==(const RaceSummary&, const RaceSummary&) = default;
};

struct RaceResult {
  std::vector<RaceRecord> records;
  RaceSummary summary;
};

RaceRecord race_once(const RaceConfig& config, std::uint64_t seed);

RaceResult race(const RaceConfig& config, std::uint64_t master_seed, std::uint64_t trials,
                unsigned threads = 1);

}  // namespace stakesim
