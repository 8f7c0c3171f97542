#include "stakesim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "stakesim/threshold.hpp"

namespace stakesim {

LoneChainResult mine_lone_chain(const SystemParams& params, std::uint64_t chain_length,
                                std::uint64_t seed) {
  constexpr NodeId kMiner = 0;
  Rng rng(seed);
  Chain chain;
  LedgerState ledger;
  LoneChainResult out;
  out.per_block_times.reserve(chain_length);
  out.stake_trajectory.reserve(chain_length);
  for (std::uint64_t n = 0; n < chain_length; ++n) {
    const auto pr = success_probabilities(params, ledger.stake(kMiner), ledger.balance(kMiner));
    out.saturated = out.saturated || pr.saturated;
    const std::uint64_t dt = rng.geometric(pr.p_block);
    const bool rewarded = rng.bernoulli(pr.p_stake_given_block);
    ledger = apply_block(ledger, chain.append(kMiner, rewarded), params);
    out.elapsed += dt;
    out.stake_rewards += rewarded ? 1 : 0;
    out.per_block_times.push_back(dt);
    out.stake_trajectory.push_back(ledger.stake(kMiner));
  }
  return out;
}

PartyConfig::PartyConfig(SystemParams params, std::size_t node_count, ShareMode mode)
    : params_(std::move(params)), node_count_(node_count), mode_(std::move(mode)) {
  if (node_count_ < 1) throw ParamError("party node_count >= 1");
  if (const auto* ex = std::get_if<ExogenousShares>(&mode_)) {
    if (ex->dist.node_count() != node_count_)
      throw ParamError("share vectors have length " + std::to_string(ex->dist.node_count()) +
                       " but the party has " + std::to_string(node_count_) + " nodes");
  } else {
    auto& en = std::get<EndogenousStakes>(mode_);
    if (en.initial_stakes.empty()) en.initial_stakes.assign(node_count_, 0.0);
    if (en.initial_stakes.size() != node_count_)
      throw ParamError("initial_stakes must list one stake per node");
    for (double s : en.initial_stakes)
      if (!(s >= 0.0) || !std::isfinite(s)) throw ParamError("initial stakes must be >= 0");
  }
}

PartyMiner::PartyMiner(const PartyConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed), p_block_(config.node_count()) {
  winners_.reserve(config.node_count());
  if (const auto* en = std::get_if<EndogenousStakes>(&config_.mode())) {
    for (std::size_t i = 0; i < en->initial_stakes.size(); ++i)
      ledger_ = ledger_.with_initial_stake(static_cast<NodeId>(i), en->initial_stakes[i]);
  } else {
    draw_shares();
  }
}

void PartyMiner::draw_shares() {
  const auto& dist = std::get<ExogenousShares>(config_.mode()).dist;
  const auto x = dist.shares(dist.index_for(rng_.uniform()));
  shares_.assign(x.begin(), x.end());
}

double PartyMiner::node_stake(std::size_t i) const {
  if (shares_.empty()) return ledger_.stake(static_cast<NodeId>(i));
  return static_cast<double>(rewards_) * shares_[i] * config_.params().stake_reward();
}

double PartyMiner::node_balance(std::size_t i) const {
  if (shares_.empty()) return ledger_.balance(static_cast<NodeId>(i));
  return static_cast<double>(blocks_) * shares_[i] * config_.params().coin_reward();
}

PartyMiner::BlockEvent PartyMiner::next_block() {
  const auto& params = config_.params();
  const auto* ex = std::get_if<ExogenousShares>(&config_.mode());
  if (ex && ex->redraw == Redraw::PerBlock && blocks_ > 0) draw_shares();
  const bool idle_zero = ex && ex->zero_share == ZeroShareNodes::Idle;

  const std::size_t m = config_.node_count();
  double log_none = 0.0;  // log P(no node succeeds in a tick)
  bool certain = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (idle_zero && shares_[i] == 0.0) {
      p_block_[i] = 0.0;
      continue;
    }
    const auto pr = success_probabilities(params, node_stake(i), node_balance(i));
    saturated_ = saturated_ || pr.saturated;
    p_block_[i] = pr.p_block;
    if (pr.p_block >= 1.0)
      certain = true;
    else
      log_none += std::log1p(-pr.p_block);
  }

  BlockEvent ev;
  ev.ticks = certain ? 1 : rng_.geometric_from_log_failure(log_none);

  // Success set in the winning tick, conditioned on being non-empty: pick the
  // first successful node j with probability p_j prod_{i<j}(1 - p_i) / P(any),
  // then let every later node succeed independently.
  double u = rng_.uniform() * (certain ? 1.0 : -std::expm1(log_none));
  double survive = 1.0;
  std::size_t first = m;
  for (std::size_t j = 0; j < m; ++j) {
    if (p_block_[j] <= 0.0) continue;
    first = j;
    const double w = survive * p_block_[j];
    if (u < w) break;
    u -= w;
    survive *= 1.0 - p_block_[j];
  }
  if (first == m) throw ParamError("party has no mining node");
  winners_.assign(1, first);
  for (std::size_t i = first + 1; i < m; ++i)
    if (p_block_[i] > 0.0 && rng_.bernoulli(p_block_[i])) winners_.push_back(i);
  const std::size_t winner = winners_[winners_.size() == 1 ? 0 : rng_.index(winners_.size())];

  const auto pr = success_probabilities(params, node_stake(winner), node_balance(winner));
  ev.creator = static_cast<NodeId>(winner);
  ev.stake_rewarded = rng_.bernoulli(pr.p_stake_given_block);

  if (!ex) {
    const std::uint64_t h = ledger_.height();
    ledger_.apply(Block{ev.creator, h + 1, h, ev.stake_rewarded}, params);
  }
  ++blocks_;
  if (ev.stake_rewarded) ++rewards_;
  return ev;
}

PartyChainResult mine_party_chain(const PartyConfig& config, std::uint64_t chain_length,
                                  std::uint64_t seed) {
  PartyMiner miner(config, seed);
  PartyChainResult out;
  out.per_block_times.reserve(chain_length);
  out.reward_count_trajectory.reserve(chain_length);
  for (std::uint64_t n = 0; n < chain_length; ++n) {
    const auto ev = miner.next_block();
    out.elapsed += ev.ticks;
    out.per_block_times.push_back(ev.ticks);
    out.reward_count_trajectory.push_back(miner.stake_rewards());
  }
  out.saturated = miner.saturated();
  return out;
}

namespace {

/// Calls body(i) for i in [0, count) across `threads` workers, each handling a
/// fixed stride of indices. The first exception thrown is rethrown.
template <class Body>
void parallel_for(std::uint64_t count, unsigned threads, Body body) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t i = w; i < count; i += workers) body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

TrialStats summarize(std::span<const double> samples) {
  if (samples.size() < 2) throw ParamError("trials >= 2");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  TrialStats s;
  s.trials = samples.size();
  s.mean = mean;
  s.std_error = std::sqrt(ss / (n - 1.0) / n);
  s.ci95_low = mean - 1.96 * s.std_error;
  s.ci95_high = mean + 1.96 * s.std_error;
  return s;
}

std::vector<TrialOutcome> simulate_trials(const TrialJob& job, std::uint64_t chain_length,
                                          std::uint64_t trials, std::uint64_t master_seed,
                                          unsigned threads) {
  if (chain_length < 1) throw ParamError("chain_length >= 1");
  std::vector<TrialOutcome> out(trials);
  parallel_for(trials, threads, [&](std::uint64_t t) {
    const std::uint64_t seed = derive_seed(master_seed, t);
    if (const auto* lone = std::get_if<LoneJob>(&job)) {
      const auto r = mine_lone_chain(lone->params, chain_length, seed);
      out[t] = {r.elapsed, r.stake_rewards, r.saturated};
    } else {
      const auto r = mine_party_chain(std::get<PartyJob>(job).config, chain_length, seed);
      out[t] = {r.elapsed, r.reward_count_trajectory.back(), r.saturated};
    }
  });
  return out;
}

TrialStats run_trials(const TrialJob& job, std::uint64_t chain_length, std::uint64_t trials,
                      std::uint64_t master_seed, unsigned threads) {
  if (trials < 2) throw ParamError("trials >= 2");
  const auto outcomes = simulate_trials(job, chain_length, trials, master_seed, threads);
  std::vector<double> elapsed(outcomes.size());
  std::transform(outcomes.begin(), outcomes.end(), elapsed.begin(),
                 [](const TrialOutcome& o) { return static_cast<double>(o.elapsed); });
  return summarize(elapsed);
}

void RaceConfig::validate() const {
  if (target_length.has_value() == horizon.has_value())
    throw ParamError("race needs exactly one stop criterion: target_length or horizon");
  if (target_length && *target_length < 1) throw ParamError("race target_length >= 1");
  if (horizon && *horizon < 1) throw ParamError("race horizon >= 1");
}

RaceRecord race_once(const RaceConfig& config, std::uint64_t seed) {
  config.validate();
  PartyMiner honest(config.honest, derive_seed(seed, 0));
  PartyMiner attacker(config.attacker, derive_seed(seed, 1));

  RaceRecord rec;
  std::uint64_t honest_next = honest.next_block().ticks;
  std::uint64_t attacker_next = attacker.next_block().ticks;
  std::uint64_t next_sample = config.sample_stride;

  auto emit_samples_before = [&](std::uint64_t tick) {
    if (config.sample_stride == 0) return;
    for (; next_sample < tick; next_sample += config.sample_stride)
      rec.samples.push_back({next_sample, rec.honest_length, rec.attacker_length});
  };

  for (;;) {
    const std::uint64_t t = std::min(honest_next, attacker_next);
    if (config.horizon && t > *config.horizon) {
      rec.end_tick = *config.horizon;
      break;
    }
    emit_samples_before(t);
    if (honest_next == t) {
      ++rec.honest_length;
      honest_next = t + honest.next_block().ticks;
    }
    if (attacker_next == t) {
      ++rec.attacker_length;
      attacker_next = t + attacker.next_block().ticks;
    }
    if (rec.attacker_length > rec.honest_length) rec.attacker_ever_led = true;
    if (config.target_length && (rec.honest_length >= *config.target_length ||
                                 rec.attacker_length >= *config.target_length)) {
      rec.end_tick = t;
      break;
    }
  }
  emit_samples_before(rec.end_tick + 1);
  rec.attacker_leads_at_end = rec.attacker_length > rec.honest_length;
  rec.honest_leads_at_end = rec.honest_length > rec.attacker_length;
  return rec;
}

RaceResult race(const RaceConfig& config, std::uint64_t master_seed, std::uint64_t trials,
                unsigned threads) {
  config.validate();
  if (trials < 1) throw ParamError("trials >= 1");
  RaceResult out;
  out.records.resize(trials);
  parallel_for(trials, threads, [&](std::uint64_t t) {
    out.records[t] = race_once(config, derive_seed(master_seed, t));
  });

  auto& s = out.summary;
  s.trials = trials;
  std::uint64_t ever = 0, att_end = 0, hon_end = 0;
  for (const auto& r : out.records) {
    ever += r.attacker_ever_led;
    att_end += r.attacker_leads_at_end;
    hon_end += r.honest_leads_at_end;
  }
  const double n = static_cast<double>(trials);
  s.p_attacker_ever_led = static_cast<double>(ever) / n;
  s.p_attacker_leads_at_end = static_cast<double>(att_end) / n;
  s.p_honest_leads_at_end = static_cast<double>(hon_end) / n;
  s.se_attacker_ever_led = std::sqrt(s.p_attacker_ever_led * (1 - s.p_attacker_ever_led) / n);
  s.se_attacker_leads_at_end =
      std::sqrt(s.p_attacker_leads_at_end * (1 - s.p_attacker_leads_at_end) / n);
  return out;
}

}  // namespace stakesim
