#include <doctest.h>

#include <cmath>
#include <set>

#include "stakesim/analytics.hpp"
#include "stakesim/simulation.hpp"
#include "stakesim/threshold.hpp"

using namespace stakesim;

namespace {

SystemParams radical(double coin_d, double stake_d, double stake_rwd, double a) {
  return SystemParams({Variant::Radical, 1000, coin_d, stake_d, 0, stake_rwd, a});
}

PartyConfig exogenous(const SystemParams& sp, StakeShareDistribution dist,
                      Redraw redraw = Redraw::PerChain,
                      ZeroShareNodes zero = ZeroShareNodes::Idle) {
  const auto m = dist.node_count();
  return PartyConfig(sp, m, ExogenousShares{std::move(dist), redraw, zero});
}

std::vector<double> elapsed_of(const std::vector<TrialOutcome>& outcomes) {
  std::vector<double> out;
  for (const auto& o : outcomes) out.push_back(static_cast<double>(o.elapsed));
  return out;
}

}  // namespace

TEST_CASE("geometric sampling has mean 1/r") {
  for (double r : {0.9, 0.5, 0.1, 0.01}) {
    Rng rng(derive_seed(99, static_cast<std::uint64_t>(r * 1000)));
    std::vector<double> draws(100000);
    for (auto& d : draws) {
      d = static_cast<double>(rng.geometric(r));
      REQUIRE(d >= 1.0);
    }
    const auto s = summarize(draws);
    CHECK(std::abs(s.mean - 1.0 / r) <= 3.0 * s.std_error);
  }
  Rng rng(1);
  CHECK(rng.geometric(1.0) == 1);
  CHECK(rng.geometric(1.5) == 1);
}

TEST_CASE("seed derivation") {
  static_assert(derive_seed(1, 2) == derive_seed(1, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 20; ++m)
    for (std::uint64_t t = 0; t < 500; ++t) seen.insert(derive_seed(m, t));
  CHECK(seen.size() == 20 * 500);
}

TEST_CASE("summarize") {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = summarize(xs);
  CHECK(s.trials == 8);
  CHECK(s.mean == 5.0);
  // sample sd = sqrt(32/7)
  CHECK(s.std_error == doctest::Approx(std::sqrt(32.0 / 7.0 / 8.0)));
  CHECK(s.ci95_high - s.mean == doctest::Approx(1.96 * s.std_error));
  CHECK(s.mean - s.ci95_low == doctest::Approx(1.96 * s.std_error));
  CHECK_THROWS_AS(summarize(std::vector<double>{1.0}), ParamError);
}

TEST_CASE("mine_lone_chain") {
  SUBCASE("saturated thresholds succeed on every attempt") {
    const SystemParams sp({Variant::Linear, 100, 1, 1, 0, 50, 0.5});
    const auto r = mine_lone_chain(sp, 40, 3);
    CHECK(r.elapsed == 40);
    CHECK(r.saturated);
    CHECK(r.stake_rewards == 40);
  }
  SUBCASE("deterministic per seed") {
    const auto sp = radical(100, 200, 16, 0.5);
    const auto a = mine_lone_chain(sp, 50, 42);
    const auto b = mine_lone_chain(sp, 50, 42);
    CHECK(a.per_block_times == b.per_block_times);
    CHECK(a.stake_trajectory == b.stake_trajectory);
    CHECK(a.per_block_times != mine_lone_chain(sp, 50, 43).per_block_times);
  }
  SUBCASE("ledger bookkeeping") {
    const auto sp = radical(100, 300, 16, 0.5);
    const auto r = mine_lone_chain(sp, 200, 8);
    CHECK_FALSE(r.saturated);
    CHECK(r.per_block_times.size() == 200);
    std::uint64_t total = 0;
    for (auto t : r.per_block_times) total += t;
    CHECK(total == r.elapsed);
    CHECK(r.stake_trajectory.back() == 16.0 * static_cast<double>(r.stake_rewards));
    for (std::size_t i = 1; i < r.stake_trajectory.size(); ++i)
      CHECK(r.stake_trajectory[i] >= r.stake_trajectory[i - 1]);
  }
}

TEST_CASE("lone Monte Carlo agrees with the closed forms") {
  struct Case {
    SystemParams params;
    std::uint64_t L;
  };
  const SystemParams log_eq({Variant::Logarithmic, 1000, 100, 100, 0, 4, 0.5});
  const SystemParams log_half({Variant::Logarithmic, 1000, 100, 200, 0, 4, 0.5});
  const Case cases[] = {{radical(100, 100, 16, 0.5), 5},  {radical(100, 200, 16, 0.5), 5},
                        {log_eq, 5},                      {log_half, 5},
                        {radical(100, 200, 16, 0.3), 50}, {log_half, 50}};
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    const auto s = run_trials(LoneJob{c.params}, c.L, 4000, ++seed);
    const double analytic = expected_time_lone(c.params, c.L);
    CHECK(std::abs(s.mean - analytic) <= 3.0 * s.std_error);
  }
}

TEST_CASE("party validation") {
  const auto sp = radical(100, 100, 16, 0.5);
  CHECK_THROWS_AS(PartyConfig(sp, 3, ExogenousShares{StakeShareDistribution::uniform(4)}),
                  ParamError);
  CHECK_THROWS_AS(PartyConfig(sp, 0, EndogenousStakes{}), ParamError);
  CHECK_THROWS_AS(PartyConfig(sp, 2, EndogenousStakes{{1.0}}), ParamError);
  CHECK_THROWS_AS(PartyConfig(sp, 2, EndogenousStakes{{1.0, -1.0}}), ParamError);
  const PartyConfig ok(sp, 3, EndogenousStakes{});
  CHECK(std::get<EndogenousStakes>(ok.mode()).initial_stakes == std::vector<double>(3, 0.0));
}

TEST_CASE("first block winner follows the conditional success law") {
  // Linear, CoinD = 100, StakRwd = 1: p_i = (1 + stake_i) / 100.
  const SystemParams sp({Variant::Linear, 1000, 100, 100, 0, 1, 0.5});
  const PartyConfig cfg(sp, 2, EndogenousStakes{{79.0, 19.0}});  // p = 0.8, 0.2
  const double p0 = 0.8, p1 = 0.2;
  const double any = 1 - (1 - p0) * (1 - p1);
  const double win0 = (p0 * (1 - p1) + p0 * p1 / 2) / any;

  const int n = 40000;
  int wins = 0;
  std::vector<double> ticks;
  for (int i = 0; i < n; ++i) {
    PartyMiner miner(cfg, derive_seed(5, i));
    const auto ev = miner.next_block();
    wins += ev.creator == 0;
    ticks.push_back(static_cast<double>(ev.ticks));
  }
  const double freq = static_cast<double>(wins) / n;
  CHECK(std::abs(freq - win0) <= 3.0 * std::sqrt(win0 * (1 - win0) / n));
  const auto s = summarize(ticks);
  CHECK(std::abs(s.mean - 1.0 / any) <= 3.0 * s.std_error);
}

TEST_CASE("saturated ties are broken uniformly") {
  const SystemParams sp({Variant::Constant, 100, 1, 1, 0, 1, 0.5});
  const PartyConfig cfg(sp, 4, EndogenousStakes{});
  PartyMiner miner(cfg, 77);
  std::vector<int> counts(4);
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const auto ev = miner.next_block();
    REQUIRE(ev.ticks == 1);
    ++counts[ev.creator];
  }
  CHECK(miner.saturated() == false);  // threshold equals M exactly
  for (int c : counts) CHECK(std::abs(c / double(n) - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("exogenous party matches the exact tick-model expectation") {
  // p = 1, point mass on uniform shares: block n+1 has k = n and every node
  // succeeds per tick with r_n = (16 (1 + n/4))^0.5 / 100.
  const auto sp = radical(100, 100, 16, 0.5);
  const std::uint64_t L = 20;
  double exact = 0.0;
  for (std::uint64_t n = 0; n < L; ++n) {
    const double r = std::sqrt(16.0 * (1.0 + n / 4.0)) / 100.0;
    exact += 1.0 / (1.0 - std::pow(1.0 - r, 4));
  }
  const auto s =
      run_trials(PartyJob{exogenous(sp, StakeShareDistribution::uniform(4))}, L, 6000, 21);
  CHECK(std::abs(s.mean - exact) <= 3.0 * s.std_error);
  CHECK(s.mean <= party_bound_radical(AttackModel(sp, L), StakeShareDistribution::uniform(4)));
}

TEST_CASE("degenerate party behaves like the lone miner") {
  const auto sp = radical(100, 200, 16, 0.5);
  const std::uint64_t L = 30, trials = 6000;
  const auto lone = summarize(elapsed_of(simulate_trials(LoneJob{sp}, L, trials, 1)));
  const auto party = summarize(elapsed_of(simulate_trials(
      PartyJob{exogenous(sp, StakeShareDistribution::point_mass({1, 0}))}, L, trials, 2)));
  const double se = std::hypot(lone.std_error, party.std_error);
  CHECK(std::abs(lone.mean - party.mean) <= 3.0 * se);

  SUBCASE("zero-share nodes that mine make the party faster") {
    const auto mining = summarize(elapsed_of(simulate_trials(
        PartyJob{exogenous(sp, StakeShareDistribution::point_mass({1, 0}), Redraw::PerChain,
                           ZeroShareNodes::Mine)},
        L, trials, 3)));
    CHECK(mining.mean + 3.0 * std::hypot(mining.std_error, lone.std_error) < lone.mean);
  }
}

TEST_CASE("party bound holds under both redraw modes") {
  const StakeShareDistribution mix({{0.5, 0.5, 0, 0}, {0.25, 0.25, 0.25, 0.25}, {0.7, 0.1, 0.1, 0.1}},
                                   {0.3, 0.3, 0.4});
  const auto sp = radical(100, 200, 16, 0.5);
  const SystemParams lp({Variant::Logarithmic, 1000, 100, 200, 0, 4, 0.5});
  for (auto redraw : {Redraw::PerChain, Redraw::PerBlock}) {
    const auto s = run_trials(PartyJob{exogenous(sp, mix, redraw)}, 15, 4000, 8);
    CHECK(s.mean <= party_bound_radical(AttackModel(sp, 15), mix) + 3.0 * s.std_error);
    const auto t = run_trials(PartyJob{exogenous(lp, mix, redraw)}, 15, 4000, 9);
    CHECK(t.mean <= party_bound_log(AttackModel(lp, 15), mix) + 3.0 * t.std_error);
  }
}

TEST_CASE("mine_party_chain trajectories") {
  const auto sp = radical(100, 300, 16, 0.5);
  const PartyConfig cfg(sp, 3, EndogenousStakes{{0, 16, 32}});
  const auto a = mine_party_chain(cfg, 60, 4);
  const auto b = mine_party_chain(cfg, 60, 4);
  CHECK(a.per_block_times == b.per_block_times);
  CHECK(a.reward_count_trajectory == b.reward_count_trajectory);
  for (std::size_t i = 1; i < a.reward_count_trajectory.size(); ++i) {
    const auto step = a.reward_count_trajectory[i] - a.reward_count_trajectory[i - 1];
    CHECK(step <= 1);
  }

  PartyMiner miner(cfg, 4);
  for (int i = 0; i < 60; ++i) miner.next_block();
  double total_stake = 0.0;
  for (const auto& [node, acc] : miner.ledger().accounts()) total_stake += acc.stake;
  CHECK(total_stake == 48.0 + 16.0 * static_cast<double>(miner.stake_rewards()));
  CHECK(miner.ledger().height() == 60);
}

TEST_CASE("run_trials determinism and degenerate cases") {
  const SystemParams sat({Variant::Linear, 100, 1, 1, 0, 50, 0.5});
  const auto s = run_trials(LoneJob{sat}, 7, 2, 0);
  CHECK(s.mean == 7.0);
  CHECK(s.std_error == 0.0);
  CHECK_THROWS_AS(run_trials(LoneJob{sat}, 7, 1, 0), ParamError);

  const auto sp = radical(100, 200, 16, 0.5);
  CHECK(run_trials(LoneJob{sp}, 20, 500, 9) == run_trials(LoneJob{sp}, 20, 500, 9));
  const PartyJob party{exogenous(sp, StakeShareDistribution::uniform(3), Redraw::PerBlock)};
  CHECK(simulate_trials(party, 20, 301, 9, 1) == simulate_trials(party, 20, 301, 9, 8));
  CHECK(simulate_trials(LoneJob{sp}, 20, 301, 9, 1) == simulate_trials(LoneJob{sp}, 20, 301, 9, 5));
}

TEST_CASE("race stop criteria") {
  const auto sp = radical(100, 200, 16, 0.5);
  const PartyConfig side(sp, 2, EndogenousStakes{});
  RaceConfig both{side, side, 10, 100, 0};
  CHECK_THROWS_AS(both.validate(), ParamError);
  RaceConfig none{side, side, std::nullopt, std::nullopt, 0};
  CHECK_THROWS_AS(none.validate(), ParamError);

  RaceConfig to_len{side, side, 25, std::nullopt, 7};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = race_once(to_len, seed);
    CHECK(std::max(r.honest_length, r.attacker_length) == 25);
    REQUIRE_FALSE(r.samples.empty());
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      CHECK(r.samples[i].tick == 7 * (i + 1));
      CHECK(r.samples[i].tick <= r.end_tick);
      if (i) CHECK(r.samples[i].honest_length >= r.samples[i - 1].honest_length);
    }
    CHECK(r.samples.back().tick + 7 > r.end_tick);
    if (r.attacker_leads_at_end) CHECK(r.attacker_ever_led);
  }
}

TEST_CASE("dominated race") {
  const SystemParams fast({Variant::Constant, 1000, 1, 1, 0, 1, 0.5});
  const SystemParams slow({Variant::Constant, 1000, 100, 100, 0, 1, 0.5});
  RaceConfig rc{PartyConfig(slow, 1, EndogenousStakes{}), PartyConfig(fast, 1, EndogenousStakes{}),
                std::nullopt, 200, 0};
  const auto r = race(rc, 3, 500);
  CHECK(r.summary.p_attacker_leads_at_end == 1.0);
  CHECK(r.summary.p_attacker_ever_led == 1.0);
  for (const auto& rec : r.records) CHECK(rec.attacker_length == 200);
}

TEST_CASE("symmetric race") {
  const auto sp = radical(100, 200, 16, 0.5);
  const PartyConfig side(sp, 3, EndogenousStakes{});
  RaceConfig rc{side, side, std::nullopt, 1500, 0};
  const auto r = race(rc, 11, 3000, 4);
  const double n = 3000;
  const double diff = r.summary.p_attacker_leads_at_end - r.summary.p_honest_leads_at_end;
  const double se = std::sqrt((r.summary.p_attacker_leads_at_end + r.summary.p_honest_leads_at_end) / n);
  CHECK(std::abs(diff) <= 3.0 * se);
  // ties are rare at this horizon, so each side leads about half the time
  const double ties = 1.0 - r.summary.p_attacker_leads_at_end - r.summary.p_honest_leads_at_end;
  CHECK(ties < 0.1);
  CHECK(std::abs(r.summary.p_attacker_leads_at_end - (1.0 - ties) / 2) <=
        3.0 * r.summary.se_attacker_leads_at_end);
  const auto again = race(rc, 11, 3000, 1);
  CHECK(again.summary == r.summary);
  CHECK(again.records == r.records);
}
