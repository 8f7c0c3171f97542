#include "stakesim/cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stakesim/analytics.hpp"
#include "stakesim/simulation.hpp"

namespace stakesim::cli {

namespace {

constexpr double kBoundTolerance = 1e-12;

std::string join(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += (s.empty() ? "" : ";") + std::string(k) + "=" + v;
  return s;
}

std::string num(double v) { return format_cell(Cell{v}); }

// --- analytic --------------------------------------------------------------

Table analytic_job(const ExperimentConfig& c, std::ostream& diag) {
  const SystemParams params(c.system);
  if (c.node_count > 0) diag << "warning: party settings are ignored by the analytic job\n";
  Table t{{"variant", "L", "p", "expected_time", "upper_bound"}, {}};
  std::vector<double> times, bounds;
  try {
    times = expected_block_times_lone(params, c.chain_length);
    bounds = block_bound_terms_lone(params, c.chain_length);
  } catch (const ParamError& e) {
    throw ConfigError(e.what());
  }
  double time = 0.0, bound = 0.0;
  const std::string variant(to_string(params.variant()));
  for (std::uint64_t n = 0; n < c.chain_length; ++n) {
    time += times[n];
    bound += bounds[n];
    t.add({variant, n + 1, params.stake_issue_ratio(), time, bound});
  }
  return t;
}

// --- simulate --------------------------------------------------------------

Table simulate_job(const ExperimentConfig& c, unsigned threads, std::ostream& diag) {
  const SystemParams params(c.system);
  const bool lone = c.node_count == 0;
  const TrialJob job = lone ? TrialJob{LoneJob{params}} : TrialJob{PartyJob{party_from(c)}};
  const auto outcomes = simulate_trials(job, c.chain_length, c.trials, c.seed, threads);

  Table t{{"kind", "trial", "elapsed", "stake_rewards", "mean", "std_error", "ci95_low",
           "ci95_high", "analytic_value", "z_score"},
          {}};
  std::vector<double> elapsed;
  elapsed.reserve(outcomes.size());
  bool saturated = false;
  for (std::uint64_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    saturated = saturated || o.saturated;
    elapsed.push_back(static_cast<double>(o.elapsed));
    t.add({std::string("trial"), i, o.elapsed, o.stake_rewards});
  }
  if (saturated)
    diag << "warning: a threshold exceeded the scale M; success probabilities were capped\n";

  const TrialStats s = summarize(elapsed);
  std::vector<Cell> row{std::string("summary"), Cell{}, Cell{}, Cell{}, s.mean, s.std_error,
                        s.ci95_low, s.ci95_high};
  if (lone) {
    try {
      const double analytic = expected_time_lone(params, c.chain_length);
      row.emplace_back(analytic);
      if (s.std_error > 0.0)
        row.emplace_back((s.mean - analytic) / s.std_error);
    } catch (const ParamError& e) {
      diag << "note: no analytic value (" << e.what() << ")\n";
    }
  }
  t.add(std::move(row));
  return t;
}

// --- race ------------------------------------------------------------------

Table race_job(const ExperimentConfig& c, unsigned threads) {
  const SystemParams params(c.system);
  auto side = [&](std::size_t nodes, double stake) {
    return PartyConfig(params, nodes, EndogenousStakes{std::vector<double>(nodes, stake)});
  };
  RaceConfig rc{side(c.honest_nodes, c.honest_initial_stake),
                side(c.attacker_nodes, c.attacker_initial_stake),
                std::nullopt,
                std::nullopt,
                c.sample_stride};
  if (c.horizon > 0)
    rc.horizon = c.horizon;
  else
    rc.target_length = c.chain_length;
  const RaceResult r = race(rc, c.seed, c.trials, threads);

  Table t{{"kind", "trial", "honest_length", "attacker_length", "attacker_led",
           "attacker_leads_at_end", "p_attacker_ever_led", "p_attacker_leads_at_end",
           "p_honest_leads_at_end", "note"},
          {}};
  for (std::uint64_t i = 0; i < r.records.size(); ++i) {
    const auto& rec = r.records[i];
    t.add({std::string("trial"), i, rec.honest_length, rec.attacker_length,
           rec.attacker_ever_led, rec.attacker_leads_at_end});
  }
  t.add({std::string("summary"), Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
         r.summary.p_attacker_ever_led, r.summary.p_attacker_leads_at_end,
         r.summary.p_honest_leads_at_end,
         std::string("exploratory: no closed-form reference for races")});
  return t;
}

// --- verify-bounds ---------------------------------------------------------

struct BoundRows {
  Table table{{"check_name", "parameters", "lhs", "rhs", "satisfied"}, {}};
  bool all_mandatory = true;

  void add(const char* name, std::string params, double lhs, double rhs, bool ok,
           bool mandatory = true) {
    table.add({std::string(name), std::move(params), lhs, rhs, ok});
    if (mandatory && !ok) all_mandatory = false;
  }
};

std::vector<double> x_grid(double step) {
  std::vector<double> xs;
  const auto count = static_cast<std::uint64_t>(std::llround(1.0 / step));
  for (std::uint64_t i = 0; i <= count; ++i)
    xs.push_back(std::min(1.0, static_cast<double>(i) * step));
  if (xs.back() < 1.0) xs.push_back(1.0);
  return xs;
}

StakeShareDistribution concentration_distribution(const ExperimentConfig& c) {
  if (c.node_count > 2 && c.share_mode == PartyMode::Exogenous && !c.support.empty())
    return StakeShareDistribution(c.support, c.masses);
  // 16 nodes, 12 of them holding 1/12 each
  std::vector<double> x(16, 0.0);
  std::fill(x.begin(), x.begin() + 12, 1.0 / 12.0);
  return StakeShareDistribution::point_mass(x);
}

Table verify_bounds_job(const ExperimentConfig& c, ExitCode& exit_code) {
  BoundRows rows;

  for (double a : c.grid_exponents)
    for (double p : c.grid_probabilities)
      for (std::uint64_t n = 0; n <= c.grid_n_max; ++n) {
        const double lhs = inner_sum_radical(n, a, p);
        const double rhs = inner_bound_radical(n, a, p);
        rows.add("radical_inner_sum_bound",
                 join({{"n", std::to_string(n)}, {"a", num(a)}, {"p", num(p)}}), lhs, rhs,
                 lhs <= rhs + kBoundTolerance);
      }

  for (double s : c.grid_stake_rewards)
    for (double p : c.grid_probabilities)
      for (std::uint64_t n = 0; n <= c.grid_n_max; ++n) {
        const double lhs = inner_sum_log(n, s, p);
        const double rhs = inner_bound_log(n, s, p);
        rows.add("log_inner_sum_bound",
                 join({{"n", std::to_string(n)}, {"stake_reward", num(s)}, {"p", num(p)}}), lhs,
                 rhs, lhs <= rhs + kBoundTolerance);
      }

  // Pointwise inequalities: one row per k at the x with the least slack.
  const auto xs = x_grid(c.grid_x_step);
  for (std::uint64_t k = 0; k <= c.grid_k_max; ++k) {
    const double kd = static_cast<double>(k);
    double worst_slack = INFINITY, wl = 0, wr = 0, wx = 0;
    for (double x : xs) {
      const double lhs = kd * x + 1.0, rhs = (kd + 1.0) * x;
      if (lhs - rhs < worst_slack) std::tie(worst_slack, wl, wr, wx) = std::tuple(lhs - rhs, lhs, rhs, x);
    }
    rows.add("linear_share_inequality", join({{"k", std::to_string(k)}, {"x", num(wx)}}), wl, wr,
             wl >= wr - kBoundTolerance);
  }
  for (std::uint64_t k = 0; k <= c.grid_k_max; ++k) {
    const double kd = static_cast<double>(k);
    double worst_slack = INFINITY, wl = 0, wr = 0, wx = 0;
    for (double x : xs) {
      const double lhs = std::log2(1.0 + kd * x), rhs = std::log2(1.0 + kd) * std::log2(1.0 + x);
      if (lhs - rhs < worst_slack) std::tie(worst_slack, wl, wr, wx) = std::tuple(lhs - rhs, lhs, rhs, x);
    }
    rows.add("log_share_inequality", join({{"k", std::to_string(k)}, {"x", num(wx)}}), wl, wr,
             wl >= wr - kBoundTolerance);
  }

  // Equal-difficulty closed forms against the general double sums.
  for (std::uint64_t L : {1u, 2u, 10u, 50u, 200u}) {
    for (double a : c.grid_exponents) {
      SystemParams::Fields f{Variant::Radical, 1e15, 1e6, 1e6, 0, 16, a};
      const SystemParams sp(f);
      const double lhs = expected_time_lone_radical(AttackModel(sp, L));
      const double rhs = expected_time_lone_radical_equal(sp, L);
      rows.add("radical_equal_difficulty_form",
               join({{"L", std::to_string(L)}, {"a", num(a)}}), lhs, rhs,
               std::abs(lhs - rhs) <= kBoundTolerance * std::abs(rhs));
    }
    for (double s : c.grid_stake_rewards) {
      SystemParams::Fields f{Variant::Logarithmic, 1e15, 1e6, 1e6, 0, s, 0.5};
      const SystemParams sp(f);
      const double lhs = expected_time_lone_log(AttackModel(sp, L));
      const double rhs = expected_time_lone_log_equal(sp, L);
      rows.add("log_equal_difficulty_form",
               join({{"L", std::to_string(L)}, {"stake_reward", num(s)}}), lhs, rhs,
               std::abs(lhs - rhs) <= kBoundTolerance * std::abs(rhs));
    }
  }

  // Logarithmic concentration report: informational only.
  try {
    const auto dist = concentration_distribution(c);
    const auto rep = concentration_check_log(dist, c.concentration_c, c.concentration_stake_reward,
                                             c.concentration_k_max);
    const std::string base = join({{"m", std::to_string(dist.node_count())},
                                   {"c", num(c.concentration_c)},
                                   {"stake_reward", num(c.concentration_stake_reward)}});
    rows.add("log_concentration_hypothesis", base, static_cast<double>(rep.min_count),
             rep.required_count, rep.hypothesis_holds, false);
    rows.add("log_concentration_per_k",
             base + ";k_max=" + std::to_string(rep.k_max) +
                 ";violations=" + std::to_string(rep.violation_count),
             rep.violations.empty() ? 0.0 : rep.violations.front().lhs,
             rep.violations.empty() ? 0.0 : rep.violations.front().rhs, rep.per_k_holds, false);
  } catch (const ParamError& e) {
    rows.add("log_concentration_per_k", std::string("skipped: ") + e.what(), 0.0, 0.0, false,
             false);
  }

  exit_code = rows.all_mandatory ? kExitOk : kExitVerificationFailed;
  return std::move(rows.table);
}

}  // namespace

JobOutput run_job(const ExperimentConfig& config, unsigned threads, std::ostream& diag) {
  JobOutput out;
  try {
    switch (config.job) {
      case JobType::Analytic:
        out.table = analytic_job(config, diag);
        break;
      case JobType::Simulate:
        out.table = simulate_job(config, threads, diag);
        break;
      case JobType::Race:
        out.table = race_job(config, threads);
        break;
      case JobType::VerifyBounds:
        out.table = verify_bounds_job(config, out.exit_code);
        break;
    }
  } catch (const ParamError& e) {
    throw ConfigError(e.what());
  }
  return out;
}

ExitCode run_to_stream(const ExperimentConfig& config, unsigned threads, std::ostream& out,
                       std::ostream& diag) {
  const JobOutput result = run_job(config, threads, diag);
  if (config.format == OutputFormat::Json)
    write_json(out, result.table);
  else
    write_csv(out, result.table);
  return result.exit_code;
}

int run(const ExperimentConfig& config, unsigned threads, std::ostream& diag) {
  try {
    if (config.out.empty()) {
      const ExitCode code = run_to_stream(config, threads, std::cout, diag);
      std::cout.flush();
      return std::cout ? code : kExitIoError;
    }
    // Buffer first so a failed job leaves no partial artifact.
    std::ostringstream buf;
    const ExitCode code = run_to_stream(config, threads, buf, diag);
    std::ofstream file(config.out, std::ios::binary);
    if (!file) {
      diag << "error: cannot open '" << config.out << "' for writing\n";
      return kExitIoError;
    }
    file << buf.str();
    file.flush();
    if (!file) {
      diag << "error: failed writing '" << config.out << "'\n";
      return kExitIoError;
    }
    return code;
  } catch (const ConfigError& e) {
    diag << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace stakesim::cli
