#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stakesim/params.hpp"
#include "stakesim/simulation.hpp"

namespace stakesim::cli {

/// Invalid or unparsable experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class JobType { Analytic, Simulate, Race, VerifyBounds };
enum class OutputFormat { Csv, Json };
enum class PartyMode { Exogenous, Endogenous };

struct ExperimentConfig {
  JobType job = JobType::Analytic;
  SystemParams::Fields system;
  std::uint64_t chain_length = 1;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::Csv;
  std::string out;  // empty: standard output

  // party (simulate); node_count 0 selects the lone miner
  std::size_t node_count = 0;
  PartyMode share_mode = PartyMode::Exogenous;
  Redraw redraw = Redraw::PerChain;
  ZeroShareNodes zero_share = ZeroShareNodes::Idle;
  std::vector<std::vector<double>> support;  // empty: uniform shares
  std::vector<double> masses;
  std::vector<double> initial_stakes;

  // race; horizon 0 races to chain_length instead
  std::size_t honest_nodes = 1;
  std::size_t attacker_nodes = 1;
  double honest_initial_stake = 0.0;
  double attacker_initial_stake = 0.0;
  std::uint64_t horizon = 0;
  std::uint64_t sample_stride = 0;

  // verify-bounds
  std::uint64_t grid_n_max = 200;
  std::vector<double> grid_exponents{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> grid_probabilities{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> grid_stake_rewards{2, 4, 16, 256};
  std::uint64_t grid_k_max = 1000;
  double grid_x_step = 1e-3;
  std::uint64_t concentration_k_max = 10000;
  double concentration_c = 1.5;
  double concentration_stake_reward = 16;

  bool operator==(const ExperimentConfig&) const = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses the key = value text format. Blank lines and lines starting with
/// '#' are ignored; keys may appear once.
KeyValues parse_key_values(const std::string& text);

/// Builds a validated config from defaults, then the file at `path` (when
/// given), then `overrides` in order. Throws ConfigError naming the offending
/// key or constraint.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const KeyValues& overrides = {});

ExperimentConfig config_from_text(const std::string& text, const KeyValues& overrides = {});

/// Resolved form of a config in the same text format; reloading it gives an
/// identical config.
std::string to_text(const ExperimentConfig& config);

std::string_view to_string(JobType job);
std::optional<JobType> parse_job(std::string_view name);

/// Builds the simulation party for a simulate job (node_count >= 1).
PartyConfig party_from(const ExperimentConfig& config);

}  // namespace stakesim::cli
