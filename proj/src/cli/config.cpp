#include "stakesim/cli/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stakesim/share_distribution.hpp"

namespace stakesim::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("expected a nonnegative integer, got '" + s + "'");
  return v;
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& part : split(s, ',')) out.push_back(to_double(part));
  return out;
}

std::vector<std::vector<double>> to_matrix(const std::string& s) {
  std::vector<std::vector<double>> out;
  if (trim(s).empty()) return out;
  for (const auto& row : split(s, ';')) out.push_back(to_list(row));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::string fmt(const std::vector<std::vector<double>>& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "; " : "") + fmt(m[i]);
  return s;
}

template <class Enum, std::size_t N>
Enum to_enum(const std::string& s, const std::array<std::pair<Enum, const char*>, N>& names) {
  for (const auto& [e, n] : names)
    if (s == n) return e;
  std::string allowed;
  for (const auto& [e, n] : names) allowed += (allowed.empty() ? "" : "|") + std::string(n);
  throw ConfigError("expected one of " + allowed + ", got '" + s + "'");
}

template <class Enum, std::size_t N>
std::string from_enum(Enum v, const std::array<std::pair<Enum, const char*>, N>& names) {
  for (const auto& [e, n] : names)
    if (e == v) return n;
  return "?";
}

constexpr std::array<std::pair<JobType, const char*>, 4> kJobs{{
    {JobType::Analytic, "analytic"},
    {JobType::Simulate, "simulate"},
    {JobType::Race, "race"},
    {JobType::VerifyBounds, "verify-bounds"},
}};
constexpr std::array<std::pair<OutputFormat, const char*>, 2> kFormats{{
    {OutputFormat::Csv, "csv"},
    {OutputFormat::Json, "json"},
}};
constexpr std::array<std::pair<PartyMode, const char*>, 2> kModes{{
    {PartyMode::Exogenous, "exogenous"},
    {PartyMode::Endogenous, "endogenous"},
}};
constexpr std::array<std::pair<Redraw, const char*>, 2> kRedraws{{
    {Redraw::PerChain, "per-chain"},
    {Redraw::PerBlock, "per-block"},
}};
constexpr std::array<std::pair<ZeroShareNodes, const char*>, 2> kZeroShare{{
    {ZeroShareNodes::Idle, "idle"},
    {ZeroShareNodes::Mine, "mine"},
}};

struct KeySpec {
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define STAKESIM_KEY(NAME, FIELD, PARSE, FORMAT)                                          \
  KeySpec {                                                                               \
    NAME, [](ExperimentConfig& c, const std::string& v) { c.FIELD = PARSE(v); },          \
        [](const ExperimentConfig& c) { return FORMAT(c.FIELD); }                         \
  }

std::string u64_str(std::uint64_t v) { return std::to_string(v); }
std::size_t to_size(const std::string& s) { return static_cast<std::size_t>(to_u64(s)); }
std::string size_str(std::size_t v) { return std::to_string(v); }
std::string same(const std::string& s) { return s; }

const std::vector<KeySpec>& key_entries() {
  static const std::vector<KeySpec> specs = {
      KeySpec{"job",
              [](ExperimentConfig& c, const std::string& v) { c.job = to_enum(v, kJobs); },
              [](const ExperimentConfig& c) { return from_enum(c.job, kJobs); }},
      KeySpec{"variant",
              [](ExperimentConfig& c, const std::string& v) {
                auto parsed = parse_variant(v);
                if (!parsed)
                  throw ConfigError(
                      "expected one of pow|pos|constant|linear|radical|logarithmic, got '" + v +
                      "'");
                c.system.variant = *parsed;
              },
              [](const ExperimentConfig& c) { return std::string(to_string(c.system.variant)); }},
      STAKESIM_KEY("scale", system.scale, to_double, fmt),
      STAKESIM_KEY("coin_difficulty", system.coin_difficulty, to_double, fmt),
      STAKESIM_KEY("stake_difficulty", system.stake_difficulty, to_double, fmt),
      STAKESIM_KEY("coin_reward", system.coin_reward, to_double, fmt),
      STAKESIM_KEY("stake_reward", system.stake_reward, to_double, fmt),
      STAKESIM_KEY("exponent", system.exponent, to_double, fmt),
      STAKESIM_KEY("chain_length", chain_length, to_u64, u64_str),
      STAKESIM_KEY("trials", trials, to_u64, u64_str),
      STAKESIM_KEY("seed", seed, to_u64, u64_str),
      KeySpec{"format",
              [](ExperimentConfig& c, const std::string& v) { c.format = to_enum(v, kFormats); },
              [](const ExperimentConfig& c) { return from_enum(c.format, kFormats); }},
      STAKESIM_KEY("out", out, same, same),
      STAKESIM_KEY("node_count", node_count, to_size, size_str),
      KeySpec{"share_mode",
              [](ExperimentConfig& c, const std::string& v) { c.share_mode = to_enum(v, kModes); },
              [](const ExperimentConfig& c) { return from_enum(c.share_mode, kModes); }},
      KeySpec{"redraw",
              [](ExperimentConfig& c, const std::string& v) { c.redraw = to_enum(v, kRedraws); },
              [](const ExperimentConfig& c) { return from_enum(c.redraw, kRedraws); }},
      KeySpec{"zero_share",
              [](ExperimentConfig& c, const std::string& v) {
                c.zero_share = to_enum(v, kZeroShare);
              },
              [](const ExperimentConfig& c) { return from_enum(c.zero_share, kZeroShare); }},
      STAKESIM_KEY("support", support, to_matrix, fmt),
      STAKESIM_KEY("masses", masses, to_list, fmt),
      STAKESIM_KEY("initial_stakes", initial_stakes, to_list, fmt),
      STAKESIM_KEY("honest_nodes", honest_nodes, to_size, size_str),
      STAKESIM_KEY("attacker_nodes", attacker_nodes, to_size, size_str),
      STAKESIM_KEY("honest_initial_stake", honest_initial_stake, to_double, fmt),
      STAKESIM_KEY("attacker_initial_stake", attacker_initial_stake, to_double, fmt),
      STAKESIM_KEY("horizon", horizon, to_u64, u64_str),
      STAKESIM_KEY("sample_stride", sample_stride, to_u64, u64_str),
      STAKESIM_KEY("grid_n_max", grid_n_max, to_u64, u64_str),
      STAKESIM_KEY("grid_exponents", grid_exponents, to_list, fmt),
      STAKESIM_KEY("grid_probabilities", grid_probabilities, to_list, fmt),
      STAKESIM_KEY("grid_stake_rewards", grid_stake_rewards, to_list, fmt),
      STAKESIM_KEY("grid_k_max", grid_k_max, to_u64, u64_str),
      STAKESIM_KEY("grid_x_step", grid_x_step, to_double, fmt),
      STAKESIM_KEY("concentration_k_max", concentration_k_max, to_u64, u64_str),
      STAKESIM_KEY("concentration_c", concentration_c, to_double, fmt),
      STAKESIM_KEY("concentration_stake_reward", concentration_stake_reward, to_double, fmt),
  };
  return specs;
}

#undef STAKESIM_KEY

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void validate(const ExperimentConfig& c) {
  try {
    SystemParams params(c.system);
    check(c.chain_length >= 1, "chain_length >= 1");
    if (c.job == JobType::Simulate) check(c.trials >= 2, "trials >= 2 for simulate jobs");
    if (c.job == JobType::Race) check(c.trials >= 1, "trials >= 1 for race jobs");
    if (c.node_count > 0) {
      (void)party_from(c);
    } else {
      check(c.support.empty() && c.masses.empty() && c.initial_stakes.empty(),
            "support, masses and initial_stakes require node_count >= 1");
    }
    check(c.honest_nodes >= 1, "honest_nodes >= 1");
    check(c.attacker_nodes >= 1, "attacker_nodes >= 1");
    check(c.honest_initial_stake >= 0.0, "honest_initial_stake >= 0");
    check(c.attacker_initial_stake >= 0.0, "attacker_initial_stake >= 0");
    for (double a : c.grid_exponents) check(a > 0.0 && a < 1.0, "grid_exponents in (0, 1)");
    for (double p : c.grid_probabilities)
      check(p > 0.0 && p <= 1.0, "grid_probabilities in (0, 1]");
    for (double s : c.grid_stake_rewards) check(s >= 2.0, "grid_stake_rewards >= 2");
    check(c.grid_x_step > 0.0 && c.grid_x_step <= 1.0, "grid_x_step in (0, 1]");
    check(c.concentration_c > 1.0, "concentration_c > 1");
    check(c.concentration_stake_reward >= 2.0, "concentration_stake_reward >= 2");
  } catch (const ParamError& e) {
    throw ConfigError(e.what());
  }
}

const KeySpec& entry_for(const std::string& key) {
  for (const auto& s : key_entries())
    if (key == s.name) return s;
  throw ConfigError("unknown key '" + key + "'");
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const auto& entry = entry_for(key);
  try {
    entry.set(c, value);
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

ExperimentConfig build(const KeyValues& file_values, const KeyValues& overrides) {
  ExperimentConfig c;
  for (const auto& [k, v] : file_values) apply(c, k, v);
  for (const auto& [k, v] : overrides) apply(c, k, v);
  validate(c);
  return c;
}

}  // namespace

std::string_view to_string(JobType job) {
  for (const auto& [j, n] : kJobs)
    if (j == job) return n;
  return "?";
}

std::optional<JobType> parse_job(std::string_view name) {
  for (const auto& [j, n] : kJobs)
    if (name == n) return j;
  return std::nullopt;
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

ExperimentConfig config_from_text(const std::string& text, const KeyValues& overrides) {
  return build(parse_key_values(text), overrides);
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const KeyValues& overrides) {
  KeyValues file_values;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot read config file '" + path->string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    file_values = parse_key_values(buf.str());
  }
  return build(file_values, overrides);
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& entry : key_entries()) out += std::string(entry.name) + " = " + entry.get(config) + "\n";
  return out;
}

PartyConfig party_from(const ExperimentConfig& c) {
  SystemParams params(c.system);
  if (c.share_mode == PartyMode::Endogenous) {
    if (!c.support.empty() || !c.masses.empty())
      throw ConfigError("support and masses apply to share_mode = exogenous only");
    return PartyConfig(params, c.node_count, EndogenousStakes{c.initial_stakes});
  }
  if (!c.initial_stakes.empty())
    throw ConfigError("initial_stakes apply to share_mode = endogenous only");
  if (c.support.empty() && c.masses.empty())
    return PartyConfig(params, c.node_count,
                       ExogenousShares{StakeShareDistribution::uniform(c.node_count), c.redraw,
                                       c.zero_share});
  return PartyConfig(params, c.node_count,
                     ExogenousShares{StakeShareDistribution(c.support, c.masses), c.redraw,
                                     c.zero_share});
}

}  // namespace stakesim::cli
