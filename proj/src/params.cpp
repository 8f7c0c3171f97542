#include "stakesim/params.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace stakesim {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 6> kVariantNames{{
    {Variant::ProofOfWork, "pow"},
    {Variant::ProofOfStake, "pos"},
    {Variant::Constant, "constant"},
    {Variant::Linear, "linear"},
    {Variant::Radical, "radical"},
    {Variant::Logarithmic, "logarithmic"},
}};

void require(bool ok, const std::string& what) {
  if (!ok) throw ParamError(what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& [variant, name] : kVariantNames)
    if (variant == v) return name;
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (const auto& [variant, n] : kVariantNames)
    if (n == name) return variant;
  return std::nullopt;
}

bool is_dual_threshold(Variant v) {
  return v != Variant::ProofOfWork && v != Variant::ProofOfStake;
}

SystemParams::SystemParams(const Fields& f) : f_(f) {
  require(finite_positive(f.scale), "scale > 0");
  require(finite_positive(f.coin_difficulty), "coin_difficulty > 0");
  require(finite_positive(f.stake_difficulty), "stake_difficulty > 0");
  require(f.stake_difficulty >= f.coin_difficulty, "stake_difficulty >= coin_difficulty");
  require(std::isfinite(f.coin_reward) && f.coin_reward >= 0.0, "coin_reward >= 0");
  require(finite_positive(f.stake_reward), "stake_reward > 0");
  if (f.variant == Variant::Radical)
    require(std::isfinite(f.exponent) && f.exponent > 0.0 && f.exponent < 1.0,
            "0 < exponent < 1");
  if (f.variant == Variant::Logarithmic)
    require(f.stake_reward >= 2.0, "stake_reward >= 2 for the logarithmic variant");
  // Zero balance plus zero reward would give a zero threshold on the first block.
  if (f.variant == Variant::ProofOfStake)
    require(f.coin_reward > 0.0, "coin_reward > 0 for the proof-of-stake variant");
}

}  // namespace stakesim
