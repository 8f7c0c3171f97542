#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stakesim {

/// Raised when a parameter set or a derived model violates its invariants.
class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Variant {
  ProofOfWork,
  ProofOfStake,
  Constant,
  Linear,
  Radical,
  Logarithmic,
};

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

/// True for the four stake-system variants (separate coin/stake thresholds).
bool is_dual_threshold(Variant v);

/// Protocol constants of one block-chain system. Instances are validated at
/// construction and immutable afterwards.
///
/// ProofOfWork and ProofOfStake use coin_difficulty as their single
/// difficulty D and coin_reward as their reward Rwd.
class SystemParams {
 public:
  struct Fields {
    Variant variant = Variant::Radical;
    double scale = 1.0;
    double coin_difficulty = 1.0;
    double stake_difficulty = 1.0;
    double coin_reward = 0.0;
    double stake_reward = 1.0;
    double exponent = 0.5;  // radical only

    bool operator==(const Fields&) const = default;
  };

  /// Throws ParamError naming the violated constraint.
  explicit SystemParams(const Fields& f);

  Variant variant() const { return f_.variant; }
  double scale() const { return f_.scale; }
  double coin_difficulty() const { return f_.coin_difficulty; }
  double stake_difficulty() const { return f_.stake_difficulty; }
  double coin_reward() const { return f_.coin_reward; }
  double stake_reward() const { return f_.stake_reward; }
  double exponent() const { return f_.exponent; }
  const Fields& fields() const { return f_; }

  /// p = CoinD / StakD, the chance that a freshly mined block also earns stakes.
  double stake_issue_ratio() const { return f_.coin_difficulty / f_.stake_difficulty; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  Fields f_;
};

}  // namespace stakesim
