#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "stakesim/params.hpp"

namespace stakesim {

using NodeId = std::uint32_t;

struct Block {
  NodeId creator = 0;
  std::uint64_t height = 0;
  std::optional<std::uint64_t> parent;  // height of the parent; nullopt for genesis
  bool stake_rewarded = false;          // hash also met the stake-issue threshold

  bool is_genesis() const { return !parent.has_value(); }
  friend bool operator==(const Block&, const Block&) = default;
};

/// A single parent-linked path starting at an implicit genesis block.
class Chain {
 public:
  Chain();

  /// Appends a block on the current tip and returns it.
  const Block& append(NodeId creator, bool stake_rewarded);

  /// Number of non-genesis blocks.
  std::uint64_t length() const { return blocks_.size() - 1; }
  const Block& tip() const { return blocks_.back(); }
  const std::vector<Block>& blocks() const { return blocks_; }

 private:
  std::vector<Block> blocks_;
};

struct Account {
  double stake = 0.0;    // stak(A;C)
  double balance = 0.0;  // bal(A;C)
  friend bool operator==(const Account&, const Account&) = default;
};

/// Per-node stake and coin balance after replaying a chain prefix.
class LedgerState {
 public:
  /// Height of the last applied block (0 = only genesis).
  std::uint64_t height() const { return height_; }

  /// Zero account for nodes that never created a block.
  Account account(NodeId node) const;
  double stake(NodeId node) const { return account(node).stake; }
  double balance(NodeId node) const { return account(node).balance; }
  const std::map<NodeId, Account>& accounts() const { return accounts_; }

  /// Seeds a node's stake before any block is applied (genesis allocation).
  LedgerState with_initial_stake(NodeId node, double stake) const;

  /// Stake transfers are not modelled; this hook returns the ledger unchanged.
  LedgerState transfer_stake(NodeId from, NodeId to, double amount) const;

  /// In-place form of apply_block, for hot loops that own their ledger.
  void apply(const Block& block, const SystemParams& params);

  friend bool operator==(const LedgerState&, const LedgerState&) = default;

 private:

  std::map<NodeId, Account> accounts_;
  std::uint64_t height_ = 0;
};

/// Credits CoinRwd (and StakRwd when the block was stake-rewarded) to the
/// creator. Throws ParamError when block.height != ledger.height() + 1.
LedgerState apply_block(const LedgerState& ledger, const Block& block,
                        const SystemParams& params);

LedgerState replay(const Chain& chain, const SystemParams& params);

}  // namespace stakesim
