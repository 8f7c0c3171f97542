#include "stakesim/ledger.hpp"

#include <string>

namespace stakesim {

Chain::Chain() { blocks_.push_back(Block{}); }

const Block& Chain::append(NodeId creator, bool stake_rewarded) {
  const std::uint64_t parent = tip().height;
  blocks_.push_back(Block{creator, parent + 1, parent, stake_rewarded});
  return blocks_.back();
}

Account LedgerState::account(NodeId node) const {
  auto it = accounts_.find(node);
  return it == accounts_.end() ? Account{} : it->second;
}

LedgerState LedgerState::with_initial_stake(NodeId node, double stake) const {
  if (height_ != 0) throw ParamError("initial stakes can only be set at genesis");
  if (!(stake >= 0.0)) throw ParamError("initial stake >= 0");
  LedgerState next = *this;
  next.accounts_[node].stake = stake;
  return next;
}

LedgerState LedgerState::transfer_stake(NodeId, NodeId, double) const { return *this; }

void LedgerState::apply(const Block& block, const SystemParams& params) {
  if (block.height != height_ + 1)
    throw ParamError("block height " + std::to_string(block.height) +
                     " does not extend ledger at height " + std::to_string(height_));
  Account& acc = accounts_[block.creator];
  acc.balance += params.coin_reward();
  if (block.stake_rewarded) acc.stake += params.stake_reward();
  height_ = block.height;
}

LedgerState apply_block(const LedgerState& ledger, const Block& block,
                        const SystemParams& params) {
  LedgerState next = ledger;
  next.apply(block, params);
  return next;
}

LedgerState replay(const Chain& chain, const SystemParams& params) {
  LedgerState ledger;
  for (const Block& b : chain.blocks())
    if (!b.is_genesis()) ledger = apply_block(ledger, b, params);
  return ledger;
}

}  // namespace stakesim
