#pragma once

// Greedy block builder: fixed candidate order (price descending, ancestors
// first), append-only placement, skip-and-continue on gas overflow.

#include "safepool/mempool.hpp"

#include <functional>

namespace safepool {

/// Effective gas of `tx` when appended after `preceding` in the block under
/// construction. Lets scenarios model context-dependent execution cost.
using GasModel = std::function<Gas(const Transaction& tx, std::span<const Transaction> preceding)>;

enum class SkipReason { gas_overflow, nonce_gap, insufficient_balance };

std::string_view skip_reason_name(SkipReason r);

struct SkippedTx {
    Transaction tx;
    SkipReason reason;
};

struct BuildResult {
    Block block;
    std::vector<SkippedTx> skipped;
};

/// Pending transactions by price descending, never placing a transaction
/// before an in-pool ancestor; ties go to the older entry.
std::vector<Transaction> candidate_order(const Mempool& pool);

/// Walks `order` once, appending what fits. Does not touch any pool.
BuildResult build_from_order(std::span<const Transaction> order, const WorldState& world,
                             const GasModel& gas = {});

/// Builds one block from the pool; included transactions leave the pool and
/// their senders' nonces and balances advance.
BuildResult build_block(Mempool& pool, WorldState& world, const GasModel& gas = {});

/// Builds blocks until the pool is empty or a pass includes nothing; the
/// remainder moves to the declined ledger as unbuildable. Empty blocks are
/// not returned.
std::vector<Block> drain(Mempool& pool, WorldState& world, const GasModel& gas = {});

} // namespace safepool
