#pragma once

// Admission policies behind one decision interface:
//   baseline  evicts the globally cheapest pending transaction (price-only).
//   cp        evicts only childless transactions; the arrival must strictly
//             out-price the cheapest childless one.
//   map       picks the minimum-fee transaction and evicts its sender's
//             maximal-nonce descendant; the arrival must strictly exceed mdf.

#include "safepool/mempool.hpp"

namespace safepool {

enum class PolicyKind { baseline, cp, map };
enum class CompareBy { price, fee };

std::string_view policy_name(PolicyKind k);
PolicyKind parse_policy(std::string_view s);
std::string_view compare_by_name(CompareBy c);
CompareBy parse_compare_by(std::string_view s);

struct PolicyConfig {
    PolicyKind kind = PolicyKind::cp;
    std::optional<std::size_t> per_sender_limit;
    // Unset means the kind's default: price for baseline and cp, fee for map.
    std::optional<CompareBy> compare_by;
    // map only: also require fee > mdf when a free slot exists.
    bool map_gate_nonfull = false;
    // When false only stale/duplicate checks run (DETER-style experiments).
    bool precheck = true;

    CompareBy metric() const;
};

struct PolicyDecision {
    bool admit = false;
    Reason reason = Reason::pool_not_full;
    std::vector<Transaction> victims;

    static PolicyDecision decline(Reason r) { return {false, r, {}}; }
    static PolicyDecision accept(std::vector<Transaction> victims = {})
    {
        const Reason r = victims.empty() ? Reason::pool_not_full : Reason::eviction;
        return {true, r, std::move(victims)};
    }
};

PolicyDecision decide_baseline(const Mempool& pool, const Transaction& tx,
                               CompareBy by = CompareBy::price);
PolicyDecision decide_cp(const Mempool& pool, const Transaction& tx,
                         CompareBy by = CompareBy::price);
PolicyDecision decide_map(const Mempool& pool, const Transaction& tx,
                          bool gate_nonfull = false, CompareBy by = CompareBy::fee);

/// Dispatches on config.kind after applying the per-sender limit.
PolicyDecision decide(const Mempool& pool, const Transaction& tx, const PolicyConfig& config);

/// Minimum fee over pending transactions; throws PoolError on an empty pool.
Wei mdf(const Mempool& pool);

} // namespace safepool
