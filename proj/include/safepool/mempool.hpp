#pragma once

// Bounded pending pool with a price-ordered primary index and a
// sender/nonce secondary index, plus the derived indexes the policies
// need (global min fee, per-sender childless tails, per-sender min fee).
// A Mempool is a value type: copying it yields an independent snapshot.

#include "safepool/core.hpp"

#include <functional>
#include <map>
#include <set>
#include <span>
#include <unordered_map>

namespace safepool {

struct PolicyConfig;
struct PolicyDecision;

class PoolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class Verdict { valid, future, overdraft, stale, duplicate };

std::string_view verdict_name(Verdict v);

struct PrecheckReport {
    Verdict verdict = Verdict::valid;
    std::string detail;

    bool valid() const { return verdict == Verdict::valid; }
};

class Mempool {
public:
    struct SenderChain {
        std::map<Nonce, TxId> by_nonce;
        Wei total_cost = 0;
        Wei min_fee = 0;
    };

    explicit Mempool(std::size_t capacity);

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool full() const { return entries_.size() >= capacity_; }
    bool empty() const { return entries_.empty(); }
    // Lowering the capacity below size() does not evict; the next admission
    // has to free the surplus.
    void set_capacity(std::size_t capacity) { capacity_ = capacity; }

    bool contains(TxId id) const { return entries_.count(id) != 0; }
    const Transaction* find(TxId id) const;
    const Transaction* find(const Account& sender, Nonce nonce) const;
    std::uint64_t sequence_of(TxId id) const;

    /// Pending transactions in insertion order.
    std::vector<Transaction> pending() const;
    const std::vector<DeclinedEntry>& declined() const { return declined_; }
    const std::map<Account, SenderChain>& senders() const { return by_sender_; }
    const SenderChain* chain(const Account& sender) const;
    std::optional<Wei> min_fee_of_sender(const Account& sender) const;

    Wei price_sum() const { return price_sum_; }
    Wei fee_sum() const { return fee_sum_; }
    Wei declined_fee_sum() const { return declined_fee_sum_; }

    // Index heads; nullptr on an empty pool. Ties resolve to the oldest entry.
    const Transaction* min_price_tx() const;
    const Transaction* min_fee_tx() const;
    const Transaction* min_price_childless() const;
    const Transaction* min_fee_childless() const;
    const Transaction* max_price_tx() const;

    /// Each sender's maximal-nonce pending transaction.
    std::vector<Transaction> find_childless() const;
    /// Maximal-nonce pending transaction of seed's sender; throws PoolError if
    /// seed is not pending.
    const Transaction& descendant_victim(const Transaction& seed) const;

    /// Removes `victims` (recorded as evicted) and inserts `tx`. Throws
    /// PoolError when a victim is not pending, tx is already present, or the
    /// result would exceed capacity. Leaves the pool unchanged on error.
    void apply_admission(const Transaction& tx, std::span<const Transaction> victims);
    void record_decline(const Transaction& tx, Reason reason);
    /// Removes a transaction that was included in a block (not declined).
    void remove_included(TxId id);
    /// Moves every pending transaction into the declined ledger.
    void decline_all(Reason reason);

    /// Rebuilds every index from the entry table and throws PoolError on any
    /// disagreement.
    void check_coherence() const;

    /// Rough byte count of the entry table and indexes.
    std::size_t memory_estimate() const;

private:
    struct Entry {
        Transaction tx;
        std::uint64_t seq;
    };
    // (metric, insertion sequence, id)
    using Key = std::tuple<Wei, std::uint64_t, TxId>;

    void insert(const Transaction& tx);
    void erase(TxId id);
    void set_tail(const Account& sender, const SenderChain& chain, bool present);
    const Transaction* head(const std::set<Key>& index) const;

    std::size_t capacity_;
    std::uint64_t next_seq_ = 0;
    std::unordered_map<TxId, Entry> entries_;
    std::set<Key> by_price_;
    std::set<Key> by_fee_;
    std::set<Key> childless_by_price_;
    std::set<Key> childless_by_fee_;
    std::map<Account, SenderChain> by_sender_;
    std::vector<DeclinedEntry> declined_;
    Wei price_sum_ = 0;
    Wei fee_sum_ = 0;
    Wei declined_fee_sum_ = 0;
};

/// True iff some nonce in [world nonce, tx.nonce) of tx.sender is missing from the pool.
bool is_future(const Transaction& tx, const Mempool& pool, const WorldState& world);

/// Sum of cost() over the sender's pending transactions with nonce <= up_to_nonce.
Wei cumulative_cost(const Account& sender, Nonce up_to_nonce, const Mempool& pool);

/// Checks in the fixed order stale, duplicate, future, overdraft.
/// With `full_checks == false` only stale and duplicate are evaluated.
PrecheckReport precheck(const Transaction& tx, const Mempool& pool, const WorldState& world,
                        bool full_checks = true);

std::vector<Transaction> find_childless(const Mempool& pool);
std::optional<Transaction> min_price_childless(const Mempool& pool);
Transaction descendant_victim(const Mempool& pool, const Transaction& seed);

/// Precheck, then the policy decision, then apply_admission. `on_decided`,
/// when set, observes the decision before the pool is mutated.
AdmissionOutcome admit(Mempool& pool, const Transaction& tx, const WorldState& world,
                       const PolicyConfig& policy,
                       const std::function<void(const PolicyDecision&)>& on_decided = {});

/// Future flags for a sorted nonce set of one sender: element i is true when
/// nonces[i] is not reachable contiguously from world_nonce.
std::vector<bool> future_flags(std::span<const Nonce> nonces, Nonce world_nonce);

/// Number of pending transactions that are future w.r.t. the pool.
std::size_t count_future(const Mempool& pool, const WorldState& world);

} // namespace safepool
