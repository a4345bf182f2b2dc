#pragma once

// Trace generators for the attacks studied here plus synthetic benign load.
// Every generator is a pure function of its parameters (and seed).

#include "safepool/trace.hpp"

#include <random>
#include <span>

namespace safepool {

struct GeneratedTrace {
    std::vector<TraceEvent> events;
    // Accounts the trace expects to exist with a specific state.
    std::map<Account, AccountState> accounts;
};

/// Deterministic helpers shared by the randomized generators. Implemented
/// on raw 64-bit draws so traces do not depend on the standard library's
/// distribution algorithms.
class TraceRng {
public:
    explicit TraceRng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    /// Uniform in [lo, hi].
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
    double unit();
    bool chance(double p) { return unit() < p; }
    /// Log-uniform integer in [lo, hi].
    std::uint64_t log_uniform(std::uint64_t lo, std::uint64_t hi);

private:
    std::mt19937_64 engine_;
};

// --- benign load -----------------------------------------------------------

struct BenignParams {
    std::size_t count = 192;
    std::uint64_t seed = 1;
    std::uint64_t price_lo = 1;
    std::uint64_t price_hi = 100;
    Gas gas_lo = kMinTxGas;
    Gas gas_hi = kMinTxGas;
    // Probability that a transaction extends the previous sender's chain.
    double chain_prob = 0.0;
    std::string prefix = "benign";
    std::uint64_t start_ms = 0;
    std::uint64_t spacing_ms = 0;
};

std::vector<TraceEvent> gen_benign(const BenignParams& p);

// --- XT6 -------------------------------------------------------------------

/// Price levels used by the four XT6 phases, all derived from one base that
/// must exceed every price resident before the attack.
struct Xt6Prices {
    std::uint64_t parent;           // phase 1, nonce-0 of each sequence
    std::uint64_t cheap_child;      // phase 1 children evicted later by phase 3
    std::uint64_t expensive_child;  // phase 1 children meant to survive phase 3 as futures
    std::uint64_t parent_evictor;   // phase 2
    std::uint64_t chain_head;       // phase 3, first transaction of the big chain
    std::uint64_t chain_body;       // phase 3, remaining transactions
    std::uint64_t final_tx;         // phase 4

    static Xt6Prices from_base(std::uint64_t base);
};

struct Xt6Params {
    std::size_t n_seq = 384;
    std::size_t seq_len = 16;
    std::size_t n_parents_evicted = 69;
    std::size_t big_chain = 5120;
    std::size_t capacity = 5120;
    std::uint64_t base_price = 1000;
    Gas gas = kMinTxGas;
    std::uint64_t start_ms = 0;
    std::uint64_t delay_ms = 0;     // block-to-attack delay
    std::uint64_t spacing_ms = 0;   // between consecutive attack transactions
    std::string prefix = "xt6";

    /// 1/32 scale: 24 x 8 sequences, 5 parents, 160-long chain, capacity 192.
    static Xt6Params desk();
    static Xt6Params full();

    std::size_t event_count() const { return n_seq * seq_len + n_parents_evicted + big_chain + 1; }
};

/// Emits the four phases in order. Throws std::invalid_argument when the
/// parameters cannot cover the pool.
GeneratedTrace gen_xt6(const Xt6Params& p);

/// Repeated XT6 rounds against a block-producing pool with benign
/// background load: one round starts `delay_ms` after each block inside the
/// attack window. Block triggers every `block_interval_ms`.
struct Xt6CampaignParams {
    Xt6Params round = Xt6Params::desk();
    std::size_t blocks = 30;
    std::size_t attack_from_block = 10;
    std::size_t attack_to_block = 20;   // exclusive
    std::uint64_t block_interval_ms = 12'000;
    std::size_t benign_per_block = 48;
    std::uint64_t benign_price_hi = 100;
    std::uint64_t seed = 7;
};

GeneratedTrace gen_xt6_campaign(const Xt6CampaignParams& p);

// --- DETER / MemPurge / CP locking ------------------------------------------

struct DeterParams {
    std::size_t count = 10;
    std::uint64_t price = 1000;
    std::string prefix = "deter";
};

/// `count` transactions with a nonce gap of one (nonce 2 on fresh accounts).
GeneratedTrace gen_deter_future(const DeterParams& p);

struct MempurgeParams {
    std::size_t chain_len = 3;
    Wei balance = 0;
    std::uint64_t price = 1;
    Gas gas = kMinTxGas;
    std::uint64_t value = 0;
    std::string sender = "mempurge";
};

/// One funded sender submitting a chain; each transaction is affordable on
/// its own while the cumulative reservation may exceed the balance.
GeneratedTrace gen_mempurge(const MempurgeParams& p);
/// First chain nonce whose cumulative reservation exceeds the balance.
std::optional<Nonce> mempurge_overdraft_nonce(const MempurgeParams& p);

struct CpLockParams {
    std::size_t chain_len = 64;
    std::size_t capacity = 64;
    std::uint64_t low_price = 1;
    std::uint64_t high_price = 10000;
    std::string prefix = "lock";
};

/// One sender: chain_len - 1 cheap transactions and a single expensive
/// childless tail; filler senders at high_price pad up to capacity.
GeneratedTrace gen_cp_lock(const CpLockParams& p);

// --- randomized adversary ---------------------------------------------------

struct AdversaryMix {
    double valid = 0.50;
    double future = 0.12;
    double overdraft = 0.10;
    double duplicate = 0.06;
    double fresh_sender = 0.12;
    double block = 0.04;
    double snapshot = 0.0;
    double benign = 0.2;   // fraction of transactions labelled benign
    std::size_t accounts = 24;
    std::uint64_t price_lo = 1;
    std::uint64_t price_hi = 10'000;
    Gas gas_hi = 200'000;
    std::uint64_t overdraft_value = 2'000'000'000'000'000'000ull;
};

struct RandomAdversaryParams {
    std::size_t steps = 2000;
    std::uint64_t seed = 42;
    AdversaryMix mix;
    std::string prefix = "rnd";
    std::uint64_t start_ms = 0;
};

GeneratedTrace gen_random_adversary(const RandomAdversaryParams& p);

// --- pool snapshots ----------------------------------------------------------

struct SnapshotParams {
    std::size_t size = 192;
    // Transactions are spread over this many senders as gap-free chains.
    std::size_t senders = 192;
    std::uint64_t price_lo = 1;
    std::uint64_t price_hi = 10'000;
    Gas gas = kMinTxGas;
    std::uint64_t seed = 1;
};

/// Random pending set with log-uniform prices; nonces start at 0 per sender.
std::vector<Transaction> gen_pool_snapshot(const SnapshotParams& p);

// --- attack cost ------------------------------------------------------------

struct AttackCostReport {
    Wei fees_charged = 0;   // adversarial fees realized in blocks
    Wei fees_at_risk = 0;   // adversarial fees realized or still pending
};

AttackCostReport attack_cost(std::span<const Block> interleaved_blocks,
                             std::span<const Block> drained_blocks,
                             std::span<const Transaction> pending_before_drain);

} // namespace safepool
