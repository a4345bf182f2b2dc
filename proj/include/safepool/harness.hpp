#pragma once

// Scenario configuration, the deterministic replay engine, the two
// performance workloads and the bench runner.

#include "safepool/adversary.hpp"
#include "safepool/builder.hpp"
#include "safepool/metrics.hpp"

#include <filesystem>

namespace safepool {

enum class DrainMode { end_only, interleaved };

std::string_view drain_mode_name(DrainMode m);
DrainMode parse_drain_mode(std::string_view s);

inline constexpr std::size_t kDeskCapacity = 192;
inline constexpr std::size_t kFullCapacity = 5120;
// 1 ether: enough for any ordinary transaction in the generators, below the
// random adversary's overdraft value.
inline constexpr std::uint64_t kDefaultBalance = 1'000'000'000'000'000'000ull;

struct ScenarioConfig {
    PolicyConfig policy;
    std::size_t capacity = kDeskCapacity;
    Gas block_gas_limit = kDefaultBlockGasLimit;
    Wei default_balance = kDefaultBalance;
    std::map<Account, AccountState> accounts;
    // end_only ignores block triggers and drains once after the last event;
    // interleaved also builds a block at every trigger.
    DrainMode drain_mode = DrainMode::end_only;
    std::optional<std::size_t> snapshot_every;

    bool check_invariants = true;
    // Full index rebuild every N events (0 disables).
    std::size_t coherence_every = 0;
    bool keep_snapshot_txs = true;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
    WorldState make_world() const;
};

/// JSON object with optional keys policy, capacity, block_gas_limit,
/// default_balance, drain_mode, snapshot_every, per_sender_limit, compare_by,
/// map_gate_nonfull, precheck, accounts ({name: {balance, nonce}}).
ScenarioConfig parse_config(std::string_view json_text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base = {});

struct EventRecord {
    std::size_t index = 0;
    EventKind kind = EventKind::tx_arrival;
    std::uint64_t ts_ms = 0;
    TxId tx = 0;
    Label label = Label::benign;
    OutcomeKind outcome = OutcomeKind::declined;
    Reason reason = Reason::pool_not_full;
    std::vector<TxId> victims;
    Classification cls;
    SignedWei dutil = 0;
    std::size_t pool_size = 0;
    Wei price_sum = 0;
    Wei fee_sum = 0;
};

struct SnapshotRecord {
    std::size_t event_index = 0;
    std::uint64_t ts_ms = 0;
    bool marker = false;   // false for periodic snapshots
    std::size_t size = 0;
    std::size_t future = 0;
    Wei price_sum = 0;
    Wei fee_sum = 0;
    BoundEstimate cp_bound;
    std::optional<BoundEstimate> baseline_bound;
    std::vector<Transaction> pending;
};

struct InvariantViolation {
    std::size_t event_index = 0;
    std::string what;
};

struct RunReport {
    ScenarioConfig config;

    std::size_t events_total = 0;
    std::size_t arrivals = 0;
    std::size_t block_triggers = 0;
    std::size_t snapshot_markers = 0;
    std::size_t admitted = 0;
    std::size_t admitted_evicting = 0;
    std::size_t declined = 0;
    std::map<Reason, std::size_t> declined_by_reason;

    std::vector<EventRecord> events;
    std::vector<Block> blocks;           // built at block triggers
    std::vector<Block> drained_blocks;   // built by the final drain
    std::vector<SnapshotRecord> snapshots;

    // st0: the state at the first snapshot marker, or the empty start state.
    std::optional<std::size_t> st0_event;
    std::vector<Transaction> st0;
    BoundEstimate cp_bound_st0;

    std::vector<Transaction> pending_before_drain;
    std::size_t future_before_drain = 0;
    Wei pool_fees_before_drain = 0;
    Wei price_sum_before_drain = 0;
    Wei realized_since_st0 = 0;   // block revenue after st0, before the drain
    Wei drained_fees = 0;
    Wei collected_since_st0 = 0;  // realized_since_st0 + drained_fees
    bool bound_holds = true;
    double bound_to_collected = 0;
    double bound_to_pool = 0;

    UtilLedger util;
    FeeTotals final_totals;
    std::vector<DeclinedEntry> declined_ledger;   // every decline, eviction and unbuildable leftover
    bool telescoping_holds = true;

    AttackCostReport attack;
    std::vector<InvariantViolation> violations;
    std::uint64_t hash = 0;
};

/// Engine failure surfaced with the index of the offending event.
class ReplayAbort : public std::runtime_error {
public:
    ReplayAbort(std::size_t event_index, const std::string& what);
    std::size_t event_index() const { return index_; }

private:
    std::size_t index_;
};

/// Deterministic for a given (config, events). Invariant breaches are
/// collected in RunReport::violations; engine errors throw ReplayAbort.
RunReport replay(const ScenarioConfig& config, std::span<const TraceEvent> events);

/// Benign prefill of `count` transactions (prices 1..price_hi), one snapshot
/// marker, then `tail` shifted to start after it. The marker becomes st0.
std::vector<TraceEvent> prefill_then(const std::vector<TraceEvent>& tail, std::size_t count, std::uint64_t seed,
                                     std::uint64_t price_hi = 100);

// --- workloads ---------------------------------------------------------------

/// One sender, nonces 0..n0-1, price 10000, gas 21000.
std::vector<TraceEvent> workload_batch_insert(std::size_t n0);

/// n1' senders with chains of n1/n1' (parent price 1000, children 200000),
/// then 1024 futures and capacity - n1 pending fillers, then n1' evictors at
/// price 20000. Throws std::invalid_argument unless n1' divides n1 and
/// n1 <= capacity.
std::vector<TraceEvent> workload_tn1(std::size_t n1, std::size_t n1_prime, std::size_t capacity = kFullCapacity);

// --- bench -------------------------------------------------------------------

struct BenchSample {
    std::size_t round = 0;
    double seconds = 0;
    std::size_t memory_bytes = 0;
    std::size_t admitted = 0;
    std::size_t declined = 0;
};

struct BenchReport {
    std::string workload;
    PolicyKind policy = PolicyKind::cp;
    std::size_t events = 0;
    std::vector<BenchSample> samples;
    double mean_seconds = 0;
    double stdev_seconds = 0;   // population standard deviation
    double mean_memory_bytes = 0;
};

/// Times admission of every arrival into a fresh pool per round; block
/// triggers build blocks. Throws std::invalid_argument when rounds == 0.
BenchReport bench(const ScenarioConfig& config, std::span<const TraceEvent> events, std::size_t rounds,
                  std::string workload = "custom");

// --- reports -----------------------------------------------------------------

/// JSON summary; `with_events` adds the per-event records.
std::string report_json(const RunReport& r, bool with_events = false);
std::string events_csv(const RunReport& r);
std::string blocks_csv(const RunReport& r);
std::string snapshots_csv(const RunReport& r);
std::string util_csv(const RunReport& r);
std::string bench_csv(const BenchReport& b, bool header = true);
std::string gamma_json(const GammaReport& g, bool per_sender = false);

std::uint64_t fnv1a64(std::string_view bytes);

} // namespace safepool
