#pragma once

// Eviction bounds, per-sender gamma statistics, outcome classes with the
// dUtil fee accounting, and block revenue series.

#include "safepool/policy.hpp"

#include <array>
#include <compare>

namespace safepool {

// --- eviction bounds --------------------------------------------------------

enum class BoundBasis { cp_21000_price_sum, geth_maxprice_blockgas };

std::string_view bound_basis_name(BoundBasis b);

struct BoundEstimate {
    PolicyKind policy = PolicyKind::cp;
    Wei bound_wei = 0;
    BoundBasis basis = BoundBasis::cp_21000_price_sum;
};

/// 21000 x sum of prices over `pending`.
BoundEstimate eviction_bound_cp(std::span<const Transaction> pending);
BoundEstimate eviction_bound_cp(const Mempool& st0);

/// Maximum pending price x block gas limit. Throws PoolError on an empty pool.
BoundEstimate eviction_bound_baseline_under_xt6(std::span<const Transaction> pending, const WorldState& world);
BoundEstimate eviction_bound_baseline_under_xt6(const Mempool& st, const WorldState& world);

// --- gamma --------------------------------------------------------------------

/// Non-negative rational kept in lowest terms so equality is exact.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static Ratio of(std::uint64_t num, std::uint64_t den);
    double value() const { return double(num) / double(den); }

    friend bool operator==(const Ratio&, const Ratio&) = default;
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b)
    {
        return Wei(a.num) * b.den <=> Wei(b.num) * a.den;
    }
};

std::string to_string(const Ratio& r);

struct GammaReport {
    // gamma(s): over every snapshot, max price of s over min price of s, minus one.
    std::map<Account, Ratio> per_sender;
    Ratio gamma_max;
    double gamma_avg = 0;
    Ratio gamma_p95;
    Ratio gamma_p50;

    // Same statistic with the sender's minimum fee as denominator.
    std::map<Account, double> per_sender_fee;
    double fee_gamma_max = 0;
    double fee_gamma_avg = 0;
    double fee_gamma_p95 = 0;

    std::size_t snapshots = 0;
    std::size_t transactions = 0;
};

/// Throws std::invalid_argument when `snapshots` is empty.
GammaReport gamma(std::span<const std::vector<Transaction>> snapshots);
GammaReport gamma(const std::vector<Transaction>& snapshot);

/// Nearest-rank percentile of a sorted, non-empty sequence (q in (0, 100]).
std::size_t nearest_rank(std::size_t n, double q);
/// Mean of the values in sequence order.
double mean_of(std::span<const Ratio> values);

// --- outcome classes and dUtil ------------------------------------------------

enum class OutcomeClass { O1, O2, O3, O4, other };

std::string_view outcome_class_name(OutcomeClass c);

struct Classification {
    OutcomeClass cls = OutcomeClass::other;
    bool future_turn_pending = false;
    bool pending_turn_future = false;
};

/// O1 declined, O4 admitted into a free slot, O2/O3 admitted evicting victims
/// whose total fee is below/above the arrival's fee; equal fees fall in other.
OutcomeClass outcome_class(const Transaction& tx, const AdmissionOutcome& outcome);

struct FutureTransitions {
    bool future_turn_pending = false;
    bool pending_turn_future = false;
};

/// Compares the future status of transactions pending in both states.
FutureTransitions future_transitions(const Mempool& before, const Mempool& after, const WorldState& world);

Classification classify_outcome(const Mempool& before, const Mempool& after, const Transaction& tx,
                                const AdmissionOutcome& outcome, const WorldState& world);

/// Fees chargeable inside (pool, blocks) and outside (declined) at one instant.
struct FeeTotals {
    Wei pool = 0;
    Wei blocks = 0;
    Wei declined = 0;

    static FeeTotals of(const Mempool& pool, Wei block_fees);
};

/// (inside after - inside before) - (declined after - declined before).
SignedWei dutil(const FeeTotals& before, const FeeTotals& after);
SignedWei dutil(const Mempool& before, const Mempool& after, Wei blocks_delta);

struct UtilRow {
    std::size_t count = 0;
    SignedWei inside_delta = 0;
    SignedWei outside_delta = 0;
    SignedWei dutil = 0;
};

enum class UtilKey { O1, O2, O3, O4, future_turn_pending, pending_turn_future, other };

inline constexpr std::size_t kUtilKeys = 7;

std::string_view util_key_name(UtilKey k);

class UtilLedger {
public:
    /// Books one event under its class row and, additionally, under each
    /// flag row. Totals only count the class row.
    void record(const Classification& c, const FeeTotals& before, const FeeTotals& after);

    const UtilRow& row(UtilKey k) const { return rows_[std::size_t(k)]; }
    const UtilRow& totals() const { return totals_; }

private:
    std::array<UtilRow, kUtilKeys> rows_{};
    UtilRow totals_;
};

// --- revenue -----------------------------------------------------------------

struct RevenuePoint {
    std::size_t index = 0;
    Wei revenue = 0;
    double running_avg = 0;
};

std::vector<RevenuePoint> revenue_series(std::span<const Block> blocks);

Wei total_revenue(std::span<const Block> blocks);
Wei fee_total(std::span<const Transaction> txs);
Wei price_total(std::span<const Transaction> txs);

} // namespace safepool
