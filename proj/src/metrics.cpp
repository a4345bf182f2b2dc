#include "safepool/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace safepool {

std::string_view bound_basis_name(BoundBasis b)
{
    return b == BoundBasis::cp_21000_price_sum ? "cp_21000_price_sum" : "geth_maxprice_blockgas";
}

BoundEstimate eviction_bound_cp(std::span<const Transaction> pending)
{
    return {PolicyKind::cp, Wei(kMinTxGas) * price_total(pending), BoundBasis::cp_21000_price_sum};
}

BoundEstimate eviction_bound_cp(const Mempool& st0)
{
    return {PolicyKind::cp, Wei(kMinTxGas) * st0.price_sum(), BoundBasis::cp_21000_price_sum};
}

BoundEstimate eviction_bound_baseline_under_xt6(std::span<const Transaction> pending, const WorldState& world)
{
    if (pending.empty()) throw PoolError("baseline bound of an empty pool");
    std::uint64_t top = 0;
    for (const auto& tx : pending) top = std::max(top, tx.price);
    return {PolicyKind::baseline, Wei(top) * world.block_gas_limit, BoundBasis::geth_maxprice_blockgas};
}

BoundEstimate eviction_bound_baseline_under_xt6(const Mempool& st, const WorldState& world)
{
    const Transaction* top = st.max_price_tx();
    if (!top) throw PoolError("baseline bound of an empty pool");
    return {PolicyKind::baseline, Wei(top->price) * world.block_gas_limit, BoundBasis::geth_maxprice_blockgas};
}

Ratio Ratio::of(std::uint64_t num, std::uint64_t den)
{
    if (den == 0) throw std::invalid_argument("ratio with zero denominator");
    if (num == 0) return {0, 1};
    const std::uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

std::string to_string(const Ratio& r)
{
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::size_t nearest_rank(std::size_t n, double q)
{
    if (n == 0) throw std::invalid_argument("percentile of an empty sequence");
    const auto rank = std::size_t(std::ceil(q / 100.0 * double(n)));
    return std::clamp<std::size_t>(rank, 1, n) - 1;
}

double mean_of(std::span<const Ratio> values)
{
    if (values.empty()) return 0;
    double sum = 0;
    for (const auto& r : values) sum += r.value();
    return sum / double(values.size());
}

namespace {

struct SenderSpan {
    std::uint64_t min_price = ~0ull;
    std::uint64_t max_price = 0;
    Wei min_fee = ~Wei(0);
};

} // namespace

GammaReport gamma(std::span<const std::vector<Transaction>> snapshots)
{
    if (snapshots.empty()) throw std::invalid_argument("gamma needs at least one snapshot");
    GammaReport rep;
    rep.snapshots = snapshots.size();
    for (const auto& snap : snapshots) {
        std::map<Account, SenderSpan> spans;
        for (const auto& tx : snap) {
            auto& s = spans[tx.sender];
            s.min_price = std::min(s.min_price, tx.price);
            s.max_price = std::max(s.max_price, tx.price);
            s.min_fee = std::min(s.min_fee, fee(tx));
        }
        rep.transactions += snap.size();
        for (const auto& [sender, s] : spans) {
            const Ratio g = Ratio::of(s.max_price - s.min_price, s.min_price);
            auto [it, fresh] = rep.per_sender.emplace(sender, g);
            if (!fresh && it->second < g) it->second = g;
            const double fg = double(s.max_price) / to_double(s.min_fee) - 1.0;
            auto [jt, fresh_fee] = rep.per_sender_fee.emplace(sender, fg);
            if (!fresh_fee) jt->second = std::max(jt->second, fg);
        }
    }
    if (rep.per_sender.empty()) return rep;

    std::vector<Ratio> values;
    values.reserve(rep.per_sender.size());
    for (const auto& [s, g] : rep.per_sender) values.push_back(g);
    rep.gamma_avg = mean_of(values);
    std::vector<Ratio> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    rep.gamma_max = sorted.back();
    rep.gamma_p95 = sorted[nearest_rank(sorted.size(), 95)];
    rep.gamma_p50 = sorted[nearest_rank(sorted.size(), 50)];

    std::vector<double> fee_values;
    fee_values.reserve(rep.per_sender_fee.size());
    double fee_sum = 0;
    for (const auto& [s, g] : rep.per_sender_fee) {
        fee_values.push_back(g);
        fee_sum += g;
    }
    rep.fee_gamma_avg = fee_sum / double(fee_values.size());
    std::sort(fee_values.begin(), fee_values.end());
    rep.fee_gamma_max = fee_values.back();
    rep.fee_gamma_p95 = fee_values[nearest_rank(fee_values.size(), 95)];
    return rep;
}

GammaReport gamma(const std::vector<Transaction>& snapshot)
{
    return gamma(std::span<const std::vector<Transaction>>(&snapshot, 1));
}

std::string_view outcome_class_name(OutcomeClass c)
{
    switch (c) {
    case OutcomeClass::O1: return "O1";
    case OutcomeClass::O2: return "O2";
    case OutcomeClass::O3: return "O3";
    case OutcomeClass::O4: return "O4";
    case OutcomeClass::other: return "other";
    }
    return "?";
}

OutcomeClass outcome_class(const Transaction& tx, const AdmissionOutcome& outcome)
{
    switch (outcome.kind) {
    case OutcomeKind::declined: return OutcomeClass::O1;
    case OutcomeKind::admitted_no_evict: return OutcomeClass::O4;
    case OutcomeKind::admitted_evicting: break;
    }
    Wei evicted = 0;
    for (const auto& v : outcome.victims) evicted += fee(v);
    if (fee(tx) > evicted) return OutcomeClass::O2;
    if (fee(tx) < evicted) return OutcomeClass::O3;
    return OutcomeClass::other;
}

namespace {

std::map<TxId, bool> future_status(const Mempool& pool, const WorldState& world)
{
    std::map<TxId, bool> out;
    std::vector<Nonce> nonces;
    for (const auto& [sender, c] : pool.senders()) {
        nonces.clear();
        for (const auto& [n, id] : c.by_nonce) nonces.push_back(n);
        const auto flags = future_flags(nonces, world.nonce_of(sender));
        std::size_t i = 0;
        for (const auto& [n, id] : c.by_nonce) out[id] = flags[i++];
    }
    return out;
}

} // namespace

FutureTransitions future_transitions(const Mempool& before, const Mempool& after, const WorldState& world)
{
    FutureTransitions t;
    const auto b = future_status(before, world);
    const auto a = future_status(after, world);
    for (const auto& [id, was_future] : b) {
        auto it = a.find(id);
        if (it == a.end()) continue;
        if (was_future && !it->second) t.future_turn_pending = true;
        if (!was_future && it->second) t.pending_turn_future = true;
    }
    return t;
}

Classification classify_outcome(const Mempool& before, const Mempool& after, const Transaction& tx,
                                const AdmissionOutcome& outcome, const WorldState& world)
{
    const auto t = future_transitions(before, after, world);
    return {outcome_class(tx, outcome), t.future_turn_pending, t.pending_turn_future};
}

FeeTotals FeeTotals::of(const Mempool& pool, Wei block_fees)
{
    return {pool.fee_sum(), block_fees, pool.declined_fee_sum()};
}

SignedWei dutil(const FeeTotals& before, const FeeTotals& after)
{
    const SignedWei inside = SignedWei(after.pool + after.blocks) - SignedWei(before.pool + before.blocks);
    const SignedWei outside = SignedWei(after.declined) - SignedWei(before.declined);
    return inside - outside;
}

SignedWei dutil(const Mempool& before, const Mempool& after, Wei blocks_delta)
{
    return dutil(FeeTotals::of(before, 0), FeeTotals::of(after, blocks_delta));
}

std::string_view util_key_name(UtilKey k)
{
    switch (k) {
    case UtilKey::O1: return "O1";
    case UtilKey::O2: return "O2";
    case UtilKey::O3: return "O3";
    case UtilKey::O4: return "O4";
    case UtilKey::future_turn_pending: return "future_turn_pending";
    case UtilKey::pending_turn_future: return "pending_turn_future";
    case UtilKey::other: return "other";
    }
    return "?";
}

void UtilLedger::record(const Classification& c, const FeeTotals& before, const FeeTotals& after)
{
    UtilRow delta;
    delta.count = 1;
    delta.inside_delta = SignedWei(after.pool + after.blocks) - SignedWei(before.pool + before.blocks);
    delta.outside_delta = SignedWei(after.declined) - SignedWei(before.declined);
    delta.dutil = delta.inside_delta - delta.outside_delta;
    auto add = [&delta](UtilRow& r) {
        r.count += delta.count;
        r.inside_delta += delta.inside_delta;
        r.outside_delta += delta.outside_delta;
        r.dutil += delta.dutil;
    };
    UtilKey key = UtilKey::other;
    switch (c.cls) {
    case OutcomeClass::O1: key = UtilKey::O1; break;
    case OutcomeClass::O2: key = UtilKey::O2; break;
    case OutcomeClass::O3: key = UtilKey::O3; break;
    case OutcomeClass::O4: key = UtilKey::O4; break;
    case OutcomeClass::other: key = UtilKey::other; break;
    }
    add(rows_[std::size_t(key)]);
    if (c.future_turn_pending) add(rows_[std::size_t(UtilKey::future_turn_pending)]);
    if (c.pending_turn_future) add(rows_[std::size_t(UtilKey::pending_turn_future)]);
    add(totals_);
}

std::vector<RevenuePoint> revenue_series(std::span<const Block> blocks)
{
    std::vector<RevenuePoint> out;
    out.reserve(blocks.size());
    double sum = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        sum += to_double(blocks[i].revenue);
        out.push_back({i, blocks[i].revenue, sum / double(i + 1)});
    }
    return out;
}

Wei total_revenue(std::span<const Block> blocks)
{
    Wei s = 0;
    for (const auto& b : blocks) s += b.revenue;
    return s;
}

Wei fee_total(std::span<const Transaction> txs)
{
    Wei s = 0;
    for (const auto& tx : txs) s += fee(tx);
    return s;
}

Wei price_total(std::span<const Transaction> txs)
{
    Wei s = 0;
    for (const auto& tx : txs) s += tx.price;
    return s;
}

} // namespace safepool
