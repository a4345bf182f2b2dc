#include "safepool/adversary.hpp"

#include <algorithm>
#include <cmath>

namespace safepool {

std::uint64_t TraceRng::uniform(std::uint64_t lo, std::uint64_t hi)
{
    if (hi <= lo) return lo;
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return next();
    return lo + next() % span;
}

double TraceRng::unit() { return double(next() >> 11) * 0x1.0p-53; }

std::uint64_t TraceRng::log_uniform(std::uint64_t lo, std::uint64_t hi)
{
    if (lo == 0) lo = 1;
    if (hi <= lo) return lo;
    const double a = std::log(double(lo));
    const double b = std::log(double(hi) + 1.0);
    const auto v = std::uint64_t(std::exp(a + (b - a) * unit()));
    return std::clamp(v, lo, hi);
}

std::vector<TraceEvent> gen_benign(const BenignParams& p)
{
    TraceRng rng(p.seed);
    std::vector<TraceEvent> out;
    out.reserve(p.count);
    Account prev;
    Nonce prev_nonce = 0;
    for (std::size_t i = 0; i < p.count; ++i) {
        Account sender;
        Nonce nonce = 0;
        if (i > 0 && p.chain_prob > 0 && rng.chance(p.chain_prob)) {
            sender = prev;
            nonce = prev_nonce + 1;
        } else {
            sender = p.prefix + "-" + std::to_string(i);
        }
        const std::uint64_t price = rng.log_uniform(p.price_lo, p.price_hi);
        const Gas gas = rng.uniform(p.gas_lo, p.gas_hi);
        out.push_back(TraceEvent::arrival(make_transaction(sender, nonce, price, gas, gas, 0, Label::benign),
                                          p.start_ms + i * p.spacing_ms));
        prev = sender;
        prev_nonce = nonce;
    }
    assign_ids(out);
    return out;
}

Xt6Prices Xt6Prices::from_base(std::uint64_t base)
{
    // Each level strictly exceeds the one it must evict: evictors beat the
    // parents, the chain head beats the cheap tier, and the chain body plus
    // the survivors sit above the chain head so phase 4 can take it alone.
    return {base, base + 1, base + 3, base + 1, base + 2, base + 3, base + 3};
}

Xt6Params Xt6Params::desk()
{
    Xt6Params p;
    p.n_seq = 24;
    p.seq_len = 8;
    p.n_parents_evicted = 5;
    p.big_chain = 160;
    p.capacity = 192;
    return p;
}

Xt6Params Xt6Params::full() { return Xt6Params{}; }

GeneratedTrace gen_xt6(const Xt6Params& p)
{
    if (p.n_seq == 0) throw std::invalid_argument("xt6: n_seq must be positive");
    if (p.seq_len < 2) throw std::invalid_argument("xt6: sequences need at least one child");
    if (p.big_chain == 0) throw std::invalid_argument("xt6: big_chain must be positive");
    if (p.n_parents_evicted > p.n_seq) throw std::invalid_argument("xt6: more parents to evict than sequences");
    if (p.n_seq * p.seq_len < p.capacity)
        throw std::invalid_argument("xt6: phase 1 (" + std::to_string(p.n_seq * p.seq_len) +
                                    " txs) cannot cover capacity " + std::to_string(p.capacity));
    if (p.big_chain > p.capacity) throw std::invalid_argument("xt6: big_chain exceeds capacity");
    if (p.base_price < 2) throw std::invalid_argument("xt6: base_price must be at least 2");

    // Phase-1 children that outlive phase 3 as futures: the last `survivors`
    // children among the first `capacity` phase-1 transactions.
    const std::size_t survivors = p.capacity - p.big_chain;
    std::size_t children_in_pool = 0;
    for (std::size_t i = 0; i < p.capacity; ++i) children_in_pool += (i % p.seq_len) != 0;
    if (survivors > children_in_pool)
        throw std::invalid_argument("xt6: big_chain too short to clear the pool");
    std::size_t first_expensive = p.capacity;
    for (std::size_t left = survivors; left > 0;)
        if ((--first_expensive % p.seq_len) != 0) --left;

    const Xt6Prices price = Xt6Prices::from_base(p.base_price);
    GeneratedTrace out;
    out.events.reserve(p.event_count());
    std::uint64_t ts = p.start_ms + p.delay_ms;
    auto emit = [&](const Account& sender, Nonce nonce, std::uint64_t px) {
        out.events.push_back(
            TraceEvent::arrival(make_transaction(sender, nonce, px, p.gas, p.gas, 0, Label::adversarial), ts));
        ts += p.spacing_ms;
    };

    for (std::size_t i = 0; i < p.n_seq * p.seq_len; ++i) {
        const std::size_t s = i / p.seq_len;
        const Nonce n = i % p.seq_len;
        std::uint64_t px = price.cheap_child;
        if (n == 0) px = price.parent;
        else if (i >= first_expensive && i < p.capacity) px = price.expensive_child;
        emit(p.prefix + "-s" + std::to_string(s), n, px);
    }
    for (std::size_t j = 0; j < p.n_parents_evicted; ++j)
        emit(p.prefix + "-e" + std::to_string(j), 0, price.parent_evictor);
    const Account chain = p.prefix + "-z";
    for (std::size_t k = 0; k < p.big_chain; ++k) emit(chain, k, k == 0 ? price.chain_head : price.chain_body);
    emit(p.prefix + "-f", 0, price.final_tx);
    assign_ids(out.events);
    return out;
}

GeneratedTrace gen_xt6_campaign(const Xt6CampaignParams& p)
{
    if (p.block_interval_ms == 0) throw std::invalid_argument("campaign: block interval must be positive");
    struct Timed {
        TraceEvent ev;
        std::size_t order;
    };
    std::vector<Timed> timed;
    std::size_t order = 0;
    auto add = [&](TraceEvent ev) { timed.push_back({std::move(ev), order++}); };

    BenignParams prefill;
    prefill.count = p.round.capacity;
    prefill.seed = p.seed;
    prefill.price_hi = p.benign_price_hi;
    prefill.prefix = "pre";
    for (auto& ev : gen_benign(prefill)) add(std::move(ev));
    add(TraceEvent::snapshot(0));

    for (std::size_t b = 0; b < p.blocks; ++b) {
        const std::uint64_t t0 = b * p.block_interval_ms;
        BenignParams load;
        load.count = p.benign_per_block;
        load.seed = p.seed * 1'000'003 + b;
        load.price_hi = p.benign_price_hi;
        load.prefix = "b" + std::to_string(b);
        load.start_ms = t0 + 1;
        load.spacing_ms = std::max<std::uint64_t>(1, p.block_interval_ms / (p.benign_per_block + 1));
        for (auto& ev : gen_benign(load)) add(std::move(ev));

        if (b >= p.attack_from_block && b < p.attack_to_block) {
            Xt6Params round = p.round;
            round.prefix = "r" + std::to_string(b) + "-" + p.round.prefix;
            round.start_ms = t0;
            // Later rounds must out-price leftovers of earlier ones.
            round.base_price = p.round.base_price + 4 * (b - p.attack_from_block);
            for (auto& ev : gen_xt6(round).events) add(std::move(ev));
        }
        add(TraceEvent::block(t0 + p.block_interval_ms));
    }
    std::stable_sort(timed.begin(), timed.end(), [](const Timed& a, const Timed& b) {
        if (a.ev.ts_ms != b.ev.ts_ms) return a.ev.ts_ms < b.ev.ts_ms;
        return a.order < b.order;
    });
    GeneratedTrace out;
    out.events.reserve(timed.size());
    for (auto& t : timed) out.events.push_back(std::move(t.ev));
    assign_ids(out.events);
    return out;
}

GeneratedTrace gen_deter_future(const DeterParams& p)
{
    GeneratedTrace out;
    for (std::size_t i = 0; i < p.count; ++i)
        out.events.push_back(TraceEvent::arrival(
            make_transaction(p.prefix + "-" + std::to_string(i), 2, p.price, kMinTxGas, kMinTxGas, 0,
                             Label::adversarial),
            i));
    assign_ids(out.events);
    return out;
}

GeneratedTrace gen_mempurge(const MempurgeParams& p)
{
    if (p.chain_len < 2) throw std::invalid_argument("mempurge: chain_len must be at least 2");
    GeneratedTrace out;
    out.accounts[p.sender] = AccountState{p.balance, 0};
    for (std::size_t n = 0; n < p.chain_len; ++n)
        out.events.push_back(TraceEvent::arrival(
            make_transaction(p.sender, n, p.price, p.gas, p.gas, p.value, Label::adversarial), n));
    assign_ids(out.events);
    return out;
}

std::optional<Nonce> mempurge_overdraft_nonce(const MempurgeParams& p)
{
    const Wei each = Wei(p.gas) * p.price + p.value;
    Wei total = 0;
    for (std::size_t n = 0; n < p.chain_len; ++n) {
        total += each;
        if (total > p.balance) return n;
    }
    return std::nullopt;
}

GeneratedTrace gen_cp_lock(const CpLockParams& p)
{
    if (p.chain_len < 2) throw std::invalid_argument("cp_lock: chain_len must be at least 2");
    if (p.chain_len > p.capacity) throw std::invalid_argument("cp_lock: chain longer than the pool");
    if (p.low_price == 0 || p.high_price <= p.low_price)
        throw std::invalid_argument("cp_lock: need 0 < low_price < high_price");
    GeneratedTrace out;
    const Account sender = p.prefix + "-a";
    for (std::size_t n = 0; n < p.chain_len; ++n) {
        const std::uint64_t px = n + 1 == p.chain_len ? p.high_price : p.low_price;
        out.events.push_back(TraceEvent::arrival(
            make_transaction(sender, n, px, kMinTxGas, kMinTxGas, 0, Label::adversarial), n));
    }
    for (std::size_t i = p.chain_len; i < p.capacity; ++i)
        out.events.push_back(TraceEvent::arrival(
            make_transaction(p.prefix + "-pad" + std::to_string(i), 0, p.high_price, kMinTxGas, kMinTxGas, 0,
                             Label::adversarial),
            i));
    assign_ids(out.events);
    return out;
}

GeneratedTrace gen_random_adversary(const RandomAdversaryParams& p)
{
    const auto& m = p.mix;
    if (m.accounts == 0) throw std::invalid_argument("random adversary: need at least one account");
    TraceRng rng(p.seed);
    std::vector<Nonce> sent(m.accounts, 0);
    std::size_t fresh = 0;
    const double total = m.valid + m.future + m.overdraft + m.duplicate + m.fresh_sender + m.block + m.snapshot;
    if (total <= 0) throw std::invalid_argument("random adversary: empty mix");

    GeneratedTrace out;
    out.events.reserve(p.steps);
    for (std::size_t step = 0; step < p.steps; ++step) {
        const std::uint64_t ts = p.start_ms + step * 100;
        double r = rng.unit() * total;
        auto take = [&r](double w) {
            if (r < w) return true;
            r -= w;
            return false;
        };
        const std::size_t k = rng.uniform(0, m.accounts - 1);
        Account sender = p.prefix + "-a" + std::to_string(k);
        Nonce nonce = sent[k];
        std::uint64_t value = rng.uniform(0, 1'000'000);
        if (take(m.valid)) {
            ++sent[k];
        } else if (take(m.future)) {
            nonce = sent[k] + rng.uniform(1, 3);
        } else if (take(m.overdraft)) {
            value = m.overdraft_value;
        } else if (take(m.duplicate)) {
            if (nonce > 0) nonce -= rng.uniform(1, std::min<Nonce>(nonce, 2));
        } else if (take(m.fresh_sender)) {
            sender = p.prefix + "-n" + std::to_string(fresh++);
            nonce = 0;
        } else if (take(m.block)) {
            out.events.push_back(TraceEvent::block(ts));
            continue;
        } else {
            out.events.push_back(TraceEvent::snapshot(ts));
            continue;
        }
        const std::uint64_t price = rng.log_uniform(m.price_lo, m.price_hi);
        const Gas gas = rng.uniform(kMinTxGas, std::max(kMinTxGas, m.gas_hi));
        const Gas limit = gas + rng.uniform(0, gas / 4);
        const Label label = rng.chance(m.benign) ? Label::benign : Label::adversarial;
        out.events.push_back(
            TraceEvent::arrival(make_transaction(sender, nonce, price, gas, limit, value, label), ts));
    }
    assign_ids(out.events);
    return out;
}

std::vector<Transaction> gen_pool_snapshot(const SnapshotParams& p)
{
    if (p.senders == 0) throw std::invalid_argument("snapshot: need at least one sender");
    TraceRng rng(p.seed);
    std::vector<Nonce> next(p.senders, 0);
    std::vector<Transaction> out;
    out.reserve(p.size);
    for (std::size_t i = 0; i < p.size; ++i) {
        const std::size_t s = rng.uniform(0, p.senders - 1);
        out.push_back(make_transaction("s" + std::to_string(s), next[s]++, rng.log_uniform(p.price_lo, p.price_hi),
                                       p.gas, p.gas, 0, Label::benign, i));
    }
    return out;
}

AttackCostReport attack_cost(std::span<const Block> interleaved_blocks, std::span<const Block> drained_blocks,
                             std::span<const Transaction> pending_before_drain)
{
    auto adversarial_revenue = [](std::span<const Block> blocks) {
        Wei sum = 0;
        for (const auto& b : blocks)
            for (std::size_t i = 0; i < b.txs.size(); ++i)
                if (b.txs[i].label == Label::adversarial) sum += Wei(b.gas[i]) * b.txs[i].price;
        return sum;
    };
    AttackCostReport r;
    const Wei realized = adversarial_revenue(interleaved_blocks);
    r.fees_charged = realized + adversarial_revenue(drained_blocks);
    r.fees_at_risk = realized;
    for (const auto& tx : pending_before_drain)
        if (tx.label == Label::adversarial) r.fees_at_risk += fee(tx);
    return r;
}

} // namespace safepool
