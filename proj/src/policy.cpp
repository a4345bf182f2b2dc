#include "safepool/policy.hpp"

namespace safepool {

std::string_view policy_name(PolicyKind k)
{
    switch (k) {
    case PolicyKind::baseline: return "baseline";
    case PolicyKind::cp: return "cp";
    case PolicyKind::map: return "map";
    }
    return "?";
}

PolicyKind parse_policy(std::string_view s)
{
    if (s == "baseline") return PolicyKind::baseline;
    if (s == "cp") return PolicyKind::cp;
    if (s == "map") return PolicyKind::map;
    throw std::invalid_argument("unknown policy: " + std::string(s));
}

std::string_view compare_by_name(CompareBy c) { return c == CompareBy::price ? "price" : "fee"; }

CompareBy parse_compare_by(std::string_view s)
{
    if (s == "price") return CompareBy::price;
    if (s == "fee") return CompareBy::fee;
    throw std::invalid_argument("unknown comparison metric: " + std::string(s));
}

CompareBy PolicyConfig::metric() const
{
    if (compare_by) return *compare_by;
    return kind == PolicyKind::map ? CompareBy::fee : CompareBy::price;
}

namespace {

Wei metric_of(const Transaction& tx, CompareBy by) { return by == CompareBy::price ? Wei(tx.price) : fee(tx); }

Reason too_low(CompareBy by) { return by == CompareBy::price ? Reason::price_too_low : Reason::fee_too_low; }

// Evicting `victim` would strand the arrival behind a missing ancestor.
bool orphans_arrival(const Transaction& victim, const Transaction& tx) { return is_ancestor(victim, tx); }

} // namespace

PolicyDecision decide_baseline(const Mempool& pool, const Transaction& tx, CompareBy by)
{
    if (!pool.full()) return PolicyDecision::accept();
    const Transaction* v = by == CompareBy::price ? pool.min_price_tx() : pool.min_fee_tx();
    if (metric_of(tx, by) <= metric_of(*v, by)) return PolicyDecision::decline(too_low(by));
    if (orphans_arrival(*v, tx)) return PolicyDecision::decline(Reason::ancestor_victim);
    return PolicyDecision::accept({*v});
}

PolicyDecision decide_cp(const Mempool& pool, const Transaction& tx, CompareBy by)
{
    if (!pool.full()) return PolicyDecision::accept();
    const Transaction* te = by == CompareBy::price ? pool.min_price_childless() : pool.min_fee_childless();
    if (metric_of(tx, by) <= metric_of(*te, by)) return PolicyDecision::decline(too_low(by));
    if (orphans_arrival(*te, tx)) return PolicyDecision::decline(Reason::ancestor_victim);
    return PolicyDecision::accept({*te});
}

PolicyDecision decide_map(const Mempool& pool, const Transaction& tx, bool gate_nonfull, CompareBy by)
{
    if (pool.empty()) return PolicyDecision::accept();
    const Transaction& mtx = by == CompareBy::fee ? *pool.min_fee_tx() : *pool.min_price_tx();
    const Wei floor = metric_of(mtx, by);
    if (!pool.full()) {
        if (gate_nonfull && metric_of(tx, by) <= floor) return PolicyDecision::decline(too_low(by));
        return PolicyDecision::accept();
    }
    if (metric_of(tx, by) <= floor) return PolicyDecision::decline(too_low(by));

    const auto& chain = pool.chain(mtx.sender)->by_nonce;
    const Transaction& last = pool.descendant_victim(mtx);
    if (orphans_arrival(last, tx)) return PolicyDecision::decline(Reason::ancestor_victim);
    std::vector<Transaction> victims{last};
    // A pool above capacity (after a capacity cut) needs a second slot: take
    // the second-to-last transaction of the same chain.
    if (pool.size() > pool.capacity()) {
        if (chain.size() < 2) return PolicyDecision::decline(too_low(by));
        victims.push_back(*pool.find(std::prev(chain.end(), 2)->second));
        if (pool.size() - victims.size() + 1 > pool.capacity()) return PolicyDecision::decline(too_low(by));
    }
    return PolicyDecision::accept(std::move(victims));
}

PolicyDecision decide(const Mempool& pool, const Transaction& tx, const PolicyConfig& config)
{
    if (config.per_sender_limit) {
        const auto* c = pool.chain(tx.sender);
        if (c && c->by_nonce.size() >= *config.per_sender_limit)
            return PolicyDecision::decline(Reason::sender_limit);
    }
    switch (config.kind) {
    case PolicyKind::baseline: return decide_baseline(pool, tx, config.metric());
    case PolicyKind::cp: return decide_cp(pool, tx, config.metric());
    case PolicyKind::map: return decide_map(pool, tx, config.map_gate_nonfull, config.metric());
    }
    throw std::logic_error("unhandled policy kind");
}

Wei mdf(const Mempool& pool)
{
    const auto* t = pool.min_fee_tx();
    if (!t) throw PoolError("mdf of an empty pool");
    return fee(*t);
}

} // namespace safepool
