#include "safepool/mempool.hpp"

#include "safepool/policy.hpp"

#include <algorithm>

namespace safepool {

std::string_view verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::valid: return "valid";
    case Verdict::future: return "future";
    case Verdict::overdraft: return "overdraft";
    case Verdict::stale: return "stale";
    case Verdict::duplicate: return "duplicate";
    }
    return "?";
}

Mempool::Mempool(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0) throw std::invalid_argument("pool capacity must be positive");
}

const Transaction* Mempool::find(TxId id) const
{
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second.tx;
}

const Transaction* Mempool::find(const Account& sender, Nonce nonce) const
{
    auto s = by_sender_.find(sender);
    if (s == by_sender_.end()) return nullptr;
    auto n = s->second.by_nonce.find(nonce);
    return n == s->second.by_nonce.end() ? nullptr : find(n->second);
}

std::uint64_t Mempool::sequence_of(TxId id) const
{
    auto it = entries_.find(id);
    if (it == entries_.end()) throw PoolError("transaction not pending");
    return it->second.seq;
}

std::vector<Transaction> Mempool::pending() const
{
    std::vector<const Entry*> sorted;
    sorted.reserve(entries_.size());
    for (const auto& [id, e] : entries_) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->seq < b->seq; });
    std::vector<Transaction> out;
    out.reserve(sorted.size());
    for (auto* e : sorted) out.push_back(e->tx);
    return out;
}

const Mempool::SenderChain* Mempool::chain(const Account& sender) const
{
    auto it = by_sender_.find(sender);
    return it == by_sender_.end() ? nullptr : &it->second;
}

std::optional<Wei> Mempool::min_fee_of_sender(const Account& sender) const
{
    const auto* c = chain(sender);
    if (!c) return std::nullopt;
    return c->min_fee;
}

const Transaction* Mempool::head(const std::set<Key>& index) const
{
    if (index.empty()) return nullptr;
    return find(std::get<2>(*index.begin()));
}

const Transaction* Mempool::min_price_tx() const { return head(by_price_); }
const Transaction* Mempool::min_fee_tx() const { return head(by_fee_); }
const Transaction* Mempool::min_price_childless() const { return head(childless_by_price_); }
const Transaction* Mempool::min_fee_childless() const { return head(childless_by_fee_); }

const Transaction* Mempool::max_price_tx() const
{
    if (by_price_.empty()) return nullptr;
    return find(std::get<2>(*by_price_.rbegin()));
}

std::vector<Transaction> Mempool::find_childless() const
{
    std::vector<Transaction> out;
    out.reserve(by_sender_.size());
    for (const auto& [sender, c] : by_sender_) out.push_back(*find(c.by_nonce.rbegin()->second));
    return out;
}

const Transaction& Mempool::descendant_victim(const Transaction& seed) const
{
    if (!contains(seed.id)) throw PoolError("descendant_victim: seed is not pending");
    const auto& c = by_sender_.at(seed.sender);
    return *find(c.by_nonce.rbegin()->second);
}

void Mempool::set_tail(const Account& sender, const SenderChain& c, bool present)
{
    const auto& e = entries_.at(c.by_nonce.rbegin()->second);
    const Key pk{Wei(e.tx.price), e.seq, e.tx.id};
    const Key fk{fee(e.tx), e.seq, e.tx.id};
    if (present) {
        childless_by_price_.insert(pk);
        childless_by_fee_.insert(fk);
    } else {
        childless_by_price_.erase(pk);
        childless_by_fee_.erase(fk);
    }
    (void)sender;
}

void Mempool::insert(const Transaction& tx)
{
    const std::uint64_t seq = next_seq_++;
    entries_.emplace(tx.id, Entry{tx, seq});
    by_price_.insert({Wei(tx.price), seq, tx.id});
    by_fee_.insert({fee(tx), seq, tx.id});

    auto& c = by_sender_[tx.sender];
    if (!c.by_nonce.empty()) set_tail(tx.sender, c, false);
    c.by_nonce.emplace(tx.nonce, tx.id);
    c.total_cost += cost(tx);
    c.min_fee = c.by_nonce.size() == 1 ? fee(tx) : std::min(c.min_fee, fee(tx));
    set_tail(tx.sender, c, true);

    price_sum_ += tx.price;
    fee_sum_ += fee(tx);
}

void Mempool::erase(TxId id)
{
    auto it = entries_.find(id);
    const Transaction tx = it->second.tx;
    const std::uint64_t seq = it->second.seq;

    auto& c = by_sender_.at(tx.sender);
    set_tail(tx.sender, c, false);
    by_price_.erase({Wei(tx.price), seq, id});
    by_fee_.erase({fee(tx), seq, id});
    c.by_nonce.erase(tx.nonce);
    entries_.erase(it);
    price_sum_ -= tx.price;
    fee_sum_ -= fee(tx);

    if (c.by_nonce.empty()) {
        by_sender_.erase(tx.sender);
        return;
    }
    c.total_cost -= cost(tx);
    if (fee(tx) == c.min_fee) {
        Wei m = ~Wei(0);
        for (const auto& [n, tid] : c.by_nonce) m = std::min(m, fee(entries_.at(tid).tx));
        c.min_fee = m;
    }
    set_tail(tx.sender, c, true);
}

void Mempool::apply_admission(const Transaction& tx, std::span<const Transaction> victims)
{
    if (contains(tx.id)) throw PoolError("apply_admission: transaction id already pending");
    if (find(tx.sender, tx.nonce)) throw PoolError("apply_admission: sender/nonce already pending");
    for (std::size_t i = 0; i < victims.size(); ++i) {
        if (!contains(victims[i].id)) throw PoolError("apply_admission: victim is not pending");
        for (std::size_t j = 0; j < i; ++j)
            if (victims[j].id == victims[i].id) throw PoolError("apply_admission: duplicate victim");
    }
    if (entries_.size() - victims.size() + 1 > capacity_)
        throw PoolError("apply_admission: capacity exceeded");

    for (const auto& v : victims) {
        const Transaction evicted = entries_.at(v.id).tx;
        erase(v.id);
        record_decline(evicted, Reason::eviction);
    }
    insert(tx);
}

void Mempool::record_decline(const Transaction& tx, Reason reason)
{
    declined_.push_back({tx, reason});
    declined_fee_sum_ += fee(tx);
}

void Mempool::remove_included(TxId id)
{
    if (!contains(id)) throw PoolError("remove_included: transaction not pending");
    erase(id);
}

void Mempool::decline_all(Reason reason)
{
    for (const auto& tx : pending()) {
        erase(tx.id);
        record_decline(tx, reason);
    }
}

void Mempool::check_coherence() const
{
    if (entries_.size() > capacity_) throw PoolError("pool exceeds capacity");
    if (by_price_.size() != entries_.size() || by_fee_.size() != entries_.size())
        throw PoolError("primary index size mismatch");
    for (const auto& k : by_price_) {
        const auto* tx = find(std::get<2>(k));
        if (!tx || Wei(tx->price) != std::get<0>(k)) throw PoolError("by_price disagrees with pending");
    }
    for (const auto& k : by_fee_) {
        const auto* tx = find(std::get<2>(k));
        if (!tx || fee(*tx) != std::get<0>(k)) throw PoolError("by_fee disagrees with pending");
    }
    std::size_t chained = 0;
    Wei prices = 0, fees = 0;
    for (const auto& [sender, c] : by_sender_) {
        if (c.by_nonce.empty()) throw PoolError("empty sender chain retained");
        Wei total = 0, min_fee = ~Wei(0);
        for (const auto& [n, id] : c.by_nonce) {
            const auto* tx = find(id);
            if (!tx || tx->sender != sender || tx->nonce != n) throw PoolError("by_sender disagrees with pending");
            total += cost(*tx);
            min_fee = std::min(min_fee, fee(*tx));
            prices += tx->price;
            fees += fee(*tx);
            ++chained;
        }
        if (total != c.total_cost) throw PoolError("sender cost total is stale");
        if (min_fee != c.min_fee) throw PoolError("min_fee_by_sender is stale");
        const auto& tail = entries_.at(c.by_nonce.rbegin()->second);
        if (!childless_by_price_.count({Wei(tail.tx.price), tail.seq, tail.tx.id}))
            throw PoolError("childless index misses a tail");
    }
    if (chained != entries_.size()) throw PoolError("by_sender size mismatch");
    if (childless_by_price_.size() != by_sender_.size() || childless_by_fee_.size() != by_sender_.size())
        throw PoolError("childless index size mismatch");
    if (prices != price_sum_ || fees != fee_sum_) throw PoolError("running sums are stale");
}

std::size_t Mempool::memory_estimate() const
{
    // Node overheads approximate libstdc++ red-black tree and hash nodes.
    constexpr std::size_t kTreeNode = 32, kHashNode = 16;
    std::size_t bytes = sizeof(*this);
    for (const auto& [id, e] : entries_) bytes += kHashNode + sizeof(Entry) + e.tx.sender.capacity();
    bytes += (by_price_.size() + by_fee_.size() + childless_by_price_.size() + childless_by_fee_.size()) *
             (kTreeNode + sizeof(Key));
    for (const auto& [sender, c] : by_sender_)
        bytes += kTreeNode + sizeof(SenderChain) + sender.capacity() +
                 c.by_nonce.size() * (kTreeNode + sizeof(Nonce) + sizeof(TxId));
    bytes += declined_.capacity() * sizeof(DeclinedEntry);
    return bytes;
}

bool is_future(const Transaction& tx, const Mempool& pool, const WorldState& world)
{
    const Nonce wn = world.nonce_of(tx.sender);
    if (tx.nonce <= wn) return false;
    const auto* c = pool.chain(tx.sender);
    if (!c) return true;
    const auto& chain = c->by_nonce;
    const Nonce lo = chain.begin()->first;
    const Nonce hi = chain.rbegin()->first;
    // Fast path: the pending chain is gap-free from the account nonce.
    if (lo == wn && hi - lo + 1 == chain.size()) return tx.nonce > hi + 1;
    Nonce expect = wn;
    for (auto it = chain.lower_bound(wn); it != chain.end() && expect < tx.nonce; ++it, ++expect)
        if (it->first != expect) return true;
    return expect < tx.nonce;
}

Wei cumulative_cost(const Account& sender, Nonce up_to_nonce, const Mempool& pool)
{
    const auto* c = pool.chain(sender);
    if (!c) return 0;
    if (up_to_nonce >= c->by_nonce.rbegin()->first) return c->total_cost;
    Wei sum = 0;
    for (auto it = c->by_nonce.begin(); it != c->by_nonce.end() && it->first <= up_to_nonce; ++it)
        sum += cost(*pool.find(it->second));
    return sum;
}

PrecheckReport precheck(const Transaction& tx, const Mempool& pool, const WorldState& world,
                        bool full_checks)
{
    const AccountState acct = world.account(tx.sender);
    if (tx.nonce < acct.nonce)
        return {Verdict::stale, "nonce " + std::to_string(tx.nonce) + " below account nonce " +
                                    std::to_string(acct.nonce)};
    if (pool.find(tx.sender, tx.nonce))
        return {Verdict::duplicate, "sender/nonce already pending"};
    if (!full_checks) return {};
    if (is_future(tx, pool, world))
        return {Verdict::future, "missing ancestor below nonce " + std::to_string(tx.nonce)};
    const Wei reserved = cumulative_cost(tx.sender, tx.nonce, pool) + cost(tx);
    if (reserved > acct.balance)
        return {Verdict::overdraft, "reservation " + to_string(reserved) + " exceeds balance " +
                                        to_string(acct.balance)};
    return {};
}

std::vector<Transaction> find_childless(const Mempool& pool) { return pool.find_childless(); }

std::optional<Transaction> min_price_childless(const Mempool& pool)
{
    const auto* t = pool.min_price_childless();
    if (!t) return std::nullopt;
    return *t;
}

Transaction descendant_victim(const Mempool& pool, const Transaction& seed)
{
    return pool.descendant_victim(seed);
}

namespace {

Reason reason_for(Verdict v)
{
    switch (v) {
    case Verdict::future: return Reason::invalid_future;
    case Verdict::overdraft: return Reason::invalid_overdraft;
    case Verdict::stale: return Reason::invalid_stale;
    case Verdict::duplicate: return Reason::invalid_duplicate;
    case Verdict::valid: break;
    }
    throw std::logic_error("valid verdict has no decline reason");
}

} // namespace

AdmissionOutcome admit(Mempool& pool, const Transaction& tx, const WorldState& world,
                       const PolicyConfig& policy,
                       const std::function<void(const PolicyDecision&)>& on_decided)
{
    const auto report = precheck(tx, pool, world, policy.precheck);
    if (!report.valid()) {
        const Reason r = reason_for(report.verdict);
        pool.record_decline(tx, r);
        return {OutcomeKind::declined, r, {}};
    }
    PolicyDecision d = decide(pool, tx, policy);
    if (on_decided) on_decided(d);
    if (!d.admit) {
        pool.record_decline(tx, d.reason);
        return {OutcomeKind::declined, d.reason, {}};
    }
    pool.apply_admission(tx, d.victims);
    if (d.victims.empty()) return {OutcomeKind::admitted_no_evict, Reason::pool_not_full, {}};
    return {OutcomeKind::admitted_evicting, Reason::eviction, std::move(d.victims)};
}

std::vector<bool> future_flags(std::span<const Nonce> nonces, Nonce world_nonce)
{
    std::vector<bool> out(nonces.size(), true);
    Nonce expect = world_nonce;
    for (std::size_t i = 0; i < nonces.size(); ++i) {
        if (nonces[i] != expect) break;
        out[i] = false;
        ++expect;
    }
    return out;
}

std::size_t count_future(const Mempool& pool, const WorldState& world)
{
    std::size_t n = 0;
    std::vector<Nonce> nonces;
    for (const auto& [sender, c] : pool.senders()) {
        nonces.clear();
        for (const auto& [nonce, id] : c.by_nonce) nonces.push_back(nonce);
        for (bool f : future_flags(nonces, world.nonce_of(sender))) n += f;
    }
    return n;
}

} // namespace safepool
