#include "safepool/builder.hpp"

#include <queue>

namespace safepool {

std::string_view skip_reason_name(SkipReason r)
{
    switch (r) {
    case SkipReason::gas_overflow: return "gas-overflow";
    case SkipReason::nonce_gap: return "nonce-gap";
    case SkipReason::insufficient_balance: return "insufficient-balance";
    }
    return "?";
}

std::vector<Transaction> candidate_order(const Mempool& pool)
{
    struct Head {
        std::uint64_t price;
        std::uint64_t seq;
        const Mempool::SenderChain* chain;
        std::map<Nonce, TxId>::const_iterator it;
    };
    auto worse = [](const Head& a, const Head& b) {
        if (a.price != b.price) return a.price < b.price;
        return a.seq > b.seq;
    };
    std::priority_queue<Head, std::vector<Head>, decltype(worse)> heads(worse);
    auto push = [&](const Mempool::SenderChain* c, std::map<Nonce, TxId>::const_iterator it) {
        if (it == c->by_nonce.end()) return;
        heads.push({pool.find(it->second)->price, pool.sequence_of(it->second), c, it});
    };
    for (const auto& [sender, c] : pool.senders()) push(&c, c.by_nonce.begin());

    std::vector<Transaction> out;
    out.reserve(pool.size());
    while (!heads.empty()) {
        Head h = heads.top();
        heads.pop();
        out.push_back(*pool.find(h.it->second));
        push(h.chain, std::next(h.it));
    }
    return out;
}

BuildResult build_from_order(std::span<const Transaction> order, const WorldState& world, const GasModel& gas)
{
    BuildResult r;
    std::map<Account, AccountState> touched;
    auto state = [&](const Account& a) -> AccountState& {
        auto it = touched.find(a);
        if (it == touched.end()) it = touched.emplace(a, world.account(a)).first;
        return it->second;
    };
    for (const auto& tx : order) {
        auto& acct = state(tx.sender);
        if (tx.nonce != acct.nonce) {
            r.skipped.push_back({tx, SkipReason::nonce_gap});
            continue;
        }
        const Gas used = gas ? gas(tx, r.block.txs) : tx.gas_used;
        if (r.block.gas_total + used > world.block_gas_limit) {
            r.skipped.push_back({tx, SkipReason::gas_overflow});
            continue;
        }
        const Wei charge = Wei(used) * tx.price + tx.value;
        if (charge > acct.balance) {
            r.skipped.push_back({tx, SkipReason::insufficient_balance});
            continue;
        }
        acct.balance -= charge;
        acct.nonce += 1;
        r.block.txs.push_back(tx);
        r.block.gas.push_back(used);
        r.block.gas_total += used;
        r.block.revenue += Wei(used) * tx.price;
    }
    return r;
}

BuildResult build_block(Mempool& pool, WorldState& world, const GasModel& gas)
{
    const auto order = candidate_order(pool);
    BuildResult r = build_from_order(order, world, gas);
    for (std::size_t i = 0; i < r.block.txs.size(); ++i) {
        const auto& tx = r.block.txs[i];
        pool.remove_included(tx.id);
        auto& acct = world.mutable_account(tx.sender);
        acct.balance -= Wei(r.block.gas[i]) * tx.price + tx.value;
        acct.nonce += 1;
    }
    return r;
}

std::vector<Block> drain(Mempool& pool, WorldState& world, const GasModel& gas)
{
    std::vector<Block> blocks;
    while (!pool.empty()) {
        BuildResult r = build_block(pool, world, gas);
        if (r.block.txs.empty()) {
            pool.decline_all(Reason::unbuildable);
            break;
        }
        blocks.push_back(std::move(r.block));
    }
    return blocks;
}

} // namespace safepool
