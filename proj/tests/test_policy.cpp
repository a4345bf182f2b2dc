#include "oracle.hpp"

#include <doctest.h>

#include <random>

using namespace safepool;

namespace {

Transaction tx(const char* s, Nonce n, std::uint64_t price, TxId id, Gas gas = kMinTxGas)
{
    return make_transaction(s, n, price, gas, gas, 0, Label::benign, id);
}

WorldState rich_world()
{
    WorldState w;
    w.default_balance = Wei(1) << 90;
    return w;
}

} // namespace

TEST_CASE("policy names")
{
    CHECK(parse_policy("map") == PolicyKind::map);
    CHECK(policy_name(PolicyKind::baseline) == "baseline");
    CHECK_THROWS_AS(parse_policy("geth"), std::invalid_argument);
    CHECK(parse_compare_by("fee") == CompareBy::fee);
    PolicyConfig c;
    CHECK(c.metric() == CompareBy::price);
    c.kind = PolicyKind::map;
    CHECK(c.metric() == CompareBy::fee);
    c.compare_by = CompareBy::price;
    CHECK(c.metric() == CompareBy::price);
}

TEST_CASE("cp protects parents where baseline does not")
{
    // A1 (price 1) is the parent of A2 (price 3); B1 (price 5) is childless.
    Mempool pool(3);
    pool.apply_admission(tx("A", 0, 1, 1), {});
    pool.apply_admission(tx("A", 1, 3, 2), {});
    pool.apply_admission(tx("B", 0, 5, 3), {});
    const auto arrival = tx("C", 0, 2, 4);

    const auto base = decide_baseline(pool, arrival);
    REQUIRE(base.admit);
    CHECK(oracle::ids(base.victims) == std::set<TxId>{1});

    const auto cp = decide_cp(pool, arrival);
    CHECK_FALSE(cp.admit);
    CHECK(cp.reason == Reason::price_too_low);

    const auto cp4 = decide_cp(pool, tx("C", 0, 4, 5));
    REQUIRE(cp4.admit);
    CHECK(oracle::ids(cp4.victims) == std::set<TxId>{2});
}

TEST_CASE("cp requires a strictly higher price")
{
    Mempool pool(1);
    pool.apply_admission(tx("A", 0, 7, 1), {});
    CHECK_FALSE(decide_cp(pool, tx("B", 0, 7, 2)).admit);
    CHECK(decide_cp(pool, tx("B", 0, 8, 2)).admit);
}

TEST_CASE("cp and baseline never evict the arrival's own ancestor")
{
    Mempool pool(1);
    pool.apply_admission(tx("A", 0, 1, 1), {});
    for (auto d : {decide_cp(pool, tx("A", 1, 9, 2)), decide_baseline(pool, tx("A", 1, 9, 2))}) {
        CHECK_FALSE(d.admit);
        CHECK(d.reason == Reason::ancestor_victim);
    }
}

TEST_CASE("map evicts the descendant of the minimum-fee transaction")
{
    Mempool pool(4);
    pool.apply_admission(tx("A", 0, 1, 1), {});
    pool.apply_admission(tx("A", 1, 5, 2), {});
    pool.apply_admission(tx("A", 2, 6, 3), {});
    pool.apply_admission(tx("B", 0, 4, 4), {});
    CHECK(mdf(pool) == Wei(21000));

    const auto d = decide_map(pool, tx("C", 0, 2, 5));
    REQUIRE(d.admit);
    CHECK(oracle::ids(d.victims) == std::set<TxId>{3});

    // fee equal to mdf is rejected
    const auto eq = decide_map(pool, tx("C", 0, 1, 6));
    CHECK_FALSE(eq.admit);
    CHECK(eq.reason == Reason::fee_too_low);

    // fee compares gas_used * price, not price alone
    const auto heavy = decide_map(pool, tx("C", 0, 1, 7, 42000));
    CHECK(heavy.admit);
}

TEST_CASE("map with a free slot")
{
    Mempool pool(3);
    pool.apply_admission(tx("A", 0, 5, 1), {});
    CHECK(decide_map(pool, tx("B", 0, 1, 2)).admit);
    const auto gated = decide_map(pool, tx("B", 0, 1, 2), true);
    CHECK_FALSE(gated.admit);
    CHECK(gated.reason == Reason::fee_too_low);
    CHECK(decide_map(pool, tx("B", 0, 6, 2), true).admit);
    CHECK(decide_map(Mempool(3), tx("B", 0, 1, 2), true).admit);
}

TEST_CASE("map frees two slots after a capacity cut")
{
    Mempool pool(3);
    pool.apply_admission(tx("A", 0, 1, 1), {});
    pool.apply_admission(tx("A", 1, 2, 2), {});
    pool.apply_admission(tx("A", 2, 3, 3), {});
    pool.set_capacity(2);
    const auto d = decide_map(pool, tx("B", 0, 9, 4));
    REQUIRE(d.admit);
    CHECK(oracle::ids(d.victims) == std::set<TxId>{2, 3});
}

TEST_CASE("mdf of an empty pool throws")
{
    CHECK_THROWS_AS(mdf(Mempool(1)), PoolError);
}

TEST_CASE("per-sender limit")
{
    Mempool pool(10);
    PolicyConfig c;
    c.per_sender_limit = 1;
    pool.apply_admission(tx("A", 0, 1, 1), {});
    const auto d = decide(pool, tx("A", 1, 1, 2), c);
    CHECK_FALSE(d.admit);
    CHECK(d.reason == Reason::sender_limit);
    CHECK(decide(pool, tx("B", 0, 1, 3), c).admit);
}

TEST_CASE("decisions match the reference model on random full pools")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t cap = 1 + rng() % 6;
        Mempool pool(cap);
        oracle::RefPool ref{cap, {}, {}};
        TxId id = 0;
        while (pool.size() < cap) {
            const std::string s = "s" + std::to_string(rng() % 3);
            const Nonce n = pool.chain(s) ? pool.chain(s)->by_nonce.rbegin()->first + 1 : 0;
            const auto t = tx(s.c_str(), n, 1 + rng() % 6, id++, kMinTxGas + (rng() % 2) * 21000);
            pool.apply_admission(t, {});
            ref.txs.push_back(t);
        }
        const std::string s = "s" + std::to_string(rng() % 4);
        const Nonce n = pool.chain(s) ? pool.chain(s)->by_nonce.rbegin()->first + 1 : 0;
        const auto arrival = tx(s.c_str(), n, 1 + rng() % 7, id++, kMinTxGas + (rng() % 2) * 21000);
        for (auto kind : {PolicyKind::baseline, PolicyKind::cp, PolicyKind::map}) {
            PolicyConfig c;
            c.kind = kind;
            const auto got = decide(pool, arrival, c);
            const auto want = oracle::ref_decide(ref, arrival, c);
            CHECK(got.admit == want.admit);
            CHECK(got.reason == want.reason);
            CHECK(oracle::ids(got.victims) == oracle::ids(want.victims));
        }
    }
}

TEST_CASE("cp never lowers the pending price sum once full and never admits future transactions")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t cap = 2 + rng() % 20;
        Mempool pool(cap);
        WorldState w = rich_world();
        PolicyConfig c;
        Wei last = 0;
        bool was_full = false;
        for (TxId id = 0; id < 500; ++id) {
            const std::string s = "s" + std::to_string(rng() % 8);
            const auto t = tx(s.c_str(), rng() % 5, 1 + rng() % 50, id);
            const auto o = admit(pool, t, w, c);
            CHECK(o.victims.size() <= 1);
            for (const auto& v : o.victims) CHECK(!pool.find(v.sender, v.nonce + 1));
            CHECK(count_future(pool, w) == 0);
            if (was_full) CHECK(pool.price_sum() >= last);
            was_full = was_full || pool.full();
            last = pool.price_sum();
        }
    }
}
