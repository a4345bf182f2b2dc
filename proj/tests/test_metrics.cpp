#include "oracle.hpp"

#include <doctest.h>

#include <random>

using namespace safepool;

namespace {

Transaction tx(const char* s, Nonce n, std::uint64_t price, TxId id = 0, Gas gas = kMinTxGas)
{
    return make_transaction(s, n, price, gas, gas, 0, Label::benign, id);
}

} // namespace

TEST_CASE("cp eviction bound")
{
    CHECK(eviction_bound_cp(std::vector<Transaction>{}).bound_wei == Wei(0));
    const std::vector<Transaction> st0{tx("a", 0, 2), tx("b", 0, 3)};
    const auto b = eviction_bound_cp(st0);
    CHECK(b.bound_wei == Wei(105'000));
    CHECK(b.basis == BoundBasis::cp_21000_price_sum);
    Mempool pool(4);
    pool.apply_admission(tx("a", 0, 2, 1), {});
    pool.apply_admission(tx("b", 0, 3, 2), {});
    CHECK(eviction_bound_cp(pool).bound_wei == Wei(105'000));
}

TEST_CASE("baseline eviction bound under xt6")
{
    WorldState w;
    const std::vector<Transaction> st{tx("a", 0, 2), tx("b", 0, 10), tx("c", 0, 7)};
    const auto b = eviction_bound_baseline_under_xt6(st, w);
    CHECK(b.bound_wei == Wei(300'000'000));
    CHECK(b.policy == PolicyKind::baseline);
    CHECK(eviction_bound_baseline_under_xt6(std::vector<Transaction>{tx("a", 0, 4)}, w).bound_wei ==
          Wei(4) * kDefaultBlockGasLimit);
    CHECK_THROWS_AS(eviction_bound_baseline_under_xt6(std::vector<Transaction>{}, w), PoolError);
    CHECK_THROWS_AS(eviction_bound_baseline_under_xt6(Mempool(2), w), PoolError);
}

TEST_CASE("Ratio is exact and ordered")
{
    CHECK(Ratio::of(4, 8) == Ratio{1, 2});
    CHECK(Ratio::of(0, 9) == Ratio{0, 1});
    CHECK(Ratio{1, 3} < Ratio{1, 2});
    CHECK(to_string(Ratio::of(6, 4)) == "3/2");
    CHECK(Ratio::of(1, 4).value() == doctest::Approx(0.25));
}

TEST_CASE("gamma examples")
{
    const auto single = gamma(std::vector<Transaction>{tx("a", 0, 7)});
    CHECK(single.per_sender.at("a") == Ratio{0, 1});
    const auto two = gamma(std::vector<Transaction>{tx("a", 0, 2), tx("a", 1, 4), tx("b", 0, 3)});
    CHECK(two.per_sender.at("a") == Ratio{1, 1});
    CHECK(two.per_sender.at("b") == Ratio{0, 1});
    CHECK(two.gamma_max == Ratio{1, 1});
    CHECK(two.gamma_avg == doctest::Approx(0.5));
    CHECK_THROWS_AS(gamma(std::span<const std::vector<Transaction>>{}), std::invalid_argument);
}

TEST_CASE("gamma takes the maximum over snapshots")
{
    const std::vector<std::vector<Transaction>> snaps{{tx("a", 0, 2), tx("a", 1, 3)}, {tx("a", 0, 5), tx("a", 1, 20)}};
    const auto g = gamma(snaps);
    CHECK(g.per_sender.at("a") == Ratio{3, 1});
    CHECK(g.snapshots == 2);
    CHECK(g.transactions == 4);
}

TEST_CASE("fee-denominator gamma")
{
    const auto g = gamma(std::vector<Transaction>{tx("a", 0, 2), tx("a", 1, 4)});
    // max price 4 over min fee 2 * 21000, minus one
    CHECK(g.per_sender_fee.at("a") == doctest::Approx(4.0 / 42000.0 - 1.0));
}

TEST_CASE("nearest-rank percentiles")
{
    CHECK(nearest_rank(1, 95) == 0);
    CHECK(nearest_rank(20, 95) == 18);
    CHECK(nearest_rank(20, 50) == 9);
    CHECK(nearest_rank(100, 100) == 99);
    const std::vector<Ratio> v{Ratio{1, 1}, Ratio{3, 1}};
    CHECK(mean_of(v) == doctest::Approx(2.0));
}

TEST_CASE("gamma matches the pairwise oracle and is zero exactly on flat senders")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SnapshotParams p;
        p.size = 300;
        p.senders = 30;
        p.price_hi = seed % 2 ? 10'000 : 3;
        p.seed = seed;
        const auto snap = gen_pool_snapshot(p);
        const auto g = gamma(snap);
        const auto want = oracle::brute_gamma(snap);
        CHECK(g.per_sender == want);
        for (const auto& [s, r] : g.per_sender) {
            std::set<std::uint64_t> prices;
            for (const auto& t : snap)
                if (t.sender == s) prices.insert(t.price);
            CHECK((r == Ratio{0, 1}) == (prices.size() == 1));
        }
    }
}

TEST_CASE("outcome classes")
{
    const auto t = tx("a", 0, 9, 1, 21000);
    AdmissionOutcome declined{OutcomeKind::declined, Reason::price_too_low, {}};
    CHECK(outcome_class(t, declined) == OutcomeClass::O1);
    AdmissionOutcome free{OutcomeKind::admitted_no_evict, Reason::pool_not_full, {}};
    CHECK(outcome_class(t, free) == OutcomeClass::O4);
    AdmissionOutcome cheap{OutcomeKind::admitted_evicting, Reason::eviction, {tx("b", 0, 5, 2)}};
    CHECK(outcome_class(t, cheap) == OutcomeClass::O2);
    AdmissionOutcome dear{OutcomeKind::admitted_evicting, Reason::eviction, {tx("b", 0, 10, 2)}};
    CHECK(outcome_class(t, dear) == OutcomeClass::O3);
    AdmissionOutcome equal{OutcomeKind::admitted_evicting, Reason::eviction, {tx("b", 0, 9, 2)}};
    CHECK(outcome_class(t, equal) == OutcomeClass::other);
    CHECK(outcome_class_name(OutcomeClass::O2) == "O2");
}

TEST_CASE("future transitions are detected by diffing residents")
{
    WorldState w;
    w.default_balance = Wei(1) << 80;
    Mempool before(2);
    before.apply_admission(tx("a", 0, 1, 1), {});
    before.apply_admission(tx("a", 1, 5, 2), {});
    // baseline evicts the parent and strands its child
    Mempool after = before;
    PolicyConfig base;
    base.kind = PolicyKind::baseline;
    const auto arrival = tx("b", 0, 3, 3);
    const auto o = admit(after, arrival, w, base);
    REQUIRE(o.kind == OutcomeKind::admitted_evicting);
    const auto c = classify_outcome(before, after, arrival, o, w);
    CHECK(c.cls == OutcomeClass::O2);
    CHECK(c.pending_turn_future);
    CHECK_FALSE(c.future_turn_pending);

    // re-admitting the parent turns the child pending again
    Mempool restored = after;
    restored.set_capacity(3);
    const auto parent = tx("a", 0, 1, 4);
    const auto o2 = admit(restored, parent, w, base);
    REQUIRE(o2.kind == OutcomeKind::admitted_no_evict);
    const auto c2 = classify_outcome(after, restored, parent, o2, w);
    CHECK(c2.future_turn_pending);
    CHECK_FALSE(c2.pending_turn_future);
}

TEST_CASE("dutil examples")
{
    const std::uint64_t f = 21000 * 7;
    Mempool before(1);
    Mempool declined = before;
    declined.record_decline(tx("a", 0, 7, 1), Reason::price_too_low);
    CHECK(dutil(before, declined, 0) == -SignedWei(f));

    Mempool admitted = before;
    admitted.apply_admission(tx("a", 0, 7, 1), {});
    CHECK(dutil(before, admitted, 0) == SignedWei(f));

    // eviction: +fee(tx) - fee(victim) inside, -fee(victim) outside
    Mempool evicted = admitted;
    const std::vector<Transaction> victims{tx("a", 0, 7, 1)};
    evicted.apply_admission(tx("b", 0, 10, 2), victims);
    CHECK(dutil(admitted, evicted, 0) == SignedWei(21000 * 10) - 2 * SignedWei(f));

    // inclusion moves a fee from pool to blocks
    Mempool included = admitted;
    included.remove_included(1);
    CHECK(dutil(admitted, included, f) == 0);
}

TEST_CASE("util ledger books flag rows without double counting totals")
{
    UtilLedger l;
    FeeTotals a{0, 0, 0}, b{10, 0, 0}, c{10, 0, 4};
    l.record({OutcomeClass::O4, false, false}, a, b);
    l.record({OutcomeClass::O1, true, false}, b, c);
    CHECK(l.row(UtilKey::O4).count == 1);
    CHECK(l.row(UtilKey::O4).dutil == 10);
    CHECK(l.row(UtilKey::O1).dutil == -4);
    CHECK(l.row(UtilKey::future_turn_pending).count == 1);
    CHECK(l.row(UtilKey::future_turn_pending).dutil == -4);
    CHECK(l.totals().count == 2);
    CHECK(l.totals().dutil == 6);
    CHECK(l.totals().inside_delta == 10);
    CHECK(l.totals().outside_delta == 4);
    CHECK(util_key_name(UtilKey::pending_turn_future) == "pending_turn_future");
}

TEST_CASE("revenue series")
{
    CHECK(revenue_series({}).empty());
    Block b1, b2;
    b1.revenue = 3;
    b2.revenue = 5;
    const std::vector<Block> blocks{b1, b2};
    const auto s = revenue_series(blocks);
    REQUIRE(s.size() == 2);
    CHECK(s[0].index == 0);
    CHECK(s[1].revenue == Wei(5));
    CHECK(s[1].running_avg == doctest::Approx(4.0));
    CHECK(total_revenue(blocks) == Wei(8));
}

TEST_CASE("fee and price totals")
{
    const std::vector<Transaction> v{tx("a", 0, 2), tx("b", 0, 3, 0, 30'000)};
    CHECK(price_total(v) == Wei(5));
    CHECK(fee_total(v) == Wei(2 * 21000 + 3 * 30'000));
}
