// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails. Derived quantities are recomputed with the slow
// models in oracle.hpp rather than read back from the engine.

#include "oracle.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace safepool;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const Outcome& o)
{
    std::printf("%s %s  %s  %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
}

Outcome guarded(const std::function<Outcome()>& body)
{
    try {
        return body();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

ScenarioConfig config_for(PolicyKind kind, std::size_t capacity, DrainMode mode)
{
    ScenarioConfig c;
    c.policy.kind = kind;
    c.capacity = capacity;
    c.drain_mode = mode;
    return c;
}

Wei block_fees(const std::vector<Block>& blocks, bool adversarial_only = false)
{
    Wei s = 0;
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < b.txs.size(); ++i)
            if (!adversarial_only || b.txs[i].label == Label::adversarial) s += Wei(b.gas[i]) * b.txs[i].price;
    return s;
}

// Every replay from criteria 1-4, kept for the conservation check.
std::vector<std::pair<std::string, RunReport>> ledger_runs;

// --- criteria 1, 2 ------------------------------------------------------------

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};
constexpr std::size_t kSteps = 2000;

std::vector<TraceEvent> random_run_events(std::uint64_t seed)
{
    RandomAdversaryParams p;
    p.steps = kSteps;
    p.seed = seed;
    return prefill_then(gen_random_adversary(p).events, kDeskCapacity, seed);
}

Outcome criterion_monotone()
{
    const auto t0 = Clock::now();
    std::size_t admissions = 0, steps = 0, arrivals = 0, violations = 0;
    for (auto seed : kSeeds) {
        const auto events = random_run_events(seed);
        const auto config = config_for(PolicyKind::cp, kDeskCapacity, DrainMode::interleaved);
        Mempool pool(config.capacity);
        WorldState world = config.make_world();
        bool after_st0 = false;
        for (const auto& ev : events) {
            steps += after_st0;
            if (ev.kind == EventKind::snapshot_marker) after_st0 = true;
            if (ev.kind == EventKind::block_trigger) build_block(pool, world);
            if (ev.kind != EventKind::tx_arrival) continue;
            const Wei before = oracle::ref_price_sum(pool.pending());
            const auto o = admit(pool, ev.tx, world, config.policy);
            const Wei after = oracle::ref_price_sum(pool.pending());
            if (after_st0) {
                ++arrivals;
                admissions += o.admitted();
                violations += after < before;
            }
        }
        ledger_runs.emplace_back("random seed " + std::to_string(seed), replay(config, events));
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << steps << " adversarial steps over " << std::size(kSeeds) << " seeds, " << arrivals << " arrivals, "
      << admissions << " admissions, " << violations << " decreases, " << secs << " s";
    return {violations == 0 && steps >= 10'000 && secs < 60.0, d.str()};
}

Outcome criterion_bound()
{
    std::size_t violations = 0;
    std::ostringstream d;
    double worst = 0;
    for (const auto& [name, r] : ledger_runs) {
        if (name.rfind("random", 0) != 0) continue;
        // st0 is the prefill marker, which precedes every block trigger.
        const Wei bound = Wei(kMinTxGas) * oracle::ref_price_sum(r.st0);
        const Wei collected = block_fees(r.blocks) + block_fees(r.drained_blocks);
        violations += collected < bound;
        violations += !r.violations.empty();
        const double ratio = to_double(bound) / to_double(collected);
        worst = std::max(worst, ratio);
    }
    d << violations << " violations, max bound/collected = " << worst;
    return {violations == 0, d.str()};
}

// --- criteria 3, 4 ------------------------------------------------------------

struct Xt6Case {
    const char* name;
    Xt6Params params;
};

std::vector<TraceEvent> xt6_events(const Xt6Params& p)
{
    return prefill_then(gen_xt6(p).events, p.capacity, 11);
}

Outcome criterion_xt6_baseline()
{
    std::ostringstream d;
    bool pass = true;
    for (const Xt6Case& c : {Xt6Case{"desk", Xt6Params::desk()}, Xt6Case{"full", Xt6Params::full()}}) {
        const auto t0 = Clock::now();
        const auto events = xt6_events(c.params);
        const auto config = config_for(PolicyKind::baseline, c.params.capacity, DrainMode::end_only);
        const auto r = replay(config, events);
        const double secs = seconds_since(t0);
        ledger_runs.emplace_back(std::string("xt6 baseline ") + c.name, r);

        const WorldState world = config.make_world();
        const std::size_t pending = r.pending_before_drain.size();
        const std::size_t non_future = pending - oracle::ref_count_future(r.pending_before_drain, world);
        const Wei one_tx = Wei(c.params.gas) * Xt6Prices::from_base(c.params.base_price).final_tx;
        const Wei charged = block_fees(r.drained_blocks, true);
        const bool ok = non_future <= 1 && charged <= 2 * one_tx && secs < 600.0;
        pass = pass && ok;
        d << c.name << ": " << pending << " pending, " << non_future << " non-future, charged "
          << to_string(charged) << " vs one tx " << to_string(one_tx) << ", " << secs << " s; ";
    }
    return {pass, d.str()};
}

Outcome criterion_xt6_cp()
{
    std::ostringstream d;
    bool pass = true;
    for (const Xt6Case& c : {Xt6Case{"desk", Xt6Params::desk()}, Xt6Case{"full", Xt6Params::full()}}) {
        const auto events = xt6_events(c.params);
        const auto r = replay(config_for(PolicyKind::cp, c.params.capacity, DrainMode::end_only), events);
        ledger_runs.emplace_back(std::string("xt6 cp ") + c.name, r);
        const Wei pre = oracle::ref_price_sum(r.st0);
        const Wei post = oracle::ref_price_sum(r.pending_before_drain);
        const bool ok = post >= pre && r.violations.empty();
        pass = pass && ok;
        d << c.name << ": price sum " << to_string(pre) << " -> " << to_string(post) << "; ";
    }
    return {pass, d.str()};
}

// --- criterion 5 ---------------------------------------------------------------

Outcome criterion_bound_separation()
{
    std::ostringstream d;
    bool pass = true;
    double lo = 1e300, hi = 0;
    const WorldState world;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SnapshotParams p;
        p.size = kDeskCapacity;
        p.senders = kDeskCapacity;
        p.seed = seed;
        const auto snap = gen_pool_snapshot(p);
        const auto cp = eviction_bound_cp(snap);
        const auto base = eviction_bound_baseline_under_xt6(snap, world);
        const Wei n = snap.size();
        const Wei min_price = oracle::min_by(snap, CompareBy::price)->price;
        const Wei max_price = oracle::max_price(snap)->price;
        pass = pass && cp.bound_wei >= Wei(kMinTxGas) * n * min_price;
        pass = pass && cp.bound_wei == Wei(kMinTxGas) * oracle::ref_price_sum(snap);
        pass = pass && base.bound_wei == max_price * 30'000'000;
        const double ratio = to_double(cp.bound_wei) / to_double(base.bound_wei);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    d << "20 snapshots, cp/baseline bound ratio in [" << lo << ", " << hi << "] (reported)";
    return {pass, d.str()};
}

// --- criterion 6 ---------------------------------------------------------------

Outcome criterion_cp_lock()
{
    const auto lock = gen_cp_lock({64, 64, 1, 10'000, "lock"});
    auto probe = [&](std::uint64_t price) {
        auto ev = lock.events;
        ev.push_back(TraceEvent::arrival(make_transaction("probe", 0, price), ev.back().ts_ms + 1));
        assign_ids(ev);
        return replay(config_for(PolicyKind::cp, 64, DrainMode::end_only), ev);
    };
    const auto at = probe(10'000);
    const auto above = probe(10'001);
    const bool declined = at.events.back().outcome == OutcomeKind::declined;
    const bool admitted = above.events.back().outcome == OutcomeKind::admitted_evicting;

    std::uint64_t max_declined_benign = 0;
    for (const auto& e : at.declined_ledger)
        if (e.tx.label == Label::benign && e.reason != Reason::unbuildable)
            max_declined_benign = std::max(max_declined_benign, e.tx.price);
    const std::uint64_t min_pending = oracle::min_by(at.pending_before_drain, CompareBy::price)->price;
    const bool ratio_ok = max_declined_benign >= 10'000 * min_pending;

    std::ostringstream d;
    d << "probe 10000 " << (declined ? "declined" : "admitted") << ", probe 10001 "
      << (admitted ? "admitted" : "declined") << ", max declined benign " << max_declined_benign
      << " / min pending " << min_pending;
    return {declined && admitted && ratio_ok, d.str()};
}

// --- criterion 7 ---------------------------------------------------------------

Outcome criterion_order_insensitive()
{
    std::mt19937_64 rng(2024);
    WorldState world;
    world.default_balance = Wei(1) << 100;
    PolicyConfig map;
    map.kind = PolicyKind::map;
    map.map_gate_nonfull = true;

    std::size_t cases = 0, eligible = 0, violations = 0;
    while (cases < 20'000) {
        const std::size_t cap = 1 + rng() % 8;
        Mempool st0(cap);
        const std::size_t fill = 1 + rng() % cap;
        TxId id = 0;
        while (st0.size() < fill) {
            const std::string s = "s" + std::to_string(rng() % 4);
            const auto* chain = st0.chain(s);
            const Nonce n = chain ? chain->by_nonce.rbegin()->first + 1 : 0;
            const Gas gas = kMinTxGas + (rng() % 3) * 7'000;
            st0.apply_admission(make_transaction(s, n, 1 + rng() % 8, gas, gas, 0, Label::benign, id++), {});
        }
        auto arrival = [&](const std::string& s) {
            const auto* chain = st0.chain(s);
            const Nonce n = chain ? chain->by_nonce.rbegin()->first + 1 : 0;
            const Gas gas = kMinTxGas + (rng() % 3) * 7'000;
            return make_transaction(s, n, 1 + rng() % 10, gas, gas, 0, Label::benign, id++);
        };
        const std::string sa = "s" + std::to_string(rng() % 6);
        std::string sb = "s" + std::to_string(rng() % 6);
        while (sb == sa) sb = "s" + std::to_string(rng() % 6);
        const auto a = arrival(sa), b = arrival(sb);
        ++cases;

        Mempool st1 = st0, st1p = st0;
        admit(st1, a, world, map);
        admit(st1p, b, world, map);
        if (st1.empty() || st1p.empty()) continue;
        const Wei m0 = oracle::metric(*oracle::min_by(st0.pending(), CompareBy::fee), CompareBy::fee);
        const Wei m1 = oracle::metric(*oracle::min_by(st1.pending(), CompareBy::fee), CompareBy::fee);
        const Wei m1p = oracle::metric(*oracle::min_by(st1p.pending(), CompareBy::fee), CompareBy::fee);
        if (!(m0 == m1 && m1 == m1p)) continue;
        ++eligible;
        Mempool st2 = st1, st2p = st1p;
        admit(st2, b, world, map);
        admit(st2p, a, world, map);
        violations += oracle::ids(st2.pending()) != oracle::ids(st2p.pending());
    }
    std::ostringstream d;
    d << cases << " cases, " << eligible << " meet the mdf precondition, " << violations << " order-dependent";
    return {cases >= 10'000 && eligible > 0 && violations == 0, d.str()};
}

// --- criterion 8 ---------------------------------------------------------------

std::vector<TxId> block_ids(const Block& b)
{
    std::vector<TxId> out;
    for (const auto& t : b.txs) out.push_back(t.id);
    return out;
}

Outcome criterion_a2()
{
    auto pool_of = [](std::uint64_t p1, std::uint64_t p2, std::uint64_t p3) {
        Mempool pool(3);
        pool.apply_admission(make_transaction("tx1", 0, p1, 21'000, 21'000, 0, Label::benign, 1), {});
        pool.apply_admission(make_transaction("tx2", 0, p2, 29'999'999, 29'999'999, 0, Label::benign, 2), {});
        pool.apply_admission(make_transaction("tx3", 0, p3, 21'000, 21'000, 0, Label::benign, 3), {});
        return pool;
    };
    WorldState w;
    w.default_balance = Wei(1) << 90;

    Mempool tc1 = pool_of(10, 8, 5);
    const auto r1 = build_block(tc1, w);
    const bool tc1_ok = block_ids(r1.block) == std::vector<TxId>{1, 3};

    WorldState w2;
    w2.default_balance = Wei(1) << 90;
    w2.block_gas_limit = 30'000'000 + 42'000;
    Mempool tc2 = pool_of(5, 8, 5);
    const auto r2 = build_block(tc2, w2);
    const bool tc2_ok = oracle::ids(r2.block.txs) == std::set<TxId>{1, 2, 3};

    const auto t1 = make_transaction("tx1", 0, 5, 29'999'999, 29'999'999, 0, Label::benign, 1);
    const auto t2 = make_transaction("tx2", 0, 5, 29'000'000, 29'000'000, 0, Label::benign, 2);
    const GasModel model = [](const Transaction& t, std::span<const Transaction> before) -> Gas {
        if (t.id != 1) return t.gas_used;
        for (const auto& p : before)
            if (p.id == 2) return 2'200;
        return 29'999'999;
    };
    WorldState w3;
    w3.default_balance = Wei(1) << 90;
    const std::vector<Transaction> order_a{t1, t2}, order_b{t2, t1};
    const bool a2b_ok = block_ids(build_from_order(order_a, w3, model).block) == std::vector<TxId>{1} &&
                        block_ids(build_from_order(order_b, w3, model).block) == std::vector<TxId>{2, 1};

    std::ostringstream d;
    d << "TC1 {Tx1,Tx3} " << (tc1_ok ? "ok" : "wrong") << ", TC2 all " << (tc2_ok ? "ok" : "wrong")
      << ", A2b order-dependent " << (a2b_ok ? "ok" : "wrong");
    return {tc1_ok && tc2_ok && a2b_ok, d.str()};
}

// --- criterion 9 ---------------------------------------------------------------

Outcome criterion_conservation()
{
    std::size_t bad = 0;
    for (const auto& [name, r] : ledger_runs) {
        // every run starts from an empty pool with no history
        const SignedWei want = oracle::ledger_identity({}, r.blocks, r.drained_blocks, r.declined_ledger);
        bad += r.util.totals().dutil != want;
    }
    std::ostringstream d;
    d << ledger_runs.size() << " replays, " << bad << " mismatches";
    return {bad == 0 && ledger_runs.size() == std::size(kSeeds) + 4, d.str()};
}

// --- criterion 10 --------------------------------------------------------------

Outcome criterion_gamma()
{
    std::size_t mismatches = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        SnapshotParams p;
        p.size = 1000;
        p.senders = 100;
        p.seed = 1000 + trial;
        const auto snap = gen_pool_snapshot(p);
        const auto g = gamma(snap);
        const auto want = oracle::brute_gamma(snap);
        Ratio max{0, 1};
        for (const auto& [s, r] : want) max = std::max(max, r);
        mismatches += g.per_sender != want || g.gamma_max != max;
    }
    std::ostringstream d;
    d << "100 trials of 1000 transactions, " << mismatches << " mismatches";
    return {mismatches == 0, d.str()};
}

// --- criterion 11 --------------------------------------------------------------

Outcome criterion_performance()
{
    const auto events = workload_batch_insert(10'000);
    const std::size_t rounds = 7;
    auto best = [&](PolicyKind kind) {
        const auto b = bench(config_for(kind, 5000, DrainMode::end_only), events, rounds, "batch_insert");
        double m = 1e300, worst = 0;
        for (const auto& s : b.samples) {
            m = std::min(m, s.seconds);
            worst = std::max(worst, s.seconds);
        }
        return std::pair{m, worst};
    };
    best(PolicyKind::cp);   // warm-up
    const auto [cp, cp_worst] = best(PolicyKind::cp);
    const auto [base, base_worst] = best(PolicyKind::baseline);
    const double ratio = cp / base;
    std::ostringstream d;
    d << "best of " << rounds << ": cp " << cp << " s, baseline " << base << " s, ratio " << ratio;
    return {ratio <= 1.5 && cp_worst < 5.0 && base_worst < 5.0, d.str()};
}

} // namespace

int main()
{
    const auto t0 = Clock::now();
    report("C1", "monotonic price sum under cp", guarded(criterion_monotone));
    report("C2", "eviction bound 21000*sum(price st0)", guarded(criterion_bound));
    report("C3", "xt6 vs baseline", guarded(criterion_xt6_baseline));
    report("C4", "xt6 vs cp", guarded(criterion_xt6_cp));
    report("C5", "bound separation", guarded(criterion_bound_separation));
    report("C6", "cp locking counterexample", guarded(criterion_cp_lock));
    report("C7", "map order-insensitivity", guarded(criterion_order_insensitive));
    report("C8", "A2a/A2b builder scenarios", guarded(criterion_a2));
    report("C9", "dUtil conservation", guarded(criterion_conservation));
    report("C10", "gamma oracle equivalence", guarded(criterion_gamma));
    report("C11", "performance sanity", guarded(criterion_performance));
    std::printf("%d of 11 criteria failed, %.1f s\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
