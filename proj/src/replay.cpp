#include "safepool/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace safepool {

using nlohmann::json;

std::string_view drain_mode_name(DrainMode m)
{
    return m == DrainMode::end_only ? "end_only" : "interleaved";
}

DrainMode parse_drain_mode(std::string_view s)
{
    if (s == "end_only") return DrainMode::end_only;
    if (s == "interleaved") return DrainMode::interleaved;
    throw std::invalid_argument("unknown drain mode '" + std::string(s) + "'");
}

void ScenarioConfig::validate() const
{
    if (capacity == 0) throw std::invalid_argument("capacity must be positive");
    if (block_gas_limit < kMinTxGas)
        throw std::invalid_argument("block gas limit below the minimum transaction gas");
    if (snapshot_every && *snapshot_every == 0) throw std::invalid_argument("snapshot_every must be positive");
    if (policy.per_sender_limit && *policy.per_sender_limit == 0)
        throw std::invalid_argument("per_sender_limit must be positive");
}

WorldState ScenarioConfig::make_world() const
{
    WorldState w;
    w.accounts = accounts;
    w.block_gas_limit = block_gas_limit;
    w.default_balance = default_balance;
    return w;
}

namespace {

Wei json_wei(const json& v, const char* key)
{
    if (v.is_string()) return parse_wei(v.get<std::string>());
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))
        return v.get<std::uint64_t>();
    throw std::invalid_argument(std::string("'") + key + "' must be a non-negative integer or decimal string");
}

std::uint64_t json_u64(const json& v, const char* key)
{
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))
        return v.get<std::uint64_t>();
    throw std::invalid_argument(std::string("'") + key + "' must be a non-negative integer");
}

} // namespace

ScenarioConfig parse_config(std::string_view json_text, ScenarioConfig c)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    for (const auto& [key, v] : j.items()) {
        if (key == "policy") c.policy.kind = parse_policy(v.get<std::string>());
        else if (key == "capacity") c.capacity = json_u64(v, "capacity");
        else if (key == "block_gas_limit") c.block_gas_limit = json_u64(v, "block_gas_limit");
        else if (key == "default_balance") c.default_balance = json_wei(v, "default_balance");
        else if (key == "drain_mode") c.drain_mode = parse_drain_mode(v.get<std::string>());
        else if (key == "snapshot_every") c.snapshot_every = json_u64(v, "snapshot_every");
        else if (key == "per_sender_limit") c.policy.per_sender_limit = json_u64(v, "per_sender_limit");
        else if (key == "compare_by") c.policy.compare_by = parse_compare_by(v.get<std::string>());
        else if (key == "map_gate_nonfull") c.policy.map_gate_nonfull = v.get<bool>();
        else if (key == "precheck") c.policy.precheck = v.get<bool>();
        else if (key == "accounts") {
            if (!v.is_object()) throw std::invalid_argument("config: 'accounts' must be an object");
            for (const auto& [name, a] : v.items()) {
                AccountState st;
                if (a.contains("balance")) st.balance = json_wei(a["balance"], "balance");
                if (a.contains("nonce")) st.nonce = json_u64(a["nonce"], "nonce");
                c.accounts[name] = st;
            }
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

ReplayAbort::ReplayAbort(std::size_t event_index, const std::string& what)
    : std::runtime_error("event " + std::to_string(event_index) + ": " + what), index_(event_index)
{
}

namespace {

struct ArrivalEffect {
    FutureTransitions transitions;
    bool future_after = false;   // some affected transaction is future afterwards
};

// Future status only changes for the senders touched by the admission, so
// both states are reconstructed for those senders alone.
ArrivalEffect arrival_effect(const Mempool& pool, const WorldState& world, const Transaction& tx,
                             const AdmissionOutcome& out)
{
    ArrivalEffect e;
    if (!out.admitted()) return e;
    std::set<Account> senders{tx.sender};
    for (const auto& v : out.victims) senders.insert(v.sender);
    for (const auto& s : senders) {
        std::vector<Nonce> after;
        if (const auto* c = pool.chain(s))
            for (const auto& [n, id] : c->by_nonce) after.push_back(n);
        std::vector<Nonce> before;
        for (Nonce n : after)
            if (!(s == tx.sender && n == tx.nonce)) before.push_back(n);
        for (const auto& v : out.victims)
            if (v.sender == s) before.push_back(v.nonce);
        std::sort(before.begin(), before.end());

        const Nonce base = world.nonce_of(s);
        const auto fa = future_flags(after, base);
        const auto fb = future_flags(before, base);
        std::map<Nonce, bool> was;
        for (std::size_t i = 0; i < before.size(); ++i) was[before[i]] = fb[i];
        for (std::size_t i = 0; i < after.size(); ++i) {
            e.future_after = e.future_after || fa[i];
            auto it = was.find(after[i]);
            if (it == was.end()) continue;
            if (it->second && !fa[i]) e.transitions.future_turn_pending = true;
            if (!it->second && fa[i]) e.transitions.pending_turn_future = true;
        }
    }
    return e;
}

Wei included_fees(std::span<const Block> blocks)
{
    Wei s = 0;
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < b.txs.size(); ++i) s += Wei(b.gas[i]) * b.txs[i].price;
    return s;
}

double ratio(Wei num, Wei den)
{
    return den == 0 ? 0.0 : to_double(num) / to_double(den);
}

} // namespace

RunReport replay(const ScenarioConfig& config, std::span<const TraceEvent> events)
{
    config.validate();
    RunReport r;
    r.config = config;
    r.events_total = events.size();
    r.events.reserve(events.size());

    Mempool pool(config.capacity);
    WorldState world = config.make_world();
    const bool cp = config.policy.kind == PolicyKind::cp;
    Wei block_fees = 0;
    bool have_st0 = false;

    auto violation = [&r](std::size_t i, std::string what) { r.violations.push_back({i, std::move(what)}); };
    auto take_snapshot = [&](std::size_t i, std::uint64_t ts, bool marker) {
        SnapshotRecord s;
        s.event_index = i;
        s.ts_ms = ts;
        s.marker = marker;
        s.size = pool.size();
        s.future = count_future(pool, world);
        s.price_sum = pool.price_sum();
        s.fee_sum = pool.fee_sum();
        s.cp_bound = eviction_bound_cp(pool);
        if (!pool.empty()) s.baseline_bound = eviction_bound_baseline_under_xt6(pool, world);
        if (config.keep_snapshot_txs) s.pending = pool.pending();
        r.snapshots.push_back(std::move(s));
    };

    for (std::size_t i = 0; i < events.size(); ++i) {
        const TraceEvent& ev = events[i];
        EventRecord rec;
        rec.index = i;
        rec.kind = ev.kind;
        rec.ts_ms = ev.ts_ms;
        const FeeTotals before = FeeTotals::of(pool, block_fees);
        try {
            switch (ev.kind) {
            case EventKind::tx_arrival: {
                ++r.arrivals;
                rec.tx = ev.tx.id;
                rec.label = ev.tx.label;
                const Wei price_before = pool.price_sum();
                auto check_cp_victims = [&](const PolicyDecision& d) {
                    if (!cp || !config.check_invariants || !d.admit || d.victims.empty()) return;
                    if (d.victims.size() != 1) violation(i, "cp evicted more than one transaction");
                    for (const auto& v : d.victims) {
                        const auto* c = pool.chain(v.sender);
                        if (!c || c->by_nonce.rbegin()->second != v.id)
                            violation(i, "cp victim " + std::to_string(v.id) + " is not childless");
                    }
                };
                AdmissionOutcome out = admit(pool, ev.tx, world, config.policy, check_cp_victims);
                rec.outcome = out.kind;
                rec.reason = out.reason;
                for (const auto& v : out.victims) rec.victims.push_back(v.id);
                const ArrivalEffect eff = arrival_effect(pool, world, ev.tx, out);
                rec.cls = {outcome_class(ev.tx, out), eff.transitions.future_turn_pending,
                           eff.transitions.pending_turn_future};
                if (out.admitted()) {
                    ++r.admitted;
                    if (!out.victims.empty()) ++r.admitted_evicting;
                } else {
                    ++r.declined;
                    ++r.declined_by_reason[out.reason];
                }
                if (cp && config.check_invariants) {
                    if (pool.price_sum() < price_before) violation(i, "cp price sum decreased");
                    if (config.policy.precheck && eff.future_after)
                        violation(i, "cp admission left a future transaction");
                }
                break;
            }
            case EventKind::block_trigger: {
                ++r.block_triggers;
                if (config.drain_mode == DrainMode::interleaved) {
                    BuildResult b = build_block(pool, world);
                    block_fees += b.block.revenue;
                    if (have_st0) r.realized_since_st0 += b.block.revenue;
                    r.blocks.push_back(std::move(b.block));
                }
                break;
            }
            case EventKind::snapshot_marker: {
                ++r.snapshot_markers;
                take_snapshot(i, ev.ts_ms, true);
                if (!have_st0) {
                    have_st0 = true;
                    r.st0_event = i;
                    r.st0 = pool.pending();
                    r.cp_bound_st0 = eviction_bound_cp(pool);
                }
                break;
            }
            }
            if (config.snapshot_every && (i + 1) % *config.snapshot_every == 0) take_snapshot(i, ev.ts_ms, false);
            if (config.coherence_every && (i + 1) % config.coherence_every == 0) pool.check_coherence();
        } catch (const PoolError& e) {
            throw ReplayAbort(i, e.what());
        } catch (const std::invalid_argument& e) {
            throw ReplayAbort(i, e.what());
        }
        const FeeTotals after = FeeTotals::of(pool, block_fees);
        rec.dutil = dutil(before, after);
        r.util.record(rec.cls, before, after);
        rec.pool_size = pool.size();
        rec.price_sum = pool.price_sum();
        rec.fee_sum = pool.fee_sum();
        r.events.push_back(std::move(rec));
    }
    if (!have_st0) r.cp_bound_st0 = eviction_bound_cp(std::span<const Transaction>{});

    r.pending_before_drain = pool.pending();
    r.future_before_drain = count_future(pool, world);
    r.pool_fees_before_drain = pool.fee_sum();
    r.price_sum_before_drain = pool.price_sum();
    {
        const FeeTotals before = FeeTotals::of(pool, block_fees);
        r.drained_blocks = drain(pool, world);
        r.drained_fees = total_revenue(r.drained_blocks);
        block_fees += r.drained_fees;
        const FeeTotals after = FeeTotals::of(pool, block_fees);
        r.util.record({OutcomeClass::other, false, false}, before, after);
        r.final_totals = after;
    }

    r.collected_since_st0 = r.realized_since_st0 + r.drained_fees;
    r.bound_holds = r.collected_since_st0 >= r.cp_bound_st0.bound_wei;
    if (cp && config.check_invariants && !r.bound_holds)
        violation(events.size(), "collected fees " + to_string(r.collected_since_st0) + " below cp bound " +
                                     to_string(r.cp_bound_st0.bound_wei));
    r.bound_to_collected = ratio(r.cp_bound_st0.bound_wei, r.collected_since_st0);
    r.bound_to_pool = ratio(r.cp_bound_st0.bound_wei, r.pool_fees_before_drain);

    r.declined_ledger = pool.declined();
    // Recompute the end state from the raw ledgers rather than running sums.
    Wei declined = 0;
    for (const auto& d : pool.declined()) declined += fee(d.tx);
    const Wei inside = fee_total(pool.pending()) + included_fees(r.blocks) + included_fees(r.drained_blocks);
    r.telescoping_holds = r.util.totals().dutil == SignedWei(inside) - SignedWei(declined);
    if (config.check_invariants && !r.telescoping_holds)
        violation(events.size(), "dUtil sum does not telescope to the ledger totals");

    r.attack = attack_cost(r.blocks, r.drained_blocks, r.pending_before_drain);
    r.hash = fnv1a64(report_json(r, true));
    return r;
}

std::vector<TraceEvent> prefill_then(const std::vector<TraceEvent>& tail, std::size_t count, std::uint64_t seed,
                                     std::uint64_t price_hi)
{
    BenignParams b;
    b.count = count;
    b.seed = seed;
    b.price_hi = price_hi;
    b.prefix = "pre";
    std::vector<TraceEvent> head = gen_benign(b);
    head.push_back(TraceEvent::snapshot(head.empty() ? 0 : head.back().ts_ms));
    return concat(std::move(head), tail);
}

std::vector<TraceEvent> workload_batch_insert(std::size_t n0)
{
    if (n0 == 0) throw std::invalid_argument("batch_insert: n0 must be at least 1");
    std::vector<TraceEvent> out;
    out.reserve(n0);
    for (std::size_t n = 0; n < n0; ++n)
        out.push_back(TraceEvent::arrival(make_transaction("batch", n, 10'000), n));
    assign_ids(out);
    return out;
}

std::vector<TraceEvent> workload_tn1(std::size_t n1, std::size_t n1_prime, std::size_t capacity)
{
    if (n1_prime == 0 || n1 == 0 || n1 % n1_prime != 0)
        throw std::invalid_argument("tn1: n1 (" + std::to_string(n1) + ") must be a positive multiple of n1' (" +
                                    std::to_string(n1_prime) + ")");
    if (n1 > capacity)
        throw std::invalid_argument("tn1: n1 exceeds the pool capacity " + std::to_string(capacity));
    const std::size_t chain = n1 / n1_prime;
    std::vector<TraceEvent> out;
    std::uint64_t ts = 0;
    auto emit = [&](Account sender, Nonce nonce, std::uint64_t price) {
        out.push_back(TraceEvent::arrival(make_transaction(std::move(sender), nonce, price), ts++));
    };
    for (std::size_t a = 0; a < n1_prime; ++a)
        for (std::size_t n = 0; n < chain; ++n)
            emit("tn1-a" + std::to_string(a), n, n == 0 ? 1'000 : 200'000);
    for (std::size_t k = 0; k < 1024; ++k) emit("tn1-f" + std::to_string(k), 1, 10'000);
    for (std::size_t k = 0; k < capacity - n1; ++k) emit("tn1-p" + std::to_string(k), 0, 10'000);
    for (std::size_t a = 0; a < n1_prime; ++a) emit("tn1-e" + std::to_string(a), 0, 20'000);
    assign_ids(out);
    return out;
}

BenchReport bench(const ScenarioConfig& config, std::span<const TraceEvent> events, std::size_t rounds,
                  std::string workload)
{
    if (rounds == 0) throw std::invalid_argument("bench: rounds must be at least 1");
    config.validate();
    BenchReport rep;
    rep.workload = std::move(workload);
    rep.policy = config.policy.kind;
    rep.events = events.size();
    for (std::size_t round = 0; round < rounds; ++round) {
        Mempool pool(config.capacity);
        WorldState world = config.make_world();
        BenchSample s;
        s.round = round;
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& ev : events) {
            if (ev.kind == EventKind::tx_arrival) {
                if (admit(pool, ev.tx, world, config.policy).admitted()) ++s.admitted;
                else ++s.declined;
            } else if (ev.kind == EventKind::block_trigger && config.drain_mode == DrainMode::interleaved) {
                build_block(pool, world);
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        s.seconds = std::chrono::duration<double>(t1 - t0).count();
        s.memory_bytes = pool.memory_estimate();
        rep.samples.push_back(s);
    }
    double sum = 0, mem = 0;
    for (const auto& s : rep.samples) {
        sum += s.seconds;
        mem += double(s.memory_bytes);
    }
    rep.mean_seconds = sum / double(rounds);
    rep.mean_memory_bytes = mem / double(rounds);
    double var = 0;
    for (const auto& s : rep.samples) var += (s.seconds - rep.mean_seconds) * (s.seconds - rep.mean_seconds);
    rep.stdev_seconds = std::sqrt(var / double(rounds));
    return rep;
}

} // namespace safepool
