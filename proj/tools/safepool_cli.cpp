// Command-line front end: replay traces, generate and run attacks, bench the
// performance workloads, and analyze bounds and gamma.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 invariant violation.

#include "safepool/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>

using namespace safepool;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

struct Globals {
    std::string policy = "cp";
    std::optional<std::size_t> capacity;
    std::uint64_t seed = 42;
    bool full = false;
    std::string drain_mode = "end_only";
    std::string config_path;
    bool gate_nonfull = false;
    bool no_precheck = false;
};

ScenarioConfig make_config(const Globals& g)
{
    ScenarioConfig c;
    if (!g.config_path.empty()) c = load_config(g.config_path);
    c.policy.kind = parse_policy(g.policy);
    c.drain_mode = parse_drain_mode(g.drain_mode);
    if (g.gate_nonfull) c.policy.map_gate_nonfull = true;
    if (g.no_precheck) c.policy.precheck = false;
    if (g.capacity) c.capacity = *g.capacity;
    else if (g.full) c.capacity = kFullCapacity;
    c.validate();
    return c;
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

int finish(const RunReport& r, const std::string& json_path, bool with_events)
{
    const std::string text = report_json(r, with_events);
    if (json_path.empty()) std::cout << text << '\n';
    else write_file(json_path, text + "\n");
    for (const auto& v : r.violations) std::cerr << "violation at event " << v.event_index << ": " << v.what << '\n';
    return r.violations.empty() ? kExitOk : kExitViolation;
}

std::vector<std::uint64_t> parse_list(const std::string& text)
{
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        if (item.empty()) throw std::invalid_argument("empty item in list '" + text + "'");
        out.push_back(std::stoull(item));
        pos = comma + 1;
    }
    return out;
}

struct ReplayOpts {
    std::string trace;
    std::string json_out;
    std::string events_csv_out;
    std::string blocks_csv_out;
    std::string snapshots_csv_out;
    std::string util_csv_out;
    bool with_events = false;
    std::size_t snapshot_every = 0;
};

int run_replay(const Globals& g, const ReplayOpts& o)
{
    ScenarioConfig c = make_config(g);
    if (o.snapshot_every) c.snapshot_every = o.snapshot_every;
    const auto events = parse_trace(o.trace);
    const RunReport r = replay(c, events);
    if (!o.events_csv_out.empty()) write_file(o.events_csv_out, events_csv(r));
    if (!o.blocks_csv_out.empty()) write_file(o.blocks_csv_out, blocks_csv(r));
    if (!o.snapshots_csv_out.empty()) write_file(o.snapshots_csv_out, snapshots_csv(r));
    if (!o.util_csv_out.empty()) write_file(o.util_csv_out, util_csv(r));
    return finish(r, o.json_out, o.with_events);
}

struct AttackOpts {
    std::string kind;
    std::string out;
    std::string json_out;
    std::string delays;
    std::size_t steps = 2000;
    std::optional<std::size_t> count;
    std::size_t prefill = 0;
    bool prefill_set = false;
};

// Delay sweep: one campaign per delay, run concurrently with private state.
int run_xt6_sweep(const Globals& g, const AttackOpts& o)
{
    ScenarioConfig c = make_config(g);
    c.drain_mode = DrainMode::interleaved;
    c.keep_snapshot_txs = false;
    const auto delays = parse_list(o.delays);
    std::vector<std::future<RunReport>> jobs;
    for (std::uint64_t d : delays) {
        Xt6CampaignParams p;
        p.round = g.full ? Xt6Params::full() : Xt6Params::desk();
        p.round.delay_ms = d * 1000;
        p.seed = g.seed;
        ScenarioConfig run = c;
        run.capacity = p.round.capacity;
        jobs.push_back(std::async(std::launch::async, [run, p] {
            const auto trace = gen_xt6_campaign(p);
            return replay(run, trace.events);
        }));
    }
    int code = kExitOk;
    std::cout << "delay_s,policy,block,revenue\n";
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const RunReport r = jobs[i].get();
        for (std::size_t b = 0; b < r.blocks.size(); ++b)
            std::cout << delays[i] << ',' << policy_name(r.config.policy.kind) << ',' << b << ','
                      << to_string(r.blocks[b].revenue) << '\n';
        for (const auto& v : r.violations)
            std::cerr << "delay " << delays[i] << ": violation at event " << v.event_index << ": " << v.what << '\n';
        if (!r.violations.empty()) code = kExitViolation;
    }
    return code;
}

int run_attack(const Globals& g, const AttackOpts& o)
{
    if (o.kind == "xt6" && !o.delays.empty()) return run_xt6_sweep(g, o);

    ScenarioConfig c = make_config(g);
    std::vector<TraceEvent> events;
    std::size_t prefill = o.prefill_set ? o.prefill : c.capacity;
    if (o.kind == "xt6") {
        const Xt6Params p = g.full ? Xt6Params::full() : Xt6Params::desk();
        c.capacity = p.capacity;
        if (!o.prefill_set) prefill = p.capacity;
        events = gen_xt6(p).events;
    } else if (o.kind == "deter_future") {
        DeterParams p;
        p.count = o.count.value_or(c.capacity);
        events = gen_deter_future(p).events;
    } else if (o.kind == "mempurge_overdraft") {
        MempurgeParams p;
        p.chain_len = o.count.value_or(3);
        p.price = 1000;
        p.value = 100'000'000'000'000'000ull;
        p.balance = Wei(p.value) * 5 / 2;
        c.accounts[p.sender] = AccountState{p.balance, 0};
        events = gen_mempurge(p).events;
    } else if (o.kind == "cp_lock") {
        CpLockParams p;
        p.capacity = c.capacity;
        p.chain_len = o.count.value_or(c.capacity);
        if (!o.prefill_set) prefill = 0;
        events = gen_cp_lock(p).events;
        const std::uint64_t ts = events.empty() ? 0 : events.back().ts_ms + 1;
        events.push_back(TraceEvent::arrival(make_transaction("probe-a", 0, p.high_price), ts));
        events.push_back(TraceEvent::arrival(make_transaction("probe-b", 0, p.high_price + 1), ts + 1));
        assign_ids(events);
    } else if (o.kind == "random_adversary") {
        RandomAdversaryParams p;
        p.steps = o.steps;
        p.seed = g.seed;
        events = gen_random_adversary(p).events;
    } else {
        throw CLI::ValidationError("attack", "unknown attack kind '" + o.kind + "'");
    }
    if (prefill > 0) events = prefill_then(events, prefill, g.seed);

    if (!o.out.empty()) {
        write_trace(o.out, events);
        return kExitOk;
    }
    return finish(replay(c, events), o.json_out, false);
}

struct BenchOpts {
    std::string workload;
    std::size_t rounds = 10;
    std::size_t n0 = 10000;
    std::size_t n1 = 1000;
    std::size_t n1_prime = 10;
    std::string trace;
};

int run_bench(const Globals& g, const BenchOpts& o)
{
    ScenarioConfig c = make_config(g);
    std::vector<TraceEvent> events;
    if (o.workload == "batch_insert") {
        if (!g.capacity) c.capacity = 5000;
        events = workload_batch_insert(o.n0);
    } else if (o.workload == "tn1") {
        if (!g.capacity) c.capacity = kFullCapacity;
        events = workload_tn1(o.n1, o.n1_prime, c.capacity);
    } else if (o.workload == "trace") {
        if (o.trace.empty()) throw CLI::ValidationError("bench", "workload 'trace' needs --trace");
        events = parse_trace(o.trace);
    } else {
        throw CLI::ValidationError("bench", "unknown workload '" + o.workload + "'");
    }
    std::cout << bench_csv(bench(c, events, o.rounds, o.workload));
    return kExitOk;
}

struct AnalysisOpts {
    std::string trace;
    std::size_t snapshots = 20;
    std::optional<std::size_t> size;
    std::size_t senders = 0;
    std::size_t snapshot_every = 0;
    bool per_sender = false;
};

int run_bounds(const Globals& g, const AnalysisOpts& o)
{
    ScenarioConfig c = make_config(g);
    if (!o.trace.empty()) {
        if (o.snapshot_every) c.snapshot_every = o.snapshot_every;
        const RunReport r = replay(c, parse_trace(o.trace));
        std::cout << snapshots_csv(r);
        return r.violations.empty() ? kExitOk : kExitViolation;
    }
    const WorldState world = c.make_world();
    int code = kExitOk;
    std::cout << "snapshot,size,min_price,max_price,cp_bound,baseline_bound,ratio\n";
    for (std::size_t k = 0; k < o.snapshots; ++k) {
        SnapshotParams p;
        p.size = o.size.value_or(c.capacity);
        p.senders = o.senders ? o.senders : p.size;
        p.seed = g.seed + k;
        const auto snap = gen_pool_snapshot(p);
        if (snap.empty()) continue;
        const auto cpb = eviction_bound_cp(snap);
        const auto bb = eviction_bound_baseline_under_xt6(snap, world);
        std::uint64_t lo = ~0ull, hi = 0;
        for (const auto& tx : snap) {
            lo = std::min(lo, tx.price);
            hi = std::max(hi, tx.price);
        }
        if (cpb.bound_wei < Wei(kMinTxGas) * snap.size() * lo || bb.bound_wei != Wei(hi) * world.block_gas_limit)
            code = kExitViolation;
        std::cout << k << ',' << snap.size() << ',' << lo << ',' << hi << ',' << to_string(cpb.bound_wei) << ','
                  << to_string(bb.bound_wei) << ',' << to_double(cpb.bound_wei) / to_double(bb.bound_wei) << '\n';
    }
    return code;
}

int run_gamma(const Globals& g, const AnalysisOpts& o)
{
    std::vector<std::vector<Transaction>> snaps;
    if (!o.trace.empty()) {
        ScenarioConfig c = make_config(g);
        if (o.snapshot_every) c.snapshot_every = o.snapshot_every;
        const RunReport r = replay(c, parse_trace(o.trace));
        for (const auto& s : r.snapshots) snaps.push_back(s.pending);
        if (snaps.empty()) snaps.push_back(r.pending_before_drain);
    } else {
        for (std::size_t k = 0; k < o.snapshots; ++k) {
            SnapshotParams p;
            p.size = o.size.value_or(1000);
            p.senders = o.senders ? o.senders : std::max<std::size_t>(1, p.size / 10);
            p.seed = g.seed + k;
            snaps.push_back(gen_pool_snapshot(p));
        }
    }
    std::cout << gamma_json(gamma(snaps), o.per_sender) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mempool admission-policy simulator"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--policy", g.policy, "Admission policy")
        ->check(CLI::IsMember({"baseline", "cp", "map"}))
        ->capture_default_str();
    app.add_option("--capacity", g.capacity, "Pool capacity (default 192, 5120 with --full)");
    app.add_option("--seed", g.seed, "Seed for generated traces")->capture_default_str();
    app.add_flag("--full", g.full, "Full-scale parameters (capacity 5120)");
    app.add_option("--drain-mode", g.drain_mode, "Block production mode")
        ->check(CLI::IsMember({"end_only", "interleaved"}))
        ->capture_default_str();
    app.add_option("--config", g.config_path, "Scenario config JSON")->check(CLI::ExistingFile);
    app.add_flag("--gate-nonfull", g.gate_nonfull, "map: require fee > mdf also when slots are free");
    app.add_flag("--no-precheck", g.no_precheck, "Only run stale and duplicate checks");

    ReplayOpts ro;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a JSON-lines trace");
    replay_cmd->add_option("trace", ro.trace, "Trace file")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--json", ro.json_out, "Write the JSON summary here instead of stdout");
    replay_cmd->add_option("--events-csv", ro.events_csv_out, "Per-event CSV");
    replay_cmd->add_option("--blocks-csv", ro.blocks_csv_out, "Per-block revenue CSV");
    replay_cmd->add_option("--snapshots-csv", ro.snapshots_csv_out, "Snapshot bounds CSV");
    replay_cmd->add_option("--util-csv", ro.util_csv_out, "dUtil ledger CSV");
    replay_cmd->add_option("--snapshot-every", ro.snapshot_every, "Periodic snapshot interval in events");
    replay_cmd->add_flag("--with-events", ro.with_events, "Include per-event records in the JSON");

    AttackOpts ao;
    auto* attack_cmd = app.add_subcommand("attack", "Generate an attack trace and replay it");
    attack_cmd->add_option("kind", ao.kind, "xt6, deter_future, mempurge_overdraft, cp_lock, random_adversary")
        ->required();
    attack_cmd->add_option("--out", ao.out, "Write the trace instead of replaying it");
    attack_cmd->add_option("--json", ao.json_out, "Write the JSON summary here instead of stdout");
    attack_cmd->add_option("--delays", ao.delays, "xt6 only: comma-separated delays in seconds (runs a sweep)");
    attack_cmd->add_option("--steps", ao.steps, "random_adversary step count")->capture_default_str();
    attack_cmd->add_option("--count", ao.count, "Transaction count or chain length for the attack");
    attack_cmd->add_option("--prefill", ao.prefill, "Benign transactions before the attack (default capacity)")
        ->each([&ao](const std::string&) { ao.prefill_set = true; });

    BenchOpts bo;
    auto* bench_cmd = app.add_subcommand("bench", "Time a workload over several rounds (CSV)");
    bench_cmd->add_option("workload", bo.workload, "batch_insert, tn1 or trace")->required();
    bench_cmd->add_option("--rounds", bo.rounds, "Rounds")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_option("--n0", bo.n0, "batch_insert size")->capture_default_str();
    bench_cmd->add_option("--n1", bo.n1, "tn1 pending transactions")->capture_default_str();
    bench_cmd->add_option("--n1-prime", bo.n1_prime, "tn1 accounts")->capture_default_str();
    bench_cmd->add_option("--trace", bo.trace, "Trace for workload 'trace'")->check(CLI::ExistingFile);

    AnalysisOpts bounds_o;
    auto* bounds_cmd = app.add_subcommand("bounds", "Eviction bounds per snapshot (CSV)");
    bounds_cmd->add_option("trace", bounds_o.trace, "Trace to replay; random snapshots when omitted")
        ->check(CLI::ExistingFile);
    bounds_cmd->add_option("--snapshots", bounds_o.snapshots, "Random snapshot count")->capture_default_str();
    bounds_cmd->add_option("--size", bounds_o.size, "Random snapshot size (default capacity)");
    bounds_cmd->add_option("--senders", bounds_o.senders, "Random snapshot sender count (default size)");
    bounds_cmd->add_option("--snapshot-every", bounds_o.snapshot_every, "Periodic snapshot interval in events");

    AnalysisOpts gamma_o;
    auto* gamma_cmd = app.add_subcommand("gamma", "Per-sender gamma statistics (JSON)");
    gamma_cmd->add_option("trace", gamma_o.trace, "Trace to replay; random snapshots when omitted")
        ->check(CLI::ExistingFile);
    gamma_cmd->add_option("--snapshots", gamma_o.snapshots, "Random snapshot count")->capture_default_str();
    gamma_cmd->add_option("--size", gamma_o.size, "Random snapshot size (default 1000)");
    gamma_cmd->add_option("--senders", gamma_o.senders, "Random snapshot sender count (default size/10)");
    gamma_cmd->add_option("--snapshot-every", gamma_o.snapshot_every, "Periodic snapshot interval in events");
    gamma_cmd->add_flag("--per-sender", gamma_o.per_sender, "Include every sender's exact gamma");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*replay_cmd) return run_replay(g, ro);
        if (*attack_cmd) return run_attack(g, ao);
        if (*bench_cmd) return run_bench(g, bo);
        if (*bounds_cmd) return run_bounds(g, bounds_o);
        if (*gamma_cmd) return run_gamma(g, gamma_o);
    } catch (const ReplayAbort& e) {
        std::cerr << "replay aborted: " << e.what() << '\n';
        return kExitViolation;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
