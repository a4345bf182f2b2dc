#include "safepool/harness.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace safepool {

using nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

ordered_json util_row(const UtilRow& row)
{
    ordered_json j;
    j["count"] = row.count;
    j["inside_delta"] = to_string(row.inside_delta);
    j["outside_delta"] = to_string(row.outside_delta);
    j["dutil"] = to_string(row.dutil);
    return j;
}

ordered_json config_json(const ScenarioConfig& c)
{
    ordered_json j;
    j["policy"] = policy_name(c.policy.kind);
    j["compare_by"] = compare_by_name(c.policy.metric());
    j["map_gate_nonfull"] = c.policy.map_gate_nonfull;
    j["precheck"] = c.policy.precheck;
    if (c.policy.per_sender_limit) j["per_sender_limit"] = *c.policy.per_sender_limit;
    j["capacity"] = c.capacity;
    j["block_gas_limit"] = c.block_gas_limit;
    j["default_balance"] = to_string(c.default_balance);
    j["drain_mode"] = drain_mode_name(c.drain_mode);
    if (c.snapshot_every) j["snapshot_every"] = *c.snapshot_every;
    ordered_json acc = ordered_json::object();
    for (const auto& [name, st] : c.accounts)
        acc[name] = {{"balance", to_string(st.balance)}, {"nonce", st.nonce}};
    j["accounts"] = acc;
    return j;
}

} // namespace

std::string report_json(const RunReport& r, bool with_events)
{
    ordered_json j;
    j["config"] = config_json(r.config);

    ordered_json counts;
    counts["events"] = r.events_total;
    counts["arrivals"] = r.arrivals;
    counts["block_triggers"] = r.block_triggers;
    counts["snapshot_markers"] = r.snapshot_markers;
    counts["admitted"] = r.admitted;
    counts["admitted_evicting"] = r.admitted_evicting;
    counts["declined"] = r.declined;
    ordered_json by_reason = ordered_json::object();
    for (const auto& [reason, n] : r.declined_by_reason) by_reason[std::string(reason_name(reason))] = n;
    counts["declined_by_reason"] = by_reason;
    j["counts"] = counts;

    ordered_json st0;
    st0["event"] = r.st0_event ? ordered_json(*r.st0_event) : ordered_json(nullptr);
    st0["size"] = r.st0.size();
    st0["price_sum"] = to_string(price_total(r.st0));
    st0["cp_bound"] = to_string(r.cp_bound_st0.bound_wei);
    j["st0"] = st0;

    ordered_json fin;
    fin["pending"] = r.pending_before_drain.size();
    fin["future"] = r.future_before_drain;
    fin["non_future"] = r.pending_before_drain.size() - r.future_before_drain;
    fin["pool_fees"] = to_string(r.pool_fees_before_drain);
    fin["price_sum"] = to_string(r.price_sum_before_drain);
    j["before_drain"] = fin;

    ordered_json rev;
    rev["blocks"] = r.blocks.size();
    rev["block_revenue"] = to_string(total_revenue(r.blocks));
    rev["drained_blocks"] = r.drained_blocks.size();
    rev["drained_fees"] = to_string(r.drained_fees);
    rev["realized_since_st0"] = to_string(r.realized_since_st0);
    rev["collected_since_st0"] = to_string(r.collected_since_st0);
    j["revenue"] = rev;

    ordered_json bounds;
    bounds["cp_bound_st0"] = to_string(r.cp_bound_st0.bound_wei);
    bounds["holds"] = r.bound_holds;
    bounds["bound_to_collected"] = r.bound_to_collected;
    bounds["bound_to_pool"] = r.bound_to_pool;
    j["bounds"] = bounds;

    ordered_json util;
    for (std::size_t k = 0; k < kUtilKeys; ++k)
        util[std::string(util_key_name(UtilKey(k)))] = util_row(r.util.row(UtilKey(k)));
    util["totals"] = util_row(r.util.totals());
    util["telescoping_holds"] = r.telescoping_holds;
    j["util"] = util;

    j["final"] = {{"pool_fees", to_string(r.final_totals.pool)},
                  {"block_fees", to_string(r.final_totals.blocks)},
                  {"declined_fees", to_string(r.final_totals.declined)}};
    j["attack"] = {{"fees_charged", to_string(r.attack.fees_charged)},
                   {"fees_at_risk", to_string(r.attack.fees_at_risk)}};
    j["snapshots"] = r.snapshots.size();

    ordered_json viol = ordered_json::array();
    for (const auto& v : r.violations) viol.push_back({{"event", v.event_index}, {"what", v.what}});
    j["violations"] = viol;

    if (with_events) {
        ordered_json evs = ordered_json::array();
        for (const auto& e : r.events) {
            ordered_json x;
            x["index"] = e.index;
            x["kind"] = event_kind_name(e.kind);
            if (e.kind == EventKind::tx_arrival) {
                x["tx"] = e.tx;
                x["outcome"] = outcome_kind_name(e.outcome);
                x["reason"] = reason_name(e.reason);
                x["victims"] = e.victims;
                x["class"] = outcome_class_name(e.cls.cls);
            }
            x["dutil"] = to_string(e.dutil);
            x["pool_size"] = e.pool_size;
            x["price_sum"] = to_string(e.price_sum);
            evs.push_back(std::move(x));
        }
        j["events"] = evs;
    }
    j["report_hash"] = hex64(r.hash);
    return j.dump(2);
}

std::string events_csv(const RunReport& r)
{
    std::ostringstream out;
    out << "index,kind,ts_ms,tx,label,outcome,reason,victims,class,future_turn_pending,pending_turn_future,"
           "dutil,pool_size,price_sum,fee_sum\n";
    for (const auto& e : r.events) {
        out << e.index << ',' << event_kind_name(e.kind) << ',' << e.ts_ms << ',';
        if (e.kind == EventKind::tx_arrival) {
            out << e.tx << ',' << label_name(e.label) << ',' << outcome_kind_name(e.outcome) << ','
                << reason_name(e.reason) << ',';
            for (std::size_t i = 0; i < e.victims.size(); ++i) out << (i ? ";" : "") << e.victims[i];
            out << ',' << outcome_class_name(e.cls.cls);
        } else {
            out << ",,,,,other";
        }
        out << ',' << int(e.cls.future_turn_pending) << ',' << int(e.cls.pending_turn_future) << ','
            << to_string(e.dutil) << ',' << e.pool_size << ',' << to_string(e.price_sum) << ','
            << to_string(e.fee_sum) << '\n';
    }
    return out.str();
}

std::string blocks_csv(const RunReport& r)
{
    std::ostringstream out;
    out << "phase,index,txs,gas_total,revenue,running_avg\n";
    auto emit = [&out](const char* phase, std::span<const Block> blocks) {
        const auto series = revenue_series(blocks);
        for (std::size_t i = 0; i < blocks.size(); ++i)
            out << phase << ',' << i << ',' << blocks[i].txs.size() << ',' << blocks[i].gas_total << ','
                << to_string(blocks[i].revenue) << ',' << series[i].running_avg << '\n';
    };
    emit("interleaved", r.blocks);
    emit("drain", r.drained_blocks);
    return out.str();
}

std::string snapshots_csv(const RunReport& r)
{
    std::ostringstream out;
    out << "event_index,ts_ms,marker,size,future,price_sum,fee_sum,cp_bound,baseline_bound,bound_ratio\n";
    for (const auto& s : r.snapshots) {
        out << s.event_index << ',' << s.ts_ms << ',' << int(s.marker) << ',' << s.size << ',' << s.future << ','
            << to_string(s.price_sum) << ',' << to_string(s.fee_sum) << ',' << to_string(s.cp_bound.bound_wei)
            << ',';
        if (s.baseline_bound)
            out << to_string(s.baseline_bound->bound_wei) << ','
                << to_double(s.cp_bound.bound_wei) / to_double(s.baseline_bound->bound_wei);
        else
            out << ',';
        out << '\n';
    }
    return out.str();
}

std::string util_csv(const RunReport& r)
{
    std::ostringstream out;
    out << "key,count,inside_delta,outside_delta,dutil\n";
    auto row = [&out](std::string_view key, const UtilRow& u) {
        out << key << ',' << u.count << ',' << to_string(u.inside_delta) << ',' << to_string(u.outside_delta)
            << ',' << to_string(u.dutil) << '\n';
    };
    for (std::size_t k = 0; k < kUtilKeys; ++k) row(util_key_name(UtilKey(k)), r.util.row(UtilKey(k)));
    row("totals", r.util.totals());
    return out.str();
}

std::string bench_csv(const BenchReport& b, bool header)
{
    std::ostringstream out;
    if (header)
        out << "workload,policy,round,events,seconds,memory_bytes,admitted,declined,mean_seconds,stdev_seconds\n";
    for (const auto& s : b.samples)
        out << b.workload << ',' << policy_name(b.policy) << ',' << s.round << ',' << b.events << ',' << s.seconds
            << ',' << s.memory_bytes << ',' << s.admitted << ',' << s.declined << ',' << b.mean_seconds << ','
            << b.stdev_seconds << '\n';
    return out.str();
}

std::string gamma_json(const GammaReport& g, bool per_sender)
{
    ordered_json j;
    j["snapshots"] = g.snapshots;
    j["transactions"] = g.transactions;
    j["senders"] = g.per_sender.size();
    j["gamma_max"] = g.gamma_max.value();
    j["gamma_max_exact"] = to_string(g.gamma_max);
    j["gamma_avg"] = g.gamma_avg;
    j["gamma_p95"] = g.gamma_p95.value();
    j["gamma_p50"] = g.gamma_p50.value();
    j["fee_denominator"] = {{"gamma_max", g.fee_gamma_max},
                            {"gamma_avg", g.fee_gamma_avg},
                            {"gamma_p95", g.fee_gamma_p95}};
    if (per_sender) {
        ordered_json ps = ordered_json::object();
        for (const auto& [s, v] : g.per_sender) ps[s] = to_string(v);
        j["per_sender"] = ps;
    }
    return j.dump(2);
}

} // namespace safepool
