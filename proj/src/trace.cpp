#include "safepool/trace.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace safepool {

using nlohmann::json;

std::string_view event_kind_name(EventKind k)
{
    switch (k) {
    case EventKind::tx_arrival: return "tx_arrival";
    case EventKind::block_trigger: return "block_trigger";
    case EventKind::snapshot_marker: return "snapshot_marker";
    }
    return "?";
}

TraceEvent TraceEvent::arrival(Transaction tx, std::uint64_t ts_ms)
{
    TraceEvent ev;
    ev.kind = EventKind::tx_arrival;
    ev.ts_ms = ts_ms;
    ev.source = tx.label;
    ev.tx = std::move(tx);
    return ev;
}

TraceEvent TraceEvent::block(std::uint64_t ts_ms)
{
    TraceEvent ev;
    ev.kind = EventKind::block_trigger;
    ev.ts_ms = ts_ms;
    return ev;
}

TraceEvent TraceEvent::snapshot(std::uint64_t ts_ms)
{
    TraceEvent ev;
    ev.kind = EventKind::snapshot_marker;
    ev.ts_ms = ts_ms;
    return ev;
}

TraceParseError::TraceParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
{
}

namespace {

std::uint64_t get_u64(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
        throw std::invalid_argument(std::string("field '") + key + "' must be a non-negative integer");
    return it->get<std::uint64_t>();
}

std::string get_str(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
    if (!it->is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

const std::set<std::string> kTxFields{"kind", "ts_ms", "sender", "nonce", "price",
                                      "gas_used", "gas_limit", "value", "source"};
const std::set<std::string> kMarkerFields{"kind", "ts_ms", "source"};

} // namespace

TraceEvent parse_event(std::string_view line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");

    const std::string kind = get_str(j, "kind");
    TraceEvent ev;
    const std::set<std::string>* allowed = &kMarkerFields;
    if (kind == "tx_arrival") {
        ev.kind = EventKind::tx_arrival;
        allowed = &kTxFields;
    } else if (kind == "block_trigger") {
        ev.kind = EventKind::block_trigger;
    } else if (kind == "snapshot_marker") {
        ev.kind = EventKind::snapshot_marker;
    } else {
        throw std::invalid_argument("unknown event kind '" + kind + "'");
    }
    for (const auto& [key, v] : j.items())
        if (!allowed->count(key)) throw std::invalid_argument("unknown field '" + key + "'");

    ev.ts_ms = get_u64(j, "ts_ms");
    if (j.contains("source")) ev.source = parse_label(get_str(j, "source"));
    if (ev.kind == EventKind::tx_arrival) {
        Transaction tx;
        tx.sender = get_str(j, "sender");
        tx.nonce = get_u64(j, "nonce");
        tx.price = get_u64(j, "price");
        tx.gas_used = get_u64(j, "gas_used");
        tx.gas_limit = get_u64(j, "gas_limit");
        tx.value = get_u64(j, "value");
        tx.label = ev.source;
        validate(tx);
        ev.tx = std::move(tx);
    }
    return ev;
}

std::string serialize_event(const TraceEvent& ev)
{
    json j;
    j["kind"] = event_kind_name(ev.kind);
    j["ts_ms"] = ev.ts_ms;
    if (ev.kind == EventKind::tx_arrival) {
        j["sender"] = ev.tx.sender;
        j["nonce"] = ev.tx.nonce;
        j["price"] = ev.tx.price;
        j["gas_used"] = ev.tx.gas_used;
        j["gas_limit"] = ev.tx.gas_limit;
        j["value"] = ev.tx.value;
        j["source"] = label_name(ev.source);
    }
    return j.dump();
}

std::vector<TraceEvent> parse_trace(std::istream& in)
{
    std::vector<TraceEvent> out;
    std::string line;
    std::size_t lineno = 0;
    std::uint64_t last_ts = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        TraceEvent ev;
        try {
            ev = parse_event(line);
        } catch (const std::exception& e) {
            throw TraceParseError(lineno, e.what());
        }
        if (!out.empty() && ev.ts_ms < last_ts)
            throw TraceParseError(lineno, "timestamp " + std::to_string(ev.ts_ms) + " precedes " +
                                              std::to_string(last_ts));
        last_ts = ev.ts_ms;
        out.push_back(std::move(ev));
    }
    assign_ids(out);
    return out;
}

std::vector<TraceEvent> parse_trace(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file " + path.string());
    return parse_trace(in);
}

void write_trace(std::ostream& out, const std::vector<TraceEvent>& events)
{
    for (const auto& ev : events) out << serialize_event(ev) << '\n';
}

void write_trace(const std::filesystem::path& path, const std::vector<TraceEvent>& events)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file " + path.string());
    write_trace(out, events);
}

void assign_ids(std::vector<TraceEvent>& events)
{
    for (std::size_t i = 0; i < events.size(); ++i) events[i].tx.id = i;
}

std::vector<TraceEvent> concat(std::vector<TraceEvent> head, const std::vector<TraceEvent>& tail,
                               std::uint64_t gap_ms)
{
    const std::uint64_t base = head.empty() ? 0 : head.back().ts_ms + gap_ms;
    const std::uint64_t first = tail.empty() ? 0 : tail.front().ts_ms;
    for (auto ev : tail) {
        ev.ts_ms = base + (ev.ts_ms - first);
        head.push_back(std::move(ev));
    }
    assign_ids(head);
    return head;
}

} // namespace safepool
