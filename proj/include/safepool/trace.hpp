#pragma once

// Trace files are UTF-8 JSON lines, one event per line:
//   {"kind":"tx_arrival","ts_ms":0,"sender":"a","nonce":0,"price":5,
//    "gas_used":21000,"gas_limit":21000,"value":0,"source":"benign"}
//   {"kind":"block_trigger","ts_ms":12000}
//   {"kind":"snapshot_marker","ts_ms":12000}
// Unknown fields are rejected and timestamps must be non-decreasing.

#include "safepool/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

namespace safepool {

enum class EventKind { tx_arrival, block_trigger, snapshot_marker };

std::string_view event_kind_name(EventKind k);

struct TraceEvent {
    EventKind kind = EventKind::tx_arrival;
    std::uint64_t ts_ms = 0;
    Transaction tx;   // meaningful for tx_arrival only
    Label source = Label::benign;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;

    static TraceEvent arrival(Transaction tx, std::uint64_t ts_ms);
    static TraceEvent block(std::uint64_t ts_ms);
    static TraceEvent snapshot(std::uint64_t ts_ms);
};

class TraceParseError : public std::runtime_error {
public:
    TraceParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Parses one record; throws std::invalid_argument on schema violations.
TraceEvent parse_event(std::string_view line);
std::string serialize_event(const TraceEvent& ev);

/// Blank lines are skipped. Errors carry the 1-based line number.
std::vector<TraceEvent> parse_trace(std::istream& in);
std::vector<TraceEvent> parse_trace(const std::filesystem::path& path);

void write_trace(std::ostream& out, const std::vector<TraceEvent>& events);
void write_trace(const std::filesystem::path& path, const std::vector<TraceEvent>& events);

/// Renumbers transaction ids to event indexes so ids are unique in a trace.
void assign_ids(std::vector<TraceEvent>& events);

/// Appends `tail` to `head`, shifting tail timestamps so they start no
/// earlier than the last timestamp of head plus `gap_ms`.
std::vector<TraceEvent> concat(std::vector<TraceEvent> head, const std::vector<TraceEvent>& tail,
                               std::uint64_t gap_ms = 0);

} // namespace safepool
