#include "safepool/harness.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace safepool;

namespace {

// Python ints are arbitrary precision; go through the decimal form.
py::int_ to_py(Wei v)
{
    return py::reinterpret_steal<py::int_>(PyLong_FromString(to_string(v).c_str(), nullptr, 10));
}

Wei from_py(const py::int_& v)
{
    return parse_wei(py::str(v).cast<std::string>());
}

std::vector<TraceEvent> events_from_text(const std::string& text)
{
    std::istringstream in(text);
    return parse_trace(in);
}

std::string events_to_text(const std::vector<TraceEvent>& events)
{
    std::ostringstream out;
    write_trace(out, events);
    return out.str();
}

ScenarioConfig scenario(const std::string& policy, std::size_t capacity, const std::string& drain_mode,
                        bool gate_nonfull, bool precheck)
{
    ScenarioConfig c;
    c.policy.kind = parse_policy(policy);
    c.policy.map_gate_nonfull = gate_nonfull;
    c.policy.precheck = precheck;
    c.capacity = capacity;
    c.drain_mode = parse_drain_mode(drain_mode);
    return c;
}

py::dict outcome_dict(const AdmissionOutcome& o)
{
    py::dict d;
    d["kind"] = std::string(outcome_kind_name(o.kind));
    d["reason"] = std::string(reason_name(o.reason));
    py::list victims;
    for (const auto& v : o.victims) victims.append(v.id);
    d["victims"] = victims;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Mempool admission-policy simulator";

    py::register_exception<PoolError>(m, "PoolError");
    py::register_exception<TraceParseError>(m, "TraceParseError", PyExc_ValueError);
    py::register_exception<ReplayAbort>(m, "ReplayAbort");

    py::class_<Transaction>(m, "Transaction")
        .def(py::init([](std::string sender, Nonce nonce, std::uint64_t price, Gas gas_used, Gas gas_limit,
                         std::uint64_t value, const std::string& label, TxId id) {
                 return make_transaction(std::move(sender), nonce, price, gas_used, gas_limit, value,
                                         parse_label(label), id);
             }),
             py::arg("sender"), py::arg("nonce"), py::arg("price"), py::arg("gas_used") = kMinTxGas,
             py::arg("gas_limit") = 0, py::arg("value") = 0, py::arg("label") = "benign", py::arg("id") = 0)
        .def_readonly("id", &Transaction::id)
        .def_readonly("sender", &Transaction::sender)
        .def_readonly("nonce", &Transaction::nonce)
        .def_readonly("price", &Transaction::price)
        .def_readonly("gas_used", &Transaction::gas_used)
        .def_readonly("gas_limit", &Transaction::gas_limit)
        .def_readonly("value", &Transaction::value)
        .def_property_readonly("label", [](const Transaction& t) { return std::string(label_name(t.label)); })
        .def_property_readonly("fee", [](const Transaction& t) { return to_py(fee(t)); })
        .def("__eq__", [](const Transaction& a, const Transaction& b) { return a == b; })
        .def("__repr__", [](const Transaction& t) {
            return "Transaction(" + t.sender + ", nonce=" + std::to_string(t.nonce) +
                   ", price=" + std::to_string(t.price) + ")";
        });

    py::class_<WorldState>(m, "World")
        .def(py::init([](py::int_ default_balance, Gas block_gas_limit) {
                 WorldState w;
                 w.default_balance = from_py(default_balance);
                 w.block_gas_limit = block_gas_limit;
                 return w;
             }),
             py::arg("default_balance") = py::int_(kDefaultBalance), py::arg("block_gas_limit") = kDefaultBlockGasLimit)
        .def("set_account",
             [](WorldState& w, const Account& a, py::int_ balance, Nonce nonce) {
                 w.accounts[a] = AccountState{from_py(balance), nonce};
             },
             py::arg("account"), py::arg("balance"), py::arg("nonce") = 0)
        .def("nonce_of", &WorldState::nonce_of)
        .def("balance_of", [](const WorldState& w, const Account& a) { return to_py(w.balance_of(a)); });

    py::class_<Mempool>(m, "Mempool")
        .def(py::init<std::size_t>(), py::arg("capacity"))
        .def_property_readonly("size", &Mempool::size)
        .def_property_readonly("capacity", &Mempool::capacity)
        .def_property_readonly("full", &Mempool::full)
        .def("pending", &Mempool::pending)
        .def("contains", &Mempool::contains)
        .def_property_readonly("price_sum", [](const Mempool& p) { return to_py(p.price_sum()); })
        .def_property_readonly("fee_sum", [](const Mempool& p) { return to_py(p.fee_sum()); })
        .def_property_readonly("declined_count", [](const Mempool& p) { return p.declined().size(); })
        .def("mdf", [](const Mempool& p) { return to_py(mdf(p)); })
        .def("check_coherence", &Mempool::check_coherence)
        .def("__len__", &Mempool::size);

    m.def(
        "admit",
        [](Mempool& pool, const Transaction& tx, const WorldState& world, const std::string& policy,
           bool gate_nonfull, bool precheck) {
            PolicyConfig c;
            c.kind = parse_policy(policy);
            c.map_gate_nonfull = gate_nonfull;
            c.precheck = precheck;
            return outcome_dict(admit(pool, tx, world, c));
        },
        py::arg("pool"), py::arg("tx"), py::arg("world"), py::arg("policy") = "cp",
        py::arg("gate_nonfull") = false, py::arg("precheck") = true,
        "Prechecks and admits one transaction; returns {kind, reason, victims}.");

    m.def(
        "build_block",
        [](Mempool& pool, WorldState& world) {
            const BuildResult r = build_block(pool, world);
            py::dict d;
            d["txs"] = r.block.txs;
            d["gas_total"] = r.block.gas_total;
            d["revenue"] = to_py(r.block.revenue);
            d["skipped"] = r.skipped.size();
            return d;
        },
        py::arg("pool"), py::arg("world"));

    m.def(
        "replay",
        [](const std::string& trace_text, const std::string& policy, std::size_t capacity,
           const std::string& drain_mode, bool gate_nonfull, bool precheck, bool with_events) {
            const auto events = events_from_text(trace_text);
            const RunReport r = replay(scenario(policy, capacity, drain_mode, gate_nonfull, precheck), events);
            return report_json(r, with_events);
        },
        py::arg("trace"), py::arg("policy") = "cp", py::arg("capacity") = kDeskCapacity,
        py::arg("drain_mode") = "end_only", py::arg("gate_nonfull") = false, py::arg("precheck") = true,
        py::arg("with_events") = false, "Replays JSON-lines trace text; returns the JSON report text.");

    m.def(
        "gen_xt6", [](bool full) { return events_to_text(gen_xt6(full ? Xt6Params::full() : Xt6Params::desk()).events); },
        py::arg("full") = false);
    m.def(
        "gen_random_adversary",
        [](std::size_t steps, std::uint64_t seed) {
            RandomAdversaryParams p;
            p.steps = steps;
            p.seed = seed;
            return events_to_text(gen_random_adversary(p).events);
        },
        py::arg("steps") = 2000, py::arg("seed") = 42);
    m.def(
        "gen_cp_lock",
        [](std::size_t chain_len, std::size_t capacity, std::uint64_t low, std::uint64_t high) {
            return events_to_text(gen_cp_lock({chain_len, capacity, low, high, "lock"}).events);
        },
        py::arg("chain_len") = 64, py::arg("capacity") = 64, py::arg("low_price") = 1,
        py::arg("high_price") = 10'000);
    m.def(
        "prefill_then",
        [](const std::string& tail, std::size_t count, std::uint64_t seed) {
            return events_to_text(prefill_then(events_from_text(tail), count, seed));
        },
        py::arg("tail"), py::arg("count"), py::arg("seed") = 1);
    m.def(
        "workload_batch_insert", [](std::size_t n0) { return events_to_text(workload_batch_insert(n0)); },
        py::arg("n0"));
    m.def(
        "workload_tn1",
        [](std::size_t n1, std::size_t n1_prime, std::size_t capacity) {
            return events_to_text(workload_tn1(n1, n1_prime, capacity));
        },
        py::arg("n1"), py::arg("n1_prime"), py::arg("capacity") = kFullCapacity);

    m.def(
        "eviction_bound_cp", [](const std::vector<Transaction>& st0) { return to_py(eviction_bound_cp(st0).bound_wei); },
        py::arg("pending"));
    m.def(
        "eviction_bound_baseline_under_xt6",
        [](const std::vector<Transaction>& st, Gas block_gas_limit) {
            WorldState w;
            w.block_gas_limit = block_gas_limit;
            return to_py(eviction_bound_baseline_under_xt6(st, w).bound_wei);
        },
        py::arg("pending"), py::arg("block_gas_limit") = kDefaultBlockGasLimit);
    m.def(
        "gamma",
        [](const std::vector<std::vector<Transaction>>& snapshots, bool per_sender) {
            return gamma_json(gamma(snapshots), per_sender);
        },
        py::arg("snapshots"), py::arg("per_sender") = false, "Returns the gamma report as JSON text.");
    m.def(
        "bench",
        [](const std::string& trace_text, const std::string& policy, std::size_t capacity, std::size_t rounds,
           const std::string& name) {
            const auto events = events_from_text(trace_text);
            return bench_csv(bench(scenario(policy, capacity, "end_only", false, true), events, rounds, name));
        },
        py::arg("trace"), py::arg("policy") = "cp", py::arg("capacity") = kDeskCapacity, py::arg("rounds") = 1,
        py::arg("workload") = "custom");
}
