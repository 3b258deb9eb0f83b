#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cryptomaze/bench/experiment.hpp"
#include "cryptomaze/pcn/snapshot.hpp"

namespace py = pybind11;
using namespace cryptomaze;

namespace {

py::dict result_dict(const protocol::RunResult& r) {
    py::dict d;
    d["outcome"] = protocol::to_string(r.outcome);
    d["payer"] = r.payer;
    d["payee"] = r.payee;
    d["value"] = r.value;
    d["gains"] = r.gains.gains;
    d["expected_gains"] = r.expected_gains;
    d["bytes_total"] = r.metrics.bytes_total;
    d["n_messages"] = r.metrics.n_messages;
    d["n_contracts"] = r.metrics.n_contracts;
    d["sim_ticks"] = r.metrics.sim_ticks;
    d["routing_ms"] = r.metrics.routing_ms;
    d["protocol_ms"] = r.metrics.protocol_ms;
    d["ttp_ms"] = r.metrics.ttp_ms;
    d["n_shared_edges"] = r.n_shared_edges;
    d["wormhole_blocked"] = r.wormhole_blocked;
    d["wormhole_succeeded"] = r.wormhole_succeeded;
    d["trace"] = r.trace.to_jsonl();
    return d;
}

py::dict report_dict(const adversary::Report& r) {
    py::dict d;
    d["test"] = r.test;
    d["trials"] = r.trials;
    d["statistic"] = r.statistic;
    d["threshold"] = r.threshold;
    d["pass"] = r.pass;
    return d;
}

protocol::SimConfig sim_config(std::uint64_t seed, const std::string& lock) {
    protocol::SimConfig c;
    c.seed = seed;
    if (lock == "ecdsa") {
        c.lock = protocol::LockMechanism::ecdsa;
    } else if (lock != "point") {
        throw ConfigError("lock must be 'point' or 'ecdsa'");
    }
    return c;
}

routing::RouterOptions router_options(const std::string& name) {
    routing::RouterOptions r;
    r.strategy = routing::router_from_string(name);
    return r;
}

}  // namespace

PYBIND11_MODULE(_cryptomaze, m) {
    m.doc() = "CryptoMaze multi-path payments and payment-network simulator";

    const auto base = py::register_exception<Error>(m, "CryptoMazeError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<NoRoute>(m, "NoRoute", base.ptr());

    m.attr("COIN") = pcn::kCoin;
    m.attr("CURVE") = crypto::curve_name();

    py::class_<pcn::PaymentGraph>(m, "PaymentGraph")
        .def(py::init<>())
        .def("add_node", &pcn::PaymentGraph::add_node)
        .def("add_channel", &pcn::PaymentGraph::add_channel, py::arg("number"), py::arg("u"), py::arg("v"),
             py::arg("cap_uv"), py::arg("cap_vu"))
        .def("set_fee", &pcn::PaymentGraph::set_fee)
        .def_property_readonly("node_count", &pcn::PaymentGraph::node_count)
        .def_property_readonly("channel_count", &pcn::PaymentGraph::channel_count)
        .def("node_ids", &pcn::PaymentGraph::node_ids)
        .def("capacity",
             [](const pcn::PaymentGraph& g, pcn::NodeId from, pcn::NodeId to) {
                 return g.capacity(g.channel(from, to));
             })
        .def("to_json", [](const pcn::PaymentGraph& g) { return pcn::dump_snapshot(g); });

    m.def("load_snapshot", [](const std::string& path) { return pcn::load_snapshot(path); }, py::arg("path"));
    m.def("parse_snapshot", &pcn::parse_snapshot, py::arg("text"));
    m.def(
        "generate_ba",
        [](std::size_t n, std::size_t m_attach, std::uint64_t seed) {
            crypto::Rng rng(seed);
            return pcn::generate_ba(n, m_attach, rng);
        },
        py::arg("n"), py::arg("m"), py::arg("seed") = 1);

    py::class_<pcn::Fixture>(m, "Fixture")
        .def_readonly("graph", &pcn::Fixture::graph)
        .def_readonly("names", &pcn::Fixture::names)
        .def_readonly("payer", &pcn::Fixture::payer)
        .def_readonly("payee", &pcn::Fixture::payee)
        .def_readonly("amount", &pcn::Fixture::amount);
    m.def("diamond_example", &pcn::diamond_example);
    m.def("chain", [](std::size_t hops) { return pcn::chain(hops); }, py::arg("hops"));
    m.def("fan", [](std::size_t k) { return pcn::fan(k); }, py::arg("k"));

    m.def(
        "find_paths",
        [](const pcn::PaymentGraph& g, pcn::NodeId payer, pcn::NodeId payee, pcn::Coins amount,
           const std::string& router) {
            const auto ps = routing::find_paths(g, payer, payee, amount, router_options(router));
            std::vector<std::pair<std::vector<pcn::NodeId>, pcn::Coins>> out;
            for (const auto& p : ps.paths) out.emplace_back(p.nodes, p.amount);
            return out;
        },
        py::arg("graph"), py::arg("payer"), py::arg("payee"), py::arg("amount"),
        py::arg("router") = "capacity-scaled");

    m.def(
        "run_payment",
        [](pcn::PaymentGraph graph, pcn::NodeId payer, pcn::NodeId payee, pcn::Coins amount, std::uint64_t seed,
           const std::string& lock, const std::string& router) {
            return result_dict(protocol::run_payment(graph, {payer, payee, amount}, sim_config(seed, lock), {},
                                                     router_options(router)));
        },
        "Runs one CryptoMaze payment on a copy of the graph.", py::arg("graph"), py::arg("payer"), py::arg("payee"),
        py::arg("amount"), py::arg("seed") = 1, py::arg("lock") = "point", py::arg("router") = "capacity-scaled");

    m.def(
        "run_experiment",
        [](const pcn::PaymentGraph& graph, const std::vector<pcn::Coins>& amounts, std::size_t trials,
           const std::vector<std::string>& protocols, std::uint64_t seed, const std::string& router) {
            bench::ExperimentConfig cfg;
            cfg.graph = "<in-memory>";
            cfg.amounts = amounts;
            cfg.trials = trials;
            cfg.protocols.clear();
            for (const auto& p : protocols) cfg.protocols.push_back(adversary::protocol_from_string(p));
            cfg.seed = seed;
            cfg.router = router_options(router);
            return bench::to_csv(bench::run_experiment(graph, cfg));
        },
        "CSV text, one row per (amount, trial, protocol).", py::arg("graph"), py::arg("amounts"),
        py::arg("trials") = 1, py::arg("protocols") = std::vector<std::string>{"cryptomaze", "amp", "mhhtlc"},
        py::arg("seed") = 1, py::arg("router") = "capacity-scaled");

    m.def(
        "shared_edge_report",
        [](const pcn::PaymentGraph& graph, pcn::Coins amount, std::size_t trials, std::uint64_t seed,
           const std::string& router) {
            return bench::shared_edge_report(graph, amount, trials, seed, router_options(router)).to_json();
        },
        "JSON summary of shared channels over random pairs.", py::arg("graph"), py::arg("amount"),
        py::arg("trials") = 100, py::arg("seed") = 1, py::arg("router") = "capacity-scaled");

    m.def(
        "wormhole_attempt",
        [](std::size_t hops, pcn::NodeId up, pcn::NodeId down, const std::string& protocol, std::uint64_t seed) {
            const auto f = pcn::chain(hops);
            std::vector<pcn::NodeId> path;
            for (pcn::NodeId n = f.payer; n <= f.payee; ++n) path.push_back(n);
            protocol::SimConfig cfg;
            cfg.seed = seed;
            const auto w = adversary::wormhole_attempt(f.graph, path, f.amount, {up, down},
                                                       adversary::protocol_from_string(protocol), cfg);
            py::dict d = result_dict(w.run);
            d["blocked"] = w.blocked;
            d["succeeded"] = w.succeeded;
            d["colluder_gain"] = w.colluder_gain;
            d["colluder_fees"] = w.colluder_fees;
            d["skipped_fees"] = w.skipped_fees;
            d["honest_nonnegative"] = w.honest_nonnegative;
            return d;
        },
        "Wormhole pair on a chain fixture.", py::arg("hops") = 7, py::arg("up") = 2, py::arg("down") = 5,
        py::arg("protocol") = "cryptomaze", py::arg("seed") = 1);

    m.def(
        "linkability_test",
        [](const std::vector<pcn::NodeId>& colluders, std::size_t trials, std::uint64_t seed, bool strawman) {
            adversary::LinkabilityOptions o;
            o.trials = trials;
            o.seed = seed;
            if (strawman) o.variant = protocol::ConditionVariant::shared_split_condition;
            return report_dict(adversary::linkability_test(pcn::diamond_example(),
                                                           {colluders.begin(), colluders.end()}, o));
        },
        "Same-vs-different payment game on the diamond fixture.", py::arg("colluders"), py::arg("trials") = 1000,
        py::arg("seed") = 1, py::arg("strawman") = false);

    m.def(
        "relationship_anonymity_test",
        [](const std::string& protocol, std::size_t hops, const std::vector<pcn::NodeId>& colluders,
           std::size_t trials, std::uint64_t seed) {
            return report_dict(adversary::relationship_anonymity_test(
                adversary::protocol_from_string(protocol), hops, {colluders.begin(), colluders.end()}, trials, seed));
        },
        py::arg("protocol"), py::arg("hops"), py::arg("colluders"), py::arg("trials") = 200, py::arg("seed") = 1);

    m.def("parse_coins", &bench::parse_coins);
    m.def("format_coins", &bench::format_coins);
}
