// bench: experiment runner over snapshots, BA graphs and the built-in fixtures.
//
// Exit codes: 0 ok, 1 configuration or input error, 2 runtime error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cryptomaze/bench/experiment.hpp"
#include "json.hpp"

using namespace cryptomaze;

namespace {

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::size_t to_size(const std::string& s) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoul(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("bad number '" + s + "'");
}

std::vector<pcn::Coins> parse_amounts(const std::string& s) {
    std::vector<pcn::Coins> out;
    for (const auto& a : split(s)) out.push_back(bench::parse_coins(a));
    if (out.empty()) throw ConfigError("no amounts given");
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& a : split(s)) out.push_back(to_size(a));
    return out;
}

pcn::Fixture fixture_by_name(const std::string& name) {
    if (name == "diamond") return pcn::diamond_example();
    if (name.rfind("chain", 0) == 0) return pcn::chain(to_size(name.substr(5)));
    if (name.rfind("fan", 0) == 0) return pcn::fan(to_size(name.substr(3)));
    throw ConfigError("unknown fixture '" + name + "' (diamond, chainK, fanK)");
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
}

struct SimFlags {
    pcn::Tick delta = 1;
    pcn::Tick Delta = 10;
    pcn::Tick t_end = 100;
    double tick_ms = 0;
    std::string lock = "point";

    void add(CLI::App* app) {
        app->add_option("--delta", delta, "per-message latency in ticks");
        app->add_option("--Delta", Delta, "timeout gap between adjacent contracts");
        app->add_option("--tend", t_end, "timeout of payee-adjacent contracts");
        app->add_option("--tick-ms", tick_ms, "wall-clock cost of one tick added to ttp");
        app->add_option("--lock-mechanism", lock, "point | ecdsa")->check(CLI::IsMember({"point", "ecdsa"}));
    }
    protocol::SimConfig get(std::uint64_t seed) const {
        protocol::SimConfig c;
        c.delta = delta;
        c.Delta = Delta;
        c.t_end = t_end;
        c.tick_ms = tick_ms;
        c.seed = seed;
        c.lock = lock == "ecdsa" ? protocol::LockMechanism::ecdsa : protocol::LockMechanism::point;
        return c;
    }
};

struct RouterFlags {
    std::string strategy = "capacity-scaled";
    std::size_t max_paths = 16;

    void add(CLI::App* app) {
        app->add_option("--router", strategy, "capacity-scaled | shortest-first");
        app->add_option("--max-paths", max_paths, "path budget per payment");
    }
    routing::RouterOptions get() const {
        routing::RouterOptions r;
        r.strategy = routing::router_from_string(strategy);
        r.max_paths = max_paths;
        if (max_paths == 0) throw ConfigError("--max-paths must be positive");
        return r;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CryptoMaze experiment runner"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "protocol comparison, one CSV row per (amount, trial, protocol)");
    std::string graph;
    std::string amounts = "0.04";
    std::size_t trials = 10;
    std::string protocols = "cryptomaze,amp,mhhtlc";
    std::uint64_t seed = 1;
    std::size_t proof_size = baselines::kDefaultProofSize;
    std::string out;
    SimFlags sim;
    RouterFlags router;
    run->add_option("--graph", graph, "snapshot path, ba:n,m or fixture:NAME")->required();
    run->add_option("--amounts", amounts, "comma-separated coin amounts");
    run->add_option("--trials", trials, "payer/payee pairs per amount");
    run->add_option("--protocols", protocols, "subset of cryptomaze,htlc,amp,mhhtlc");
    run->add_option("--seed", seed);
    run->add_option("--proof-size", proof_size, "MH-HTLC proof bytes per hop");
    run->add_option("--out", out, "CSV path, - for stdout");
    sim.add(run);
    router.add(run);

    // shared-edges
    auto* shared = app.add_subcommand("shared-edges", "shared-channel statistics, one JSON line per amount");
    std::string shared_graph;
    std::string shared_amounts = "0.01,0.02,0.04";
    std::size_t shared_trials = 100;
    std::uint64_t shared_seed = 1;
    RouterFlags shared_router;
    shared->add_option("--graph", shared_graph, "snapshot path, ba:n,m or fixture:diamond")->required();
    shared->add_option("--amounts", shared_amounts);
    shared->add_option("--trials", shared_trials);
    shared->add_option("--seed", shared_seed);
    shared_router.add(shared);

    // scaling
    auto* scaling = app.add_subcommand("scaling", "one payment per BA size plus a random-pair workload");
    std::string sizes = "200,800,3200,12800,25600";
    bench::ScalingOptions sopts;
    std::string scaling_amount = "0.04";
    RouterFlags scaling_router;
    scaling->add_option("--sizes", sizes);
    scaling->add_option("--m", sopts.m, "BA attachments per node");
    scaling->add_option("--amount", scaling_amount);
    scaling->add_option("--workload", sopts.workload, "random payer/payee pairs per size");
    scaling->add_option("--repeats", sopts.repeats, "timed runs per workload pair, fastest counts");
    scaling->add_option("--seed", sopts.seed);
    scaling_router.add(scaling);

    // attack
    auto* attack = app.add_subcommand("attack", "adversary experiments, JSON report on stdout");
    std::string kind;
    std::string attack_protocol = "cryptomaze";
    std::size_t hops = 7;
    std::string colluders;
    std::string fixture = "diamond";
    std::string variant = "standard";
    std::size_t attack_trials = 1000;
    std::uint64_t attack_seed = 1;
    attack->add_option("--kind", kind, "wormhole | linkability | relationship")
        ->required()
        ->check(CLI::IsMember({"wormhole", "linkability", "relationship"}));
    attack->add_option("--protocol", attack_protocol, "cryptomaze | htlc | amp | mhhtlc");
    attack->add_option("--hops", hops, "chain length for wormhole / relationship");
    attack->add_option("--colluders", colluders, "comma-separated node ids (wormhole: 2,5; linkability on diamond: B,C)");
    attack->add_option("--fixture", fixture, "linkability topology: diamond, chainK, fanK");
    attack->add_option("--variant", variant, "standard | strawman")->check(CLI::IsMember({"standard", "strawman"}));
    attack->add_option("--trials", attack_trials);
    attack->add_option("--seed", attack_seed);

    // trace
    auto* trace = app.add_subcommand("trace", "one payment on a fixture, JSON-lines trace on stdout");
    std::string trace_fixture = "diamond";
    std::string trace_protocol = "cryptomaze";
    SimFlags trace_sim;
    trace->add_option("--fixture", trace_fixture, "diamond, chainK, fanK");
    trace->add_option("--protocol", trace_protocol);
    trace_sim.add(trace);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            bench::ExperimentConfig cfg;
            cfg.graph = graph;
            cfg.amounts = parse_amounts(amounts);
            cfg.trials = trials;
            cfg.protocols.clear();
            for (const auto& p : split(protocols)) cfg.protocols.push_back(adversary::protocol_from_string(p));
            cfg.seed = seed;
            cfg.sim = sim.get(seed);
            cfg.proof_size = proof_size;
            cfg.router = router.get();
            if (graph.rfind("fixture:", 0) == 0) {
                // the fixture's own payer and payee; its amount unless --amounts was given
                const auto f = fixture_by_name(graph.substr(8));
                cfg.pairs = {{f.payer, f.payee}};
                if (run->get_option("--amounts")->count() == 0) cfg.amounts = {f.amount};
                cfg.validate();
                write_out(out, bench::to_csv(bench::run_experiment(f.graph, cfg)));
            } else {
                cfg.validate();
                write_out(out, bench::to_csv(bench::run_experiment(cfg)));
            }
        } else if (*shared) {
            const auto ro = shared_router.get();
            const auto list = parse_amounts(shared_amounts);
            if (shared_trials == 0) throw ConfigError("trials must be at least 1");
            if (shared_graph == "fixture:diamond") {
                const auto f = pcn::diamond_example();
                const auto s = bench::shared_edge_report(f.graph, {{f.payer, f.payee, f.amount}}, ro);
                std::cout << s.to_json() << '\n';
            } else {
                const auto g = bench::load_graph(shared_graph, shared_seed);
                for (pcn::Coins a : list) {
                    auto j = nlohmann::json::parse(bench::shared_edge_report(g, a, shared_trials, shared_seed, ro).to_json());
                    j["amount"] = bench::format_coins(a);
                    std::cout << j.dump() << '\n';
                }
            }
        } else if (*scaling) {
            sopts.sizes = parse_sizes(sizes);
            sopts.amount = bench::parse_coins(scaling_amount);
            sopts.router = scaling_router.get();
            for (const auto& pt : bench::scaling_study(sopts)) {
                nlohmann::json j{{"n_nodes", pt.n_nodes},
                                 {"generate_ms", pt.generate_ms},
                                 {"single_wall_ms", pt.single_wall_ms},
                                 {"single_ttp_ms", pt.single.ttp_ms},
                                 {"single_bytes", pt.single.bytes_total},
                                 {"single_contracts", pt.single.n_contracts},
                                 {"single_outcome", pt.single.outcome},
                                 {"workload_success", pt.workload_success},
                                 {"workload_mean_ttp_ms", pt.workload_mean_ttp_ms},
                                 {"workload_mean_routing_ms", pt.workload_mean_routing_ms},
                                 {"workload_mean_contracts", pt.workload_mean_contracts},
                                 {"workload_max_bytes", pt.workload_max_bytes}};
                std::cout << j.dump() << '\n';
            }
        } else if (*attack) {
            std::set<pcn::NodeId> nodes;
            if (colluders.empty()) {
                if (kind == "linkability") {
                    const auto f = fixture_by_name(fixture);
                    if (!f.names.contains("B") || !f.names.contains("C")) {
                        throw ConfigError("--colluders is required for fixture " + fixture);
                    }
                    nodes = {f["B"], f["C"]};
                } else {
                    nodes = {2, 5};
                }
            }
            for (const auto& c : split(colluders)) nodes.insert(static_cast<pcn::NodeId>(to_size(c)));
            const auto proto = adversary::protocol_from_string(attack_protocol);
            if (kind == "wormhole") {
                if (nodes.size() != 2) throw ConfigError("wormhole needs exactly two colluders");
                const auto f = pcn::chain(hops);
                std::vector<pcn::NodeId> path;
                for (pcn::NodeId n = f.payer; n <= f.payee; ++n) path.push_back(n);
                protocol::SimConfig cfg;
                cfg.seed = attack_seed;
                const auto w = adversary::wormhole_attempt(f.graph, path, f.amount, {*nodes.begin(), *nodes.rbegin()},
                                                           proto, cfg);
                nlohmann::json j{{"protocol", attack_protocol},
                                 {"blocked", w.blocked},
                                 {"succeeded", w.succeeded},
                                 {"colluder_gain", w.colluder_gain},
                                 {"colluder_fees", w.colluder_fees},
                                 {"skipped_fees", w.skipped_fees},
                                 {"honest_nonnegative", w.honest_nonnegative},
                                 {"outcome", protocol::to_string(w.run.outcome)}};
                std::cout << j.dump() << '\n';
            } else if (kind == "linkability") {
                if (proto != adversary::Protocol::cryptomaze) throw ConfigError("linkability runs on cryptomaze only");
                adversary::LinkabilityOptions o;
                o.trials = attack_trials;
                o.seed = attack_seed;
                o.variant = variant == "strawman" ? protocol::ConditionVariant::shared_split_condition
                                                  : protocol::ConditionVariant::standard;
                std::cout << adversary::linkability_test(fixture_by_name(fixture), nodes, o).to_json() << '\n';
            } else {
                std::cout << adversary::relationship_anonymity_test(proto, hops, nodes, attack_trials, attack_seed)
                                 .to_json()
                          << '\n';
            }
        } else if (*trace) {
            const auto f = fixture_by_name(trace_fixture);
            const auto proto = adversary::protocol_from_string(trace_protocol);
            pcn::PaymentGraph g = f.graph;
            const auto cfg = trace_sim.get(1);
            const auto ps = routing::find_paths(g, f.payer, f.payee, f.amount);
            protocol::RunResult r;
            switch (proto) {
                case adversary::Protocol::cryptomaze:
                    r = protocol::run_simulation(g, protocol::prepare_edge_set(g, ps, cfg), cfg, {});
                    break;
                case adversary::Protocol::htlc: r = baselines::run_htlc(g, ps, cfg); break;
                case adversary::Protocol::amp: r = baselines::run_amp(g, ps, cfg); break;
                case adversary::Protocol::mhhtlc: r = baselines::run_mh_htlc(g, ps, cfg); break;
            }
            std::cout << r.trace.to_jsonl();
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const InvalidColluderPlacement& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const InsufficientTrials& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
