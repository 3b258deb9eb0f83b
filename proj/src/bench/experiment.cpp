#include "cryptomaze/bench/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "cryptomaze/pcn/snapshot.hpp"

#include "json.hpp"

namespace cryptomaze::bench {

using protocol::Outcome;
using protocol::PaymentRequest;
using protocol::RunResult;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::size_t parse_size(std::string_view s, const std::string& what) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
        throw ConfigError("bad " + what + " '" + std::string(s) + "'");
    }
    return v;
}

std::size_t shared_edges(const routing::PathSet& ps) {
    std::map<std::pair<NodeId, NodeId>, std::size_t> uses;
    for (const auto& p : ps.paths) {
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) ++uses[{p.nodes[i], p.nodes[i + 1]}];
    }
    return static_cast<std::size_t>(std::count_if(uses.begin(), uses.end(), [](const auto& kv) { return kv.second > 1; }));
}

MetricsRow row_from(const RunResult& r, Protocol p, std::size_t n_nodes, const PaymentRequest& req, std::size_t trial) {
    MetricsRow row;
    row.protocol = adversary::to_string(p);
    row.n_nodes = n_nodes;
    row.amount = req.amount;
    row.trial = trial;
    row.payer = req.payer;
    row.payee = req.payee;
    row.outcome = protocol::to_string(r.outcome);
    row.ttp_ms = r.metrics.ttp_ms;
    row.routing_ms = r.metrics.routing_ms;
    row.sim_ticks = r.metrics.sim_ticks;
    row.bytes_total = r.metrics.bytes_total;
    row.n_contracts = r.metrics.n_contracts;
    row.n_shared_edges = r.n_shared_edges;
    return row;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (graph.empty()) throw ConfigError("no graph source");
    if (amounts.empty()) throw ConfigError("no amounts");
    for (Coins a : amounts) {
        if (a <= 0) throw ConfigError("amounts must be positive");
    }
    if (trials == 0 && pairs.empty()) throw ConfigError("trials must be at least 1");
    for (const auto& [a, b] : pairs) {
        if (a == b) throw ConfigError("payer and payee must differ");
    }
    if (protocols.empty()) throw ConfigError("no protocols");
    sim.validate();
}

pcn::PaymentGraph load_graph(const std::string& source, std::uint64_t seed, const pcn::BaOptions& ba) {
    if (source.rfind("ba:", 0) == 0) {
        const std::string spec = source.substr(3);
        const auto comma = spec.find(',');
        if (comma == std::string::npos) throw ConfigError("expected ba:n,m, got '" + source + "'");
        const std::size_t n = parse_size(std::string_view(spec).substr(0, comma), "node count");
        const std::size_t m = parse_size(std::string_view(spec).substr(comma + 1), "attachment count");
        if (m == 0 || m >= n) throw ConfigError("ba:n,m needs 1 <= m < n");
        crypto::Rng rng(seed);
        return pcn::generate_ba(n, m, rng, ba);
    }
    return pcn::load_snapshot(source);
}

std::vector<PaymentRequest> sample_pairs(const pcn::PaymentGraph& graph, Coins amount, std::size_t trials,
                                         std::uint64_t seed) {
    const auto& ids = graph.node_ids();
    if (ids.size() < 2) throw ConfigError("graph needs at least two nodes");
    crypto::Rng base(seed);
    std::vector<PaymentRequest> out;
    out.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        crypto::Rng rng = base.fork(t);
        const auto a = static_cast<std::size_t>(rng.below(ids.size()));
        auto b = static_cast<std::size_t>(rng.below(ids.size() - 1));
        if (b >= a) ++b;
        out.push_back({ids[a], ids[b], amount});
    }
    return out;
}

std::vector<MetricsRow> run_experiment(const pcn::PaymentGraph& graph, const ExperimentConfig& config) {
    config.validate();
    std::vector<MetricsRow> rows;
    const std::size_t n_nodes = graph.node_count();
    for (std::size_t ai = 0; ai < config.amounts.size(); ++ai) {
        std::vector<PaymentRequest> pairs;
        if (config.pairs.empty()) {
            pairs = sample_pairs(graph, config.amounts[ai], config.trials, config.seed);
        } else {
            for (const auto& [a, b] : config.pairs) pairs.push_back({a, b, config.amounts[ai]});
        }
        for (std::size_t t = 0; t < pairs.size(); ++t) {
            const PaymentRequest& req = pairs[t];
            protocol::SimConfig sim = config.sim;
            sim.seed = crypto::Rng(config.seed).fork(ai).fork(t).next();

            const auto t0 = Clock::now();
            std::optional<routing::PathSet> paths;
            try {
                paths = routing::find_paths(graph, req.payer, req.payee, req.amount, config.router);
            } catch (const NoRoute&) {
                // reported per protocol below
            }
            const double find_ms = ms_since(t0);

            for (Protocol p : config.protocols) {
                RunResult r;
                r.payer = req.payer;
                r.payee = req.payee;
                r.value = req.amount;
                if (!paths) {
                    r.outcome = Outcome::no_route;
                    r.metrics.routing_ms = find_ms;
                    r.metrics.ttp_ms = find_ms;
                    rows.push_back(row_from(r, p, n_nodes, req, t));
                    continue;
                }
                if (p == Protocol::htlc && paths->paths.size() != 1) {
                    r.outcome = Outcome::not_applicable;
                    r.n_shared_edges = shared_edges(*paths);
                    rows.push_back(row_from(r, p, n_nodes, req, t));
                    continue;
                }
                pcn::PaymentGraph g = graph;
                double routing_ms = find_ms;
                switch (p) {
                    case Protocol::cryptomaze: {
                        const auto t1 = Clock::now();
                        const auto pc = protocol::prepare_edge_set(g, *paths, sim);
                        routing_ms += ms_since(t1);
                        r = protocol::run_simulation(g, pc, sim, {});
                        break;
                    }
                    case Protocol::htlc: r = baselines::run_htlc(g, *paths, sim); break;
                    case Protocol::amp: r = baselines::run_amp(g, *paths, sim); break;
                    case Protocol::mhhtlc: r = baselines::run_mh_htlc(g, *paths, sim, config.proof_size); break;
                }
                r.metrics.routing_ms = routing_ms;
                r.metrics.ttp_ms += routing_ms;
                r.n_shared_edges = shared_edges(*paths);
                rows.push_back(row_from(r, p, n_nodes, req, t));
            }
        }
    }
    return rows;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    return run_experiment(load_graph(config.graph, config.seed, config.ba), config);
}

std::string csv_header() {
    return "protocol,n_nodes,amount,ttp_ms,sim_ticks,bytes_total,n_contracts,n_shared_edges,outcome,"
           "trial,payer,payee,routing_ms";
}

std::string to_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream os;
    os << csv_header() << '\n';
    os.setf(std::ios::fixed);
    os.precision(3);
    for (const auto& r : rows) {
        os << r.protocol << ',' << r.n_nodes << ',' << format_coins(r.amount) << ',' << r.ttp_ms << ','
           << r.sim_ticks << ',' << r.bytes_total << ',' << r.n_contracts << ',' << r.n_shared_edges << ','
           << r.outcome << ',' << r.trial << ',' << r.payer << ',' << r.payee << ',' << r.routing_ms << '\n';
    }
    return os.str();
}

std::string SharedEdgeSummary::to_json() const {
    nlohmann::json j{{"trials", trials},
                     {"routed", routed},
                     {"failed", failed},
                     {"with_shared", with_shared},
                     {"sharing_fraction", sharing_fraction},
                     {"mean_shared_fraction", mean_shared_fraction},
                     {"max_multiplicity", max_multiplicity},
                     {"mean_shared_edges", mean_shared_edges},
                     {"contracts_saved", contracts_saved},
                     {"mean_savings_pct", mean_savings_pct},
                     {"min_savings_pct", min_savings_pct},
                     {"max_savings_pct", max_savings_pct}};
    return j.dump();
}

SharedEdgeSummary shared_edge_report(const pcn::PaymentGraph& graph, const std::vector<PaymentRequest>& requests,
                                     const routing::RouterOptions& router) {
    SharedEdgeSummary s;
    s.trials = requests.size();
    double shared_fraction_sum = 0;
    double shared_edges_sum = 0;
    double savings_sum = 0;
    for (const auto& req : requests) {
        routing::PathSet ps;
        try {
            ps = routing::find_paths(graph, req.payer, req.payee, req.amount, router);
        } catch (const NoRoute&) {
            ++s.failed;
            continue;
        }
        ++s.routed;
        std::map<std::pair<NodeId, NodeId>, std::size_t> uses;
        std::size_t per_path = 0;
        for (const auto& p : ps.paths) {
            for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
                ++uses[{p.nodes[i], p.nodes[i + 1]}];
                ++per_path;
            }
        }
        std::size_t shared = 0;
        for (const auto& [_, k] : uses) {
            shared += k > 1;
            s.max_multiplicity = std::max(s.max_multiplicity, k);
        }
        shared_fraction_sum += static_cast<double>(shared) / static_cast<double>(uses.size());
        shared_edges_sum += static_cast<double>(shared);
        if (shared == 0) continue;

        ++s.with_shared;
        s.contracts_saved += per_path - uses.size();
        const double pct = 100.0 * static_cast<double>(per_path - uses.size()) / static_cast<double>(per_path);
        savings_sum += pct;
        if (s.with_shared == 1) {
            s.min_savings_pct = s.max_savings_pct = pct;
        } else {
            s.min_savings_pct = std::min(s.min_savings_pct, pct);
            s.max_savings_pct = std::max(s.max_savings_pct, pct);
        }
    }
    if (s.routed > 0) {
        s.sharing_fraction = static_cast<double>(s.with_shared) / static_cast<double>(s.routed);
        s.mean_shared_fraction = shared_fraction_sum / static_cast<double>(s.routed);
        s.mean_shared_edges = shared_edges_sum / static_cast<double>(s.routed);
    }
    if (s.with_shared > 0) s.mean_savings_pct = savings_sum / static_cast<double>(s.with_shared);
    return s;
}

SharedEdgeSummary shared_edge_report(const pcn::PaymentGraph& graph, Coins amount, std::size_t trials,
                                     std::uint64_t seed, const routing::RouterOptions& router) {
    if (trials == 0) throw ConfigError("trials must be at least 1");
    if (amount <= 0) throw ConfigError("amount must be positive");
    return shared_edge_report(graph, sample_pairs(graph, amount, trials, seed), router);
}

std::vector<ScalingPoint> scaling_study(const ScalingOptions& opts) {
    if (opts.sizes.empty()) throw ConfigError("no sizes");
    if (!std::is_sorted(opts.sizes.begin(), opts.sizes.end()) ||
        std::adjacent_find(opts.sizes.begin(), opts.sizes.end()) != opts.sizes.end()) {
        throw ConfigError("sizes must be strictly increasing");
    }
    if (opts.workload == 0) throw ConfigError("workload must be at least 1");
    if (opts.repeats == 0) throw ConfigError("repeats must be at least 1");
    if (opts.amount <= 0) throw ConfigError("amount must be positive");
    opts.sim.validate();

    const std::string m = std::to_string(opts.m);
    std::vector<ScalingPoint> out;
    std::vector<pcn::PaymentGraph> graphs;
    std::vector<std::vector<PaymentRequest>> workloads;
    for (std::size_t n : opts.sizes) {
        ScalingPoint pt;
        pt.n_nodes = n;
        const auto t0 = Clock::now();
        graphs.push_back(load_graph("ba:" + std::to_string(n) + "," + m, opts.seed, opts.ba));
        const pcn::PaymentGraph& graph = graphs.back();
        pt.generate_ms = ms_since(t0);
        workloads.push_back(sample_pairs(graph, opts.amount, opts.workload, opts.seed));

        const auto req = sample_pairs(graph, opts.amount, 1, opts.seed + n)[0];
        pcn::PaymentGraph g = graph;
        protocol::SimConfig sim = opts.sim;
        sim.seed = opts.seed + n;
        const RunResult r = protocol::run_payment(g, req, sim, {}, opts.router);
        pt.single = row_from(r, Protocol::cryptomaze, n, req, 0);
        pt.single_wall_ms = ms_since(t0);
        out.push_back(std::move(pt));
    }

    // Repeat rounds sweep all sizes so that slow phases of the machine hit
    // every size alike; each payment keeps its fastest run.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best_ttp(out.size(), std::vector<double>(opts.workload, inf));
    std::vector<std::vector<double>> best_routing = best_ttp;
    std::vector<std::vector<bool>> failed(out.size(), std::vector<bool>(opts.workload, false));
    std::vector<std::vector<std::size_t>> contracts(out.size(), std::vector<std::size_t>(opts.workload, 0));
    for (std::size_t k = 0; k < opts.repeats; ++k) {
        for (std::size_t s = 0; s < out.size(); ++s) {
            for (std::size_t i = 0; i < workloads[s].size(); ++i) {
                if (failed[s][i]) continue;
                pcn::PaymentGraph g = graphs[s];
                protocol::SimConfig sim = opts.sim;
                sim.seed = crypto::Rng(opts.seed).fork(i).next();
                const RunResult r = protocol::run_payment(g, workloads[s][i], sim, {}, opts.router);
                if (r.outcome != Outcome::success) {
                    failed[s][i] = true;
                    continue;
                }
                best_ttp[s][i] = std::min(best_ttp[s][i], r.metrics.ttp_ms);
                best_routing[s][i] = std::min(best_routing[s][i], r.metrics.routing_ms);
                out[s].workload_max_bytes = std::max(out[s].workload_max_bytes, r.metrics.bytes_total);
                contracts[s][i] = r.metrics.n_contracts;
            }
        }
    }
    for (std::size_t s = 0; s < out.size(); ++s) {
        double ttp = 0;
        double routing = 0;
        std::size_t n_contracts = 0;
        for (std::size_t i = 0; i < workloads[s].size(); ++i) {
            if (failed[s][i]) continue;
            ++out[s].workload_success;
            ttp += best_ttp[s][i];
            routing += best_routing[s][i];
            n_contracts += contracts[s][i];
        }
        if (out[s].workload_success > 0) {
            const auto k = static_cast<double>(out[s].workload_success);
            out[s].workload_mean_ttp_ms = ttp / k;
            out[s].workload_mean_routing_ms = routing / k;
            out[s].workload_mean_contracts = static_cast<double>(n_contracts) / k;
        }
    }
    return out;
}

Coins parse_coins(const std::string& s) {
    const auto dot = s.find('.');
    const std::string whole = s.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || frac.size() > 8) throw ConfigError("bad amount '" + s + "'");
    const std::size_t w = whole.empty() ? 0 : parse_size(whole, "amount");
    frac.resize(8, '0');
    const std::size_t f = parse_size(frac, "amount");
    if (w > static_cast<std::size_t>(INT64_MAX / pcn::kCoin) - 1) throw ConfigError("amount too large '" + s + "'");
    return static_cast<Coins>(w) * pcn::kCoin + static_cast<Coins>(f);
}

std::string format_coins(Coins c) {
    std::string sign = c < 0 ? "-" : "";
    const Coins a = c < 0 ? -c : c;
    std::string frac = std::to_string(a % pcn::kCoin);
    frac.insert(0, 8 - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    return sign + std::to_string(a / pcn::kCoin) + (frac.empty() ? "" : "." + frac);
}

}  // namespace cryptomaze::bench
