#include "cryptomaze/adversary/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "cryptomaze/baselines/hashlock.hpp"
#include "cryptomaze/protocol/contract_checks.hpp"

#include "json.hpp"

namespace cryptomaze::adversary {

using crypto::Bytes;
using crypto::Point;
using protocol::Corruption;
using protocol::Strategy;

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::cryptomaze: return "cryptomaze";
        case Protocol::htlc: return "htlc";
        case Protocol::amp: return "amp";
        case Protocol::mhhtlc: return "mhhtlc";
    }
    return "?";
}

Protocol protocol_from_string(const std::string& s) {
    for (Protocol p : {Protocol::cryptomaze, Protocol::htlc, Protocol::amp, Protocol::mhhtlc}) {
        if (to_string(p) == s) return p;
    }
    throw ConfigError("unknown protocol '" + s + "'");
}

std::string Report::to_json() const {
    nlohmann::json j{{"test", test}, {"trials", trials}, {"statistic", statistic}, {"threshold", threshold}, {"pass", pass}};
    return j.dump();
}

double guessing_threshold(std::size_t trials) {
    return 0.5 + 3.0 * std::sqrt(0.25 / static_cast<double>(std::max<std::size_t>(trials, 1)));
}

namespace {

RunResult run_on_paths(pcn::PaymentGraph& g, const routing::PathSet& ps, Protocol p, const SimConfig& cfg,
                       const Corruption& adv) {
    switch (p) {
        case Protocol::cryptomaze: {
            const auto pc = protocol::prepare_edge_set(g, ps, cfg);
            return protocol::run_simulation(g, pc, cfg, adv);
        }
        case Protocol::htlc: return baselines::run_htlc(g, ps, cfg, adv);
        case Protocol::amp: return baselines::run_amp(g, ps, cfg, adv);
        case Protocol::mhhtlc: return baselines::run_mh_htlc(g, ps, cfg, baselines::kDefaultProofSize, adv);
    }
    throw InvalidParam("unknown protocol");
}

routing::PathSet single_path(const pcn::PaymentGraph& g, const std::vector<NodeId>& path, Coins amount) {
    routing::PathSet ps;
    ps.source = path.front();
    ps.sink = path.back();
    ps.value = amount;
    ps.paths.push_back(routing::Path{path, amount, {}});
    routing::allocate_fees(ps, g);
    return ps;
}

Coins expected(const RunResult& r, NodeId n) {
    auto it = r.expected_gains.find(n);
    return it == r.expected_gains.end() ? 0 : it->second;
}

bool intersects(const std::vector<Bytes>& a, const std::vector<Bytes>& b) {
    for (const auto& x : a) {
        if (std::binary_search(b.begin(), b.end(), x)) return true;
    }
    return false;
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t label) { return crypto::Rng(base).fork(label).next(); }

}  // namespace

WormholeOutcome wormhole_attempt(const pcn::PaymentGraph& graph, const std::vector<NodeId>& path, Coins amount,
                                 std::pair<NodeId, NodeId> colluders, Protocol protocol, const SimConfig& config) {
    auto up = std::find(path.begin(), path.end(), colluders.first);
    auto down = std::find(path.begin(), path.end(), colluders.second);
    if (up == path.end() || down == path.end()) {
        throw InvalidColluderPlacement("colluders must both lie on the payment path");
    }
    if (up == path.begin() || down + 1 == path.end()) {
        throw InvalidColluderPlacement("colluders must be intermediaries");
    }
    if (down - up < 2) {
        throw InvalidColluderPlacement("no honest node between the colluders");
    }

    pcn::PaymentGraph g = graph;
    const auto ps = single_path(g, path, amount);
    WormholeOutcome out;
    out.run = run_on_paths(g, ps, protocol, config, Corruption::wormhole(colluders.first, colluders.second));
    const RunResult& r = out.run;

    out.colluder_gain = r.gains.at(colluders.first) + r.gains.at(colluders.second);
    out.colluder_fees = expected(r, colluders.first) + expected(r, colluders.second);
    for (auto it = up + 1; it != down; ++it) out.skipped_fees += expected(r, *it);
    for (NodeId n : path) {
        if (n == colluders.first || n == colluders.second) continue;
        if (n == path.front()) {
            if (r.gains.at(n) < expected(r, n)) out.honest_nonnegative = false;
        } else if (r.gains.at(n) < 0) {
            out.honest_nonnegative = false;
        }
    }
    out.succeeded = r.wormhole_succeeded > 0 && out.colluder_gain == out.colluder_fees + out.skipped_fees;
    out.blocked = r.wormhole_succeeded == 0 && r.trace.contains("WormholeAttemptBlocked") &&
                  out.colluder_gain <= out.colluder_fees;
    return out;
}

std::vector<Bytes> derived_view(const RunResult& run, NodeId node) {
    std::vector<Bytes> view;
    auto it = run.observations.find(node);
    if (it == run.observations.end()) return view;

    std::vector<std::pair<std::uint64_t, Point>> incoming;
    std::vector<protocol::IntermediatePayload> layers;
    for (const auto& o : it->second) {
        if (o.kind == "forward") {
            if (o.condition) {
                view.push_back(o.condition->encode());
                incoming.emplace_back(o.channel, *o.condition);
            }
            if (!o.digest.empty()) view.push_back(o.digest);
        } else if (o.kind == "blob" && !o.payload.empty()) {
            try {
                auto p = protocol::decode_payload(o.payload, node);
                if (auto* mid = std::get_if<protocol::IntermediatePayload>(&p)) layers.push_back(*mid);
            } catch (const Error&) {
                // hashlock layers are not CryptoMaze payloads
            }
        } else if (o.kind == "tuple" && o.payload.size() >= 96) {
            view.emplace_back(o.payload.begin() + 32, o.payload.begin() + 64);
            view.emplace_back(o.payload.begin() + 64, o.payload.begin() + 96);
        }
    }
    for (const auto& d : layers) {
        const auto x_j = protocol::node_secret_of(d);
        for (const auto& t : d.tuples) {
            view.push_back(t.condition.encode());
            view.push_back((t.condition + Point::mul_base(t.adjustment)).encode());
        }
        for (const auto& [ch, R] : incoming) {
            view.push_back((R - Point::mul_base(crypto::hash_to_scalar(x_j, ch) * x_j)).encode());
        }
    }
    std::sort(view.begin(), view.end());
    view.erase(std::unique(view.begin(), view.end()), view.end());
    return view;
}

Report linkability_test(const pcn::Fixture& fixture, const std::set<NodeId>& colluding,
                        const LinkabilityOptions& opts) {
    if (opts.trials < 2) throw InsufficientTrials("need at least two trials");
    if (colluding.size() < 2) throw InsufficientTrials("need at least two colluders");
    const std::vector<NodeId> nodes(colluding.begin(), colluding.end());

    auto run_once = [&](std::uint64_t seed) {
        pcn::PaymentGraph g = fixture.graph;
        SimConfig cfg = opts.sim;
        cfg.seed = seed;
        cfg.variant = opts.variant;
        return protocol::run_payment(g, {fixture.payer, fixture.payee, fixture.amount}, cfg);
    };

    {
        const RunResult probe = run_once(trial_seed(opts.seed, 0));
        std::size_t partial = 0;
        for (NodeId n : nodes) {
            auto it = probe.observations.find(n);
            if (it == probe.observations.end()) continue;
            partial += static_cast<std::size_t>(std::count_if(it->second.begin(), it->second.end(),
                                                              [](const auto& o) { return o.kind == "forward"; }));
        }
        if (partial < 2) throw InsufficientTrials("colluders do not receive two partial payments");
        std::map<NodeId, std::size_t> out_degree;
        for (const auto& c : probe.contracts) ++out_degree[c.channel.from];
        if (std::none_of(out_degree.begin(), out_degree.end(), [](const auto& kv) { return kv.second > 1; })) {
            throw InsufficientTrials("payment does not split");
        }
    }

    std::size_t correct = 0;
    for (std::size_t t = 0; t < opts.trials; ++t) {
        const bool same = t % 2 == 0;
        const RunResult a = run_once(trial_seed(opts.seed, 2 * t + 1));
        std::optional<RunResult> b;
        if (!same) b = run_once(trial_seed(opts.seed, 2 * t + 2));
        std::vector<std::vector<Bytes>> views;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            views.push_back(derived_view(same || k % 2 == 0 ? a : *b, nodes[k]));
        }
        bool linked = false;
        for (std::size_t i = 0; i < views.size() && !linked; ++i) {
            for (std::size_t j = i + 1; j < views.size() && !linked; ++j) linked = intersects(views[i], views[j]);
        }
        correct += linked == same;
    }

    Report r;
    r.test = opts.variant == protocol::ConditionVariant::standard ? "linkability" : "linkability-strawman";
    r.trials = opts.trials;
    r.statistic = static_cast<double>(correct) / static_cast<double>(opts.trials);
    r.threshold = guessing_threshold(opts.trials);
    r.pass = r.statistic <= r.threshold;
    return r;
}

Report relationship_anonymity_test(Protocol protocol, std::size_t hops, const std::set<NodeId>& colluding,
                                   std::size_t trials, std::uint64_t seed) {
    if (trials < 2) throw InsufficientTrials("need at least two trials");
    if (colluding.size() != 2) throw InvalidColluderPlacement("relationship test uses exactly two colluders");
    const pcn::Fixture f = pcn::chain(hops);
    const NodeId first = *colluding.begin();
    const NodeId second = *colluding.rbegin();
    if (first == f.payer || second >= f.payee || second - first < 2) {
        throw InvalidColluderPlacement("colluders need an honest intermediary between them");
    }
    std::vector<NodeId> path;
    for (NodeId n = f.payer; n <= f.payee; ++n) path.push_back(n);

    auto run_once = [&](std::uint64_t s) {
        pcn::PaymentGraph g = f.graph;
        SimConfig cfg;
        cfg.seed = s;
        return run_on_paths(g, single_path(g, path, f.amount), protocol, cfg, {});
    };

    crypto::Rng coin(seed);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const RunResult pa = run_once(trial_seed(seed, 2 * t + 1));
        const RunResult pb = run_once(trial_seed(seed, 2 * t + 2));
        const bool swapped = coin.below(2) == 1;
        const auto up_a = derived_view(pa, first);
        const auto down0 = derived_view(swapped ? pb : pa, second);
        const auto down1 = derived_view(swapped ? pa : pb, second);
        bool guess_swapped;
        if (intersects(up_a, down0)) {
            guess_swapped = false;
        } else if (intersects(up_a, down1)) {
            guess_swapped = true;
        } else {
            guess_swapped = coin.below(2) == 1;
        }
        correct += guess_swapped == swapped;
    }
    Report r;
    r.test = "relationship-anonymity-" + to_string(protocol);
    r.trials = trials;
    r.statistic = static_cast<double>(correct) / static_cast<double>(trials);
    r.threshold = guessing_threshold(trials);
    r.pass = r.statistic <= r.threshold;
    return r;
}

Report value_privacy_check(const RunResult& run, const std::set<NodeId>& outsiders) {
    std::size_t seen = 0;
    for (NodeId n : outsiders) {
        auto it = run.observations.find(n);
        if (it != run.observations.end()) seen += it->second.size();
    }
    Report r;
    r.test = "value-privacy";
    r.trials = 1;
    r.statistic = static_cast<double>(seen);
    r.threshold = 0;
    r.pass = seen == 0;
    return r;
}

std::vector<BalanceCase> balance_security_matrix(std::size_t seeds, std::uint64_t base_seed) {
    struct Topology {
        std::string name;
        pcn::Fixture fixture;
        std::vector<std::pair<NodeId, NodeId>> wormhole_pairs;
    };
    std::vector<Topology> tops;
    {
        auto d = pcn::diamond_example();
        tops.push_back({"diamond", d, {{d["A"], d["D"]}}});
        auto c = pcn::chain(5);
        tops.push_back({"chain5", c, {{1, 3}, {1, 4}, {2, 4}}});
        tops.push_back({"fan3", pcn::fan(3), {}});
    }
    const Strategy singles[] = {Strategy::honest, Strategy::observe_only, Strategy::drop_forward,
                                Strategy::withhold_release, Strategy::tamper};

    std::vector<BalanceCase> out;
    for (std::size_t s = 0; s < seeds; ++s) {
        SimConfig cfg;
        cfg.seed = trial_seed(base_seed, s);
        cfg.lock = s % 2 == 0 ? protocol::LockMechanism::point : protocol::LockMechanism::ecdsa;
        for (const auto& top : tops) {
            std::vector<std::pair<Strategy, std::vector<NodeId>>> plans;
            plans.push_back({Strategy::honest, {}});
            for (NodeId n : top.fixture.graph.node_ids()) {
                if (n == top.fixture.payer) continue;
                for (Strategy st : singles) {
                    if (st == Strategy::honest) continue;
                    if (n == top.fixture.payee && st != Strategy::withhold_release && st != Strategy::observe_only) continue;
                    plans.push_back({st, {n}});
                }
            }
            for (const auto& [u, d] : top.wormhole_pairs) plans.push_back({Strategy::skip_release_collude, {u, d}});

            for (const auto& [st, nodes] : plans) {
                Corruption adv;
                if (st == Strategy::skip_release_collude) {
                    adv = Corruption::wormhole(nodes[0], nodes[1]);
                } else {
                    for (NodeId n : nodes) adv.strategy[n] = st;
                }
                pcn::PaymentGraph g = top.fixture.graph;
                const RunResult r =
                    protocol::run_payment(g, {top.fixture.payer, top.fixture.payee, top.fixture.amount}, cfg, adv);

                BalanceCase bc;
                bc.topology = top.name;
                bc.protocol = cfg.lock == protocol::LockMechanism::point ? "cryptomaze" : "cryptomaze-ecdsa";
                bc.strategy = st;
                bc.corrupted = nodes;
                bc.seed = cfg.seed;
                bc.outcome = protocol::to_string(r.outcome);
                bc.min_honest_gain = std::numeric_limits<Coins>::max();
                for (const auto& [n, gain] : r.gains.gains) {
                    if (n == top.fixture.payer || adv.corrupted(n)) continue;
                    if (gain < bc.min_honest_gain) {
                        bc.min_honest_gain = gain;
                        bc.worst_node = n;
                    }
                }
                out.push_back(std::move(bc));
            }
        }
    }
    return out;
}

}  // namespace cryptomaze::adversary
