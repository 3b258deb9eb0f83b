#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

#include "cryptomaze/routing/paths.hpp"

namespace cryptomaze::routing {

namespace {

using EdgeKey = std::pair<NodeId, NodeId>;

struct Usage {
    std::map<EdgeKey, Coins> flow;
};

// Edge flows for the given path set, or nullopt if it is not a valid
// payment (cycle, both directions, over capacity).
std::optional<Usage> evaluate(const PaymentGraph& g, PathSet ps) {
    try {
        allocate_fees(ps, g);
    } catch (const InconsistentFlows&) {
        return std::nullopt;
    }
    Usage u;
    for (const auto& p : ps.paths) {
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) u.flow[{p.nodes[i], p.nodes[i + 1]}] += p.hops[i];
    }
    for (const auto& [e, f] : u.flow) {
        if (f > g.capacity(g.channel(e.first, e.second))) return std::nullopt;
    }
    return u;
}

// Largest d in [0, hi] such that adding d to path `index` stays feasible.
Coins max_increment(const PaymentGraph& g, PathSet& ps, std::size_t index, Coins hi) {
    const Coins base = ps.paths[index].amount;
    auto ok = [&](Coins d) {
        ps.paths[index].amount = base + d;
        return evaluate(g, ps).has_value();
    };
    Coins lo = 0;
    if (base == 0) {
        // a fresh path must carry something to be a valid payment
        if (hi < 1 || !ok(1)) {
            ps.paths[index].amount = base;
            return 0;
        }
        lo = 1;
    }
    while (lo < hi) {
        const Coins mid = lo + (hi - lo + 1) / 2;
        if (ok(mid)) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    ps.paths[index].amount = base;
    return lo;
}

struct Label {
    Coins fee;
    std::size_t hops;
    NodeId node;
    auto operator<=>(const Label&) const = default;
};

// Cheapest path on edges with residual >= threshold. Edges into the source,
// out of the sink, against an already used direction, or in `excluded` are
// skipped.
std::optional<std::vector<NodeId>> shortest_path(const PaymentGraph& g, NodeId source, NodeId sink,
                                                 Coins threshold, const Usage& usage,
                                                 const std::set<EdgeKey>& excluded) {
    std::unordered_map<NodeId, std::pair<Coins, std::size_t>> best;
    std::unordered_map<NodeId, NodeId> parent;
    std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
    best[source] = {0, 0};
    pq.push({0, 0, source});
    while (!pq.empty()) {
        const Label cur = pq.top();
        pq.pop();
        if (best.at(cur.node) != std::make_pair(cur.fee, cur.hops)) continue;
        if (cur.node == sink) break;
        const Coins node_fee = cur.node == source ? 0 : g.fee(cur.node, threshold);
        for (const auto& nb : g.neighbors(cur.node)) {
            const NodeId v = nb.peer;
            if (v == source || excluded.contains({cur.node, v})) continue;
            if (usage.flow.contains({v, cur.node})) continue;
            const Coins used = usage.flow.contains({cur.node, v}) ? usage.flow.at({cur.node, v}) : 0;
            if (g.capacity(g.channel(cur.node, v)) - used < threshold) continue;
            const std::pair<Coins, std::size_t> cand{cur.fee + node_fee, cur.hops + 1};
            auto it = best.find(v);
            if (it == best.end() || cand < it->second ||
                (cand == it->second && cur.node < parent.at(v))) {
                best[v] = cand;
                parent[v] = cur.node;
                pq.push({cand.first, cand.second, v});
            }
        }
    }
    if (!best.contains(sink)) return std::nullopt;
    std::vector<NodeId> path{sink};
    while (path.back() != source) path.push_back(parent.at(path.back()));
    std::reverse(path.begin(), path.end());
    return path;
}

// First edge of `path` that closes a cycle with the existing paths.
std::optional<EdgeKey> cycle_edge(const PathSet& ps, const std::vector<NodeId>& path) {
    std::map<NodeId, std::set<NodeId>> adj;
    for (const auto& p : ps.paths) {
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) adj[p.nodes[i]].insert(p.nodes[i + 1]);
    }
    auto reaches = [&](NodeId from, NodeId to) {
        std::vector<NodeId> stack{from};
        std::set<NodeId> seen{from};
        while (!stack.empty()) {
            const NodeId n = stack.back();
            stack.pop_back();
            if (n == to) return true;
            for (NodeId m : adj[n]) {
                if (seen.insert(m).second) stack.push_back(m);
            }
        }
        return false;
    };
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (reaches(path[i + 1], path[i])) return EdgeKey{path[i], path[i + 1]};
        adj[path[i]].insert(path[i + 1]);
    }
    return std::nullopt;
}

}  // namespace

std::string to_string(RouterStrategy s) {
    return s == RouterStrategy::capacity_scaled ? "capacity-scaled" : "shortest-first";
}

RouterStrategy router_from_string(const std::string& s) {
    if (s == "capacity-scaled") return RouterStrategy::capacity_scaled;
    if (s == "shortest-first") return RouterStrategy::shortest_first;
    throw ConfigError("unknown router '" + s + "'");
}

PathSet find_paths(const PaymentGraph& g, NodeId source, NodeId sink, Coins val, const RouterOptions& opts) {
    if (source == sink) throw InvalidParam("payer and payee are the same node");
    if (val <= 0) throw InvalidParam("payment value must be positive");
    if (!g.has_node(source) || !g.has_node(sink)) throw InvalidParam("unknown payer or payee");

    PathSet ps;
    ps.source = source;
    ps.sink = sink;
    ps.value = val;

    Usage usage;
    std::set<EdgeKey> excluded;
    Coins threshold = val;
    auto remaining = [&] { return val - ps.delivered(); };

    while (remaining() > 0) {
        for (std::size_t i = 0; i < ps.paths.size() && remaining() > 0; ++i) {
            const Coins d = max_increment(g, ps, i, remaining());
            if (d > 0) ps.paths[i].amount += d;
        }
        if (remaining() == 0) break;
        if (ps.paths.size() >= opts.max_paths) {
            throw NoRoute("payment needs more than " + std::to_string(opts.max_paths) + " paths");
        }
        if (auto u = evaluate(g, ps)) usage = *u;

        if (opts.strategy == RouterStrategy::shortest_first) {
            // smallest part that still fits the remaining path budget
            const auto slots = static_cast<Coins>(opts.max_paths - ps.paths.size());
            threshold = (remaining() + slots - 1) / slots;
        } else {
            threshold = std::min(threshold, remaining());
        }
        bool added = false;
        while (!added) {
            if (threshold < 1) {
                throw NoRoute("cannot deliver " + std::to_string(val) + " from " + std::to_string(source) +
                              " to " + std::to_string(sink));
            }
            auto path = shortest_path(g, source, sink, threshold, usage, excluded);
            if (!path) {
                threshold /= 2;
                continue;
            }
            if (auto bad = cycle_edge(ps, *path)) {
                excluded.insert(*bad);
                continue;
            }
            ps.paths.push_back(Path{*path, 0, {}});
            const Coins x = max_increment(g, ps, ps.paths.size() - 1, remaining());
            if (x <= 0) {
                ps.paths.pop_back();
                threshold /= 2;
                continue;
            }
            ps.paths.back().amount = x;
            added = true;
        }
    }
    allocate_fees(ps, g);
    return ps;
}

}  // namespace cryptomaze::routing
