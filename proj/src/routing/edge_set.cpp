#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "cryptomaze/routing/paths.hpp"

namespace cryptomaze::routing {

std::size_t PathSet::total_hops() const {
    std::size_t n = 0;
    for (const auto& p : paths) n += p.length();
    return n;
}

Coins PathSet::delivered() const {
    Coins s = 0;
    for (const auto& p : paths) s += p.amount;
    return s;
}

std::vector<std::size_t> EdgeSet::out_edges(NodeId node) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].channel.from == node) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> EdgeSet::in_edges(NodeId node) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].channel.to == node) out.push_back(i);
    }
    return out;
}

std::optional<std::size_t> EdgeSet::find(NodeId from, NodeId to) const {
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].channel.from == from && edges[i].channel.to == to) return i;
    }
    return std::nullopt;
}

std::vector<NodeId> EdgeSet::nodes() const {
    std::vector<NodeId> out{payer};
    std::set<NodeId> seen{payer};
    for (const auto& e : edges) {
        for (NodeId n : {e.channel.from, e.channel.to}) {
            if (seen.insert(n).second) out.push_back(n);
        }
    }
    return out;
}

Coins EdgeSet::inflow(NodeId node) const {
    Coins s = 0;
    for (const auto& e : edges) {
        if (e.channel.to == node) s += e.value;
    }
    return s;
}

Coins EdgeSet::outflow(NodeId node) const {
    Coins s = 0;
    for (const auto& e : edges) {
        if (e.channel.from == node) s += e.value;
    }
    return s;
}

namespace {

using EdgeKey = std::pair<NodeId, NodeId>;

void validate_path(const Path& p, const PathSet& ps, const PaymentGraph& g, std::size_t index) {
    const std::string where = "path " + std::to_string(index);
    if (p.nodes.size() < 2) throw InconsistentFlows(where + " has no hops");
    if (p.nodes.front() != ps.source || p.nodes.back() != ps.sink) {
        throw InconsistentFlows(where + " does not run from payer to payee");
    }
    if (p.amount <= 0) throw InconsistentFlows(where + " carries no value");
    std::set<NodeId> seen;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        if (!seen.insert(p.nodes[i]).second) throw InconsistentFlows(where + " revisits a node");
        if (i + 1 < p.nodes.size() && !g.find_channel(p.nodes[i], p.nodes[i + 1])) {
            throw InconsistentFlows(where + " uses a missing channel");
        }
    }
}

// Kahn's algorithm over a set of directed edges; empty result on a cycle.
std::vector<NodeId> topo_order(const std::vector<EdgeKey>& edges, bool& cyclic) {
    std::map<NodeId, std::vector<NodeId>> out;
    std::map<NodeId, std::size_t> indeg;
    for (const auto& [u, v] : edges) {
        out[u].push_back(v);
        indeg.try_emplace(u, 0);
        ++indeg[v];
    }
    std::vector<NodeId> ready;
    for (const auto& [n, d] : indeg) {
        if (d == 0) ready.push_back(n);
    }
    std::vector<NodeId> order;
    while (!ready.empty()) {
        const NodeId n = ready.back();
        ready.pop_back();
        order.push_back(n);
        for (NodeId m : out[n]) {
            if (--indeg[m] == 0) ready.push_back(m);
        }
    }
    cyclic = order.size() != indeg.size();
    return order;
}

}  // namespace

void allocate_fees(PathSet& ps, const PaymentGraph& g) {
    if (ps.paths.empty()) throw InconsistentFlows("empty path set");
    std::set<EdgeKey> union_edges;
    std::map<NodeId, std::vector<std::pair<std::size_t, std::size_t>>> visits;  // node -> (path, position)
    for (std::size_t pi = 0; pi < ps.paths.size(); ++pi) {
        const Path& p = ps.paths[pi];
        validate_path(p, ps, g, pi);
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) union_edges.insert({p.nodes[i], p.nodes[i + 1]});
        for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) visits[p.nodes[i]].emplace_back(pi, i);
    }
    for (const auto& [u, v] : union_edges) {
        if (union_edges.contains({v, u})) {
            throw InconsistentFlows("channel between " + std::to_string(u) + " and " + std::to_string(v) +
                                    " used in both directions");
        }
    }
    bool cyclic = false;
    const auto order = topo_order({union_edges.begin(), union_edges.end()}, cyclic);
    if (cyclic) throw InconsistentFlows("paths form a cycle");

    for (auto& p : ps.paths) {
        p.hops.assign(p.length(), 0);
        p.hops.back() = p.amount;
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto v = visits.find(*it);
        if (v == visits.end()) continue;  // payer or payee
        Coins out = 0;
        for (const auto& [pi, pos] : v->second) out += ps.paths[pi].hops[pos];
        const Coins fee = g.fee(*it, out);
        const std::size_t charged = v->second.back().first;
        for (const auto& [pi, pos] : v->second) {
            auto& hops = ps.paths[pi].hops;
            hops[pos - 1] = hops[pos] + (pi == charged ? fee : 0);
        }
    }
}

EdgeSet paths_to_edge_set(const PathSet& input, const PaymentGraph& g) {
    PathSet ps = input;
    allocate_fees(ps, g);

    std::map<EdgeKey, Coins> flow;
    for (const auto& p : ps.paths) {
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) flow[{p.nodes[i], p.nodes[i + 1]}] += p.hops[i];
    }

    std::map<NodeId, std::vector<NodeId>> out;  // successors ascending (map iteration order)
    std::map<NodeId, std::size_t> pending_in;
    for (const auto& [e, _] : flow) {
        out[e.first].push_back(e.second);
        ++pending_in[e.second];
    }

    EdgeSet pc;
    pc.payer = ps.source;
    pc.payee = ps.sink;
    pc.value = ps.delivered();
    std::function<void(NodeId)> visit = [&](NodeId u) {
        for (NodeId v : out[u]) {
            pc.edges.push_back(PcEdge{g.channel(u, v), flow.at({u, v}), 0});
            if (--pending_in[v] == 0) visit(v);
        }
    };
    visit(ps.source);
    if (pc.edges.size() != flow.size()) throw InconsistentFlows("edge set is not reachable from the payer");

    for (NodeId n : pc.nodes()) {
        if (n == pc.payer || n == pc.payee) continue;
        const Coins o = pc.outflow(n);
        if (pc.inflow(n) != o + g.fee(n, o)) {
            throw InconsistentFlows("flow not conserved at node " + std::to_string(n));
        }
    }
    if (pc.inflow(pc.payee) != pc.value) throw InconsistentFlows("payee inflow differs from payment value");
    return pc;
}

std::vector<NodeId> reverse_topological_nodes(const EdgeSet& pc) {
    std::vector<EdgeKey> edges;
    edges.reserve(pc.edges.size());
    for (const auto& e : pc.edges) edges.emplace_back(e.channel.from, e.channel.to);
    bool cyclic = false;
    auto order = topo_order(edges, cyclic);
    if (cyclic) throw CyclicFlow("edge set contains a cycle");
    std::reverse(order.begin(), order.end());
    return order;
}

EdgeSet assign_timeouts(EdgeSet pc, Tick t_end, Tick delta_chain) {
    std::unordered_map<NodeId, Tick> latest_out;  // max timeout among a node's outgoing edges
    for (NodeId n : reverse_topological_nodes(pc)) {
        Tick t = 0;
        if (n == pc.payee) {
            t = t_end;
        } else {
            auto it = latest_out.find(n);
            if (it == latest_out.end()) {
                if (n == pc.payer) continue;
                throw InconsistentFlows("node " + std::to_string(n) + " receives but never forwards");
            }
            t = it->second + delta_chain;
        }
        for (auto& e : pc.edges) {
            if (e.channel.to != n) continue;
            e.timeout = t;
            auto [slot, fresh] = latest_out.try_emplace(e.channel.from, t);
            if (!fresh) slot->second = std::max(slot->second, t);
        }
    }
    return pc;
}

}  // namespace cryptomaze::routing
