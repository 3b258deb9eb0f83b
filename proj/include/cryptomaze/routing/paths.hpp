#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cryptomaze/pcn/graph.hpp"

namespace cryptomaze::routing {

using pcn::ChannelId;
using pcn::Coins;
using pcn::NodeId;
using pcn::PaymentGraph;
using pcn::Tick;

struct Path {
    std::vector<NodeId> nodes;  // payer first, payee last
    Coins amount = 0;           // delivered to the payee
    /// Value locked on each hop (nodes[i] -> nodes[i+1]), filled by
    /// allocate_fees(). hops.back() == amount.
    std::vector<Coins> hops;

    [[nodiscard]] std::size_t length() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

struct PathSet {
    NodeId source = 0;
    NodeId sink = 0;
    Coins value = 0;
    std::vector<Path> paths;

    [[nodiscard]] std::size_t total_hops() const;
    [[nodiscard]] Coins delivered() const;
};

struct PcEdge {
    ChannelId channel;
    Coins value = 0;
    Tick timeout = 0;
};

/// Ordered union of payment channels used by a multi-path payment. Each
/// channel appears once; the order is a traversal from the payer in which a
/// node's outgoing edges follow all of its incoming edges.
struct EdgeSet {
    NodeId payer = 0;
    NodeId payee = 0;
    Coins value = 0;
    std::vector<PcEdge> edges;

    [[nodiscard]] std::size_t size() const { return edges.size(); }
    [[nodiscard]] std::vector<std::size_t> out_edges(NodeId node) const;
    [[nodiscard]] std::vector<std::size_t> in_edges(NodeId node) const;
    [[nodiscard]] std::optional<std::size_t> find(NodeId from, NodeId to) const;
    /// Every node touched by the edge set, payer first, in edge order.
    [[nodiscard]] std::vector<NodeId> nodes() const;
    [[nodiscard]] Coins inflow(NodeId node) const;
    [[nodiscard]] Coins outflow(NodeId node) const;
};

enum class RouterStrategy {
    /// Each new path must carry the whole remaining amount; the threshold
    /// halves until a path fits.
    capacity_scaled,
    /// Each new path only has to carry remaining / free path slots, so short
    /// low-capacity routes are taken before long wide ones.
    shortest_first,
};

std::string to_string(RouterStrategy s);
/// Throws ConfigError.
RouterStrategy router_from_string(const std::string& s);

struct RouterOptions {
    std::size_t max_paths = 16;
    RouterStrategy strategy = RouterStrategy::capacity_scaled;
};

/// Successive shortest paths. Paths are weighted by (intermediate fees, hop
/// count) with ascending node id as tie-break; each round first tops up
/// existing paths, then adds at most one new path whose residual capacity is
/// at least the strategy's threshold.
/// Throws NoRoute if `val` cannot be delivered including fees.
PathSet find_paths(const PaymentGraph& graph, NodeId source, NodeId sink, Coins val,
                   const RouterOptions& opts = {});

/// Fills Path::hops. Each intermediate node's fee is charged once per
/// payment and carried by the last path (in PathSet order) through it.
/// Throws InconsistentFlows if the union of paths is not a DAG or uses a
/// channel in both directions, or if a path is malformed.
void allocate_fees(PathSet& paths, const PaymentGraph& graph);

EdgeSet paths_to_edge_set(const PathSet& paths, const PaymentGraph& graph);

/// Payee-adjacent edges get t_end; every other edge gets the maximum over
/// its successors plus delta_chain. Throws CyclicFlow.
EdgeSet assign_timeouts(EdgeSet pc, Tick t_end, Tick delta_chain);

/// Nodes of the edge set in reverse topological order (payee first).
/// Throws CyclicFlow.
std::vector<NodeId> reverse_topological_nodes(const EdgeSet& pc);

}  // namespace cryptomaze::routing
