#include <map>

#include "doctest.h"
#include "oracles.hpp"

#include "cryptomaze/errors.hpp"
#include "cryptomaze/pcn/fixtures.hpp"
#include "cryptomaze/routing/paths.hpp"

using namespace cryptomaze;
using namespace cryptomaze::pcn;
using namespace cryptomaze::routing;

namespace {

constexpr Coins tenth = kCoin / 10;

// Every hop of every path fits the graph and each path delivers its amount.
void check_feasible(const PaymentGraph& g, const PathSet& ps) {
    std::map<ChannelId, Coins> load;
    for (const auto& p : ps.paths) {
        REQUIRE(p.hops.size() == p.length());
        CHECK(p.hops.back() == p.amount);
        for (std::size_t i = 0; i < p.length(); ++i) load[g.channel(p.nodes[i], p.nodes[i + 1])] += p.hops[i];
    }
    for (const auto& [ch, v] : load) CHECK(v <= g.capacity(ch));
    CHECK(ps.delivered() == ps.value);
}

}  // namespace

TEST_CASE("diamond splits into two paths") {
    const Fixture f = diamond_example();
    const PathSet ps = find_paths(f.graph, f.payer, f.payee, f.amount);
    REQUIRE(ps.paths.size() == 2);
    const std::vector<NodeId> via_b{f["M"], f["A"], f["B"], f["D"], f["N"]};
    const std::vector<NodeId> via_c{f["M"], f["A"], f["C"], f["D"], f["N"]};
    CHECK(ps.paths[0].nodes == via_b);
    CHECK(ps.paths[1].nodes == via_c);
    CHECK(ps.paths[0].amount == 26 * tenth);
    CHECK(ps.paths[1].amount == 25 * tenth);
    // A and D charge on the last path through them
    CHECK(ps.paths[0].hops == std::vector<Coins>{27 * tenth, 27 * tenth, 26 * tenth, 26 * tenth});
    CHECK(ps.paths[1].hops == std::vector<Coins>{28 * tenth, 27 * tenth, 26 * tenth, 25 * tenth});
    check_feasible(f.graph, ps);
}

TEST_CASE("diamond edge set order and values") {
    const Fixture f = diamond_example();
    const EdgeSet pc = paths_to_edge_set(find_paths(f.graph, f.payer, f.payee, f.amount), f.graph);
    REQUIRE(pc.size() == 6);
    const std::vector<std::uint64_t> order{1, 2, 4, 3, 5, 6};
    const std::vector<Coins> values{55, 27, 26, 27, 26, 51};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(pc.edges[i].channel.number == order[i]);
        CHECK(pc.edges[i].value == values[i] * tenth);
    }
    // conservation: inflow - outflow is the node's fee at every intermediary
    for (NodeId n : {f["A"], f["B"], f["C"], f["D"]}) CHECK(pc.inflow(n) - pc.outflow(n) == tenth);
    CHECK(pc.inflow(f.payee) == f.amount);
    CHECK(pc.nodes().front() == f.payer);

    // each node's outgoing edges come after all of its incoming ones
    for (std::size_t i = 0; i < pc.size(); ++i) {
        for (std::size_t in : pc.in_edges(pc.edges[i].channel.from)) CHECK(in < i);
    }
}

TEST_CASE("timeouts grow by Delta per level") {
    const Fixture f = diamond_example();
    const EdgeSet pc =
        assign_timeouts(paths_to_edge_set(find_paths(f.graph, f.payer, f.payee, f.amount), f.graph), 100, 10);
    std::map<std::uint64_t, Tick> t;
    for (const auto& e : pc.edges) t[e.channel.number] = e.timeout;
    CHECK(t[6] == 100);
    CHECK(t[4] == 110);
    CHECK(t[5] == 110);
    CHECK(t[2] == 120);
    CHECK(t[3] == 120);
    CHECK(t[1] == 130);

    const Fixture one = chain(1);
    const EdgeSet single =
        assign_timeouts(paths_to_edge_set(find_paths(one.graph, 0, 1, kCoin), one.graph), 100, 10);
    REQUIRE(single.size() == 1);
    CHECK(single.edges[0].timeout == 100);

    const Fixture three = chain(3);
    const EdgeSet c3 =
        assign_timeouts(paths_to_edge_set(find_paths(three.graph, 0, 3, kCoin), three.graph), 100, 10);
    CHECK(c3.edges[0].timeout == 120);
}

TEST_CASE("cyclic edge set") {
    EdgeSet pc;
    pc.payer = 0;
    pc.payee = 3;
    pc.edges = {{{1, 0, 1}, 1, 0}, {{2, 1, 2}, 1, 0}, {{3, 2, 1}, 1, 0}, {{4, 2, 3}, 1, 0}};
    CHECK_THROWS_AS((void)assign_timeouts(pc, 100, 10), CyclicFlow);
    CHECK_THROWS_AS((void)reverse_topological_nodes(pc), CyclicFlow);
}

TEST_CASE("paths using a channel both ways are inconsistent") {
    PaymentGraph g;
    for (NodeId v = 0; v < 4; ++v) g.add_node(v);
    g.add_channel(1, 0, 1, 100, 100);
    g.add_channel(2, 1, 2, 100, 100);
    g.add_channel(3, 0, 2, 100, 100);
    g.add_channel(4, 2, 3, 100, 100);
    g.add_channel(5, 1, 3, 100, 100);
    PathSet ps;
    ps.source = 0;
    ps.sink = 3;
    ps.value = 20;
    ps.paths = {{{0, 1, 2, 3}, 10, {}}, {{0, 2, 1, 3}, 10, {}}};
    CHECK_THROWS_AS(allocate_fees(ps, g), InconsistentFlows);
}

TEST_CASE("direct channel gives one single-hop path") {
    const Fixture f = chain(1);
    const PathSet ps = find_paths(f.graph, 0, 1, 3 * kCoin);
    REQUIRE(ps.paths.size() == 1);
    CHECK(ps.paths[0].nodes == std::vector<NodeId>{0, 1});
    CHECK(ps.paths[0].hops == std::vector<Coins>{3 * kCoin});
}

TEST_CASE("edge-disjoint paths: edge set has one edge per hop") {
    const Fixture f = fan(4);
    const PathSet ps = find_paths(f.graph, f.payer, f.payee, 4 * kCoin);
    CHECK(ps.paths.size() == 4);
    CHECK(paths_to_edge_set(ps, f.graph).size() == ps.total_hops());
    check_feasible(f.graph, ps);
}

TEST_CASE("NoRoute agrees with a max-flow oracle") {
    // zero fees, so the router's limit is the plain s-t max flow
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        crypto::Rng rng(seed);
        PaymentGraph g;
        for (NodeId v = 0; v < 10; ++v) g.add_node(v);
        std::uint64_t number = 1;
        for (NodeId u = 0; u < 10; ++u) {
            for (NodeId v = u + 1; v < 10; ++v) {
                if (rng.below(100) < 35) {
                    g.add_channel(number++, u, v, static_cast<Coins>(rng.below(1000)), static_cast<Coins>(rng.below(1000)));
                }
            }
        }
        const Coins F = oracle::max_flow(g, 0, 9);
        CAPTURE(seed);
        CAPTURE(F);
        CHECK_THROWS_AS((void)find_paths(g, 0, 9, F + 1), NoRoute);
        if (F >= 4) {
            const Coins v = F / 4;
            const PathSet ps = find_paths(g, 0, 9, v);
            check_feasible(g, ps);
        }
        // anything the router delivers must respect the cut
        try {
            const PathSet ps = find_paths(g, 0, 9, F);
            check_feasible(g, ps);
        } catch (const NoRoute&) {
        }
    }
}

TEST_CASE("router strategies") {
    CHECK(router_from_string("capacity-scaled") == RouterStrategy::capacity_scaled);
    CHECK(router_from_string("shortest-first") == RouterStrategy::shortest_first);
    CHECK(to_string(RouterStrategy::shortest_first) == "shortest-first");
    CHECK_THROWS_AS((void)router_from_string("widest"), ConfigError);

    const Fixture f = diamond_example();
    RouterOptions o;
    o.strategy = RouterStrategy::shortest_first;
    const PathSet ps = find_paths(f.graph, f.payer, f.payee, f.amount, o);
    check_feasible(f.graph, ps);
    CHECK(ps.paths.size() == 2);
}

TEST_CASE("max_paths caps the split") {
    const Fixture f = fan(4);
    RouterOptions o;
    o.max_paths = 2;
    CHECK_THROWS_AS((void)find_paths(f.graph, f.payer, f.payee, 4 * kCoin, o), NoRoute);
}
