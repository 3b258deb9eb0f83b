#pragma once

// Small hand-built topologies used by tests, the CLI and the Python module.

#include <map>
#include <string>

#include "cryptomaze/pcn/graph.hpp"

namespace cryptomaze::pcn {

struct Fixture {
    PaymentGraph graph;
    std::map<std::string, NodeId> names;
    NodeId payer = 0;
    NodeId payee = 0;
    Coins amount = 0;

    [[nodiscard]] NodeId operator[](const std::string& name) const { return names.at(name); }
};

/// Six-node diamond M-A-{B,C}-D-N with channels #1 M-A, #2 A-B, #3 A-C,
/// #4 B-D, #5 C-D, #6 D-N, flat fee 0.1 coin per node and a 5.1 coin payment
/// from M to N. Forward capacities are tight (5.5, 2.7, 2.7, 2.6, 2.6, 5.1),
/// so the payment must split.
Fixture diamond_example();

/// Chain U0 - U1 - ... - U{hops}, every channel with `capacity` per
/// direction and `fee` per node. Payer U0, payee U{hops}.
Fixture chain(std::size_t hops, Coins capacity = 10 * kCoin, Coins fee = kCoin / 10);

/// Payer S fans out to k relays R1..Rk which all connect to payee T. Each
/// relay channel carries `per_branch` in the forward direction.
Fixture fan(std::size_t k, Coins per_branch = kCoin, Coins fee = kCoin / 100);

}  // namespace cryptomaze::pcn
