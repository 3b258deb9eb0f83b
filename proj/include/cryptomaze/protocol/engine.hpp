#pragma once

#include <vector>

#include "cryptomaze/protocol/sim.hpp"
#include "cryptomaze/routing/paths.hpp"

namespace cryptomaze::protocol {

struct PaymentRequest {
    NodeId payer = 0;
    NodeId payee = 0;
    Coins amount = 0;
};

/// Runs one CryptoMaze payment over an already routed edge set (timeouts
/// assigned). Mutates `graph` (escrows settle or refund); gains are
/// measured against its state on entry.
RunResult run_simulation(pcn::PaymentGraph& graph, const routing::EdgeSet& pc, const SimConfig& config,
                         const Corruption& corruption = {});

/// Routes with find_paths, builds the edge set and runs it. A routing
/// failure is reported as Outcome::no_route.
RunResult run_payment(pcn::PaymentGraph& graph, const PaymentRequest& request, const SimConfig& config,
                      const Corruption& corruption = {}, const routing::RouterOptions& router = {});

/// Payments one after another on the same graph.
std::vector<RunResult> run_payments(pcn::PaymentGraph& graph, const std::vector<PaymentRequest>& requests,
                                    const SimConfig& config, const Corruption& corruption = {});

/// Edge set with timeouts for a routed payment.
routing::EdgeSet prepare_edge_set(const pcn::PaymentGraph& graph, const routing::PathSet& paths,
                                  const SimConfig& config);

}  // namespace cryptomaze::protocol
