#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cryptomaze/adversary/analysis.hpp"
#include "cryptomaze/baselines/hashlock.hpp"
#include "cryptomaze/pcn/generate.hpp"

namespace cryptomaze::bench {

using adversary::Protocol;
using pcn::Coins;
using pcn::NodeId;

struct ExperimentConfig {
    /// Snapshot path or "ba:n,m".
    std::string graph;
    std::vector<Coins> amounts;
    std::size_t trials = 1;
    /// Fixed (payer, payee) pairs. When non-empty they replace the random
    /// pairs and `trials` is ignored.
    std::vector<std::pair<NodeId, NodeId>> pairs;
    std::vector<Protocol> protocols{Protocol::cryptomaze};
    std::uint64_t seed = 1;
    protocol::SimConfig sim;
    std::size_t proof_size = baselines::kDefaultProofSize;
    pcn::BaOptions ba;
    routing::RouterOptions router;

    /// Throws ConfigError.
    void validate() const;
};

struct MetricsRow {
    std::string protocol;
    std::size_t n_nodes = 0;
    Coins amount = 0;
    double ttp_ms = 0;
    pcn::Tick sim_ticks = 0;
    std::size_t bytes_total = 0;
    std::size_t n_contracts = 0;
    std::size_t n_shared_edges = 0;
    std::string outcome;
    std::size_t trial = 0;
    NodeId payer = 0;
    NodeId payee = 0;
    double routing_ms = 0;
};

/// Loads a snapshot or generates "ba:n,m" (n nodes, m attachments) from
/// `seed`. Throws ConfigError on a malformed source; snapshot errors
/// propagate as ParseError / ValidationError.
pcn::PaymentGraph load_graph(const std::string& source, std::uint64_t seed, const pcn::BaOptions& ba = {});

/// Distinct random (payer, payee) pairs, one per trial, drawn from
/// fork(trial) of `seed`.
std::vector<protocol::PaymentRequest> sample_pairs(const pcn::PaymentGraph& graph, Coins amount, std::size_t trials,
                                                    std::uint64_t seed);

/// One row per (amount, trial, protocol) in that order. Every protocol sees
/// the same payer, payee and route. HTLC rows on multi-path routes report
/// outcome not_applicable.
std::vector<MetricsRow> run_experiment(const pcn::PaymentGraph& graph, const ExperimentConfig& config);
/// Loads config.graph and runs the experiment.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& config);

std::string csv_header();
std::string to_csv(const std::vector<MetricsRow>& rows);

struct SharedEdgeSummary {
    std::size_t trials = 0;
    std::size_t routed = 0;
    std::size_t failed = 0;
    std::size_t with_shared = 0;
    double sharing_fraction = 0;       // with_shared / routed
    double mean_shared_fraction = 0;   // shared channels / distinct channels, over routed instances
    std::size_t max_multiplicity = 0;  // most paths through one channel
    double mean_shared_edges = 0;      // over routed instances
    std::size_t contracts_saved = 0;   // per-path contracts minus edge-set contracts, summed
    // per-instance savings %, over instances with a shared edge
    double mean_savings_pct = 0;
    double min_savings_pct = 0;
    double max_savings_pct = 0;

    [[nodiscard]] std::string to_json() const;
};

/// Routes each request on its own copy of `graph` and compares the edge set
/// with one contract per path hop. NoRoute instances count as failed.
SharedEdgeSummary shared_edge_report(const pcn::PaymentGraph& graph,
                                     const std::vector<protocol::PaymentRequest>& requests,
                                     const routing::RouterOptions& router = {});
/// Same, over `trials` random pairs.
SharedEdgeSummary shared_edge_report(const pcn::PaymentGraph& graph, Coins amount, std::size_t trials,
                                     std::uint64_t seed, const routing::RouterOptions& router = {});

struct ScalingOptions {
    std::vector<std::size_t> sizes{200, 800, 3200, 12800, 25600};
    std::size_t m = 2;
    Coins amount = 4'000'000;  // 0.04 coin
    /// Random payer/payee pairs drawn from each graph with the same seed.
    std::size_t workload = 40;
    /// Each workload payment is timed this many times (same seed); the
    /// fastest run counts.
    std::size_t repeats = 3;
    std::uint64_t seed = 5;
    pcn::BaOptions ba;
    routing::RouterOptions router;
    protocol::SimConfig sim;
};

struct ScalingPoint {
    std::size_t n_nodes = 0;
    double generate_ms = 0;
    /// One CryptoMaze payment between a random pair of this graph.
    MetricsRow single;
    double single_wall_ms = 0;  // generation + routing + protocol
    std::size_t workload_success = 0;
    double workload_mean_ttp_ms = 0;  // over successful payments
    double workload_mean_routing_ms = 0;
    double workload_mean_contracts = 0;
    std::size_t workload_max_bytes = 0;
};

/// Throws ConfigError on empty or non-increasing sizes, workload = 0 or repeats = 0.
std::vector<ScalingPoint> scaling_study(const ScalingOptions& opts);

/// Parses a decimal coin amount such as "0.04" into base units.
/// Throws ConfigError.
Coins parse_coins(const std::string& s);
std::string format_coins(Coins c);

}  // namespace cryptomaze::bench
