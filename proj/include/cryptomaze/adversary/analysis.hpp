#pragma once

#include <set>
#include <string>
#include <vector>

#include "cryptomaze/pcn/fixtures.hpp"
#include "cryptomaze/protocol/engine.hpp"

namespace cryptomaze::adversary {

using pcn::Coins;
using pcn::NodeId;
using protocol::RunResult;
using protocol::SimConfig;

enum class Protocol { cryptomaze, htlc, amp, mhhtlc };

std::string to_string(Protocol p);
/// Throws ConfigError.
Protocol protocol_from_string(const std::string& s);

/// {test, trials, statistic, threshold, pass}
struct Report {
    std::string test;
    std::size_t trials = 0;
    double statistic = 0;
    double threshold = 0;
    bool pass = false;

    [[nodiscard]] std::string to_json() const;
};

/// 0.5 + 3·sqrt(0.25 / trials)
double guessing_threshold(std::size_t trials);

struct WormholeOutcome {
    RunResult run;
    bool blocked = false;    // forged release rejected, no fee moved to the colluders
    bool succeeded = false;  // colluders collected the skipped nodes' fees
    Coins colluder_gain = 0;
    Coins colluder_fees = 0;  // what the colluders earn honestly
    Coins skipped_fees = 0;   // fees of the nodes strictly between them
    bool honest_nonnegative = true;
};

/// Runs one payment along `path` (payer first) with the colluders
/// (upstream, downstream) playing the wormhole strategy. Throws
/// InvalidColluderPlacement unless both are intermediaries of the path with
/// at least one node strictly between them.
WormholeOutcome wormhole_attempt(const pcn::PaymentGraph& graph, const std::vector<NodeId>& path, Coins amount,
                                 std::pair<NodeId, NodeId> colluders, Protocol protocol, const SimConfig& config);

/// What a colluding node can derive from its observations: every point or
/// digest it received, plus the points it can compute from its decrypted
/// onion layer. Encoded as bytes.
std::vector<crypto::Bytes> derived_view(const RunResult& run, NodeId node);

struct LinkabilityOptions {
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    protocol::ConditionVariant variant = protocol::ConditionVariant::standard;
    SimConfig sim;
};

/// Same-payment versus independent-payment guessing game for colluding
/// nodes that each receive a partial payment of `fixture`'s payment.
/// Labels alternate; the statistic is the distinguisher's accuracy.
/// Throws InsufficientTrials if there are fewer than two trials, the
/// payment does not split, or the colluders do not see at least two
/// partial payments.
Report linkability_test(const pcn::Fixture& fixture, const std::set<NodeId>& colluding,
                        const LinkabilityOptions& opts = {});

/// Two equal-value payments over the same chain; colluders at both ends of
/// the honest middle try to pair incoming with outgoing payments.
Report relationship_anonymity_test(Protocol protocol, std::size_t hops, const std::set<NodeId>& colluding,
                                   std::size_t trials, std::uint64_t seed);

/// Passes iff none of the given nodes received any protocol message.
Report value_privacy_check(const RunResult& run, const std::set<NodeId>& outsiders);

/// One cell of the balance-security matrix.
struct BalanceCase {
    std::string topology;
    std::string protocol;
    protocol::Strategy strategy = protocol::Strategy::honest;
    std::vector<NodeId> corrupted;
    std::uint64_t seed = 0;
    std::string outcome;
    Coins min_honest_gain = 0;
    NodeId worst_node = 0;
};

/// Every built-in strategy on every fixture topology for every corruptible
/// placement, repeated over `seeds` seeds.
std::vector<BalanceCase> balance_security_matrix(std::size_t seeds, std::uint64_t base_seed);

}  // namespace cryptomaze::adversary
