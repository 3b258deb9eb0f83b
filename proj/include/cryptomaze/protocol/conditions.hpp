#pragma once

// Sender-side preprocessing: every secret of one payment and the condition
// point of each channel in the edge set.
//
//   payee-adjacent (b,r):        R = H(y || id)·y·G + X_r,  y = sum of shares
//   single successor k of j:     R_in = H(x_j || id_in)·x_j·G + R_{j,k}
//   splitting node j, each k:    R_in = H(x_j || id_in)·x_j·G + R_{j,k} + x_{j,k}·G
//                                x_{j,k} = x_hat - a_{j,k},  x_j = sum_k x_{j,k}
//
// For every channel the sender also tracks a with R = a·G + X_r.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cryptomaze/crypto/group.hpp"
#include "cryptomaze/routing/paths.hpp"

namespace cryptomaze::protocol {

using crypto::Point;
using crypto::Rng;
using crypto::Scalar;
using pcn::ChannelId;
using pcn::Coins;
using pcn::NodeId;
using pcn::Tick;
using routing::EdgeSet;

struct ReceiverSecret {
    Scalar x_r;
    Point X_r;
};

ReceiverSecret receiver_init(Rng& rng);

struct ChannelCondition {
    ChannelId channel;
    Point R;
    Scalar a;  // R = a·G + X_r
    Coins value = 0;
    Tick timeout = 0;
};

enum class ConditionVariant {
    standard,
    /// Every outgoing channel of a splitting node carries the same point
    /// X_r + x_hat·G. Breaks release; only useful as a linkability strawman.
    shared_split_condition,
};

struct ConditionTable {
    NodeId payer = 0;
    NodeId payee = 0;
    Point X_r;
    std::vector<ChannelCondition> conditions;  // parallel to EdgeSet::edges
    std::map<NodeId, Scalar> node_secret;      // x_j per intermediate node
    std::map<NodeId, Scalar> split_secret;     // x_hat per splitting node
    std::vector<Scalar> adjustment;            // x_{j,k} per edge (x_j on single-successor edges)
    std::vector<std::optional<Scalar>> y_share;  // set on payee-adjacent edges
    Scalar y;

    [[nodiscard]] const ChannelCondition& at(const ChannelId& c) const;
};

/// Throws DegenerateEdgeSet if the edge set is empty or the payee has no
/// incoming edge; CyclicFlow if it is not a DAG.
ConditionTable build_conditions(const EdgeSet& pc, const Point& X_r, Rng& rng,
                                ConditionVariant variant = ConditionVariant::standard);

/// Replays the release recursion from the payee back to the payer using
/// the sender's secrets. Returns one release scalar per edge.
std::vector<Scalar> simulate_release(const ConditionTable& table, const EdgeSet& pc, const Scalar& x_r);

/// Checks every condition against the recursion and its tracked dlog.
/// Returns a description of each failure; empty means consistent.
std::vector<std::string> audit_conditions(const ConditionTable& table, const EdgeSet& pc);

}  // namespace cryptomaze::protocol
