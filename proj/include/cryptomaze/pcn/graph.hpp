#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cryptomaze/errors.hpp"

namespace cryptomaze::pcn {

using NodeId = std::uint32_t;
/// Coin amounts in integer base units.
using Coins = std::int64_t;
/// Simulation clock in integer ticks.
using Tick = std::int64_t;

/// One whole coin ("unit" / BTC) in base units; 0.1 unit = 10'000'000.
inline constexpr Coins kCoin = 100'000'000;

/// Directed view of a channel: the numeric id is shared by both directions.
struct ChannelId {
    std::uint64_t number = 0;
    NodeId from = 0;
    NodeId to = 0;

    [[nodiscard]] ChannelId reversed() const { return {number, to, from}; }
    friend bool operator==(const ChannelId&, const ChannelId&) = default;
    friend auto operator<=>(const ChannelId&, const ChannelId&) = default;
};

std::string to_string(const ChannelId& id);

struct Channel {
    std::uint64_t number = 0;
    NodeId u = 0;
    NodeId v = 0;
    Coins cap_uv = 0;
    Coins cap_vu = 0;
    Coins escrow_uv = 0;
    Coins escrow_vu = 0;
};

enum class FeeMode {
    fixed,         // fee(node) is a flat amount per payment
    proportional,  // fee(node) = forwarded * rate / 1'000'000, rate per node in ppm
};

struct Neighbor {
    NodeId peer;
    std::size_t channel;  // index into PaymentGraph::channels()
};

/// Bidirected payment-channel graph with per-direction capacity and per-node
/// fees. Escrow bookkeeping (lock / unlock / settle) keeps every coin either in
/// a directional capacity or in a directional escrow slot.
class PaymentGraph {
public:
    void add_node(NodeId id);
    /// Opens both directions of a channel. Re-adding an existing channel number
    /// with the same endpoints overwrites its capacities.
    void add_channel(std::uint64_t number, NodeId u, NodeId v, Coins cap_uv, Coins cap_vu);

    void set_fee(NodeId node, Coins fee_or_rate);
    void set_fee_mode(FeeMode mode) { fee_mode_ = mode; }
    [[nodiscard]] FeeMode fee_mode() const { return fee_mode_; }
    /// Raw per-node fee parameter (flat amount or ppm rate).
    [[nodiscard]] Coins fee_parameter(NodeId node) const;
    /// Fee charged by `node` for forwarding `forwarded` coins in one payment.
    [[nodiscard]] Coins fee(NodeId node, Coins forwarded) const;

    [[nodiscard]] bool has_node(NodeId id) const { return nodes_.contains(id); }
    [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
    [[nodiscard]] std::size_t channel_count() const { return channels_.size(); }
    /// Node ids in ascending order.
    [[nodiscard]] const std::vector<NodeId>& node_ids() const { return order_; }
    /// Neighbors of `id` in ascending peer order.
    [[nodiscard]] std::span<const Neighbor> neighbors(NodeId id) const;
    [[nodiscard]] const std::vector<Channel>& channels() const { return channels_; }

    [[nodiscard]] std::optional<ChannelId> find_channel(NodeId from, NodeId to) const;
    /// Throws InvalidParam if there is no channel between the two nodes.
    [[nodiscard]] ChannelId channel(NodeId from, NodeId to) const;

    [[nodiscard]] Coins capacity(const ChannelId& dir) const;
    [[nodiscard]] Coins escrow(const ChannelId& dir) const;
    [[nodiscard]] Coins total_escrow() const;

    /// Moves `amount` from the sender-side capacity into escrow.
    void lock(const ChannelId& dir, Coins amount);
    /// Returns escrowed coins to the sender side.
    void unlock(const ChannelId& dir, Coins amount);
    /// Releases escrowed coins to the receiver side.
    void settle(const ChannelId& dir, Coins amount);

private:
    struct NodeEntry {
        Coins fee = 0;
        std::vector<Neighbor> neighbors;
    };

    static std::uint64_t pair_key(NodeId a, NodeId b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }
    std::size_t index_of(const ChannelId& dir) const;
    Coins& cap_ref(const ChannelId& dir);
    Coins& escrow_ref(const ChannelId& dir);

    std::unordered_map<NodeId, NodeEntry> nodes_;
    std::vector<NodeId> order_;
    std::vector<Channel> channels_;
    std::unordered_map<std::uint64_t, std::size_t> by_number_;
    std::unordered_map<std::uint64_t, std::size_t> by_pair_;
    FeeMode fee_mode_ = FeeMode::fixed;
};

/// Signed per-node coin delta between two states of the same topology.
struct GainLedger {
    std::map<NodeId, Coins> gains;

    [[nodiscard]] Coins at(NodeId node) const;
    [[nodiscard]] Coins sum() const;
    [[nodiscard]] bool all_zero() const;
};

/// gain(v) = sum over incident channels of C((v,u), after) - C((v,u), before).
/// Throws TopologyMismatch if the channel sets differ.
GainLedger compute_gains(const PaymentGraph& before, const PaymentGraph& after);

}  // namespace cryptomaze::pcn
