#include "cryptomaze/pcn/graph.hpp"

#include <algorithm>

namespace cryptomaze::pcn {

std::string to_string(const ChannelId& id) {
    return "#" + std::to_string(id.number) + "(" + std::to_string(id.from) + "->" + std::to_string(id.to) + ")";
}

void PaymentGraph::add_node(NodeId id) {
    if (!nodes_.try_emplace(id).second) return;
    if (order_.empty() || order_.back() < id) {
        order_.push_back(id);
    } else {
        order_.insert(std::lower_bound(order_.begin(), order_.end(), id), id);
    }
}

void PaymentGraph::add_channel(std::uint64_t number, NodeId u, NodeId v, Coins cap_uv, Coins cap_vu) {
    if (u == v) throw ValidationError("channel " + std::to_string(number) + " is a self-loop");
    if (cap_uv < 0 || cap_vu < 0) {
        throw ValidationError("channel " + std::to_string(number) + " has negative capacity");
    }
    if (!has_node(u) || !has_node(v)) {
        throw ValidationError("channel " + std::to_string(number) + " references an unknown node");
    }

    if (auto it = by_number_.find(number); it != by_number_.end()) {
        Channel& c = channels_[it->second];
        if (c.u == u && c.v == v) {
            c.cap_uv = cap_uv;
            c.cap_vu = cap_vu;
        } else if (c.u == v && c.v == u) {
            c.cap_uv = cap_vu;
            c.cap_vu = cap_uv;
        } else {
            throw ValidationError("channel " + std::to_string(number) + " redeclared with different endpoints");
        }
        return;
    }
    if (by_pair_.contains(pair_key(u, v))) {
        throw ValidationError("parallel channel " + std::to_string(number) + " between " + std::to_string(u) +
                              " and " + std::to_string(v));
    }

    const std::size_t idx = channels_.size();
    channels_.push_back(Channel{number, u, v, cap_uv, cap_vu, 0, 0});
    by_number_[number] = idx;
    by_pair_[pair_key(u, v)] = idx;
    by_pair_[pair_key(v, u)] = idx;

    auto insert_sorted = [](std::vector<Neighbor>& list, Neighbor n) {
        auto pos = std::lower_bound(list.begin(), list.end(), n.peer,
                                    [](const Neighbor& a, NodeId peer) { return a.peer < peer; });
        list.insert(pos, n);
    };
    insert_sorted(nodes_[u].neighbors, Neighbor{v, idx});
    insert_sorted(nodes_[v].neighbors, Neighbor{u, idx});
}

void PaymentGraph::set_fee(NodeId node, Coins fee_or_rate) {
    if (fee_or_rate < 0) throw ValidationError("negative fee for node " + std::to_string(node));
    auto it = nodes_.find(node);
    if (it == nodes_.end()) throw ValidationError("fee for unknown node " + std::to_string(node));
    it->second.fee = fee_or_rate;
}

Coins PaymentGraph::fee_parameter(NodeId node) const {
    auto it = nodes_.find(node);
    if (it == nodes_.end()) throw InvalidParam("unknown node " + std::to_string(node));
    return it->second.fee;
}

Coins PaymentGraph::fee(NodeId node, Coins forwarded) const {
    const Coins p = fee_parameter(node);
    if (fee_mode_ == FeeMode::fixed) return p;
    // 128-bit intermediate: forwarded * ppm can exceed int64 for large channels.
    const __int128 f = static_cast<__int128>(forwarded) * p / 1'000'000;
    return static_cast<Coins>(f);
}

std::span<const Neighbor> PaymentGraph::neighbors(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) return {};
    return it->second.neighbors;
}

std::optional<ChannelId> PaymentGraph::find_channel(NodeId from, NodeId to) const {
    auto it = by_pair_.find(pair_key(from, to));
    if (it == by_pair_.end()) return std::nullopt;
    return ChannelId{channels_[it->second].number, from, to};
}

ChannelId PaymentGraph::channel(NodeId from, NodeId to) const {
    auto c = find_channel(from, to);
    if (!c) throw InvalidParam("no channel between " + std::to_string(from) + " and " + std::to_string(to));
    return *c;
}

std::size_t PaymentGraph::index_of(const ChannelId& dir) const {
    auto it = by_number_.find(dir.number);
    if (it == by_number_.end()) throw InvalidParam("unknown channel " + to_string(dir));
    const Channel& c = channels_[it->second];
    if (!((c.u == dir.from && c.v == dir.to) || (c.u == dir.to && c.v == dir.from))) {
        throw InvalidParam("channel " + to_string(dir) + " does not connect those nodes");
    }
    return it->second;
}

Coins& PaymentGraph::cap_ref(const ChannelId& dir) {
    Channel& c = channels_[index_of(dir)];
    return c.u == dir.from ? c.cap_uv : c.cap_vu;
}

Coins& PaymentGraph::escrow_ref(const ChannelId& dir) {
    Channel& c = channels_[index_of(dir)];
    return c.u == dir.from ? c.escrow_uv : c.escrow_vu;
}

Coins PaymentGraph::capacity(const ChannelId& dir) const {
    const Channel& c = channels_[index_of(dir)];
    return c.u == dir.from ? c.cap_uv : c.cap_vu;
}

Coins PaymentGraph::escrow(const ChannelId& dir) const {
    const Channel& c = channels_[index_of(dir)];
    return c.u == dir.from ? c.escrow_uv : c.escrow_vu;
}

Coins PaymentGraph::total_escrow() const {
    Coins total = 0;
    for (const auto& c : channels_) total += c.escrow_uv + c.escrow_vu;
    return total;
}

void PaymentGraph::lock(const ChannelId& dir, Coins amount) {
    if (amount < 0) throw InvalidParam("negative lock amount");
    Coins& cap = cap_ref(dir);
    if (cap < amount) {
        throw InsufficientCapacity("channel " + to_string(dir) + " has " + std::to_string(cap) +
                                   ", cannot lock " + std::to_string(amount));
    }
    cap -= amount;
    escrow_ref(dir) += amount;
}

void PaymentGraph::unlock(const ChannelId& dir, Coins amount) {
    Coins& esc = escrow_ref(dir);
    if (amount < 0 || esc < amount) throw InvalidParam("unlock exceeds escrow on " + to_string(dir));
    esc -= amount;
    cap_ref(dir) += amount;
}

void PaymentGraph::settle(const ChannelId& dir, Coins amount) {
    Coins& esc = escrow_ref(dir);
    if (amount < 0 || esc < amount) throw InvalidParam("settle exceeds escrow on " + to_string(dir));
    esc -= amount;
    cap_ref(dir.reversed()) += amount;
}

Coins GainLedger::at(NodeId node) const {
    auto it = gains.find(node);
    return it == gains.end() ? 0 : it->second;
}

Coins GainLedger::sum() const {
    Coins s = 0;
    for (const auto& [_, g] : gains) s += g;
    return s;
}

bool GainLedger::all_zero() const {
    return std::all_of(gains.begin(), gains.end(), [](const auto& kv) { return kv.second == 0; });
}

GainLedger compute_gains(const PaymentGraph& before, const PaymentGraph& after) {
    const auto& a = before.channels();
    const auto& b = after.channels();
    if (a.size() != b.size() || before.node_ids() != after.node_ids()) {
        throw TopologyMismatch("graphs differ in node or channel count");
    }
    GainLedger ledger;
    for (NodeId n : before.node_ids()) ledger.gains[n] = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].number != b[i].number || a[i].u != b[i].u || a[i].v != b[i].v) {
            throw TopologyMismatch("channel " + std::to_string(a[i].number) + " differs between graphs");
        }
        ledger.gains[a[i].u] += b[i].cap_uv - a[i].cap_uv;
        ledger.gains[a[i].v] += b[i].cap_vu - a[i].cap_vu;
    }
    return ledger;
}

}  // namespace cryptomaze::pcn
