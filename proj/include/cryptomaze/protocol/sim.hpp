#pragma once

// Types shared by the CryptoMaze engine and the hashlock baselines:
// configuration, adversary strategies, trace, observations and results.

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "cryptomaze/crypto/group.hpp"
#include "cryptomaze/pcn/graph.hpp"
#include "cryptomaze/protocol/conditions.hpp"

namespace cryptomaze::protocol {

enum class LockMechanism { point, ecdsa };

struct SimConfig {
    Tick delta = 1;        // per-message latency
    Tick Delta = 10;       // gap between adjacent contract timeouts
    Tick t_end = 100;      // timeout of payee-adjacent contracts
    std::uint64_t seed = 1;
    /// How long a node waits after its first incoming contract for the rest
    /// to arrive. 0 = delta times the longest route in hops.
    Tick arrival_window = 0;
    LockMechanism lock = LockMechanism::point;
    ConditionVariant variant = ConditionVariant::standard;
    double tick_ms = 0.0;  // wall-clock cost of one tick in the TTP estimate

    /// Throws ConfigError.
    void validate() const;
};

enum class Strategy {
    honest,
    drop_forward,          // accepts incoming contracts, never forwards
    withhold_release,      // never releases upstream (payee: never accepts)
    skip_release_collude,  // wormhole pair, see Corruption::colluders
    tamper,                // corrupts one outgoing onion blob
    observe_only,          // honest behavior, logs everything it sees
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

/// Statically corrupted nodes. For the wormhole pair, the downstream
/// colluder settles with its successor, aborts towards its predecessor and
/// hands what it learned to the upstream colluder, who tries to claim its
/// own incoming contract with it.
struct Corruption {
    std::map<NodeId, Strategy> strategy;
    std::optional<std::pair<NodeId, NodeId>> colluders;  // (upstream, downstream)

    [[nodiscard]] Strategy of(NodeId n) const;
    [[nodiscard]] bool corrupted(NodeId n) const;
    static Corruption wormhole(NodeId upstream, NodeId downstream);
};

struct TraceEvent {
    Tick time = 0;
    NodeId from = 0;
    NodeId to = 0;
    std::string kind;
    std::uint64_t channel = 0;
    std::size_t bytes = 0;
};

struct Trace {
    std::vector<TraceEvent> events;

    void add(Tick time, NodeId from, NodeId to, std::string kind, std::uint64_t channel, std::size_t bytes) {
        events.push_back({time, from, to, std::move(kind), channel, bytes});
    }
    [[nodiscard]] std::size_t count(const std::string& kind) const;
    [[nodiscard]] bool contains(const std::string& kind) const { return count(kind) > 0; }
    /// One JSON object per line: time, from, to, kind, channel, bytes.
    [[nodiscard]] std::string to_jsonl() const;
};

/// What one node saw during a run.
struct Observation {
    Tick time = 0;
    NodeId from = 0;
    std::string kind;
    std::uint64_t channel = 0;
    std::optional<Point> condition;
    crypto::Bytes digest;  // hashlock condition, baselines only
    Coins value = 0;
    Tick timeout = 0;
    crypto::Bytes payload;  // decrypted onion layer
};
using ObservationLog = std::vector<Observation>;

enum class Outcome { success, aborted, partial, no_route, not_applicable };
std::string to_string(Outcome o);

enum class ContractState { proposed, locked, released, aborted, expired };

struct ContractRecord {
    ChannelId channel;
    Coins value = 0;
    Tick timeout = 0;
    ContractState state = ContractState::proposed;
};

struct Metrics {
    std::size_t bytes_total = 0;
    std::size_t n_messages = 0;
    std::size_t n_contracts = 0;
    Tick sim_ticks = 0;
    double routing_ms = 0;
    double protocol_ms = 0;
    double ttp_ms = 0;
};

struct RunResult {
    Outcome outcome = Outcome::aborted;
    NodeId payer = 0;
    NodeId payee = 0;
    Coins value = 0;
    pcn::GainLedger gains;
    /// Gains every node would have after a complete, honest settlement.
    std::map<NodeId, Coins> expected_gains;
    Trace trace;
    Metrics metrics;
    std::vector<ContractRecord> contracts;
    std::map<NodeId, ObservationLog> observations;
    std::size_t n_shared_edges = 0;
    std::size_t wormhole_blocked = 0;
    std::size_t wormhole_succeeded = 0;
    std::size_t consistency_violations = 0;
    std::string note;

    [[nodiscard]] bool all_terminal() const;
    /// gain(v) = expected gain for every node.
    [[nodiscard]] bool full_success_gains() const;
};

/// Per-node hop keys, derived deterministically from a seed on first use.
class KeyDirectory {
public:
    explicit KeyDirectory(std::uint64_t seed) : seed_(seed) {}

    const crypto::HopKeyPair& pair(NodeId n);
    std::map<NodeId, Point> public_keys(const std::vector<NodeId>& nodes);

private:
    std::uint64_t seed_;
    std::map<NodeId, crypto::HopKeyPair> cache_;
};

/// Discrete-event queue ordered by (time, insertion order).
template <typename T>
class EventQueue {
public:
    void push(Tick at, T item) { heap_.push(Entry{at, seq_++, std::move(item)}); }
    [[nodiscard]] bool empty() const { return heap_.empty(); }
    [[nodiscard]] Tick next_time() const { return heap_.top().at; }
    std::pair<Tick, T> pop() {
        Entry e = heap_.top();
        heap_.pop();
        return {e.at, std::move(e.item)};
    }

private:
    struct Entry {
        Tick at;
        std::uint64_t seq;
        T item;
        bool operator>(const Entry& o) const { return at != o.at ? at > o.at : seq > o.seq; }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
    std::uint64_t seq_ = 0;
};

/// Fixed message sizes used for communication accounting.
namespace wire {
inline constexpr std::size_t kChannelId = 8;
inline constexpr std::size_t kValue = 8;
inline constexpr std::size_t kTimeout = 8;
inline constexpr std::size_t kScalar = 32;
inline constexpr std::size_t kDigest = 32;
}  // namespace wire

}  // namespace cryptomaze::protocol
