#include <algorithm>

#include "cryptomaze/protocol/sim.hpp"

#include "json.hpp"

namespace cryptomaze::protocol {

void SimConfig::validate() const {
    if (delta < 1) throw ConfigError("delta must be at least 1 tick");
    if (Delta < 1) throw ConfigError("Delta must be at least 1 tick");
    if (t_end < 1) throw ConfigError("t_end must be positive");
    if (arrival_window < 0) throw ConfigError("arrival window must be non-negative");
    if (tick_ms < 0) throw ConfigError("tick_ms must be non-negative");
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::honest: return "honest";
        case Strategy::drop_forward: return "drop-forward";
        case Strategy::withhold_release: return "withhold-release";
        case Strategy::skip_release_collude: return "skip-release-collude";
        case Strategy::tamper: return "tamper";
        case Strategy::observe_only: return "observe-only";
    }
    return "?";
}

Strategy strategy_from_string(const std::string& s) {
    for (Strategy v : {Strategy::honest, Strategy::drop_forward, Strategy::withhold_release,
                       Strategy::skip_release_collude, Strategy::tamper, Strategy::observe_only}) {
        if (to_string(v) == s) return v;
    }
    throw ConfigError("unknown strategy '" + s + "'");
}

Strategy Corruption::of(NodeId n) const {
    auto it = strategy.find(n);
    return it == strategy.end() ? Strategy::honest : it->second;
}

bool Corruption::corrupted(NodeId n) const { return strategy.contains(n); }

Corruption Corruption::wormhole(NodeId upstream, NodeId downstream) {
    Corruption c;
    c.strategy[upstream] = Strategy::skip_release_collude;
    c.strategy[downstream] = Strategy::skip_release_collude;
    c.colluders = {upstream, downstream};
    return c;
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::success: return "success";
        case Outcome::aborted: return "aborted";
        case Outcome::partial: return "partial";
        case Outcome::no_route: return "no_route";
        case Outcome::not_applicable: return "not_applicable";
    }
    return "?";
}

std::size_t Trace::count(const std::string& kind) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [&](const TraceEvent& e) { return e.kind == kind; }));
}

std::string Trace::to_jsonl() const {
    std::string out;
    for (const auto& e : events) {
        nlohmann::json j{{"time", e.time}, {"from", e.from}, {"to", e.to},
                         {"kind", e.kind}, {"channel", e.channel}, {"bytes", e.bytes}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

bool RunResult::all_terminal() const {
    return std::none_of(contracts.begin(), contracts.end(), [](const ContractRecord& c) {
        return c.state == ContractState::proposed || c.state == ContractState::locked;
    });
}

bool RunResult::full_success_gains() const {
    for (const auto& [n, g] : gains.gains) {
        auto it = expected_gains.find(n);
        const Coins want = it == expected_gains.end() ? 0 : it->second;
        if (g != want) return false;
    }
    return true;
}

const crypto::HopKeyPair& KeyDirectory::pair(NodeId n) {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    crypto::Rng rng = crypto::Rng(seed_).fork(n);
    return cache_.emplace(n, crypto::HopKeyPair::generate(rng)).first->second;
}

std::map<NodeId, Point> KeyDirectory::public_keys(const std::vector<NodeId>& nodes) {
    std::map<NodeId, Point> out;
    for (NodeId n : nodes) out.emplace(n, pair(n).public_key);
    return out;
}

}  // namespace cryptomaze::protocol
