#include "cryptomaze/baselines/hashlock.hpp"

#include <chrono>
#include <map>
#include <optional>

#include "cryptomaze/crypto/seal.hpp"

namespace cryptomaze::baselines {

namespace {

using crypto::Bytes;
using crypto::ByteView;
using crypto::Rng;
using crypto::SealedBlob;
using pcn::ChannelId;
using pcn::Coins;
using pcn::NodeId;
using pcn::Tick;
using protocol::ContractState;
using protocol::Outcome;
using protocol::Strategy;
namespace wire = protocol::wire;

using Clock = std::chrono::steady_clock;

enum class Proto { htlc, amp, mh };

Digest digest_of(ByteView b) { return crypto::sha256(b); }

enum class Kind { forward, blob, tuple, accept, abort, expire, collude };

struct Event {
    Kind kind;
    NodeId from = 0;
    NodeId to = 0;
    std::size_t contract = 0;  // tuple events: path index
    std::size_t hop = 0;       // tuple events only
    Bytes data;                // preimage or sealed bytes
};

struct Contract {
    ChannelId channel;
    Digest digest{};
    Coins value = 0;
    Tick timeout = 0;
    ContractState state = ContractState::proposed;
    bool abort_sent = false;
    std::size_t path = 0;
    std::size_t hop = 0;
};

// A node's role on one path.
struct Seat {
    std::optional<std::size_t> in;
    std::optional<std::size_t> out;
    bool released = false;
    bool failed = false;
    bool holds_release = false;
    // MH-HTLC tuple for the incoming hop
    bool has_tuple = false;
    Digest x{};
    Digest y{};
    Digest y_next{};
    bool proof_ok = false;
};

constexpr std::uint8_t kHop = 1;
constexpr std::uint8_t kLeaf = 2;

class HashlockRun {
public:
    HashlockRun(Proto proto, pcn::PaymentGraph& g, routing::PathSet ps, const SimConfig& cfg, const Corruption& adv,
                std::size_t proof_size)
        : proto_(proto), g_(g), ps_(std::move(ps)), cfg_(cfg), adv_(adv), proof_size_(proof_size),
          root_(cfg.seed), keys_(root_.fork(3).next()) {}

    RunResult execute() {
        const auto t0 = Clock::now();
        const pcn::PaymentGraph before = g_;
        if (ps_.paths.empty()) throw InvalidParam("no paths to run");
        for (const auto& p : ps_.paths) {
            if (p.length() == 0) throw InvalidParam("zero-length path");
        }
        routing::allocate_fees(ps_, g_);
        res_.payer = ps_.source;
        res_.payee = ps_.sink;
        res_.value = ps_.delivered();
        for (const auto& p : ps_.paths) {
            for (std::size_t h = 0; h < p.length(); ++h) {
                res_.expected_gains[p.nodes[h]] -= p.hops[h];
                res_.expected_gains[p.nodes[h + 1]] += p.hops[h];
            }
        }

        Rng rng = root_.fork(2);
        prepare_secrets(rng);
        const auto onions = build_onions(rng);
        start(onions, rng);
        while (!queue_.empty()) {
            auto [at, ev] = queue_.pop();
            now_ = at;
            dispatch(ev);
        }

        res_.gains = pcn::compute_gains(before, g_);
        for (const auto& c : contracts_) res_.contracts.push_back({c.channel, c.value, c.timeout, c.state});
        res_.metrics.n_contracts = contracts_.size();
        res_.metrics.sim_ticks = last_activity_;
        std::size_t released = 0;
        for (const auto& c : contracts_) released += c.state == ContractState::released;
        if (!contracts_.empty() && released == contracts_.size() && res_.full_success_gains()) {
            res_.outcome = Outcome::success;
        } else if (released == 0) {
            res_.outcome = Outcome::aborted;
        } else {
            res_.outcome = Outcome::partial;
        }
        res_.metrics.protocol_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        res_.metrics.ttp_ms = res_.metrics.protocol_ms + static_cast<double>(last_activity_) * cfg_.tick_ms;
        return std::move(res_);
    }

private:
    // ---- setup

    Digest lock_digest(std::size_t path, std::size_t hop) const {
        switch (proto_) {
            case Proto::htlc: return digest_of(htlc_preimage_);
            case Proto::amp: return AmpShares::condition(amp_.master, static_cast<std::uint32_t>(path));
            case Proto::mh: return mh_[path].y[hop];
        }
        return {};
    }

    void prepare_secrets(Rng& rng) {
        Rng payee_rng = root_.fork(1);
        htlc_preimage_.resize(32);
        payee_rng.fill(htlc_preimage_);
        if (proto_ == Proto::amp) amp_ = AmpShares::make(ps_.paths.size(), rng);
        if (proto_ == Proto::mh) {
            for (const auto& p : ps_.paths) mh_.push_back(MhHtlcChain::make(p.length(), rng));
        }
    }

    Bytes leaf_payload(std::size_t path) const {
        crypto::ByteWriter w;
        w.u8(kLeaf);
        w.u32(static_cast<std::uint32_t>(path));
        w.u32(static_cast<std::uint32_t>(ps_.paths.size()));
        if (proto_ == Proto::amp) w.raw(amp_.shares[path]);
        if (proto_ == Proto::mh) w.raw(mh_[path].x.back());
        return std::move(w).take();
    }

    // Z[p][h]: routing onion handed over with hop h of path p.
    std::vector<std::vector<SealedBlob>> build_onions(Rng& rng) {
        std::vector<std::vector<SealedBlob>> z(ps_.paths.size());
        for (std::size_t pi = 0; pi < ps_.paths.size(); ++pi) {
            const auto& p = ps_.paths[pi];
            z[pi].resize(p.length());
            const std::size_t last = p.length() - 1;
            z[pi][last] = crypto::seal(keys_.pair(p.nodes.back()).public_key, leaf_payload(pi), rng);
            for (std::size_t h = last; h-- > 0;) {
                crypto::ByteWriter w;
                w.u8(kHop);
                w.u32(p.nodes[h + 2]);
                w.u64(g_.channel(p.nodes[h + 1], p.nodes[h + 2]).number);
                w.i64(p.hops[h + 1]);
                w.i64(timeout_of(pi, h + 1));
                w.blob(z[pi][h + 1].bytes);
                z[pi][h] = crypto::seal(keys_.pair(p.nodes[h + 1]).public_key, w.bytes(), rng);
            }
        }
        return z;
    }

    Tick timeout_of(std::size_t path, std::size_t hop) const {
        const std::size_t from_end = ps_.paths[path].length() - 1 - hop;
        return cfg_.t_end + static_cast<Tick>(from_end) * cfg_.Delta;
    }

    void start(const std::vector<std::vector<SealedBlob>>& onions, Rng& rng) {
        if (proto_ == Proto::mh) {
            for (std::size_t pi = 0; pi < ps_.paths.size(); ++pi) {
                const auto& p = ps_.paths[pi];
                const auto& chain = mh_[pi];
                for (std::size_t h = 0; h < p.length(); ++h) {
                    crypto::ByteWriter w;
                    w.raw(chain.x[h]);
                    w.raw(chain.y[h]);
                    w.raw(h + 1 < p.length() ? chain.y[h + 1] : Digest{});
                    w.u8(chain.dealer_check(h) ? 1 : 0);
                    w.raw(Bytes(proof_size_, 0));
                    const SealedBlob sealed = crypto::seal(keys_.pair(p.nodes[h + 1]).public_key, w.bytes(), rng);
                    queue_.push(now_ + cfg_.delta, Event{Kind::tuple, ps_.source, p.nodes[h + 1], pi, h, sealed.bytes});
                }
            }
        }
        std::map<ChannelId, Coins> need;
        for (const auto& p : ps_.paths) need[g_.channel(p.nodes[0], p.nodes[1])] += p.hops[0];
        for (const auto& [ch, v] : need) {
            if (g_.capacity(ch) < v) {
                res_.note = "payer lacks capacity on " + pcn::to_string(ch);
                return;
            }
        }
        for (std::size_t pi = 0; pi < ps_.paths.size(); ++pi) {
            const auto& p = ps_.paths[pi];
            open_contract(pi, 0, lock_digest(pi, 0), p.hops[0], timeout_of(pi, 0), onions[pi][0].bytes);
        }
    }

    // ---- plumbing

    Seat& seat(NodeId n, std::size_t path) { return seats_[{n, path}]; }

    void send(Kind k, NodeId from, NodeId to, std::size_t contract, Bytes data = {}) {
        queue_.push(now_ + cfg_.delta, Event{k, from, to, contract, 0, std::move(data)});
    }

    void record(const Event& ev, const char* kind, std::uint64_t channel, std::size_t bytes) {
        res_.trace.add(now_, ev.from, ev.to, kind, channel, bytes);
        res_.metrics.bytes_total += bytes;
        if (bytes > 0) ++res_.metrics.n_messages;
        last_activity_ = now_;
    }

    void observe(NodeId at, const Event& ev, const char* kind, Bytes payload = {}) {
        protocol::Observation o;
        o.time = now_;
        o.from = ev.from;
        o.kind = kind;
        if (ev.kind != Kind::tuple) {
            const Contract& c = contracts_[ev.contract];
            o.channel = c.channel.number;
            if (ev.kind == Kind::forward) {
                o.digest.assign(c.digest.begin(), c.digest.end());
                o.value = c.value;
                o.timeout = c.timeout;
            }
        }
        o.payload = std::move(payload);
        res_.observations[at].push_back(std::move(o));
    }

    void open_contract(std::size_t path, std::size_t hop, const Digest& d, Coins value, Tick timeout, Bytes blob) {
        const auto& p = ps_.paths[path];
        const ChannelId ch = g_.channel(p.nodes[hop], p.nodes[hop + 1]);
        const std::size_t id = contracts_.size();
        g_.lock(ch, value);
        contracts_.push_back(Contract{ch, d, value, timeout, ContractState::locked, false, path, hop});
        seat(ch.from, path).out = id;
        queue_.push(timeout + 1, Event{Kind::expire, ch.from, ch.from, id, 0, {}});
        send(Kind::forward, ch.from, ch.to, id);
        send(Kind::blob, ch.from, ch.to, id, std::move(blob));
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case Kind::forward:
                record(ev, "forward", contracts_[ev.contract].channel.number,
                       wire::kChannelId + wire::kValue + wire::kTimeout + wire::kDigest);
                observe(ev.to, ev, "forward");
                break;
            case Kind::blob:
                record(ev, "blob", contracts_[ev.contract].channel.number, ev.data.size() + wire::kChannelId);
                on_blob(ev);
                break;
            case Kind::tuple:
                record(ev, "tuple", 0, ev.data.size());
                on_tuple(ev);
                break;
            case Kind::accept:
                record(ev, "accept", contracts_[ev.contract].channel.number, wire::kChannelId + ev.data.size());
                observe(ev.to, ev, "accept");
                on_accept(ev);
                break;
            case Kind::abort:
                record(ev, "abort", contracts_[ev.contract].channel.number, wire::kChannelId);
                observe(ev.to, ev, "abort");
                on_abort(ev);
                break;
            case Kind::expire:
                on_expire(ev);
                break;
            case Kind::collude:
                res_.trace.add(now_, ev.from, ev.to, "collude", contracts_[ev.contract].channel.number, 0);
                on_collude(ev);
                break;
        }
    }

    // ---- forwarding

    void fail(NodeId j, std::size_t path) {
        Seat& s = seat(j, path);
        s.failed = true;
        if (s.in) send_abort(j, *s.in);
    }

    void send_abort(NodeId j, std::size_t id) {
        Contract& c = contracts_[id];
        if (c.state != ContractState::locked || c.abort_sent) return;
        c.abort_sent = true;
        send(Kind::abort, j, c.channel.from, id);
    }

    void on_tuple(const Event& ev) {
        Seat& s = seat(ev.to, ev.contract);
        Bytes plain;
        try {
            plain = crypto::unseal(keys_.pair(ev.to).secret, SealedBlob{ev.data});
        } catch (const AuthFailure&) {
            observe(ev.to, ev, "tuple");
            return;
        }
        crypto::ByteReader r(plain);
        auto take = [&](Digest& d) {
            const auto v = r.raw(d.size());
            std::copy(v.begin(), v.end(), d.begin());
        };
        take(s.x);
        take(s.y);
        take(s.y_next);
        s.proof_ok = r.u8() == 1;
        s.has_tuple = true;
        observe(ev.to, ev, "tuple", Bytes(plain.begin(), plain.begin() + 3 * 32));
    }

    void on_blob(const Event& ev) {
        const NodeId j = ev.to;
        const Contract& c = contracts_[ev.contract];
        if (c.state != ContractState::locked) return;
        Seat& s = seat(j, c.path);
        s.in = ev.contract;

        Bytes plain;
        try {
            plain = crypto::unseal(keys_.pair(j).secret, SealedBlob{ev.data});
        } catch (const AuthFailure&) {
            observe(j, ev, "blob");
            fail(j, c.path);
            return;
        }
        observe(j, ev, "blob", plain);
        if (proto_ == Proto::mh && (!s.has_tuple || !s.proof_ok || s.y != c.digest)) {
            fail(j, c.path);
            return;
        }

        try {
            crypto::ByteReader r(plain);
            const std::uint8_t kind = r.u8();
            if (kind == kLeaf) {
                if (j != ps_.sink) throw EncodingError("leaf payload at an intermediate node");
                const std::uint32_t index = r.u32();
                const std::uint32_t count = r.u32();
                on_payee_contract(ev.contract, index, count, r);
                return;
            }
            const NodeId next = r.u32();
            const std::uint64_t number = r.u64();
            const Coins value = r.i64();
            const Tick timeout = r.i64();
            const ByteView inner = r.blob();
            auto ch = g_.find_channel(j, next);
            if (!ch || ch->number != number || value > c.value || timeout + cfg_.Delta > c.timeout ||
                g_.capacity(*ch) < value) {
                fail(j, c.path);
                return;
            }
            const Strategy st = adv_.of(j);
            if (st == Strategy::drop_forward) return;
            Bytes blob(inner.begin(), inner.end());
            if (st == Strategy::tamper && !blob.empty()) blob.back() ^= 0x01;
            const Digest next_digest = proto_ == Proto::mh ? s.y_next : c.digest;
            open_contract(c.path, c.hop + 1, next_digest, value, timeout, std::move(blob));
        } catch (const EncodingError&) {
            fail(j, c.path);
        }
    }

    void on_payee_contract(std::size_t id, std::uint32_t index, std::uint32_t count, crypto::ByteReader& r) {
        const Contract& c = contracts_[id];
        const NodeId payee = ps_.sink;
        if (c.value != ps_.paths[c.path].amount || index != c.path) {
            fail(payee, c.path);
            return;
        }
        if (adv_.of(payee) == Strategy::withhold_release) return;
        switch (proto_) {
            case Proto::htlc:
                release_to(payee, id, htlc_preimage_);
                break;
            case Proto::mh: {
                const auto x = r.raw(32);
                release_to(payee, id, Bytes(x.begin(), x.end()));
                break;
            }
            case Proto::amp: {
                Digest share{};
                const auto v = r.raw(share.size());
                std::copy(v.begin(), v.end(), share.begin());
                amp_received_[c.path] = {id, share};
                if (amp_received_.size() < count) return;
                std::vector<Digest> shares;
                for (const auto& [_, rec] : amp_received_) shares.push_back(rec.second);
                const Digest s = AmpShares::combine(shares);
                for (const auto& [path, rec] : amp_received_) {
                    release_to(payee, rec.first, AmpShares::preimage(s, static_cast<std::uint32_t>(path)));
                }
                break;
            }
        }
    }

    void release_to(NodeId from, std::size_t id, Bytes preimage) {
        const Contract& c = contracts_[id];
        if (c.state != ContractState::locked) return;
        seat(from, c.path).released = true;
        send(Kind::accept, from, c.channel.from, id, std::move(preimage));
    }

    // ---- release

    Bytes upstream_preimage(NodeId i, std::size_t path, const Bytes& pre) {
        if (proto_ != Proto::mh) return pre;
        const Seat& s = seat(i, path);
        Bytes out(pre.size());
        for (std::size_t b = 0; b < out.size(); ++b) out[b] = pre[b] ^ (b < s.x.size() ? s.x[b] : 0);
        return out;
    }

    void on_accept(const Event& ev) {
        const NodeId i = ev.to;
        Contract& c = contracts_[ev.contract];
        if (c.state != ContractState::locked || digest_of(ev.data) != c.digest) {
            res_.trace.add(now_, ev.from, ev.to, "WormholeAttemptBlocked", c.channel.number, 0);
            ++res_.wormhole_blocked;
            return;
        }
        if (ev.from != ps_.sink && !seat(ev.from, c.path).holds_release) {
            res_.trace.add(now_, ev.from, ev.to, "WormholeSucceeded", c.channel.number, 0);
            ++res_.wormhole_succeeded;
        }
        g_.settle(c.channel, c.value);
        c.state = ContractState::released;
        Seat& s = seat(i, c.path);
        s.holds_release = true;
        if (i == ps_.source || s.released || !s.in) return;

        const Strategy st = adv_.of(i);
        if (st == Strategy::withhold_release) return;
        const Bytes up = upstream_preimage(i, c.path, ev.data);
        if (st == Strategy::skip_release_collude && adv_.colluders && adv_.colluders->second == i) {
            s.released = true;
            const std::size_t in = *s.in;
            send_abort(i, in);
            queue_.push(now_, Event{Kind::collude, i, adv_.colluders->first, ev.contract, 0, up});
            return;
        }
        release_to(i, *s.in, up);
    }

    void on_collude(const Event& ev) {
        const NodeId up = ev.to;
        const std::size_t path = contracts_[ev.contract].path;
        Seat& s = seat(up, path);
        if (s.released || !s.in) return;
        release_to(up, *s.in, upstream_preimage(up, path, ev.data));
    }

    // ---- abort and expiry

    void on_abort(const Event& ev) {
        Contract& c = contracts_[ev.contract];
        if (c.state != ContractState::locked) return;
        g_.unlock(c.channel, c.value);
        c.state = ContractState::aborted;
        propagate(c.channel.from, c.path);
    }

    void on_expire(const Event& ev) {
        Contract& c = contracts_[ev.contract];
        if (c.state != ContractState::locked) return;
        g_.unlock(c.channel, c.value);
        c.state = ContractState::expired;
        res_.trace.add(now_, c.channel.from, c.channel.to, "expire", c.channel.number, 0);
        last_activity_ = now_;
        propagate(c.channel.from, c.path);
    }

    void propagate(NodeId i, std::size_t path) {
        if (i == ps_.source) return;
        Seat& s = seat(i, path);
        if (s.released) return;
        s.failed = true;
        if (s.in) send_abort(i, *s.in);
    }

    Proto proto_;
    pcn::PaymentGraph& g_;
    routing::PathSet ps_;
    const SimConfig& cfg_;
    const Corruption& adv_;
    std::size_t proof_size_;
    Rng root_;
    protocol::KeyDirectory keys_;

    Bytes htlc_preimage_;
    AmpShares amp_;
    std::vector<MhHtlcChain> mh_;
    std::map<std::size_t, std::pair<std::size_t, Digest>> amp_received_;

    protocol::EventQueue<Event> queue_;
    Tick now_ = 0;
    Tick last_activity_ = 0;
    std::vector<Contract> contracts_;
    std::map<std::pair<NodeId, std::size_t>, Seat> seats_;
    RunResult res_;
};

}  // namespace

Digest xor_digest(const Digest& a, const Digest& b) {
    Digest out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

AmpShares AmpShares::make(std::size_t n, crypto::Rng& rng) {
    if (n == 0) throw InvalidParam("AMP needs at least one share");
    AmpShares a;
    a.shares.resize(n);
    for (auto& s : a.shares) rng.fill(s);
    a.master = combine(a.shares);
    return a;
}

Digest AmpShares::combine(const std::vector<Digest>& shares) {
    Digest out{};
    for (const auto& s : shares) out = xor_digest(out, s);
    return out;
}

crypto::Bytes AmpShares::preimage(const Digest& master, std::uint32_t i) {
    crypto::ByteWriter w;
    w.raw(master);
    w.u32(i);
    return std::move(w).take();
}

Digest AmpShares::condition(const Digest& master, std::uint32_t i) { return crypto::sha256(preimage(master, i)); }

MhHtlcChain MhHtlcChain::make(std::size_t hops, crypto::Rng& rng) {
    if (hops == 0) throw InvalidParam("MH-HTLC chain needs at least one hop");
    MhHtlcChain c;
    c.x.resize(hops);
    c.k.resize(hops);
    c.y.resize(hops);
    for (auto& x : c.x) rng.fill(x);
    for (std::size_t i = hops; i-- > 0;) {
        c.k[i] = i + 1 < hops ? xor_digest(c.x[i], c.k[i + 1]) : c.x[i];
        c.y[i] = crypto::sha256(c.k[i]);
    }
    return c;
}

bool MhHtlcChain::dealer_check(std::size_t i) const {
    if (i >= y.size()) return false;
    const Digest pre = i + 1 < k.size() ? xor_digest(x[i], k[i + 1]) : x[i];
    return crypto::sha256(pre) == y[i];
}

RunResult run_htlc(pcn::PaymentGraph& graph, const routing::PathSet& paths, const SimConfig& config,
                   const Corruption& corruption) {
    config.validate();
    if (paths.paths.size() != 1) throw InvalidParam("HTLC runs over exactly one path");
    return HashlockRun(Proto::htlc, graph, paths, config, corruption, 0).execute();
}

RunResult run_amp(pcn::PaymentGraph& graph, const routing::PathSet& paths, const SimConfig& config,
                  const Corruption& corruption) {
    config.validate();
    return HashlockRun(Proto::amp, graph, paths, config, corruption, 0).execute();
}

RunResult run_mh_htlc(pcn::PaymentGraph& graph, const routing::PathSet& paths, const SimConfig& config,
                      std::size_t proof_size, const Corruption& corruption) {
    config.validate();
    return HashlockRun(Proto::mh, graph, paths, config, corruption, proof_size).execute();
}

}  // namespace cryptomaze::baselines
