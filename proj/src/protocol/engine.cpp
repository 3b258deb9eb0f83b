#include "cryptomaze/protocol/engine.hpp"

#include <chrono>
#include <map>
#include <unordered_map>

#include "cryptomaze/lock/ecdsa_lock.hpp"
#include "cryptomaze/protocol/contract_checks.hpp"

namespace cryptomaze::protocol {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

enum class Kind { forward, blob, accept, abort, expire, window, collude };

struct Event {
    Kind kind;
    NodeId from = 0;
    NodeId to = 0;
    std::size_t contract = 0;
    Scalar r;
    SealedBlob blob;
};

struct Contract {
    ChannelId channel;
    Point R;
    Coins value = 0;
    Tick timeout = 0;
    ContractState state = ContractState::proposed;
    bool abort_sent = false;
    lock::PreSignature presig;
    lock::SharedKey key;
};

struct NodeRt {
    std::vector<std::size_t> in;
    std::vector<std::size_t> out;
    Coins val_acc = 0;
    bool flag = false;
    bool failed = false;
    bool release = false;
    bool holds_release = false;  // got a valid release from a successor
    bool window_armed = false;
    std::optional<crypto::Bytes> M;
    IntermediatePayload D;
    Scalar x_j;
    Scalar y;
    std::optional<Tick> t_end;
    bool t_end_mismatch = false;
};

Tick longest_route(const routing::EdgeSet& pc) {
    std::unordered_map<NodeId, Tick> depth;
    auto order = routing::reverse_topological_nodes(pc);
    Tick best = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Tick d = depth[*it];
        best = std::max(best, d);
        for (std::size_t e : pc.out_edges(*it)) {
            Tick& nd = depth[pc.edges[e].channel.to];
            nd = std::max(nd, d + 1);
        }
    }
    return best;
}

crypto::Bytes channel_message(const ChannelId& c) {
    crypto::ByteWriter w;
    w.u64(c.number);
    return std::move(w).take();
}

class Run {
public:
    Run(pcn::PaymentGraph& g, const routing::EdgeSet& pc, const SimConfig& cfg, const Corruption& adv)
        : g_(g), pc_(pc), cfg_(cfg), adv_(adv), root_(cfg.seed), keys_(root_.fork(3).next()),
          ecdsa_(root_.fork(4)) {}

    RunResult execute() {
        const auto t0 = Clock::now();
        const pcn::PaymentGraph before = g_;
        res_.payer = pc_.payer;
        res_.payee = pc_.payee;
        res_.value = pc_.value;
        for (NodeId n : pc_.nodes()) {
            res_.expected_gains[n] = pc_.inflow(n) - pc_.outflow(n);
        }
        window_ = cfg_.arrival_window > 0 ? cfg_.arrival_window : cfg_.delta * std::max<Tick>(1, longest_route(pc_));

        Rng receiver_rng = root_.fork(1);
        Rng sender_rng = root_.fork(2);
        receiver_ = receiver_init(receiver_rng);
        table_ = build_conditions(pc_, receiver_.X_r, sender_rng, cfg_.variant);
        std::vector<NodeId> members = pc_.nodes();
        const auto onions = build_onions(table_, pc_, keys_.public_keys(members), sender_rng);

        start(onions);
        while (!queue_.empty()) {
            auto [at, ev] = queue_.pop();
            now_ = at;
            dispatch(ev);
        }

        res_.gains = pcn::compute_gains(before, g_);
        for (const auto& c : contracts_) res_.contracts.push_back({c.channel, c.value, c.timeout, c.state});
        res_.metrics.n_contracts = contracts_.size();
        res_.metrics.sim_ticks = last_activity_;
        res_.outcome = classify();
        res_.metrics.protocol_ms = ms_since(t0);
        return std::move(res_);
    }

private:
    // ---- plumbing

    NodeRt& node(NodeId n) { return nodes_[n]; }

    void send(Kind k, NodeId from, NodeId to, std::size_t contract, Scalar r = {}, SealedBlob blob = {}) {
        queue_.push(now_ + cfg_.delta, Event{k, from, to, contract, r, std::move(blob)});
    }

    void observe(NodeId at, const Event& ev, const char* kind, crypto::Bytes payload = {}) {
        const Contract& c = contracts_[ev.contract];
        Observation o;
        o.time = now_;
        o.from = ev.from;
        o.kind = kind;
        o.channel = c.channel.number;
        if (ev.kind == Kind::forward) {
            o.condition = c.R;
            o.value = c.value;
            o.timeout = c.timeout;
        }
        o.payload = std::move(payload);
        res_.observations[at].push_back(std::move(o));
    }

    void record(const Event& ev, const char* kind, std::size_t bytes) {
        res_.trace.add(now_, ev.from, ev.to, kind, contracts_[ev.contract].channel.number, bytes);
        res_.metrics.bytes_total += bytes;
        if (bytes > 0) ++res_.metrics.n_messages;
        last_activity_ = now_;
    }

    std::size_t forward_bytes() const {
        std::size_t b = wire::kChannelId + wire::kValue + wire::kTimeout + crypto::point_encoded_size();
        if (cfg_.lock == LockMechanism::ecdsa) b += 2 * wire::kScalar;
        return b;
    }

    // Locks escrow on the sender side and sends the contract plus its onion.
    void open_contract(NodeId from, const ChannelId& ch, const Point& R, Coins value, Tick timeout, SealedBlob blob) {
        const std::size_t id = contracts_.size();
        Contract c;
        c.channel = ch;
        c.R = R;
        c.value = value;
        c.timeout = timeout;
        g_.lock(ch, value);
        c.state = ContractState::locked;
        if (cfg_.lock == LockMechanism::ecdsa) {
            c.key = ecdsa_.keygen(id + 1, ch.from, ch.to);
            c.presig = ecdsa_.lock(id + 1, channel_message(ch), R);
        }
        contracts_.push_back(std::move(c));
        node(from).out.push_back(id);
        queue_.push(timeout + 1, Event{Kind::expire, from, from, id, {}, {}});
        send(Kind::forward, from, ch.to, id);
        send(Kind::blob, from, ch.to, id, {}, std::move(blob));
    }

    void start(const std::vector<SealedBlob>& onions) {
        const auto first = pc_.out_edges(pc_.payer);
        for (std::size_t e : first) {
            if (g_.capacity(pc_.edges[e].channel) < pc_.edges[e].value) {
                res_.note = "payer lacks capacity on " + pcn::to_string(pc_.edges[e].channel);
                return;
            }
        }
        node(pc_.payer).flag = true;
        for (std::size_t e : first) {
            const auto& c = table_.conditions[e];
            open_contract(pc_.payer, c.channel, c.R, c.value, c.timeout, onions[e]);
        }
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case Kind::forward:
                record(ev, "forward", forward_bytes());
                observe(ev.to, ev, "forward");
                break;
            case Kind::blob:
                record(ev, "blob", ev.blob.size() + wire::kChannelId);
                on_blob(ev);
                break;
            case Kind::accept:
                record(ev, "accept", wire::kChannelId + wire::kScalar);
                observe(ev.to, ev, "accept");
                on_accept(ev);
                break;
            case Kind::abort:
                record(ev, "abort", wire::kChannelId);
                observe(ev.to, ev, "abort");
                on_abort(ev);
                break;
            case Kind::expire:
                on_expire(ev);
                break;
            case Kind::window:
                on_window(ev.to);
                break;
            case Kind::collude:
                res_.trace.add(now_, ev.from, ev.to, "collude", contracts_[ev.contract].channel.number, 0);
                on_collude(ev);
                break;
        }
    }

    // ---- forwarding

    void fail(NodeId j) {
        NodeRt& n = node(j);
        n.failed = true;
        for (std::size_t e : n.in) send_abort(j, e);
    }

    void send_abort(NodeId j, std::size_t e) {
        Contract& c = contracts_[e];
        if (c.state != ContractState::locked || c.abort_sent) return;
        c.abort_sent = true;
        send(Kind::abort, j, c.channel.from, e);
    }

    void on_blob(const Event& ev) {
        const NodeId j = ev.to;
        NodeRt& n = node(j);
        Contract& c = contracts_[ev.contract];
        if (c.state != ContractState::locked) return;
        n.in.push_back(ev.contract);
        if (n.failed || n.flag) {
            send_abort(j, ev.contract);
            return;
        }
        if (!n.window_armed) {
            n.window_armed = true;
            queue_.push(now_ + window_, Event{Kind::window, j, j, ev.contract, {}, {}});
        }
        n.val_acc += c.value;

        crypto::Bytes plain;
        Payload payload;
        try {
            plain = crypto::unseal(keys_.pair(j).secret, ev.blob);
            payload = decode_payload(plain, j);
        } catch (const Error&) {
            observe(j, ev, "blob");
            fail(j);
            return;
        }
        observe(j, ev, "blob", plain);

        if (j == pc_.payee) {
            const auto* leaf = std::get_if<PayeePayload>(&payload);
            if (!leaf) {
                fail(j);
                return;
            }
            n.y += leaf->y_share;
            if (n.t_end && *n.t_end != leaf->t_end) n.t_end_mismatch = true;
            n.t_end = leaf->t_end;
            if (n.val_acc == pc_.value) {
                n.flag = true;
                payee_release_all(j);
            } else if (n.val_acc > pc_.value) {
                fail(j);
            }
            return;
        }

        const auto* mid = std::get_if<IntermediatePayload>(&payload);
        if (!mid) {
            fail(j);
            return;
        }
        if (n.M) {
            if (*n.M != plain) {
                fail(j);
                return;
            }
        } else {
            n.M = plain;
            n.D = *mid;
            n.x_j = node_secret_of(n.D);
        }
        if (!check_forward(n.D, c.channel, c.timeout, c.R, cfg_.Delta)) {
            fail(j);
            return;
        }
        Coins out = 0;
        for (const auto& t : n.D.tuples) out += t.value;
        const Coins need = out + g_.fee(j, out);
        if (n.val_acc == need) {
            n.flag = true;
            forward_all(j);
        } else if (n.val_acc > need) {
            fail(j);
        }
    }

    void forward_all(NodeId j) {
        NodeRt& n = node(j);
        const Strategy s = adv_.of(j);
        if (s == Strategy::drop_forward) return;
        for (const auto& t : n.D.tuples) {
            auto ch = g_.find_channel(j, t.channel.to);
            if (!ch || ch->number != t.channel.number || g_.capacity(*ch) < t.value) {
                fail(j);
                return;
            }
        }
        bool tampered = false;
        for (const auto& t : n.D.tuples) {
            SealedBlob blob = t.next;
            if (s == Strategy::tamper && !tampered && !blob.bytes.empty()) {
                blob.bytes.back() ^= 0x01;
                tampered = true;
            }
            open_contract(j, *g_.find_channel(j, t.channel.to), t.condition, t.value, t.timeout, std::move(blob));
        }
    }

    void on_window(NodeId j) {
        NodeRt& n = node(j);
        if (!n.flag && !n.failed) fail(j);
    }

    // ---- release

    bool release_valid(const Contract& c, std::size_t id, const Scalar& r) const {
        if (cfg_.lock == LockMechanism::ecdsa) {
            return ecdsa_.verify(id + 1, channel_message(c.channel), r, c.presig, c.key.pk);
        }
        return Point::mul_base(r) == c.R;
    }

    void payee_release_all(NodeId r) {
        if (adv_.of(r) == Strategy::withhold_release) return;
        NodeRt& n = node(r);
        bool stop = n.t_end_mismatch || !n.t_end;
        std::vector<std::pair<std::size_t, Scalar>> releases;
        for (std::size_t e : n.in) {
            const Contract& c = contracts_[e];
            if (c.state != ContractState::locked) continue;
            if (c.timeout != *n.t_end) stop = true;
            const Scalar rr = payee_release(n.y, receiver_.x_r, c.channel);
            if (!(Point::mul_base(rr) == c.R)) stop = true;
            releases.emplace_back(e, rr);
        }
        if (stop) {
            fail(r);
            return;
        }
        n.release = true;
        for (const auto& [e, rr] : releases) send(Kind::accept, r, contracts_[e].channel.from, e, rr);
    }

    void on_accept(const Event& ev) {
        const NodeId i = ev.to;
        Contract& c = contracts_[ev.contract];
        if (c.state != ContractState::locked || !release_valid(c, ev.contract, ev.r)) {
            res_.trace.add(now_, ev.from, ev.to, "WormholeAttemptBlocked", c.channel.number, 0);
            ++res_.wormhole_blocked;
            return;
        }
        if (ev.from != pc_.payee && !node(ev.from).holds_release) {
            res_.trace.add(now_, ev.from, ev.to, "ConsistencyViolation", c.channel.number, 0);
            ++res_.consistency_violations;
        }
        g_.settle(c.channel, c.value);
        c.state = ContractState::released;
        NodeRt& n = node(i);
        n.holds_release = true;
        if (i == pc_.payer) return;
        release_upstream(i, ev.contract, ev.r);
    }

    Scalar incoming_release(NodeId i, std::size_t out_contract, const Scalar& r, const ChannelId& in) {
        NodeRt& n = node(i);
        Scalar r_next = r;
        if (n.D.tuples.size() > 1) {
            for (const auto& t : n.D.tuples) {
                if (t.channel.number == contracts_[out_contract].channel.number) r_next += t.adjustment;
            }
        }
        return compute_release(r_next, n.x_j, in);
    }

    void release_upstream(NodeId i, std::size_t out_contract, const Scalar& r) {
        NodeRt& n = node(i);
        if (n.release) return;
        const Strategy s = adv_.of(i);
        if (s == Strategy::withhold_release) return;
        if (s == Strategy::skip_release_collude && adv_.colluders && adv_.colluders->second == i) {
            n.release = true;
            Scalar shared;
            bool have = false;
            for (std::size_t e : n.in) {
                if (contracts_[e].state != ContractState::locked) continue;
                if (!have) {
                    shared = incoming_release(i, out_contract, r, contracts_[e].channel);
                    have = true;
                }
                send_abort(i, e);
            }
            if (have) queue_.push(now_, Event{Kind::collude, i, adv_.colluders->first, out_contract, shared, {}});
            return;
        }
        n.release = true;
        for (std::size_t e : n.in) {
            const Contract& c = contracts_[e];
            if (c.state != ContractState::locked) continue;
            send(Kind::accept, i, c.channel.from, e, incoming_release(i, out_contract, r, c.channel));
        }
    }

    // Upstream colluder: treat the shared scalar as if its successor had
    // released it.
    void on_collude(const Event& ev) {
        const NodeId up = ev.to;
        NodeRt& n = node(up);
        if (n.release) return;
        n.release = true;
        for (std::size_t e : n.in) {
            const Contract& c = contracts_[e];
            if (c.state != ContractState::locked) continue;
            send(Kind::accept, up, c.channel.from, e, compute_release(ev.r, n.x_j, c.channel));
        }
    }

    // ---- abort and expiry

    void on_abort(const Event& ev) {
        Contract& c = contracts_[ev.contract];
        if (c.state != ContractState::locked) return;
        g_.unlock(c.channel, c.value);
        c.state = ContractState::aborted;
        propagate_abort(ev.to);
    }

    void on_expire(const Event& ev) {
        Contract& c = contracts_[ev.contract];
        if (c.state != ContractState::locked) return;
        g_.unlock(c.channel, c.value);
        c.state = ContractState::expired;
        res_.trace.add(now_, c.channel.from, c.channel.to, "expire", c.channel.number, 0);
        last_activity_ = now_;
        propagate_abort(c.channel.from);
    }

    // Abort upstream only once no outgoing contract can still pay us.
    void propagate_abort(NodeId i) {
        if (i == pc_.payer) return;
        NodeRt& n = node(i);
        if (n.release) return;
        for (std::size_t e : n.out) {
            if (contracts_[e].state == ContractState::locked) return;
        }
        n.failed = true;
        for (std::size_t e : n.in) send_abort(i, e);
    }

    Outcome classify() const {
        if (contracts_.empty()) return Outcome::aborted;
        std::size_t released = 0;
        for (const auto& c : contracts_) released += c.state == ContractState::released;
        if (released == contracts_.size() && res_.full_success_gains()) return Outcome::success;
        if (released == 0) return Outcome::aborted;
        return Outcome::partial;
    }

    pcn::PaymentGraph& g_;
    const routing::EdgeSet& pc_;
    const SimConfig& cfg_;
    const Corruption& adv_;
    Rng root_;
    KeyDirectory keys_;
    lock::EcdsaLock ecdsa_;
    ReceiverSecret receiver_;
    ConditionTable table_;

    EventQueue<Event> queue_;
    Tick now_ = 0;
    Tick last_activity_ = 0;
    Tick window_ = 1;
    std::vector<Contract> contracts_;
    std::unordered_map<NodeId, NodeRt> nodes_;
    RunResult res_;
};

}  // namespace

routing::EdgeSet prepare_edge_set(const pcn::PaymentGraph& graph, const routing::PathSet& paths,
                                  const SimConfig& config) {
    return routing::assign_timeouts(routing::paths_to_edge_set(paths, graph), config.t_end, config.Delta);
}

RunResult run_simulation(pcn::PaymentGraph& graph, const routing::EdgeSet& pc, const SimConfig& config,
                         const Corruption& corruption) {
    config.validate();
    Run run(graph, pc, config, corruption);
    RunResult r = run.execute();
    r.metrics.ttp_ms = r.metrics.protocol_ms + static_cast<double>(r.metrics.sim_ticks) * config.tick_ms;
    return r;
}

RunResult run_payment(pcn::PaymentGraph& graph, const PaymentRequest& request, const SimConfig& config,
                      const Corruption& corruption, const routing::RouterOptions& router) {
    config.validate();
    const auto t0 = Clock::now();
    routing::PathSet paths;
    try {
        paths = routing::find_paths(graph, request.payer, request.payee, request.amount, router);
    } catch (const NoRoute& e) {
        RunResult r;
        r.outcome = Outcome::no_route;
        r.payer = request.payer;
        r.payee = request.payee;
        r.value = request.amount;
        r.metrics.routing_ms = ms_since(t0);
        r.metrics.ttp_ms = r.metrics.routing_ms;
        r.note = e.what();
        return r;
    }
    const auto pc = prepare_edge_set(graph, paths, config);
    const double routing_ms = ms_since(t0);
    RunResult r = run_simulation(graph, pc, config, corruption);
    r.metrics.routing_ms = routing_ms;
    r.metrics.ttp_ms += routing_ms;
    r.n_shared_edges = 0;
    std::map<std::pair<NodeId, NodeId>, std::size_t> uses;
    for (const auto& p : paths.paths) {
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) ++uses[{p.nodes[i], p.nodes[i + 1]}];
    }
    for (const auto& [_, k] : uses) r.n_shared_edges += k > 1;
    return r;
}

std::vector<RunResult> run_payments(pcn::PaymentGraph& graph, const std::vector<PaymentRequest>& requests,
                                    const SimConfig& config, const Corruption& corruption) {
    std::vector<RunResult> out;
    out.reserve(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
        SimConfig c = config;
        c.seed = crypto::Rng(config.seed).fork(i).next();
        out.push_back(run_payment(graph, requests[i], c, corruption));
    }
    return out;
}

}  // namespace cryptomaze::protocol
