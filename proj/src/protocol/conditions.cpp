#include "cryptomaze/protocol/conditions.hpp"

#include "cryptomaze/protocol/contract_checks.hpp"

namespace cryptomaze::protocol {

using crypto::hash_to_scalar;

ReceiverSecret receiver_init(Rng& rng) {
    ReceiverSecret s;
    do {
        s.x_r = Scalar::random(rng);
    } while (s.x_r.is_zero());
    s.X_r = Point::mul_base(s.x_r);
    return s;
}

const ChannelCondition& ConditionTable::at(const ChannelId& c) const {
    for (const auto& cc : conditions) {
        if (cc.channel == c) return cc;
    }
    throw InvalidParam("no condition for channel " + pcn::to_string(c));
}

ConditionTable build_conditions(const EdgeSet& pc, const Point& X_r, Rng& rng, ConditionVariant variant) {
    if (pc.edges.empty()) throw DegenerateEdgeSet("edge set is empty");
    const auto payee_in = pc.in_edges(pc.payee);
    if (payee_in.empty()) throw DegenerateEdgeSet("payee is not reachable in the edge set");

    ConditionTable t;
    t.payer = pc.payer;
    t.payee = pc.payee;
    t.X_r = X_r;
    t.conditions.resize(pc.edges.size());
    t.adjustment.resize(pc.edges.size());
    t.y_share.resize(pc.edges.size());
    for (std::size_t i = 0; i < pc.edges.size(); ++i) {
        t.conditions[i].channel = pc.edges[i].channel;
        t.conditions[i].value = pc.edges[i].value;
        t.conditions[i].timeout = pc.edges[i].timeout;
    }

    for (std::size_t idx : payee_in) {
        t.y_share[idx] = Scalar::random(rng);
        t.y += *t.y_share[idx];
    }

    for (NodeId j : routing::reverse_topological_nodes(pc)) {
        if (j == pc.payer) continue;
        const auto in = pc.in_edges(j);
        if (j == pc.payee) {
            for (std::size_t idx : in) {
                auto& c = t.conditions[idx];
                c.a = hash_to_scalar(t.y, c.channel.number) * t.y;
                c.R = Point::mul_base(c.a) + X_r;
            }
            continue;
        }

        const auto out = pc.out_edges(j);
        if (out.empty()) throw DegenerateEdgeSet("node " + std::to_string(j) + " has no outgoing edge");
        Scalar x_j;
        Point downstream;  // R_{j,k} (+ x_{j,k}·G when splitting); equal for every k
        Scalar a_down;
        if (out.size() == 1) {
            x_j = Scalar::random(rng);
            t.adjustment[out[0]] = x_j;
            downstream = t.conditions[out[0]].R;
            a_down = t.conditions[out[0]].a;
        } else {
            const Scalar x_hat = Scalar::random(rng);
            t.split_secret[j] = x_hat;
            for (std::size_t k : out) {
                t.adjustment[k] = x_hat - t.conditions[k].a;
                x_j += t.adjustment[k];
            }
            a_down = x_hat;
            if (variant == ConditionVariant::shared_split_condition) {
                const Scalar common = Scalar::random(rng);
                x_j = Scalar();
                for (std::size_t k : out) {
                    t.conditions[k].a = x_hat;
                    t.conditions[k].R = X_r + Point::mul_base(x_hat);
                    t.adjustment[k] = common;
                    x_j += common;
                }
                a_down = x_hat + common;
            }
            downstream = t.conditions[out[0]].R + Point::mul_base(t.adjustment[out[0]]);
        }
        t.node_secret[j] = x_j;
        for (std::size_t idx : in) {
            auto& c = t.conditions[idx];
            const Scalar ex = hash_to_scalar(x_j, c.channel.number) * x_j;
            c.R = Point::mul_base(ex) + downstream;
            c.a = ex + a_down;
        }
    }
    return t;
}

std::vector<Scalar> simulate_release(const ConditionTable& t, const EdgeSet& pc, const Scalar& x_r) {
    std::vector<Scalar> r(pc.edges.size());
    for (NodeId j : routing::reverse_topological_nodes(pc)) {
        if (j == pc.payer) continue;
        const auto in = pc.in_edges(j);
        if (j == pc.payee) {
            for (std::size_t idx : in) r[idx] = payee_release(t.y, x_r, pc.edges[idx].channel);
            continue;
        }
        const auto out = pc.out_edges(j);
        // any single successor suffices; use the first
        Scalar r_next = r[out[0]];
        if (out.size() > 1) r_next += t.adjustment[out[0]];
        const Scalar& x_j = t.node_secret.at(j);
        for (std::size_t idx : in) r[idx] = compute_release(r_next, x_j, pc.edges[idx].channel);
    }
    return r;
}

std::vector<std::string> audit_conditions(const ConditionTable& t, const EdgeSet& pc) {
    std::vector<std::string> failures;
    auto fail = [&](std::size_t idx, const std::string& what) {
        failures.push_back(pcn::to_string(pc.edges[idx].channel) + ": " + what);
    };
    const Point G = Point::generator();
    for (std::size_t i = 0; i < pc.edges.size(); ++i) {
        const auto& c = t.conditions[i];
        if (!(Point::mul_base(c.a) + t.X_r == c.R)) fail(i, "tracked dlog does not reproduce R");
    }
    for (NodeId j : pc.nodes()) {
        if (j == pc.payer) continue;
        const auto in = pc.in_edges(j);
        if (j == pc.payee) {
            for (std::size_t idx : in) {
                const auto& c = t.conditions[idx];
                const Scalar e = hash_to_scalar(t.y, c.channel.number);
                if (!(G * (e * t.y) + t.X_r == c.R)) fail(idx, "payee-adjacent condition mismatch");
            }
            continue;
        }
        const auto out = pc.out_edges(j);
        auto xs = t.node_secret.find(j);
        if (xs == t.node_secret.end()) {
            failures.push_back("node " + std::to_string(j) + " has no secret");
            continue;
        }
        const Scalar& x_j = xs->second;
        Scalar sum;
        for (std::size_t k : out) sum += t.adjustment[k];
        if (!(sum == x_j)) failures.push_back("node " + std::to_string(j) + ": x_j differs from sum of x_{j,k}");
        for (std::size_t idx : in) {
            const auto& c = t.conditions[idx];
            const Point blind = G * (hash_to_scalar(x_j, c.channel.number) * x_j);
            for (std::size_t k : out) {
                Point expect = blind + t.conditions[k].R;
                if (out.size() > 1) expect += G * t.adjustment[k];
                if (!(expect == c.R)) fail(idx, "recursion mismatch against successor " + pcn::to_string(pc.edges[k].channel));
            }
        }
    }
    return failures;
}

}  // namespace cryptomaze::protocol
