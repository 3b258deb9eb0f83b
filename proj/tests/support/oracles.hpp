#pragma once

// Test-side reference computations. These go straight to OpenSSL or use
// textbook algorithms so they do not share code with the library paths
// they check.

#define OPENSSL_SUPPRESS_DEPRECATED

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/ecdsa.h>
#include <openssl/obj_mac.h>
#include <openssl/objects.h>
#include <openssl/sha.h>

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "cryptomaze/crypto/group.hpp"
#include "cryptomaze/pcn/graph.hpp"
#include "cryptomaze/protocol/conditions.hpp"
#include "cryptomaze/routing/paths.hpp"

namespace oracle {

using cryptomaze::crypto::Bytes;
using cryptomaze::crypto::ByteView;
using cryptomaze::crypto::Point;
using cryptomaze::crypto::Scalar;
using cryptomaze::pcn::Coins;
using cryptomaze::pcn::NodeId;
using cryptomaze::pcn::PaymentGraph;

inline int curve_nid() { return OBJ_sn2nid(cryptomaze::crypto::curve_name().c_str()); }

// SHA-256(x || be64(channel)) mod q, computed with BIGNUM arithmetic.
inline Scalar hash_to_scalar(const Scalar& x, std::uint64_t channel) {
    unsigned char in[40];
    std::copy(x.encoded().begin(), x.encoded().end(), in);
    for (int i = 0; i < 8; ++i) in[32 + i] = static_cast<unsigned char>(channel >> (8 * (7 - i)));
    unsigned char d[32];
    SHA256(in, sizeof in, d);

    EC_GROUP* group = EC_GROUP_new_by_curve_name(curve_nid());
    BN_CTX* ctx = BN_CTX_new();
    BIGNUM* h = BN_bin2bn(d, 32, nullptr);
    BIGNUM* r = BN_new();
    BN_mod(r, h, EC_GROUP_get0_order(group), ctx);
    unsigned char out[32] = {};
    BN_bn2binpad(r, out, 32);
    BN_free(r);
    BN_free(h);
    BN_CTX_free(ctx);
    EC_GROUP_free(group);
    return Scalar::decode(ByteView(out, 32));
}

// ECDSA verification by OpenSSL on SHA-256(m).
inline bool openssl_ecdsa_verify(const Point& pk, ByteView m, const Scalar& r, const Scalar& s) {
    EC_KEY* key = EC_KEY_new_by_curve_name(curve_nid());
    const Bytes enc = pk.encode();
    EC_POINT* p = EC_POINT_new(EC_KEY_get0_group(key));
    bool ok = EC_POINT_oct2point(EC_KEY_get0_group(key), p, enc.data(), enc.size(), nullptr) == 1 &&
              EC_KEY_set_public_key(key, p) == 1;
    EC_POINT_free(p);
    if (ok) {
        unsigned char d[32];
        SHA256(m.data(), m.size(), d);
        ECDSA_SIG* sig = ECDSA_SIG_new();
        ECDSA_SIG_set0(sig, BN_bin2bn(r.encoded().data(), 32, nullptr), BN_bin2bn(s.encoded().data(), 32, nullptr));
        ok = ECDSA_do_verify(d, 32, sig, key) == 1;
        ECDSA_SIG_free(sig);
    }
    EC_KEY_free(key);
    return ok;
}

// Edmonds-Karp on per-direction capacities, ignoring fees.
inline Coins max_flow(const PaymentGraph& g, NodeId s, NodeId t) {
    std::map<NodeId, std::map<NodeId, Coins>> res;
    for (const auto& c : g.channels()) {
        res[c.u][c.v] += c.cap_uv;
        res[c.v][c.u] += c.cap_vu;
    }
    Coins total = 0;
    for (;;) {
        std::map<NodeId, NodeId> parent;
        std::deque<NodeId> q{s};
        parent[s] = s;
        while (!q.empty() && !parent.contains(t)) {
            const NodeId u = q.front();
            q.pop_front();
            for (const auto& [v, c] : res[u]) {
                if (c > 0 && !parent.contains(v)) {
                    parent[v] = u;
                    q.push_back(v);
                }
            }
        }
        if (!parent.contains(t)) return total;
        Coins push = std::numeric_limits<Coins>::max();
        for (NodeId v = t; v != s; v = parent[v]) push = std::min(push, res[parent[v]][v]);
        for (NodeId v = t; v != s; v = parent[v]) {
            res[parent[v]][v] -= push;
            res[v][parent[v]] += push;
        }
        total += push;
    }
}

struct FlowDag {
    PaymentGraph graph;
    cryptomaze::routing::PathSet paths;
};

// Random DAG flow on nodes 0..n-1 (payer 0, payee n-1): every path walks
// upward in node id, so the union is acyclic and never uses a channel in
// both directions.
inline FlowDag random_flow_dag(cryptomaze::crypto::Rng& rng, std::size_t max_nodes) {
    const auto n = static_cast<NodeId>(3 + rng.below(max_nodes - 2));
    FlowDag out;
    const std::size_t n_paths = 1 + rng.below(5);
    std::set<std::pair<NodeId, NodeId>> edges;
    out.paths.source = 0;
    out.paths.sink = n - 1;
    for (std::size_t p = 0; p < n_paths; ++p) {
        cryptomaze::routing::Path path;
        NodeId at = 0;
        path.nodes.push_back(0);
        while (at != n - 1) {
            const NodeId step = static_cast<NodeId>(1 + rng.below(std::max<NodeId>(1, (n - 1 - at) / 2 + 1)));
            at = std::min<NodeId>(n - 1, at + step);
            path.nodes.push_back(at);
        }
        path.amount = static_cast<Coins>(1 + rng.below(1000));
        for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) edges.insert({path.nodes[i], path.nodes[i + 1]});
        out.paths.paths.push_back(path);
        out.paths.value += path.amount;
    }
    for (NodeId v = 0; v < n; ++v) {
        out.graph.add_node(v);
        out.graph.set_fee(v, static_cast<Coins>(rng.below(3)));
    }
    std::uint64_t number = 1;
    for (const auto& [a, b] : edges) out.graph.add_channel(number++, a, b, 1'000'000, 1'000'000);
    return out;
}

// Release scalars from the payee backwards, following the condition
// equations directly: payee-adjacent r = H(y||id)y + x_r; an incoming edge
// of j takes H(x_j||id)x_j plus the first outgoing release, plus that
// edge's x_{j,k} when j splits.
inline std::vector<Scalar> release_recursion(const cryptomaze::protocol::ConditionTable& t,
                                             const cryptomaze::routing::EdgeSet& pc, const Scalar& x_r) {
    std::vector<std::optional<Scalar>> r(pc.size());
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < pc.size(); ++i) {
            if (r[i]) continue;
            const auto& ch = pc.edges[i].channel;
            if (ch.to == pc.payee) {
                r[i] = oracle::hash_to_scalar(t.y, ch.number) * t.y + x_r;
                progress = true;
                continue;
            }
            const auto outs = pc.out_edges(ch.to);
            if (outs.empty() || !r[outs.front()]) continue;
            const Scalar xj = t.node_secret.at(ch.to);
            Scalar v = oracle::hash_to_scalar(xj, ch.number) * xj + *r[outs.front()];
            if (outs.size() > 1) v += t.adjustment[outs.front()];
            r[i] = v;
            progress = true;
        }
    }
    std::vector<Scalar> out;
    for (const auto& v : r) out.push_back(v.value_or(Scalar()));
    return out;
}

}  // namespace oracle
