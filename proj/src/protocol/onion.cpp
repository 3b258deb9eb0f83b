#include "cryptomaze/protocol/onion.hpp"

namespace cryptomaze::protocol {

namespace {

constexpr std::uint8_t kIntermediate = 1;
constexpr std::uint8_t kPayee = 2;

}  // namespace

Bytes encode_payload(const Payload& p) {
    crypto::ByteWriter w;
    w.u8(kOnionVersion);
    if (const auto* mid = std::get_if<IntermediatePayload>(&p)) {
        w.u8(kIntermediate);
        if (mid->tuples.size() > 0xffff) throw InvalidParam("too many successor tuples");
        w.u16(static_cast<std::uint16_t>(mid->tuples.size()));
        for (const auto& t : mid->tuples) {
            w.u64(t.channel.number);
            w.u32(t.channel.to);
            w.i64(t.value);
            w.raw(t.adjustment.encoded());
            const Bytes pt = t.condition.encode();
            w.u8(static_cast<std::uint8_t>(pt.size()));
            w.raw(pt);
            w.i64(t.timeout);
            w.blob(t.next.bytes);
        }
    } else {
        const auto& leaf = std::get<PayeePayload>(p);
        w.u8(kPayee);
        w.raw(leaf.y_share.encoded());
        w.i64(leaf.t_end);
    }
    return std::move(w).take();
}

Payload decode_payload(ByteView bytes, NodeId self) {
    crypto::ByteReader r(bytes);
    if (r.u8() != kOnionVersion) throw EncodingError("unknown onion version");
    const std::uint8_t kind = r.u8();
    Payload out;
    if (kind == kIntermediate) {
        IntermediatePayload mid;
        const std::uint16_t n = r.u16();
        for (std::uint16_t i = 0; i < n; ++i) {
            HopTuple t;
            t.channel.number = r.u64();
            t.channel.from = self;
            t.channel.to = r.u32();
            t.value = r.i64();
            t.adjustment = Scalar::decode(r.raw(Scalar::kEncodedSize));
            const std::uint8_t plen = r.u8();
            t.condition = Point::decode(r.raw(plen));
            t.timeout = r.i64();
            const ByteView blob = r.blob();
            t.next.bytes.assign(blob.begin(), blob.end());
            mid.tuples.push_back(std::move(t));
        }
        out = std::move(mid);
    } else if (kind == kPayee) {
        PayeePayload leaf;
        leaf.y_share = Scalar::decode(r.raw(Scalar::kEncodedSize));
        leaf.t_end = r.i64();
        out = leaf;
    } else {
        throw EncodingError("unknown onion payload kind " + std::to_string(kind));
    }
    if (!r.done()) throw EncodingError("trailing bytes after onion payload");
    return out;
}

std::vector<SealedBlob> build_onions(const ConditionTable& table, const EdgeSet& pc,
                                     const std::map<NodeId, Point>& public_keys, Rng& rng) {
    auto key_of = [&](NodeId n) -> const Point& {
        auto it = public_keys.find(n);
        if (it == public_keys.end()) throw MissingKey("no public key for node " + std::to_string(n));
        return it->second;
    };
    for (NodeId n : pc.nodes()) {
        if (n != pc.payer) key_of(n);
    }

    std::vector<SealedBlob> z(pc.edges.size());
    for (NodeId j : routing::reverse_topological_nodes(pc)) {
        if (j == pc.payer) continue;
        const Point& pk = key_of(j);
        const auto in = pc.in_edges(j);
        if (j == pc.payee) {
            for (std::size_t idx : in) {
                const Bytes m = encode_payload(PayeePayload{*table.y_share[idx], pc.edges[idx].timeout});
                z[idx] = crypto::seal(pk, m, rng);
            }
            continue;
        }
        IntermediatePayload mid;
        for (std::size_t k : pc.out_edges(j)) {
            const auto& c = table.conditions[k];
            mid.tuples.push_back(HopTuple{c.channel, c.value, table.adjustment[k], c.R, c.timeout, z[k]});
        }
        const Bytes m = encode_payload(mid);
        for (std::size_t idx : in) z[idx] = crypto::seal(pk, m, rng);
    }
    return z;
}

}  // namespace cryptomaze::protocol
