#pragma once

// Onion payload wire format (version 1), all integers big-endian:
//
//   u8  version = 1
//   u8  kind    = 1 (intermediate) | 2 (payee)
//   intermediate:
//     u16 tuple count
//     per tuple: u64 channel number, u32 next node, i64 value,
//                32-byte x_{j,k}, u8 len + point R_{j,k}, i64 timeout,
//                u32 len + sealed blob Z_{j,k}
//   payee:
//     32-byte y share, i64 t_end

#include <map>
#include <variant>
#include <vector>

#include "cryptomaze/crypto/seal.hpp"
#include "cryptomaze/protocol/conditions.hpp"

namespace cryptomaze::protocol {

using crypto::Bytes;
using crypto::ByteView;
using crypto::SealedBlob;

inline constexpr std::uint8_t kOnionVersion = 1;

struct HopTuple {
    ChannelId channel;  // from = the decrypting node, to = next hop
    Coins value = 0;
    Scalar adjustment;
    Point condition;
    Tick timeout = 0;
    SealedBlob next;

    friend bool operator==(const HopTuple&, const HopTuple&) = default;
};

struct IntermediatePayload {
    std::vector<HopTuple> tuples;
    friend bool operator==(const IntermediatePayload&, const IntermediatePayload&) = default;
};

struct PayeePayload {
    Scalar y_share;
    Tick t_end = 0;
    friend bool operator==(const PayeePayload&, const PayeePayload&) = default;
};

using Payload = std::variant<IntermediatePayload, PayeePayload>;

/// `self` is the node that will decrypt the payload (needed to rebuild the
/// channel ids of intermediate tuples).
Bytes encode_payload(const Payload& p);
/// Throws EncodingError on malformed input or an unknown version.
Payload decode_payload(ByteView bytes, NodeId self);

/// Z_{i,j} for every edge (parallel to pc.edges). A node with several
/// predecessors gets the same plaintext sealed once per predecessor.
/// Throws MissingKey if a node of the edge set has no public key.
std::vector<SealedBlob> build_onions(const ConditionTable& table, const EdgeSet& pc,
                                     const std::map<NodeId, Point>& public_keys, Rng& rng);

}  // namespace cryptomaze::protocol
