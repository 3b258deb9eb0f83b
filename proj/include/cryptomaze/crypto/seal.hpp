#pragma once

// Per-hop hybrid authenticated encryption for onion payloads.
//
// seal() draws an ephemeral key e, derives K = SHA-256(x(e·pk) || e·G || pk)
// and encrypts with AES-256-GCM under a zero nonce (K is single-use).
// Wire layout: ephemeral point (compressed) || ciphertext || 16-byte tag.

#include <cstddef>

#include "cryptomaze/crypto/group.hpp"

namespace cryptomaze::crypto {

inline constexpr std::size_t kSealTagSize = 16;
inline constexpr std::size_t kDefaultMaxSealedPayload = std::size_t{64} << 20;

struct SealedBlob {
    Bytes bytes;

    [[nodiscard]] std::size_t size() const { return bytes.size(); }
    friend bool operator==(const SealedBlob&, const SealedBlob&) = default;
};

/// Bytes added to a payload by seal().
std::size_t seal_overhead();

SealedBlob seal(const Point& recipient_pub, ByteView payload, Rng& rng,
                std::size_t max_payload = kDefaultMaxSealedPayload);

/// Throws AuthFailure on a wrong key, tampering, or a malformed blob.
Bytes unseal(const Scalar& recipient_secret, const SealedBlob& blob);

}  // namespace cryptomaze::crypto
