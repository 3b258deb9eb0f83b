#pragma once

// Two-party ECDSA lock as a trusted functionality: it holds the channel's
// signing key, produces pre-signatures bound to a condition point R_cond,
// and accepts a completion witness r exactly when r·G = R_cond.

#include <cstdint>
#include <map>
#include <optional>

#include "cryptomaze/crypto/group.hpp"
#include "cryptomaze/pcn/graph.hpp"

namespace cryptomaze::lock {

using crypto::ByteView;
using crypto::Point;
using crypto::Rng;
using crypto::Scalar;

using SessionId = std::uint64_t;

struct SharedKey {
    SessionId session = 0;
    Point pk;
};

struct PreSignature {
    Scalar r_x;  // x(k·R_cond) mod q
    Scalar s;    // k^-1 (H(m) + r_x·sk)
    Point locked_to;
};

struct Signature {
    Scalar r;
    Scalar s;
};

/// Leftmost order-bits of SHA-256(m), reduced mod q (the ECDSA digest
/// convention).
Scalar message_hash(ByteView m);

/// Plain ECDSA verification.
bool ecdsa_verify(const Point& pk, ByteView m, const Signature& sig);

/// (r_x, s / r): the ordinary signature obtained once the witness is known.
Signature complete(const PreSignature& pre, const Scalar& r);

class EcdsaLock {
public:
    explicit EcdsaLock(Rng rng) : rng_(std::move(rng)) {}

    /// Throws DuplicateSession.
    SharedKey keygen(SessionId session, pcn::NodeId u_i, pcn::NodeId u_j);
    /// Throws NoKey, AlreadyLocked, or InvalidParam for the identity point.
    PreSignature lock(SessionId session, ByteView m, const Point& R_cond);
    /// Throws NotLocked.
    [[nodiscard]] bool verify(SessionId session, ByteView m, const Scalar& r_released, const PreSignature& pre,
                              const Point& pk) const;

    [[nodiscard]] bool has_session(SessionId session) const { return sessions_.contains(session); }

private:
    struct Entry {
        Scalar sk;
        Point pk;
        pcn::NodeId u_i = 0;
        pcn::NodeId u_j = 0;
        std::optional<PreSignature> locked;
        Point nonce;  // k·R_cond
    };

    Rng rng_;
    std::map<SessionId, Entry> sessions_;
};

}  // namespace cryptomaze::lock
