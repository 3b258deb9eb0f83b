#include "cryptomaze/lock/ecdsa_lock.hpp"

#include <algorithm>

namespace cryptomaze::lock {

Scalar message_hash(ByteView m) {
    const crypto::Digest d = crypto::sha256(m);
    const int bits = crypto::order_bits();
    if (bits >= 256) return Scalar::reduce(d);
    // keep the leftmost `bits` bits
    const std::size_t nbytes = static_cast<std::size_t>((bits + 7) / 8);
    crypto::Bytes head(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(nbytes));
    const int extra = static_cast<int>(nbytes * 8) - bits;
    if (extra > 0) {
        for (std::size_t i = head.size(); i-- > 0;) {
            head[i] = static_cast<std::uint8_t>(head[i] >> extra);
            if (i > 0) head[i] = static_cast<std::uint8_t>(head[i] | (head[i - 1] << (8 - extra)));
        }
    }
    return Scalar::reduce(head);
}

bool ecdsa_verify(const Point& pk, ByteView m, const Signature& sig) {
    if (sig.r.is_zero() || sig.s.is_zero() || pk.is_identity()) return false;
    const Scalar w = sig.s.inverse();
    const Point X = Point::mul_base(message_hash(m) * w) + pk * (sig.r * w);
    if (X.is_identity()) return false;
    return X.x_mod_order() == sig.r;
}

Signature complete(const PreSignature& pre, const Scalar& r) {
    return Signature{pre.r_x, pre.s * r.inverse()};
}

SharedKey EcdsaLock::keygen(SessionId session, pcn::NodeId u_i, pcn::NodeId u_j) {
    if (sessions_.contains(session)) throw DuplicateSession("session " + std::to_string(session) + " already has a key");
    Entry e;
    do {
        e.sk = Scalar::random(rng_);
    } while (e.sk.is_zero());
    e.pk = Point::mul_base(e.sk);
    e.u_i = u_i;
    e.u_j = u_j;
    SharedKey out{session, e.pk};
    sessions_.emplace(session, std::move(e));
    return out;
}

PreSignature EcdsaLock::lock(SessionId session, ByteView m, const Point& R_cond) {
    auto it = sessions_.find(session);
    if (it == sessions_.end()) throw NoKey("no key for session " + std::to_string(session));
    if (it->second.locked) throw AlreadyLocked("session " + std::to_string(session) + " is already locked");
    if (R_cond.is_identity()) throw InvalidParam("cannot lock to the identity point");

    const Scalar h = message_hash(m);
    PreSignature pre;
    pre.locked_to = R_cond;
    Point nonce;
    for (;;) {
        const Scalar k = Scalar::random(rng_);
        if (k.is_zero()) continue;
        nonce = R_cond * k;
        pre.r_x = nonce.x_mod_order();
        if (pre.r_x.is_zero()) continue;
        pre.s = k.inverse() * (h + pre.r_x * it->second.sk);
        if (pre.s.is_zero()) continue;
        break;
    }
    it->second.locked = pre;
    it->second.nonce = nonce;
    return pre;
}

bool EcdsaLock::verify(SessionId session, ByteView m, const Scalar& r_released, const PreSignature& pre,
                       const Point& pk) const {
    auto it = sessions_.find(session);
    if (it == sessions_.end() || !it->second.locked) {
        throw NotLocked("session " + std::to_string(session) + " has no lock");
    }
    if (r_released.is_zero()) return false;
    const Scalar s_prime = pre.s * r_released.inverse();
    if (s_prime.is_zero()) return false;
    const Point S = (Point::mul_base(message_hash(m)) + pk * pre.r_x) * s_prime.inverse();
    if (S.is_identity() || !(S.x_mod_order() == pre.r_x)) return false;
    // -r passes the x-coordinate test too; the stored nonce point tells them apart
    return S == it->second.nonce;
}

}  // namespace cryptomaze::lock
