#include "doctest.h"
#include "oracles.hpp"

#include "cryptomaze/errors.hpp"
#include "cryptomaze/lock/ecdsa_lock.hpp"
#include "cryptomaze/pcn/fixtures.hpp"
#include "cryptomaze/protocol/conditions.hpp"

using namespace cryptomaze;
using namespace cryptomaze::lock;
using crypto::Bytes;

namespace {

const Bytes kMsg{'c', 'l', 'o', 's', 'e', '#', '7'};

}  // namespace

TEST_CASE("completed pre-signatures verify, also under OpenSSL") {
    EcdsaLock lk(Rng(1));
    Rng rng(2);
    for (SessionId s = 0; s < 100; ++s) {
        const Scalar r = Scalar::random(rng);
        const Point R = Point::mul_base(r);
        const SharedKey key = lk.keygen(s, 1, 2);
        const PreSignature pre = lk.lock(s, kMsg, R);
        CHECK(pre.locked_to == R);
        CHECK(lk.verify(s, kMsg, r, pre, key.pk));
        const Signature sig = complete(pre, r);
        CHECK(ecdsa_verify(key.pk, kMsg, sig));
        CHECK(oracle::openssl_ecdsa_verify(key.pk, kMsg, sig.r, sig.s));
    }
}

TEST_CASE("wrong witnesses are rejected") {
    EcdsaLock lk(Rng(3));
    Rng rng(4);
    const Scalar r = Scalar::random(rng);
    const SharedKey key = lk.keygen(9, 1, 2);
    const PreSignature pre = lk.lock(9, kMsg, Point::mul_base(r));
    const Scalar one = Scalar::from_u64(1);
    CHECK_FALSE(lk.verify(9, kMsg, r + one, pre, key.pk));
    CHECK_FALSE(lk.verify(9, kMsg, -r, pre, key.pk));
    CHECK_FALSE(ecdsa_verify(key.pk, kMsg, complete(pre, r + one)));
    CHECK_FALSE(oracle::openssl_ecdsa_verify(key.pk, kMsg, complete(pre, r + one).r, complete(pre, r + one).s));

    const Bytes other{'x'};
    CHECK_FALSE(ecdsa_verify(key.pk, other, complete(pre, r)));
}

TEST_CASE("session errors") {
    EcdsaLock lk(Rng(5));
    Rng rng(6);
    const Point R = Point::mul_base(Scalar::random(rng));
    const SharedKey key = lk.keygen(1, 1, 2);
    CHECK(lk.has_session(1));
    CHECK_FALSE(key.pk.is_identity());
    CHECK(Point::decode(key.pk.encode()) == key.pk);
    CHECK(lk.keygen(2, 1, 2).pk != key.pk);
    CHECK_THROWS_AS((void)lk.keygen(1, 1, 2), DuplicateSession);

    CHECK_THROWS_AS((void)lk.lock(7, kMsg, R), NoKey);
    CHECK_THROWS_AS((void)lk.lock(1, kMsg, Point::identity()), InvalidParam);
    PreSignature dummy;
    CHECK_THROWS_AS((void)lk.verify(1, kMsg, Scalar::from_u64(1), dummy, key.pk), NotLocked);
    (void)lk.lock(1, kMsg, R);
    CHECK_THROWS_AS((void)lk.lock(1, kMsg, R), AlreadyLocked);
}

TEST_CASE("a released condition scalar completes the channel signature") {
    pcn::Fixture f = pcn::diamond_example();
    const auto pc = routing::assign_timeouts(
        routing::paths_to_edge_set(routing::find_paths(f.graph, f.payer, f.payee, f.amount), f.graph), 100, 10);
    Rng rng(8);
    const auto rs = protocol::receiver_init(rng);
    const auto t = protocol::build_conditions(pc, rs.X_r, rng);
    const auto r = protocol::simulate_release(t, pc, rs.x_r);

    EcdsaLock lk(Rng(9));
    for (std::size_t i = 0; i < pc.size(); ++i) {
        const auto& ch = pc.edges[i].channel;
        const SharedKey key = lk.keygen(ch.number, ch.from, ch.to);
        const PreSignature pre = lk.lock(ch.number, kMsg, t.conditions[i].R);
        CHECK(lk.verify(ch.number, kMsg, r[i], pre, key.pk));
        const Signature sig = complete(pre, r[i]);
        CHECK(oracle::openssl_ecdsa_verify(key.pk, kMsg, sig.r, sig.s));
    }
}

TEST_CASE("message_hash takes the leftmost order bits") {
    const crypto::Digest d = crypto::sha256(kMsg);
    // secp224r1: the top 224 bits of the digest, i.e. its first 28 bytes
    const Scalar expect = Scalar::reduce(crypto::ByteView(d.data(), 28));
    CHECK(message_hash(kMsg) == expect);
}
