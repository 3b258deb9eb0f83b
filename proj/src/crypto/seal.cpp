#include "cryptomaze/crypto/seal.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

namespace cryptomaze::crypto {

namespace {

struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

constexpr std::array<std::uint8_t, 12> kNonce{};

Digest derive_key(const Point& shared, const Point& ephemeral, const Point& recipient) {
    ByteWriter w;
    w.raw(shared.x_mod_order().encoded());
    w.raw(ephemeral.encode());
    w.raw(recipient.encode());
    return sha256(w.bytes());
}

CipherCtx new_ctx() {
    CipherCtx c(EVP_CIPHER_CTX_new());
    if (!c) throw Error("EVP_CIPHER_CTX_new failed");
    return c;
}

}  // namespace

std::size_t seal_overhead() { return point_encoded_size() + kSealTagSize; }

SealedBlob seal(const Point& recipient_pub, ByteView payload, Rng& rng, std::size_t max_payload) {
    if (payload.size() > max_payload) {
        throw InvalidParam("payload of " + std::to_string(payload.size()) + " bytes exceeds limit " +
                           std::to_string(max_payload));
    }
    if (recipient_pub.is_identity()) throw InvalidParam("seal to identity point");

    const HopKeyPair eph = HopKeyPair::generate(rng);
    const Digest key = derive_key(recipient_pub * eph.secret, eph.public_key, recipient_pub);

    SealedBlob out;
    out.bytes = eph.public_key.encode();
    const std::size_t header = out.bytes.size();
    out.bytes.resize(header + payload.size() + kSealTagSize);

    auto c = new_ctx();
    int len = 0;
    if (!EVP_EncryptInit_ex(c.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) ||
        !EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(kNonce.size()), nullptr) ||
        !EVP_EncryptInit_ex(c.get(), nullptr, nullptr, key.data(), kNonce.data())) {
        throw Error("AES-GCM init failed");
    }
    if (!payload.empty() &&
        !EVP_EncryptUpdate(c.get(), out.bytes.data() + header, &len, payload.data(),
                           static_cast<int>(payload.size()))) {
        throw Error("AES-GCM encrypt failed");
    }
    int tail = 0;
    if (!EVP_EncryptFinal_ex(c.get(), out.bytes.data() + header + len, &tail)) {
        throw Error("AES-GCM final failed");
    }
    if (!EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kSealTagSize),
                             out.bytes.data() + header + payload.size())) {
        throw Error("AES-GCM get tag failed");
    }
    return out;
}

Bytes unseal(const Scalar& recipient_secret, const SealedBlob& blob) {
    const std::size_t plen = point_encoded_size();
    if (blob.bytes.size() < plen + kSealTagSize) throw AuthFailure("sealed blob too short");

    Point eph;
    try {
        eph = Point::decode(ByteView(blob.bytes).first(plen));
    } catch (const EncodingError&) {
        throw AuthFailure("sealed blob carries an invalid ephemeral key");
    }
    const Point recipient = Point::mul_base(recipient_secret);
    const Digest key = derive_key(eph * recipient_secret, eph, recipient);

    const std::size_t clen = blob.bytes.size() - plen - kSealTagSize;
    Bytes out(clen);
    auto c = new_ctx();
    int len = 0;
    if (!EVP_DecryptInit_ex(c.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) ||
        !EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(kNonce.size()), nullptr) ||
        !EVP_DecryptInit_ex(c.get(), nullptr, nullptr, key.data(), kNonce.data())) {
        throw Error("AES-GCM init failed");
    }
    if (clen > 0 && !EVP_DecryptUpdate(c.get(), out.data(), &len, blob.bytes.data() + plen,
                                       static_cast<int>(clen))) {
        throw AuthFailure("AES-GCM decrypt failed");
    }
    std::array<std::uint8_t, kSealTagSize> tag{};
    std::copy_n(blob.bytes.data() + plen + clen, kSealTagSize, tag.begin());
    if (!EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(tag.size()), tag.data())) {
        throw Error("AES-GCM set tag failed");
    }
    int tail = 0;
    if (EVP_DecryptFinal_ex(c.get(), out.data() + len, &tail) <= 0) {
        throw AuthFailure("authentication tag mismatch");
    }
    return out;
}

}  // namespace cryptomaze::crypto
