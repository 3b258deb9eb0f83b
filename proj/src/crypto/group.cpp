#include "cryptomaze/crypto/group.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>
#include <openssl/objects.h>

#include <cstring>
#include <limits>

#ifndef CRYPTOMAZE_CURVE_NAME
#define CRYPTOMAZE_CURVE_NAME "secp224r1"
#endif

namespace cryptomaze::crypto {

namespace {

struct BnDeleter {
    void operator()(BIGNUM* p) const { BN_free(p); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;

struct BnCtxDeleter {
    void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};

BN_CTX* ctx() {
    thread_local std::unique_ptr<BN_CTX, BnCtxDeleter> c(BN_CTX_new());
    return c.get();
}

BnPtr new_bn() {
    BnPtr bn(BN_new());
    if (!bn) throw Error("BN_new failed");
    return bn;
}

struct Curve {
    EC_GROUP* group = nullptr;
    BIGNUM* order = nullptr;
    int bits = 0;
    std::size_t point_len = 0;
    std::string name;

    Curve() {
        name = CRYPTOMAZE_CURVE_NAME;
        int nid = OBJ_sn2nid(name.c_str());
        if (nid == NID_undef) throw Error("unknown curve: " + name);
        group = EC_GROUP_new_by_curve_name(nid);
        if (!group) throw Error("EC_GROUP_new_by_curve_name failed for " + name);
        order = BN_new();
        if (!order || !EC_GROUP_get_order(group, order, nullptr)) {
            throw Error("EC_GROUP_get_order failed");
        }
        bits = BN_num_bits(order);
        if (bits > 256) throw Error("curve order exceeds 256 bits: " + name);
        point_len = 1 + static_cast<std::size_t>((EC_GROUP_get_degree(group) + 7) / 8);
    }
    ~Curve() {
        BN_free(order);
        EC_GROUP_free(group);
    }
    Curve(const Curve&) = delete;
    Curve& operator=(const Curve&) = delete;
};

const Curve& curve() {
    static const Curve c;
    return c;
}

BnPtr to_bn(const Scalar& s) {
    BnPtr bn(BN_bin2bn(s.encoded().data(), static_cast<int>(Scalar::kEncodedSize), nullptr));
    if (!bn) throw Error("BN_bin2bn failed");
    return bn;
}

Scalar::Encoded encode_bn(const BIGNUM* bn) {
    Scalar::Encoded out{};
    if (BN_bn2binpad(bn, out.data(), static_cast<int>(out.size())) < 0) {
        throw Error("BN_bn2binpad failed");
    }
    return out;
}

EC_POINT* new_point() {
    EC_POINT* p = EC_POINT_new(curve().group);
    if (!p) throw Error("EC_POINT_new failed");
    return p;
}

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

// ---------------------------------------------------------------------------
// Rng

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s)),
                      static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s))};
    engine_.seed(seq);
}

void Rng::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t v = engine_();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(v >> (8 * b));
        }
    }
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw InvalidParam("Rng::below with zero bound");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % bound;
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Rng Rng::fork(std::uint64_t label) const {
    std::uint64_t s = seed_ ^ (label * 0xd1b54a32d192ed03ULL);
    return Rng(splitmix64(s));
}

// ---------------------------------------------------------------------------
// Scalar

Scalar Scalar::from_u64(std::uint64_t v) {
    Bytes b(8);
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * (7 - i)));
    return reduce(b);
}

Scalar Scalar::reduce(ByteView bytes) {
    BnPtr bn(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
    if (!bn) throw Error("BN_bin2bn failed");
    BnPtr r = new_bn();
    if (!BN_nnmod(r.get(), bn.get(), curve().order, ctx())) throw Error("BN_nnmod failed");
    Scalar s;
    s.value_ = encode_bn(r.get());
    return s;
}

Scalar Scalar::decode(ByteView bytes) {
    if (bytes.size() != kEncodedSize) {
        throw EncodingError("scalar encoding must be 32 bytes, got " + std::to_string(bytes.size()));
    }
    BnPtr bn(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
    if (!bn) throw Error("BN_bin2bn failed");
    if (BN_cmp(bn.get(), curve().order) >= 0) throw EncodingError("scalar not reduced mod q");
    Scalar s;
    std::memcpy(s.value_.data(), bytes.data(), kEncodedSize);
    return s;
}

Scalar Scalar::random(Rng& rng) {
    const int bits = curve().bits;
    const std::size_t nbytes = static_cast<std::size_t>((bits + 7) / 8);
    const int excess = static_cast<int>(nbytes * 8) - bits;
    Bytes buf(nbytes);
    for (;;) {
        rng.fill(buf);
        buf[0] &= static_cast<std::uint8_t>(0xFF >> excess);
        BnPtr bn(BN_bin2bn(buf.data(), static_cast<int>(buf.size()), nullptr));
        if (!bn) throw Error("BN_bin2bn failed");
        if (BN_cmp(bn.get(), curve().order) < 0) {
            Scalar s;
            s.value_ = encode_bn(bn.get());
            return s;
        }
    }
}

bool Scalar::is_zero() const {
    for (auto b : value_) {
        if (b != 0) return false;
    }
    return true;
}

Scalar Scalar::operator+(const Scalar& other) const {
    auto a = to_bn(*this), b = to_bn(other);
    BnPtr r = new_bn();
    if (!BN_mod_add(r.get(), a.get(), b.get(), curve().order, ctx())) throw Error("BN_mod_add failed");
    Scalar s;
    s.value_ = encode_bn(r.get());
    return s;
}

Scalar Scalar::operator-(const Scalar& other) const {
    auto a = to_bn(*this), b = to_bn(other);
    BnPtr r = new_bn();
    if (!BN_mod_sub(r.get(), a.get(), b.get(), curve().order, ctx())) throw Error("BN_mod_sub failed");
    Scalar s;
    s.value_ = encode_bn(r.get());
    return s;
}

Scalar Scalar::operator*(const Scalar& other) const {
    auto a = to_bn(*this), b = to_bn(other);
    BnPtr r = new_bn();
    if (!BN_mod_mul(r.get(), a.get(), b.get(), curve().order, ctx())) throw Error("BN_mod_mul failed");
    Scalar s;
    s.value_ = encode_bn(r.get());
    return s;
}

Scalar Scalar::operator-() const { return Scalar() - *this; }

Scalar Scalar::inverse() const {
    if (is_zero()) throw InvalidParam("inverse of zero scalar");
    auto a = to_bn(*this);
    BnPtr r(BN_mod_inverse(nullptr, a.get(), curve().order, ctx()));
    if (!r) throw Error("BN_mod_inverse failed");
    Scalar s;
    s.value_ = encode_bn(r.get());
    return s;
}

// ---------------------------------------------------------------------------
// Point

void Point::Deleter::operator()(ec_point_st* p) const { EC_POINT_free(p); }

Point::Point() : p_(new_point()) {
    EC_POINT_set_to_infinity(curve().group, p_.get());
}

Point::Point(const Point& other) : p_(EC_POINT_dup(other.p_.get(), curve().group)) {
    if (!p_) throw Error("EC_POINT_dup failed");
}

Point::Point(Point&& other) noexcept : p_(std::move(other.p_)) {}

Point& Point::operator=(const Point& other) {
    if (this != &other) {
        if (!EC_POINT_copy(p_.get(), other.p_.get())) throw Error("EC_POINT_copy failed");
    }
    return *this;
}

Point& Point::operator=(Point&& other) noexcept {
    p_.swap(other.p_);
    return *this;
}

Point::~Point() = default;

const Point& Point::generator() {
    static const Point g = [] {
        EC_POINT* p = EC_POINT_dup(EC_GROUP_get0_generator(curve().group), curve().group);
        if (!p) throw Error("EC_POINT_dup failed");
        return Point(p);
    }();
    return g;
}

Point Point::mul_base(const Scalar& s) {
    Point out(new_point());
    auto k = to_bn(s);
    if (!EC_POINT_mul(curve().group, out.p_.get(), k.get(), nullptr, nullptr, ctx())) {
        throw Error("EC_POINT_mul failed");
    }
    return out;
}

Point Point::decode(ByteView bytes) {
    Point out(new_point());
    if (bytes.empty() ||
        !EC_POINT_oct2point(curve().group, out.p_.get(), bytes.data(), bytes.size(), ctx())) {
        throw EncodingError("invalid point encoding");
    }
    // Only compressed form (or identity) is canonical.
    if (!(bytes.size() == 1 && bytes[0] == 0) &&
        !(bytes.size() == curve().point_len && (bytes[0] == 0x02 || bytes[0] == 0x03))) {
        throw EncodingError("non-canonical point encoding");
    }
    return out;
}

Bytes Point::encode() const {
    if (is_identity()) return Bytes{0x00};
    Bytes out(curve().point_len);
    std::size_t n = EC_POINT_point2oct(curve().group, p_.get(), POINT_CONVERSION_COMPRESSED, out.data(),
                                       out.size(), ctx());
    if (n != out.size()) throw Error("EC_POINT_point2oct failed");
    return out;
}

bool Point::is_identity() const { return EC_POINT_is_at_infinity(curve().group, p_.get()) == 1; }

Scalar Point::x_mod_order() const {
    if (is_identity()) return Scalar();
    BnPtr x = new_bn();
    if (!EC_POINT_get_affine_coordinates(curve().group, p_.get(), x.get(), nullptr, ctx())) {
        throw Error("EC_POINT_get_affine_coordinates failed");
    }
    Bytes buf(static_cast<std::size_t>(BN_num_bytes(x.get())));
    BN_bn2bin(x.get(), buf.data());
    return Scalar::reduce(buf);
}

Point Point::operator+(const Point& other) const {
    Point out(new_point());
    if (!EC_POINT_add(curve().group, out.p_.get(), p_.get(), other.p_.get(), ctx())) {
        throw Error("EC_POINT_add failed");
    }
    return out;
}

Point Point::operator-() const {
    Point out(*this);
    if (!EC_POINT_invert(curve().group, out.p_.get(), ctx())) throw Error("EC_POINT_invert failed");
    return out;
}

Point Point::operator-(const Point& other) const { return *this + (-other); }

Point Point::operator*(const Scalar& s) const {
    Point out(new_point());
    auto k = to_bn(s);
    if (!EC_POINT_mul(curve().group, out.p_.get(), nullptr, p_.get(), k.get(), ctx())) {
        throw Error("EC_POINT_mul failed");
    }
    return out;
}

bool operator==(const Point& a, const Point& b) {
    int r = EC_POINT_cmp(curve().group, a.p_.get(), b.p_.get(), ctx());
    if (r < 0) throw Error("EC_POINT_cmp failed");
    return r == 0;
}

// ---------------------------------------------------------------------------

std::size_t point_encoded_size() { return curve().point_len; }
int order_bits() { return curve().bits; }
std::string curve_name() { return curve().name; }

Digest sha256(ByteView data) {
    Digest out{};
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) || len != out.size()) {
        throw Error("EVP_Digest(sha256) failed");
    }
    return out;
}

Scalar hash_to_scalar(const Scalar& secret, std::uint64_t channel_number) {
    ByteWriter w;
    w.raw(secret.encoded());
    w.u64(channel_number);
    const Digest d = sha256(w.bytes());
    return Scalar::reduce(d);
}

HopKeyPair HopKeyPair::generate(Rng& rng) {
    Scalar sk;
    do {
        sk = Scalar::random(rng);
    } while (sk.is_zero());
    return HopKeyPair{sk, Point::mul_base(sk)};
}

std::string to_hex(ByteView bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xF]);
    }
    return out;
}

}  // namespace cryptomaze::crypto
