#pragma once

// Prime-order elliptic-curve group used for contract conditions.
//
// The curve is fixed at build time (CRYPTOMAZE_CURVE, default secp224r1) and
// backed by OpenSSL. Everything above this header treats the group
// abstractly: scalars mod q, points, and their canonical encodings.
//
// Canonical encodings (these are hashed and counted as message bytes):
//   Scalar: 32-byte big-endian, value < q.
//   Point:  SEC1 compressed form; the identity encodes as the single byte 0x00.

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>

#include "cryptomaze/crypto/bytes.hpp"

struct ec_point_st;

namespace cryptomaze::crypto {

/// Deterministic random source for simulations. Not a CSPRNG: every draw is
/// reproducible from the seed, which the simulator needs for replayable runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next() { return engine_(); }
    void fill(std::span<std::uint8_t> out);
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    double uniform01();

    /// Independent child stream; forks with different labels do not overlap
    /// in practice (seeds are mixed through splitmix64).
    [[nodiscard]] Rng fork(std::uint64_t label) const;

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

class Scalar {
public:
    static constexpr std::size_t kEncodedSize = 32;
    using Encoded = std::array<std::uint8_t, kEncodedSize>;

    Scalar() = default;  // zero

    static Scalar from_u64(std::uint64_t v);
    /// Interprets big-endian bytes (any length) and reduces mod q.
    static Scalar reduce(ByteView bytes);
    /// Strict decoding of the canonical 32-byte form; rejects values >= q.
    static Scalar decode(ByteView bytes);
    /// Uniform in [0, q) by rejection sampling.
    static Scalar random(Rng& rng);

    [[nodiscard]] const Encoded& encoded() const { return value_; }
    [[nodiscard]] bool is_zero() const;

    Scalar operator+(const Scalar& other) const;
    Scalar operator-(const Scalar& other) const;
    Scalar operator*(const Scalar& other) const;
    Scalar operator-() const;
    Scalar& operator+=(const Scalar& other) { return *this = *this + other; }
    /// Multiplicative inverse; throws InvalidParam for zero.
    [[nodiscard]] Scalar inverse() const;

    friend bool operator==(const Scalar&, const Scalar&) = default;
    friend auto operator<=>(const Scalar&, const Scalar&) = default;

private:
    Encoded value_{};
};

class Point {
public:
    Point();  // identity
    Point(const Point& other);
    Point(Point&& other) noexcept;
    Point& operator=(const Point& other);
    Point& operator=(Point&& other) noexcept;
    ~Point();

    static Point identity() { return Point(); }
    static const Point& generator();
    /// s·G
    static Point mul_base(const Scalar& s);
    /// Decodes the compressed form; throws EncodingError if not on the curve.
    static Point decode(ByteView bytes);

    [[nodiscard]] Bytes encode() const;
    [[nodiscard]] bool is_identity() const;
    /// Affine x-coordinate reduced mod q (ECDSA's r). Identity maps to zero.
    [[nodiscard]] Scalar x_mod_order() const;

    Point operator+(const Point& other) const;
    Point operator-(const Point& other) const;
    Point operator*(const Scalar& s) const;
    Point operator-() const;
    Point& operator+=(const Point& other) { return *this = *this + other; }

    friend bool operator==(const Point& a, const Point& b);

private:
    struct Deleter {
        void operator()(ec_point_st* p) const;
    };
    explicit Point(ec_point_st* raw) : p_(raw) {}

    std::unique_ptr<ec_point_st, Deleter> p_;
};

/// Length of a compressed non-identity point for the configured curve.
std::size_t point_encoded_size();
/// Bit length of the group order q.
int order_bits();
std::string curve_name();

using Digest = std::array<std::uint8_t, 32>;
Digest sha256(ByteView data);

/// Blinding factor H(secret || channel-number) reduced mod q. The channel
/// number is serialized as 8 bytes big-endian.
Scalar hash_to_scalar(const Scalar& secret, std::uint64_t channel_number);

struct HopKeyPair {
    Scalar secret;
    Point public_key;

    static HopKeyPair generate(Rng& rng);
};

}  // namespace cryptomaze::crypto
