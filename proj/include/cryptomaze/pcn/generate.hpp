#pragma once

#include <cstddef>

#include "cryptomaze/crypto/group.hpp"
#include "cryptomaze/pcn/graph.hpp"

namespace cryptomaze::pcn {

/// Per-direction capacity distribution for synthetic graphs.
struct CapacityDistribution {
    enum class Kind { lognormal, uniform, constant };

    Kind kind = Kind::lognormal;
    // lognormal: median `a` base units, log-space sigma `b`
    // uniform:   [a, b]
    // constant:  a
    double a = 0.05 * static_cast<double>(kCoin);
    double b = 1.0;

    static CapacityDistribution constant(Coins c) { return {Kind::constant, static_cast<double>(c), 0}; }
    static CapacityDistribution uniform(Coins lo, Coins hi) {
        return {Kind::uniform, static_cast<double>(lo), static_cast<double>(hi)};
    }

    Coins draw(crypto::Rng& rng) const;
};

struct BaOptions {
    CapacityDistribution capacity;
    Coins fee = 100;  // flat per-node fee in base units
};

/// Barabási–Albert preferential attachment. Nodes 0..n-1; node m attaches to
/// the m seed nodes, every later node to m distinct targets drawn with
/// probability proportional to degree. Produces exactly m·(n−m) channels,
/// numbered from 1 in creation order. Throws InvalidParam unless 1 <= m < n.
PaymentGraph generate_ba(std::size_t n, std::size_t m_attach, crypto::Rng& rng, const BaOptions& opts = {});

}  // namespace cryptomaze::pcn
