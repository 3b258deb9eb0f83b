#include "cryptomaze/pcn/generate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace cryptomaze::pcn {

Coins CapacityDistribution::draw(crypto::Rng& rng) const {
    switch (kind) {
        case Kind::constant:
            return static_cast<Coins>(a);
        case Kind::uniform: {
            const auto lo = static_cast<Coins>(a);
            const auto hi = static_cast<Coins>(b);
            if (hi <= lo) return lo;
            return lo + static_cast<Coins>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
        }
        case Kind::lognormal: {
            std::lognormal_distribution<double> d(std::log(a), b);
            return static_cast<Coins>(std::llround(d(rng.engine())));
        }
    }
    return 0;
}

PaymentGraph generate_ba(std::size_t n, std::size_t m, crypto::Rng& rng, const BaOptions& opts) {
    if (m < 1 || m >= n) {
        throw InvalidParam("Barabasi-Albert needs 1 <= m < n (got n=" + std::to_string(n) +
                           ", m=" + std::to_string(m) + ")");
    }
    PaymentGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.add_node(static_cast<NodeId>(i));
        g.set_fee(static_cast<NodeId>(i), opts.fee);
    }

    std::vector<NodeId> targets(m);
    for (std::size_t i = 0; i < m; ++i) targets[i] = static_cast<NodeId>(i);
    std::vector<NodeId> repeated;
    repeated.reserve(2 * m * n);
    std::uint64_t number = 1;
    std::unordered_set<NodeId> picked;

    for (auto source = static_cast<NodeId>(m); source < n; ++source) {
        for (NodeId t : targets) {
            const Coins cuv = opts.capacity.draw(rng);
            const Coins cvu = opts.capacity.draw(rng);
            g.add_channel(number++, source, t, std::max<Coins>(cuv, 0), std::max<Coins>(cvu, 0));
        }
        repeated.insert(repeated.end(), targets.begin(), targets.end());
        repeated.insert(repeated.end(), m, source);

        picked.clear();
        targets.clear();
        while (targets.size() < m) {
            const NodeId c = repeated[rng.below(repeated.size())];
            if (picked.insert(c).second) targets.push_back(c);
        }
    }
    return g;
}

}  // namespace cryptomaze::pcn
