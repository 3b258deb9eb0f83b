#pragma once

// Hashlock baselines. Every path of a payment is an independent chain of
// contracts (so a channel shared by two paths carries two contracts).
//
//   htlc    one digest H(p) on every hop of a single path
//   amp     master secret s = s_1 ^ ... ^ s_n, path i locked with H(s || i);
//           the payee claims only once every share has arrived
//   mhhtlc  per-hop keys k_i = x_i ^ k_{i+1}, hop i locked with y_i = H(k_i);
//           each hop gets (x_i, y_i, y_{i+1}, proof) from the payer. Proofs
//           are not generated: a dealer-checked bit stands in for them and
//           `proof_size` bytes are charged per hop.

#include <array>
#include <vector>

#include "cryptomaze/protocol/sim.hpp"
#include "cryptomaze/routing/paths.hpp"

namespace cryptomaze::baselines {

using crypto::Digest;
using protocol::Corruption;
using protocol::RunResult;
using protocol::SimConfig;

/// Proof bytes charged per hop in MH-HTLC. Chosen so that MH-HTLC moves
/// roughly 300 times the bytes of CryptoMaze on the six-node diamond.
inline constexpr std::size_t kDefaultProofSize = 106'500;

struct AmpShares {
    Digest master{};
    std::vector<Digest> shares;

    static AmpShares make(std::size_t n, crypto::Rng& rng);
    /// XOR of the given shares.
    static Digest combine(const std::vector<Digest>& shares);
    /// Preimage released on path i: s || i (i as 4 bytes big-endian).
    static crypto::Bytes preimage(const Digest& master, std::uint32_t i);
    /// Lock digest of path i: H(s || i).
    static Digest condition(const Digest& master, std::uint32_t i);
};

struct MhHtlcChain {
    std::vector<Digest> x;  // x[i] for hop i = 0..n-1 (hop i ends at path node i+1)
    std::vector<Digest> k;  // k[i] = x[i] ^ k[i+1], k[n-1] = x[n-1]
    std::vector<Digest> y;  // y[i] = H(k[i])

    static MhHtlcChain make(std::size_t hops, crypto::Rng& rng);
    /// Dealer-side check standing in for the zero-knowledge proof of hop i:
    /// y_i = H(x_i ^ preimage(y_{i+1})).
    [[nodiscard]] bool dealer_check(std::size_t i) const;
};

Digest xor_digest(const Digest& a, const Digest& b);

/// Single-path HTLC. Throws InvalidParam unless `paths` has exactly one path.
RunResult run_htlc(pcn::PaymentGraph& graph, const routing::PathSet& paths, const SimConfig& config,
                   const Corruption& corruption = {});

RunResult run_amp(pcn::PaymentGraph& graph, const routing::PathSet& paths, const SimConfig& config,
                  const Corruption& corruption = {});

/// Throws InvalidParam on an empty path set or a zero-length path.
RunResult run_mh_htlc(pcn::PaymentGraph& graph, const routing::PathSet& paths, const SimConfig& config,
                      std::size_t proof_size = kDefaultProofSize, const Corruption& corruption = {});

}  // namespace cryptomaze::baselines
