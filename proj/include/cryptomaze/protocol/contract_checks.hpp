#pragma once

#include "cryptomaze/protocol/onion.hpp"

namespace cryptomaze::protocol {

/// x_j = sum of the adjustments carried in M_j.
Scalar node_secret_of(const IntermediatePayload& d);

/// Forwarding check for an incoming contract (R_in, t_in) on channel
/// `in` against the decrypted successor tuples.
bool check_forward(const IntermediatePayload& d, const ChannelId& in, Tick t_in, const Point& R_in, Tick delta);

/// r_in = H(x_j || id_in)·x_j + r_next. A splitting node passes
/// r_next + x_{j,k} of the successor that released.
Scalar compute_release(const Scalar& r_next, const Scalar& x_j, const ChannelId& in);

/// Payee release for one incoming channel: r = H(y || id)·y + x_r.
Scalar payee_release(const Scalar& y, const Scalar& x_r, const ChannelId& in);

}  // namespace cryptomaze::protocol
