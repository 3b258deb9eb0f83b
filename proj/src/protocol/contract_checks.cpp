#include "cryptomaze/protocol/contract_checks.hpp"

namespace cryptomaze::protocol {

Scalar node_secret_of(const IntermediatePayload& d) {
    Scalar x;
    for (const auto& t : d.tuples) x += t.adjustment;
    return x;
}

bool check_forward(const IntermediatePayload& d, const ChannelId& in, Tick t_in, const Point& R_in, Tick delta) {
    if (d.tuples.empty()) return false;
    const Scalar x_j = node_secret_of(d);
    const Point blind = Point::mul_base(crypto::hash_to_scalar(x_j, in.number) * x_j);
    const bool split = d.tuples.size() > 1;
    for (const auto& t : d.tuples) {
        if (t_in < t.timeout + delta) return false;
        Point expect = blind + t.condition;
        if (split) expect += Point::mul_base(t.adjustment);
        if (!(expect == R_in)) return false;
    }
    return true;
}

Scalar compute_release(const Scalar& r_next, const Scalar& x_j, const ChannelId& in) {
    return crypto::hash_to_scalar(x_j, in.number) * x_j + r_next;
}

Scalar payee_release(const Scalar& y, const Scalar& x_r, const ChannelId& in) {
    return crypto::hash_to_scalar(y, in.number) * y + x_r;
}

}  // namespace cryptomaze::protocol
