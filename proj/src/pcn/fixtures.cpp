#include "cryptomaze/pcn/fixtures.hpp"

namespace cryptomaze::pcn {

Fixture diamond_example() {
    Fixture f;
    const char* names[] = {"M", "A", "B", "C", "D", "N"};
    for (NodeId i = 0; i < 6; ++i) {
        f.names[names[i]] = i;
        f.graph.add_node(i);
        f.graph.set_fee(i, kCoin / 10);
    }
    auto units = [](Coins tenths) { return tenths * (kCoin / 10); };
    f.graph.add_channel(1, f["M"], f["A"], units(55), units(10));
    f.graph.add_channel(2, f["A"], f["B"], units(27), units(10));
    f.graph.add_channel(3, f["A"], f["C"], units(27), units(10));
    f.graph.add_channel(4, f["B"], f["D"], units(26), units(10));
    f.graph.add_channel(5, f["C"], f["D"], units(26), units(10));
    f.graph.add_channel(6, f["D"], f["N"], units(51), units(10));
    f.payer = f["M"];
    f.payee = f["N"];
    f.amount = units(51);
    return f;
}

Fixture chain(std::size_t hops, Coins capacity, Coins fee) {
    if (hops == 0) throw InvalidParam("chain needs at least one hop");
    Fixture f;
    for (std::size_t i = 0; i <= hops; ++i) {
        const auto id = static_cast<NodeId>(i);
        f.names["U" + std::to_string(i)] = id;
        f.graph.add_node(id);
        f.graph.set_fee(id, fee);
    }
    for (std::size_t i = 0; i < hops; ++i) {
        f.graph.add_channel(i + 1, static_cast<NodeId>(i), static_cast<NodeId>(i + 1), capacity, capacity);
    }
    f.payer = 0;
    f.payee = static_cast<NodeId>(hops);
    f.amount = kCoin;
    return f;
}

Fixture fan(std::size_t k, Coins per_branch, Coins fee) {
    if (k == 0) throw InvalidParam("fan needs at least one branch");
    Fixture f;
    const auto payee = static_cast<NodeId>(k + 1);
    f.names["S"] = 0;
    f.names["T"] = payee;
    for (NodeId i = 0; i <= payee; ++i) {
        f.graph.add_node(i);
        f.graph.set_fee(i, fee);
    }
    std::uint64_t number = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const auto r = static_cast<NodeId>(i);
        f.names["R" + std::to_string(i)] = r;
        f.graph.add_channel(number++, 0, r, per_branch + fee, 0);
        f.graph.add_channel(number++, r, payee, per_branch, 0);
    }
    f.payer = 0;
    f.payee = payee;
    f.amount = per_branch * static_cast<Coins>(k);
    return f;
}

}  // namespace cryptomaze::pcn
