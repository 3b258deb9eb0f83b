#include <chrono>
#include <deque>
#include <filesystem>
#include <set>

#include "doctest.h"

#include "cryptomaze/errors.hpp"
#include "cryptomaze/pcn/fixtures.hpp"
#include "cryptomaze/pcn/generate.hpp"
#include "cryptomaze/pcn/snapshot.hpp"

using namespace cryptomaze;
using namespace cryptomaze::pcn;

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(CRYPTOMAZE_TEST_DATA) / name; }

std::size_t reachable(const PaymentGraph& g, NodeId from) {
    std::set<NodeId> seen{from};
    std::deque<NodeId> q{from};
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop_front();
        for (const auto& nb : g.neighbors(u)) {
            if (seen.insert(nb.peer).second) q.push_back(nb.peer);
        }
    }
    return seen.size();
}

}  // namespace

TEST_CASE("diamond snapshot loads") {
    const PaymentGraph g = load_snapshot(data("diamond.json"));
    CHECK(g.node_count() == 6);
    CHECK(g.channel_count() == 6);
    CHECK(g.capacity(g.channel(0, 1)) == 55 * kCoin / 10);
    CHECK(g.capacity(g.channel(1, 0)) == kCoin);
    CHECK(g.capacity(g.channel(4, 5)) == 51 * kCoin / 10);
    CHECK(g.fee(3, 123) == kCoin / 10);
    CHECK(dump_snapshot(g) == dump_snapshot(diamond_example().graph));
}

TEST_CASE("snapshot validation and parse errors") {
    CHECK_THROWS_AS((void)parse_snapshot(R"({"nodes": [], "channels": []})"), ValidationError);
    CHECK_THROWS_AS(
        (void)parse_snapshot(R"({"nodes": [{"id": 0}, {"id": 1}],
                                 "channels": [{"id": 1, "u": 0, "v": 1, "cap_uv": -5, "cap_vu": 0}]})"),
        ValidationError);
    CHECK_THROWS_AS(
        (void)parse_snapshot(R"({"nodes": [{"id": 0}],
                                 "channels": [{"id": 1, "u": 0, "v": 9, "cap_uv": 1, "cap_vu": 0}]})"),
        ValidationError);

    try {
        (void)parse_snapshot("{\n\"nodes\": [\n{\"id\": 0},,\n]}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    try {
        (void)parse_snapshot(R"({"nodes": [{"id": 0}, {"id": 1}], "channels": [{"id": 1, "u": 0, "cap_uv": 1, "cap_vu": 1}]})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("channels[0].v") != std::string::npos);
    }
    CHECK_THROWS_AS((void)load_snapshot(data("does-not-exist.json")), ParseError);
}

TEST_CASE("repeated channel ids are merged") {
    const PaymentGraph g = parse_snapshot(R"({"nodes": [{"id": 0}, {"id": 1}],
        "channels": [{"id": 7, "u": 0, "v": 1, "cap_uv": 1, "cap_vu": 2},
                     {"id": 7, "u": 0, "v": 1, "cap_uv": 3, "cap_vu": 4}]})");
    CHECK(g.channel_count() == 1);
    CHECK(g.capacity(g.channel(0, 1)) == 3);
    CHECK(g.capacity(g.channel(1, 0)) == 4);
}

TEST_CASE("6329-node snapshot round-trips through a file") {
    crypto::Rng rng(99);
    const PaymentGraph g = generate_ba(6329, 2, rng);
    const auto path = std::filesystem::temp_directory_path() / "cryptomaze_6329.json";
    save_snapshot(g, path);
    const PaymentGraph back = load_snapshot(path);
    std::filesystem::remove(path);
    CHECK(back.node_count() == 6329);
    CHECK(back.channel_count() == g.channel_count());
    CHECK(dump_snapshot(back) == dump_snapshot(g));
}

TEST_CASE("BA generator") {
    crypto::Rng a(7);
    crypto::Rng b(7);
    const PaymentGraph g = generate_ba(200, 2, a);
    CHECK(g.node_count() == 200);
    CHECK(g.channel_count() == 396);  // m (n - m)
    CHECK(dump_snapshot(g) == dump_snapshot(generate_ba(200, 2, b)));
    CHECK(reachable(g, 0) == 200);

    for (const auto& c : g.channels()) {
        CHECK(c.cap_uv > 0);
        CHECK(c.cap_vu > 0);
    }

    crypto::Rng c(7);
    CHECK_THROWS_AS((void)generate_ba(1, 1, c), InvalidParam);
    CHECK_THROWS_AS((void)generate_ba(10, 0, c), InvalidParam);
    CHECK_THROWS_AS((void)generate_ba(10, 10, c), InvalidParam);
}

TEST_CASE("BA n=25600 builds in under 30 s") {
    crypto::Rng rng(1);
    const auto t0 = std::chrono::steady_clock::now();
    const PaymentGraph g = generate_ba(25600, 2, rng);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(g.node_count() == 25600);
    CHECK(g.channel_count() == 2 * 25598);
    CHECK(s < 30.0);
}

TEST_CASE("lock, unlock, settle") {
    Fixture f = diamond_example();
    PaymentGraph& g = f.graph;
    const ChannelId ma = g.channel(f["M"], f["A"]);
    const PaymentGraph before = g;

    g.lock(ma, 55 * kCoin / 10);
    CHECK(g.capacity(ma) == 0);
    CHECK(g.escrow(ma) == 55 * kCoin / 10);
    g.unlock(ma, 55 * kCoin / 10);
    CHECK(g.capacity(ma) == 55 * kCoin / 10);
    CHECK(g.total_escrow() == 0);

    CHECK_THROWS_AS(g.lock(ma, 56 * kCoin / 10), InsufficientCapacity);
    CHECK(g.capacity(ma) == 55 * kCoin / 10);
    CHECK_THROWS_AS(g.unlock(ma, 1), InvalidParam);

    g.lock(ma, 2 * kCoin);
    g.settle(ma, 2 * kCoin);
    CHECK(g.capacity(ma) == 35 * kCoin / 10);
    CHECK(g.capacity(ma.reversed()) == 3 * kCoin);

    const GainLedger gl = compute_gains(before, g);
    CHECK(gl.at(f["M"]) == -2 * kCoin);
    CHECK(gl.at(f["A"]) == 2 * kCoin);
    CHECK(gl.sum() == 0);
}

TEST_CASE("compute_gains") {
    const Fixture f = diamond_example();
    CHECK(compute_gains(f.graph, f.graph).all_zero());
    CHECK(compute_gains(f.graph, f.graph).gains.size() == 6);

    const Fixture other = chain(3);
    CHECK_THROWS_AS((void)compute_gains(f.graph, other.graph), TopologyMismatch);
}

TEST_CASE("graph construction errors") {
    PaymentGraph g;
    g.add_node(1);
    g.add_node(2);
    CHECK_THROWS_AS(g.add_channel(1, 1, 1, 5, 5), ValidationError);
    CHECK_THROWS_AS(g.add_channel(1, 1, 3, 5, 5), ValidationError);
    CHECK_THROWS_AS(g.set_fee(1, -1), ValidationError);
    CHECK_THROWS_AS((void)g.channel(1, 2), InvalidParam);
    g.add_channel(1, 1, 2, 5, 6);
    CHECK(g.find_channel(2, 1).has_value());
    CHECK(g.capacity(*g.find_channel(2, 1)) == 6);
}

TEST_CASE("proportional fees") {
    PaymentGraph g;
    g.add_node(0);
    g.set_fee_mode(FeeMode::proportional);
    g.set_fee(0, 1000);  // 0.1 %
    CHECK(g.fee(0, kCoin) == kCoin / 1000);
    CHECK(g.fee(0, 999) == 0);
    CHECK(parse_snapshot(R"({"nodes": [{"id": 0}], "channels": [], "fee_mode": "proportional"})").fee_mode() ==
          FeeMode::proportional);
}
