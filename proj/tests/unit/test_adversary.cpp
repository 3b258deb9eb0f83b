#include <cmath>

#include "doctest.h"

#include "cryptomaze/adversary/analysis.hpp"
#include "cryptomaze/errors.hpp"
#include "cryptomaze/pcn/fixtures.hpp"
#include "cryptomaze/protocol/engine.hpp"

using namespace cryptomaze;
using namespace cryptomaze::adversary;
using pcn::kCoin;

namespace {

std::vector<NodeId> chain_path(std::size_t hops) {
    std::vector<NodeId> p;
    for (NodeId n = 0; n <= hops; ++n) p.push_back(n);
    return p;
}

WormholeOutcome wormhole(Protocol p, std::size_t hops, NodeId up, NodeId down) {
    const pcn::Fixture f = pcn::chain(hops);
    return wormhole_attempt(f.graph, chain_path(hops), kCoin, {up, down}, p, {});
}

}  // namespace

TEST_CASE("guessing threshold") {
    CHECK(guessing_threshold(1000) == doctest::Approx(0.5 + 3 * std::sqrt(0.25 / 1000)));
    CHECK(guessing_threshold(100) == doctest::Approx(0.65));
}

TEST_CASE("wormhole against CryptoMaze is blocked") {
    const auto w = wormhole(Protocol::cryptomaze, 7, 2, 5);
    CHECK(w.blocked);
    CHECK_FALSE(w.succeeded);
    CHECK(w.honest_nonnegative);
    CHECK(w.colluder_gain <= w.colluder_fees);
    CHECK(w.run.gains.sum() == 0);
    CHECK(w.run.trace.contains("WormholeAttemptBlocked"));
}

TEST_CASE("wormhole against HTLC and AMP collects the skipped fees") {
    for (Protocol p : {Protocol::htlc, Protocol::amp}) {
        CAPTURE(to_string(p));
        const auto w = wormhole(p, 7, 2, 5);
        CHECK(w.succeeded);
        CHECK(w.skipped_fees == 2 * kCoin / 10);
        CHECK(w.colluder_gain == w.colluder_fees + w.skipped_fees);
    }
}

TEST_CASE("wormhole against MH-HTLC is blocked") {
    const auto w = wormhole(Protocol::mhhtlc, 7, 2, 5);
    CHECK(w.blocked);
    CHECK(w.honest_nonnegative);
}

TEST_CASE("colluder placement is validated") {
    CHECK_THROWS_AS((void)wormhole(Protocol::cryptomaze, 7, 2, 3), InvalidColluderPlacement);
    CHECK_THROWS_AS((void)wormhole(Protocol::cryptomaze, 7, 0, 3), InvalidColluderPlacement);
    CHECK_THROWS_AS((void)wormhole(Protocol::cryptomaze, 7, 2, 7), InvalidColluderPlacement);
    CHECK_THROWS_AS((void)wormhole(Protocol::cryptomaze, 7, 2, 40), InvalidColluderPlacement);
}

TEST_CASE("linkability: standard conditions stay at guessing, the strawman does not") {
    const pcn::Fixture f = pcn::diamond_example();
    LinkabilityOptions o;
    o.trials = 200;
    o.seed = 3;
    const Report std_r = linkability_test(f, {f["B"], f["C"]}, o);
    CHECK(std_r.trials == 200);
    CHECK(std_r.pass);
    CHECK(std_r.statistic <= guessing_threshold(200));

    o.variant = protocol::ConditionVariant::shared_split_condition;
    const Report straw = linkability_test(f, {f["B"], f["C"]}, o);
    CHECK(straw.statistic >= 0.99);
    CHECK_FALSE(straw.pass);
}

TEST_CASE("linkability needs a split payment and enough trials") {
    const pcn::Fixture c = pcn::chain(4);
    LinkabilityOptions o;
    o.trials = 10;
    CHECK_THROWS_AS((void)linkability_test(c, {1, 3}, o), InsufficientTrials);
    const pcn::Fixture d = pcn::diamond_example();
    o.trials = 1;
    CHECK_THROWS_AS((void)linkability_test(d, {d["B"], d["C"]}, o), InsufficientTrials);
    o.trials = 10;
    CHECK_THROWS_AS((void)linkability_test(d, {d["B"]}, o), InsufficientTrials);
}

TEST_CASE("relationship anonymity") {
    const Report cm = relationship_anonymity_test(Protocol::cryptomaze, 5, {1, 4}, 200, 2);
    CHECK(cm.pass);
    const Report htlc = relationship_anonymity_test(Protocol::htlc, 5, {1, 4}, 200, 2);
    CHECK(htlc.statistic >= 0.99);
    CHECK_FALSE(htlc.pass);
}

TEST_CASE("value privacy for nodes outside the edge set") {
    pcn::Fixture f = pcn::diamond_example();
    const NodeId X = 6;
    f.graph.add_node(X);
    f.graph.add_channel(7, f["A"], X, 10 * kCoin, 10 * kCoin);
    const auto r = protocol::run_payment(f.graph, {f.payer, f.payee, f.amount}, {});
    REQUIRE(r.outcome == protocol::Outcome::success);
    const Report out = value_privacy_check(r, {X});
    CHECK(out.pass);
    CHECK(out.statistic == 0);
    CHECK_FALSE(value_privacy_check(r, {f["B"]}).pass);
}

TEST_CASE("derived views of the two branches do not intersect") {
    const pcn::Fixture f = pcn::diamond_example();
    pcn::Fixture g = f;
    protocol::Corruption adv;
    adv.strategy[f["B"]] = protocol::Strategy::observe_only;
    adv.strategy[f["C"]] = protocol::Strategy::observe_only;
    const auto r = protocol::run_payment(g.graph, {f.payer, f.payee, f.amount}, {}, adv);
    const auto vb = derived_view(r, f["B"]);
    const auto vc = derived_view(r, f["C"]);
    CHECK_FALSE(vb.empty());
    for (const auto& b : vb) {
        for (const auto& c : vc) CHECK(b != c);
    }
}

TEST_CASE("balance security matrix") {
    const auto cases = balance_security_matrix(2, 11);
    CHECK(cases.size() >= 100);
    for (const auto& c : cases) {
        CAPTURE(c.topology);
        CAPTURE(c.protocol);
        CAPTURE(protocol::to_string(c.strategy));
        CHECK(c.min_honest_gain >= 0);
    }
}

TEST_CASE("protocol names") {
    CHECK(protocol_from_string("mhhtlc") == Protocol::mhhtlc);
    CHECK(to_string(Protocol::amp) == "amp");
    CHECK_THROWS_AS((void)protocol_from_string("lightning"), ConfigError);
}
