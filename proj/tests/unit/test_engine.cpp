#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

#include "cryptomaze/errors.hpp"
#include "cryptomaze/pcn/fixtures.hpp"
#include "cryptomaze/protocol/contract_checks.hpp"
#include "cryptomaze/protocol/engine.hpp"

#include <sstream>

using namespace cryptomaze;
using namespace cryptomaze::protocol;
using crypto::Point;
using crypto::Rng;
using crypto::Scalar;
using pcn::kCoin;

namespace {

constexpr Coins tenth = kCoin / 10;

RunResult run_diamond(const SimConfig& cfg, const Corruption& adv = {}) {
    pcn::Fixture f = pcn::diamond_example();
    return run_payment(f.graph, {f.payer, f.payee, f.amount}, cfg, adv);
}

void check_invariants(const RunResult& r) {
    CHECK(r.gains.sum() == 0);
    CHECK(r.all_terminal());
    std::size_t bytes = 0;
    for (const auto& e : r.trace.events) bytes += e.bytes;
    CHECK(bytes == r.metrics.bytes_total);
}

}  // namespace

TEST_CASE("golden diamond run") {
    const pcn::Fixture f = pcn::diamond_example();
    const RunResult r = run_diamond({});
    check_invariants(r);
    CHECK(r.outcome == Outcome::success);
    CHECK(r.metrics.n_contracts == 6);
    CHECK(r.n_shared_edges == 2);
    CHECK(r.gains.at(f["M"]) == -55 * tenth);
    for (const char* n : {"A", "B", "C", "D"}) CHECK(r.gains.at(f[n]) == tenth);
    CHECK(r.gains.at(f["N"]) == 51 * tenth);
    CHECK(r.full_success_gains());
    for (const auto& c : r.contracts) CHECK(c.state == ContractState::released);
    CHECK(r.consistency_violations == 0);
}

TEST_CASE("a run is reproducible from its seed") {
    SimConfig cfg;
    cfg.seed = 17;
    const RunResult a = run_diamond(cfg);
    const RunResult b = run_diamond(cfg);
    CHECK(a.trace.to_jsonl() == b.trace.to_jsonl());
    CHECK(a.metrics.bytes_total == b.metrics.bytes_total);
    CHECK(a.gains.gains == b.gains.gains);
}

TEST_CASE("trace lines are JSON objects") {
    const RunResult r = run_diamond({});
    std::istringstream in(r.trace.to_jsonl());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        for (const char* k : {"time", "from", "to", "kind", "channel", "bytes"}) CHECK(j.contains(k));
        ++n;
    }
    CHECK(n == r.trace.events.size());
    CHECK(r.trace.count("forward") == 6);
    CHECK(r.trace.count("accept") == 6);
}

TEST_CASE("ecdsa lock mode gives the same settlement") {
    SimConfig cfg;
    cfg.lock = LockMechanism::ecdsa;
    const RunResult r = run_diamond(cfg);
    check_invariants(r);
    CHECK(r.outcome == Outcome::success);
    CHECK(r.full_success_gains());
}

TEST_CASE("D aborts when only one of its two contracts arrives") {
    const pcn::Fixture f = pcn::diamond_example();
    Corruption adv;
    adv.strategy[f["C"]] = Strategy::drop_forward;
    const RunResult r = run_diamond({}, adv);
    check_invariants(r);
    CHECK(r.outcome != Outcome::success);
    CHECK(r.gains.all_zero());
    CHECK(r.contracts.size() == 4);  // neither C->D nor D->N opens
    bool bd_aborted = false;
    for (const auto& c : r.contracts) {
        CHECK(c.state != ContractState::released);
        if (c.channel == f.graph.channel(f["B"], f["D"])) bd_aborted = c.state == ContractState::aborted;
    }
    CHECK(bd_aborted);
}

TEST_CASE("payee withholding refunds everyone") {
    const pcn::Fixture f = pcn::diamond_example();
    Corruption adv;
    adv.strategy[f["N"]] = Strategy::withhold_release;
    const RunResult r = run_diamond({}, adv);
    check_invariants(r);
    CHECK(r.outcome != Outcome::success);
    CHECK(r.gains.all_zero());
}

TEST_CASE("tampered onion aborts without loss") {
    const pcn::Fixture f = pcn::diamond_example();
    Corruption adv;
    adv.strategy[f["A"]] = Strategy::tamper;
    const RunResult r = run_diamond({}, adv);
    check_invariants(r);
    CHECK(r.outcome != Outcome::success);
    for (const char* n : {"M", "B", "C", "D", "N"}) CHECK(r.gains.at(f[n]) >= 0);
}

TEST_CASE("A settles upstream with a release from one branch only") {
    const pcn::Fixture f = pcn::diamond_example();
    Corruption adv;
    adv.strategy[f["B"]] = Strategy::withhold_release;
    const RunResult r = run_diamond({}, adv);
    check_invariants(r);
    for (const char* n : {"M", "A", "C", "D", "N"}) {
        CAPTURE(n);
        CHECK(r.gains.at(f[n]) >= r.expected_gains.at(f[n]));
    }
    CHECK(r.gains.at(f["N"]) == 51 * tenth);
    CHECK(r.gains.at(f["M"]) == -55 * tenth);
}

TEST_CASE("payee with three incoming shares") {
    pcn::Fixture f = pcn::fan(3);
    const RunResult r = run_payment(f.graph, {f.payer, f.payee, 3 * kCoin}, {});
    check_invariants(r);
    CHECK(r.outcome == Outcome::success);
    CHECK(r.gains.at(f.payee) == 3 * kCoin);
    CHECK(r.full_success_gains());
}

TEST_CASE("single path and long chain") {
    for (std::size_t hops : {1u, 2u, 6u}) {
        pcn::Fixture f = pcn::chain(hops);
        const RunResult r = run_payment(f.graph, {f.payer, f.payee, kCoin}, {});
        CAPTURE(hops);
        check_invariants(r);
        CHECK(r.outcome == Outcome::success);
        CHECK(r.gains.at(f.payee) == kCoin);
        CHECK(r.gains.at(f.payer) == -(kCoin + static_cast<Coins>(hops - 1) * tenth));
    }
}

TEST_CASE("routing failure leaves the graph alone") {
    pcn::Fixture f = pcn::diamond_example();
    const pcn::PaymentGraph copy = f.graph;
    const RunResult r = run_payment(f.graph, {f.payer, f.payee, 100 * kCoin}, {});
    CHECK(r.outcome == Outcome::no_route);
    CHECK(pcn::compute_gains(copy, f.graph).all_zero());
}

TEST_CASE("sequential payments drain capacity") {
    pcn::Fixture f = pcn::chain(2, 3 * kCoin);
    const auto rs = run_payments(f.graph, {{0, 2, kCoin}, {0, 2, kCoin}, {0, 2, 2 * kCoin}}, {});
    REQUIRE(rs.size() == 3);
    CHECK(rs[0].outcome == Outcome::success);
    CHECK(rs[1].outcome == Outcome::success);
    CHECK(rs[2].outcome == Outcome::no_route);
}

TEST_CASE("forwarding checks at an intermediary") {
    const pcn::Fixture f = pcn::diamond_example();
    Rng rng(5);
    const auto pc = routing::assign_timeouts(
        routing::paths_to_edge_set(routing::find_paths(f.graph, f.payer, f.payee, f.amount), f.graph), 100, 10);
    const auto rs = receiver_init(rng);
    const auto t = build_conditions(pc, rs.X_r, rng);

    const NodeId A = f["A"];
    IntermediatePayload d;
    for (std::size_t k : pc.out_edges(A)) {
        d.tuples.push_back({pc.edges[k].channel, pc.edges[k].value, t.adjustment[k], t.conditions[k].R,
                            pc.edges[k].timeout, {}});
    }
    const ChannelId in = f.graph.channel(f.payer, A);
    const auto& cond = t.at(in);
    CHECK(node_secret_of(d) == t.node_secret.at(A));
    CHECK(check_forward(d, in, cond.timeout, cond.R, 1));
    CHECK_FALSE(check_forward(d, in, 120, cond.R, 1));  // t_in must exceed the successors by delta
    CHECK_FALSE(check_forward(d, in, cond.timeout, cond.R + Point::generator(), 1));
    CHECK_FALSE(check_forward(IntermediatePayload{}, in, cond.timeout, cond.R, 1));

    // release: r_in from either branch opens R_in
    const auto r = simulate_release(t, pc, rs.x_r);
    for (std::size_t k : pc.out_edges(A)) {
        const Scalar r_in = compute_release(r[k] + t.adjustment[k], t.node_secret.at(A), in);
        CHECK(Point::mul_base(r_in) == cond.R);
    }
    const ChannelId dn = f.graph.channel(f["D"], f.payee);
    CHECK(Point::mul_base(payee_release(t.y, rs.x_r, dn)) == t.at(dn).R);
    CHECK(compute_release(Scalar::from_u64(9), Scalar(), in) == Scalar::from_u64(9));
}

TEST_CASE("sim config validation") {
    SimConfig c;
    c.delta = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    SimConfig d;
    d.Delta = 0;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    CHECK(strategy_from_string("drop-forward") == Strategy::drop_forward);
}
