#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "cryptomaze/bench/experiment.hpp"
#include "cryptomaze/errors.hpp"
#include "cryptomaze/pcn/fixtures.hpp"

using namespace cryptomaze;
using namespace cryptomaze::bench;
using pcn::kCoin;

namespace {

ExperimentConfig base_config() {
    ExperimentConfig c;
    c.graph = "ba:60,2";
    c.amounts = {kCoin / 100};
    c.trials = 2;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    auto c = base_config();
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.amounts = {};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.amounts = {0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.protocols = {};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.graph = "";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.pairs = {{3, 3}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_NOTHROW(base_config().validate());

    CHECK_THROWS_AS((void)load_graph("ba:10", 1), ConfigError);
    CHECK_THROWS_AS((void)load_graph("ba:10,10", 1), ConfigError);
    CHECK_THROWS_AS((void)load_graph("ba:x,2", 1), ConfigError);
    CHECK_THROWS_AS((void)load_graph("/no/such/file.json", 1), ParseError);
    CHECK(load_graph("ba:50,3", 1).channel_count() == 3 * 47);
}

TEST_CASE("diamond: six edge-set contracts against eight per-path ones") {
    const pcn::Fixture f = pcn::diamond_example();
    ExperimentConfig c;
    c.graph = "fixture";
    c.amounts = {f.amount};
    c.pairs = {{f.payer, f.payee}};
    c.protocols = {Protocol::cryptomaze, Protocol::htlc, Protocol::amp, Protocol::mhhtlc};
    const auto rows = run_experiment(f.graph, c);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].n_contracts == 6);
    CHECK(rows[0].outcome == "success");
    CHECK(rows[1].outcome == "not_applicable");
    CHECK(rows[2].n_contracts == 8);
    CHECK(rows[3].n_contracts == 8);
    for (const auto& r : rows) CHECK(r.n_shared_edges == 2);
    CHECK(rows[2].bytes_total < rows[0].bytes_total);
    CHECK(rows[0].bytes_total < rows[3].bytes_total);
}

TEST_CASE("rows are paired across protocols") {
    auto c = base_config();
    c.amounts = {kCoin / 100, kCoin / 50};
    c.trials = 3;
    c.protocols = {Protocol::cryptomaze, Protocol::amp, Protocol::mhhtlc};
    c.proof_size = 16;
    const auto rows = run_experiment(c);
    REQUIRE(rows.size() == 2 * 3 * 3);
    for (std::size_t i = 0; i < rows.size(); i += 3) {
        for (std::size_t k = 1; k < 3; ++k) {
            CHECK(rows[i + k].payer == rows[i].payer);
            CHECK(rows[i + k].payee == rows[i].payee);
            CHECK(rows[i + k].amount == rows[i].amount);
            CHECK(rows[i + k].n_shared_edges == rows[i].n_shared_edges);
        }
        CHECK(rows[i].n_nodes == 60);
    }
    // the same pairs for every amount
    CHECK(rows[0].payer == rows[9].payer);
    CHECK(rows[0].payee == rows[9].payee);

    const std::string csv = to_csv(rows);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == csv_header());
    std::size_t n = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 12);
        ++n;
    }
    CHECK(n == rows.size());
}

TEST_CASE("sample pairs are reproducible and distinct") {
    crypto::Rng rng(1);
    const auto g = pcn::generate_ba(40, 2, rng);
    const auto a = sample_pairs(g, 5, 20, 9);
    const auto b = sample_pairs(g, 5, 20, 9);
    REQUIRE(a.size() == 20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].payer == b[i].payer);
        CHECK(a[i].payee == b[i].payee);
        CHECK(a[i].payer != a[i].payee);
    }
}

TEST_CASE("shared-edge report on the diamond") {
    const pcn::Fixture f = pcn::diamond_example();
    const auto s = shared_edge_report(f.graph, {{f.payer, f.payee, f.amount}});
    CHECK(s.routed == 1);
    CHECK(s.with_shared == 1);
    CHECK(s.sharing_fraction == 1.0);
    CHECK(s.max_multiplicity == 2);
    CHECK(s.mean_shared_edges == 2.0);
    CHECK(s.contracts_saved == 2);
    CHECK(s.mean_savings_pct == doctest::Approx(25.0));  // (8 - 6) / 8
    const auto j = nlohmann::json::parse(s.to_json());
    CHECK(j["contracts_saved"] == 2);

    const auto none = shared_edge_report(f.graph, {{f.payer, f.payee, 100 * kCoin}});
    CHECK(none.failed == 1);
    CHECK(none.routed == 0);
    CHECK(none.mean_savings_pct == 0);

    CHECK_THROWS_AS((void)shared_edge_report(f.graph, kCoin, 0, 1), ConfigError);
    CHECK_THROWS_AS((void)shared_edge_report(f.graph, 0, 5, 1), ConfigError);
}

TEST_CASE("sharing grows with the amount") {
    // 1000-node BA graph, shortest-first router, amount ladder
    const auto g = load_graph("ba:1000,2", 1);
    routing::RouterOptions ro;
    ro.strategy = routing::RouterStrategy::shortest_first;
    double prev_edges = -1;
    double prev_fraction = -1;
    for (pcn::Coins a : {kCoin / 50, kCoin / 25, 2 * kCoin / 25}) {
        const auto s = shared_edge_report(g, a, 60, 4, ro);
        CAPTURE(a);
        CHECK(s.routed > 0);
        CHECK(s.mean_shared_edges >= prev_edges * 0.9);
        CHECK(s.sharing_fraction >= prev_fraction - 0.1);
        prev_edges = s.mean_shared_edges;
        prev_fraction = s.sharing_fraction;
    }
}

TEST_CASE("scaling options are validated") {
    ScalingOptions o;
    o.sizes = {};
    CHECK_THROWS_AS((void)scaling_study(o), ConfigError);
    o.sizes = {200, 100};
    CHECK_THROWS_AS((void)scaling_study(o), ConfigError);
    o.sizes = {100, 200};
    o.workload = 0;
    CHECK_THROWS_AS((void)scaling_study(o), ConfigError);
    o.workload = 3;
    o.repeats = 0;
    CHECK_THROWS_AS((void)scaling_study(o), ConfigError);
    o.repeats = 2;

    o.workload = 3;
    const auto pts = scaling_study(o);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].n_nodes == 100);
    CHECK(pts[1].n_nodes == 200);
}

TEST_CASE("coin strings") {
    CHECK(parse_coins("0.04") == 4'000'000);
    CHECK(parse_coins("5.1") == 510'000'000);
    CHECK(parse_coins("3") == 3 * kCoin);
    CHECK(parse_coins("0.00000001") == 1);
    CHECK_THROWS_AS((void)parse_coins("0.000000001"), ConfigError);
    CHECK_THROWS_AS((void)parse_coins("abc"), ConfigError);
    CHECK_THROWS_AS((void)parse_coins("-1"), ConfigError);
    CHECK_THROWS_AS((void)parse_coins(""), ConfigError);
    CHECK(format_coins(510'000'000) == "5.1");
    CHECK(format_coins(3 * kCoin) == "3");
    CHECK(format_coins(1) == "0.00000001");
}
