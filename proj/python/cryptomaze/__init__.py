"""CryptoMaze multi-path payments and payment-network simulator."""

from ._cryptomaze import (
    COIN,
    CURVE,
    ConfigError,
    CryptoMazeError,
    Fixture,
    NoRoute,
    PaymentGraph,
    chain,
    diamond_example,
    fan,
    find_paths,
    format_coins,
    generate_ba,
    linkability_test,
    load_snapshot,
    parse_coins,
    parse_snapshot,
    relationship_anonymity_test,
    run_experiment,
    run_payment,
    shared_edge_report,
    wormhole_attempt,
)

__all__ = [
    "COIN",
    "CURVE",
    "ConfigError",
    "CryptoMazeError",
    "Fixture",
    "NoRoute",
    "PaymentGraph",
    "chain",
    "diamond_example",
    "fan",
    "find_paths",
    "format_coins",
    "generate_ba",
    "linkability_test",
    "load_snapshot",
    "parse_coins",
    "parse_snapshot",
    "relationship_anonymity_test",
    "run_experiment",
    "run_payment",
    "shared_edge_report",
    "wormhole_attempt",
]
