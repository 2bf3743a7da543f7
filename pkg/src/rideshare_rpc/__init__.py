"""Ridesharing with a profit constraint: exact and approximate solvers plus a
synthetic benchmark harness."""

from .flow import solve_rpc1_exact
from .greedy import greedy_rpc1, max_weight_matching
from .ls2 import ls2, simple_greedy
from .model import (
    Driver,
    FeasibleMatch,
    Hypergraph,
    Matching,
    Passenger,
    build_hypergraph,
    split_by_sign,
    validate_matching,
)
from .oracle import brute_rp, brute_rpc1, brute_rpcplus

__all__ = [
    "Driver", "FeasibleMatch", "Hypergraph", "Matching", "Passenger", "brute_rp", "brute_rpc1",
    "brute_rpcplus", "build_hypergraph", "greedy_rpc1", "ls2", "max_weight_matching", "simple_greedy",
    "solve_rpc1_exact", "split_by_sign", "validate_matching",
]
__version__ = "0.1.0"
