import math
import random

import numpy as np
import pytest

from rideshare_rpc.model import Driver, Passenger, build_hypergraph
from rideshare_rpc.network import RoadNetwork


def random_bipartite(rng: random.Random, max_d=6, max_r=6, lo=-50, hi=100, density=None):
    nd, nr = rng.randint(1, max_d), rng.randint(1, max_r)
    p = rng.uniform(0.2, 0.9) if density is None else density
    triples = [(d, (r,), rng.randint(lo, hi)) for d in range(nd) for r in range(nr) if rng.random() < p]
    if not triples:
        triples = [(0, (0,), rng.randint(lo, hi))]
    return build_hypergraph(triples)


def random_hypergraph(rng: random.Random, lam, max_d=5, max_r=8, max_edges=16, lo=0, hi=100):
    """Edges of size 1..lam with nonnegative weights (by default)."""
    nd, nr = rng.randint(1, max_d), rng.randint(1, max_r)
    triples = []
    for _ in range(rng.randint(1, max_edges)):
        k = rng.randint(1, min(lam, nr))
        triples.append((rng.randrange(nd), tuple(rng.sample(range(nr), k)), rng.randint(lo, hi)))
    return build_hypergraph(triples, capacity={d: lam for d in range(nd)})


def rpc1_targets(w_star):
    return [-math.inf, math.floor(0.6 * w_star), math.floor(0.8 * w_star), w_star, w_star + 1]


@pytest.fixture
def three_edge():
    """(d1,r1,5), (d1,r2,3), (d2,r1,4)."""
    return build_hypergraph([(1, (1,), 5), (1, (2,), 3), (2, (1,), 4)])


@pytest.fixture
def ls2_example():
    """e1=(d1,{r1},10), eA=(d2,{r1,r2},4), eC=(d1,{r3,r4},3)."""
    return build_hypergraph([(1, (1,), 10), (2, (1, 2), 4), (1, (3, 4), 3)],
                            capacity={1: 2, 2: 2})


def line_network(xs, speed=10.0):
    """Two-way road through points on the x axis (meters), single region."""
    coords = [(x, 0) for x in xs]
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    edges = []
    for a, b in zip(order, order[1:]):
        length = int(round(abs(xs[b] - xs[a])))
        edges += [(a, b, length), (b, a, length)]
    return RoadNetwork(coords, edges, [0] * len(xs), np.array([[speed]]))


def small_grid(k=6, seed=0, speed=10.0):
    from rideshare_rpc.network import grid_city

    return grid_city(k, spacing=500, regions_per_side=2, seed=seed, speed=speed)


def random_trip_batch(rng: np.random.Generator, net, n_drivers, n_pass, capacity=2, slack=(1.5, 3.0)):
    """Drivers and passengers with windows loose enough that some sharing is feasible."""
    n = net.n
    T = net.time
    drivers = []
    for i in range(n_drivers):
        o, d = rng.choice(n, 2, replace=False)
        sp = float(T[o, d])
        z = int(sp * rng.uniform(*slack)) + 60
        a = int(rng.integers(0, 300))
        drivers.append(Driver(i, int(o), int(d), capacity, a, a + int(2 * (sp + z)) + 1, z, int(sp + z) + 1))
    passengers = []
    for j in range(n_pass):
        o, d = rng.choice(n, 2, replace=False)
        sp = float(T[o, d])
        a = int(rng.integers(0, 300))
        passengers.append(Passenger(j, int(o), int(d), a, a + int(sp * rng.uniform(2, 4)) + 60,
                                    int(sp * rng.uniform(1.5, 2.5)) + 30))
    return drivers, passengers
