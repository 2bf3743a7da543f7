"""Synthetic road network: jittered grid, region partition, speed table."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra


@dataclass
class RoadNetwork:
    """Directed road graph with planar coordinates (meters).

    ``speed[x, y]`` is the travel speed in m/s between regions ``x`` and
    ``y`` for the current interval. Distances are integer meters; edge
    lengths are rounded up so straight-line distance never exceeds the
    shortest-path distance.
    """

    coords: np.ndarray
    edges: np.ndarray
    region: np.ndarray
    speed: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64).reshape(-1, 2)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 3)
        self.region = np.asarray(self.region, dtype=np.int64)
        self.speed = np.asarray(self.speed, dtype=np.float64)
        if len(self.edges) and (self.edges[:, 2] <= 0).any():
            raise ValueError("edge lengths must be positive")
        if (self.speed <= 0).any():
            raise ValueError("speeds must be positive")

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def num_regions(self) -> int:
        return self.speed.shape[0]

    def with_speed(self, speed) -> "RoadNetwork":
        """Same geometry, new speed table; shares the distance cache."""
        net = RoadNetwork(self.coords, self.edges, self.region, speed)
        net._cache["dist"] = self.dist
        return net

    @property
    def dist(self) -> np.ndarray:
        """All-pairs shortest-path distances (int64 meters)."""
        if "dist" not in self._cache:
            g = csr_matrix((self.edges[:, 2].astype(np.float64), (self.edges[:, 0], self.edges[:, 1])),
                           shape=(self.n, self.n))
            d = dijkstra(g, directed=True)
            if np.isinf(d).any():
                raise ValueError("road network is not strongly connected")
            self._cache["dist"] = d.astype(np.int64)
        return self._cache["dist"]

    @property
    def time(self) -> np.ndarray:
        """Travel time matrix in seconds: distance / speed(region, region)."""
        if "time" not in self._cache:
            spd = self.speed[self.region[:, None], self.region[None, :]]
            self._cache["time"] = self.dist / spd
        return self._cache["time"]

    def straight_line(self, a, b):
        diff = self.coords[a] - self.coords[b]
        return np.hypot(diff[..., 0], diff[..., 1])

    def speed_between(self, a: int, b: int) -> float:
        return float(self.speed[self.region[a], self.region[b]])

    def to_json(self) -> dict:
        return {
            "coords": self.coords.astype(np.int64).tolist(),
            "edges": self.edges.tolist(),
            "region": self.region.tolist(),
            "speed": self.speed.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RoadNetwork":
        return cls(obj["coords"], obj["edges"], obj["region"], obj["speed"])


def grid_city(k: int = 30, spacing: float = 800.0, regions_per_side: int = 5,
              jitter: float = 0.2, speed: float = 7.0, seed: int = 0) -> RoadNetwork:
    """A ``k x k`` grid with jittered nodes and two-way streets.

    Regions are near-square blocks, ``regions_per_side ** 2`` of them.
    """
    if not 1 <= regions_per_side <= k:
        raise ValueError("need 1 <= regions_per_side <= k")
    rng = np.random.default_rng(seed)
    ii, jj = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    base = np.stack([jj.ravel(), ii.ravel()], axis=1) * spacing
    coords = np.round(base + rng.uniform(-jitter, jitter, size=base.shape) * spacing)
    node = lambda i, j: i * k + j
    edges = []
    for i in range(k):
        for j in range(k):
            for di, dj in ((0, 1), (1, 0)):
                if i + di < k and j + dj < k:
                    u, v = node(i, j), node(i + di, j + dj)
                    length = math.ceil(float(np.hypot(*(coords[u] - coords[v]))))
                    edges.append((u, v, length))
                    edges.append((v, u, length))
    # proportional blocks, so every region gets nodes even when k is not a multiple
    region = (ii.ravel() * regions_per_side // k) * regions_per_side + jj.ravel() * regions_per_side // k
    nreg = regions_per_side ** 2
    return RoadNetwork(coords, edges, region, np.full((nreg, nreg), float(speed)))
