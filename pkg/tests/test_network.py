import json

import numpy as np
import pytest

from rideshare_rpc.network import RoadNetwork, grid_city

from .conftest import line_network


def test_line_distances_and_times():
    net = line_network([0, 1000, 2500], speed=10.0)
    assert net.dist.tolist() == [[0, 1000, 2500], [1000, 0, 1500], [2500, 1500, 0]]
    assert net.time[0, 2] == pytest.approx(250.0)


def test_straight_line_never_exceeds_road_distance():
    net = grid_city(8, spacing=400, regions_per_side=2, seed=3)
    n = net.n
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    assert (net.straight_line(a, b) <= net.dist + 1e-9).all()


def test_regions_cover_blocks():
    net = grid_city(6, regions_per_side=3)
    assert net.num_regions == 9
    assert sorted(np.bincount(net.region).tolist()) == [4] * 9


def test_with_speed_keeps_geometry():
    net = grid_city(5, regions_per_side=1, speed=5.0)
    fast = net.with_speed(np.array([[10.0]]))
    assert fast.dist is net.dist
    assert np.allclose(fast.time * 2, net.time)


def test_json_round_trip():
    net = grid_city(4, regions_per_side=2, seed=1)
    back = RoadNetwork.from_json(json.loads(json.dumps(net.to_json())))
    assert (back.dist == net.dist).all() and np.allclose(back.time, net.time)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        RoadNetwork([(0, 0), (1, 0)], [(0, 1, 0)], [0, 0], [[1.0]])
    with pytest.raises(ValueError):
        RoadNetwork([(0, 0), (1, 0)], [(0, 1, 1)], [0, 0], [[0.0]])
    with pytest.raises(ValueError):
        _ = RoadNetwork([(0, 0), (1, 0)], [(0, 1, 1)], [0, 0], [[1.0]]).dist


def test_uneven_grid_has_no_empty_region():
    net = grid_city(8, regions_per_side=5)
    assert np.bincount(net.region, minlength=25).min() >= 1
    with pytest.raises(ValueError):
        grid_city(3, regions_per_side=4)
