import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jadelab.exceptions import ConfigError
from jadelab.topology import (
    Positions,
    build_udg,
    disk,
    place_explicit,
    place_gaussian,
    place_uniform,
    sector_of,
    validate_regime,
)


def brute_force_adjacency(coords):
    """O(n^2) reference: v adjacent to u iff u != v and squared distance <= 1."""
    n = len(coords)
    adj = [[] for _ in range(n)]
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            dx = coords[u][0] - coords[v][0]
            dy = coords[u][1] - coords[v][1]
            if dx * dx + dy * dy <= 1.0:
                adj[u].append(v)
    return adj


# -- placement ---------------------------------------------------------------

def test_uniform_single_point_in_bounds():
    pos = place_uniform(1, 4.0, seed=3)
    assert pos.n == 1
    assert np.all((pos.coords >= 0) & (pos.coords <= 4))


def test_uniform_is_deterministic():
    assert place_uniform(500, 4.0, seed=11) == place_uniform(500, 4.0, seed=11)
    assert place_uniform(500, 4.0, seed=11) != place_uniform(500, 4.0, seed=12)


def test_uniform_mean_x():
    pos = place_uniform(100, 4.0, seed=5)
    assert 4 * 0.4 <= pos.coords[:, 0].mean() <= 4 * 0.6


def test_uniform_rejects_empty():
    with pytest.raises(ConfigError, match="n"):
        place_uniform(0, 4.0, seed=1)


def test_gaussian_degenerate_variance():
    pos = place_gaussian(1, 1e-12, (2, 2), seed=1)
    assert np.allclose(pos.coords[0], (2, 2), atol=1e-9)


def test_gaussian_reproducible_and_moments():
    assert place_gaussian(500, 1.0, (2, 2), seed=4) == place_gaussian(500, 1.0, (2, 2), seed=4)
    pos = place_gaussian(10_000, 1.0, (2, 2), seed=4)
    assert abs(pos.coords[:, 0].std(ddof=1) - 1.0) <= 0.05


@pytest.mark.parametrize("sigma", [0.0, -1.0])
def test_gaussian_rejects_bad_sigma(sigma):
    with pytest.raises(ConfigError, match="sigma"):
        place_gaussian(5, sigma, (0, 0), seed=1)


def test_explicit():
    assert place_explicit([(0, 0)]).n == 1
    assert place_explicit([(0, 0), (0.5, 0)]).n == 2
    with pytest.raises(ConfigError):
        place_explicit([(0, 0), (math.nan, 0)])
    with pytest.raises(ConfigError):
        place_explicit([])


def test_positions_csv_roundtrip(tmp_path):
    pos = place_uniform(20, 4.0, seed=2)
    pos.to_csv(tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "node_id,x,y"
    assert Positions.from_csv(tmp_path / "p.csv") == pos


# -- unit disk graph ---------------------------------------------------------

def test_udg_small_cases():
    t = build_udg(place_explicit([(0, 0), (0.5, 0), (1.6, 0)]))
    assert t.adjacency == [[1], [0], []]
    t = build_udg(place_explicit([(0, 0), (1, 0)]))
    assert t.adjacency == [[1], [0]]


def test_udg_matches_brute_force():
    pos = place_uniform(50, 4.0, seed=9)
    assert build_udg(pos).adjacency == brute_force_adjacency(pos.coords.tolist())


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 3), st.floats(0, 3)), min_size=1, max_size=40))
def test_udg_properties(coords):
    t = build_udg(place_explicit(coords))
    adj = t.adjacency
    assert adj == brute_force_adjacency(coords)
    for u, nb in enumerate(adj):
        assert nb == sorted(set(nb))
        assert u not in nb
        for v in nb:
            assert u in adj[v]
        assert len(disk(t, u)) == len(nb) + 1


def test_disk():
    t = build_udg(place_explicit([(0, 0), (5, 5)]))
    assert disk(t, 1) == {1}
    star = [(0, 0)] + [(0.5 * math.cos(a), 0.5 * math.sin(a)) for a in np.linspace(0, 6, 7)]
    assert len(disk(build_udg(place_explicit(star)), 0)) == 8
    pos = place_uniform(60, 4.0, seed=1)
    t = build_udg(pos)
    ref = brute_force_adjacency(pos.coords.tolist())
    for u in range(60):
        assert disk(t, u) == set(ref[u]) | {u}
    with pytest.raises(KeyError):
        disk(t, 60)


# -- sectors -----------------------------------------------------------------

@pytest.mark.parametrize(
    "w, expected",
    [((0.5, 0), 0), ((0, 0.5), 1), ((-0.5, -0.01), 3)],
)
def test_sector_of(w, expected):
    t = build_udg(place_explicit([(0, 0), w]))
    assert sector_of(t, 0, 1) == expected


def test_sector_of_requires_neighbor():
    t = build_udg(place_explicit([(0, 0), (3, 0)]))
    with pytest.raises(ValueError):
        sector_of(t, 0, 1)


@pytest.mark.parametrize("w, expected", [((0.5, 0), 0), ((-0.5, 0), 3), ((0, -0.5), 4)])
def test_sector_on_exact_boundaries(w, expected):
    # 0 and 180 degrees sit on sector boundaries and go to the higher sector
    t = build_udg(place_explicit([(0, 0), w]))
    assert sector_of(t, 0, 1) == expected


def test_sectors_partition_and_diameter():
    pos = place_uniform(300, 4.0, seed=21)
    t = build_udg(pos)
    xy = pos.coords
    for u in range(t.n):
        sizes = [len(t.sector_members(u, s)) for s in range(6)]
        assert sum(sizes) == len(t.neighbors(u))
        for s in range(6):
            m = t.sector_members(u, s)
            if len(m) > 1:
                d = xy[m][:, None, :] - xy[m][None, :, :]
                assert (np.sqrt((d**2).sum(-1)) <= 1.0 + 1e-12).all()


@settings(max_examples=100, deadline=None)
@given(
    st.floats(0, 1), st.floats(0, 2 * math.pi),
    st.floats(0, 1), st.floats(0, 2 * math.pi),
)
def test_same_sector_pairs_within_range(r1, a1, r2, a2):
    pts = [(0, 0), (r1 * math.cos(a1), r1 * math.sin(a1)), (r2 * math.cos(a2), r2 * math.sin(a2))]
    t = build_udg(place_explicit(pts))
    if not (t.has_edge(0, 1) and t.has_edge(0, 2)):
        return
    if sector_of(t, 0, 1) == sector_of(t, 0, 2):
        assert math.dist(pts[1], pts[2]) <= 1.0 + 1e-9


# -- regime ------------------------------------------------------------------

def test_validate_regime():
    rep = validate_regime(build_udg(place_explicit([(0, 0), (2, 0)])), 0.3)
    assert not rep.connected
    clique = [(0.1 * math.cos(a), 0.1 * math.sin(a)) for a in np.linspace(0, 6, 7)]
    rep = validate_regime(build_udg(place_explicit(clique)), 0.3)
    assert rep.min_disk == 7 and rep.density_ok
    rep = validate_regime(build_udg(place_explicit([(0, 0), (0.9, 0), (1.8, 0)])), 0.3)
    assert rep.connected and rep.min_disk == 2 and not rep.density_ok
