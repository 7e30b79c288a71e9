"""Node placement, unit disk graphs, and disk/sector geometry.

Distances are normalized so that the transmission radius is 1. Two nodes are
adjacent iff their Euclidean distance is at most 1 (inclusive).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .exceptions import ConfigError

NUM_SECTORS = 6

SeedLike = int | np.random.Generator | np.random.SeedSequence | None


@dataclass(frozen=True, eq=False)
class Positions:
    """Immutable ``(n, 2)`` array of node coordinates."""

    coords: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coords, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ConfigError(f"coords: expected shape (n, 2), got {arr.shape}")
        if arr.shape[0] < 1:
            raise ConfigError("coords: at least one node is required")
        if not np.all(np.isfinite(arr)):
            raise ConfigError("coords: all coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Positions):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def to_csv(self, path: str | Path) -> None:
        """Write ``node_id,x,y`` rows."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["node_id", "x", "y"])
            for i, (x, y) in enumerate(self.coords):
                w.writerow([i, repr(float(x)), repr(float(y))])

    @classmethod
    def from_csv(cls, path: str | Path) -> "Positions":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        rows.sort(key=lambda r: int(r["node_id"]))
        if [int(r["node_id"]) for r in rows] != list(range(len(rows))):
            raise ConfigError("node_id: ids must be contiguous from 0")
        return cls(np.array([[float(r["x"]), float(r["y"])] for r in rows]).reshape(-1, 2))


def _rng(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(seed)


def place_uniform(n: int, side: float = 4.0, seed: SeedLike = None) -> Positions:
    """``n`` i.i.d. uniform points on the square ``[0, side]^2``."""
    if n < 1:
        raise ConfigError(f"n: must be >= 1, got {n}")
    if not side > 0:
        raise ConfigError(f"side: must be > 0, got {side}")
    return Positions(_rng(seed).uniform(0.0, side, size=(n, 2)))


def place_gaussian(
    n: int,
    sigma: float = 1.0,
    center: Sequence[float] = (2.0, 2.0),
    seed: SeedLike = None,
) -> Positions:
    """``n`` i.i.d. points with each coordinate ``Normal(center, sigma^2)``.

    Points are not clipped to any plane.
    """
    if n < 1:
        raise ConfigError(f"n: must be >= 1, got {n}")
    if not sigma > 0:
        raise ConfigError(f"sigma: must be > 0, got {sigma}")
    c = np.asarray(center, dtype=np.float64)
    if c.shape != (2,):
        raise ConfigError(f"center: expected a 2D point, got {center!r}")
    return Positions(c + sigma * _rng(seed).standard_normal(size=(n, 2)))


def place_explicit(coords: Iterable[Sequence[float]]) -> Positions:
    coords = list(coords)
    if not coords:
        raise ConfigError("coords: empty coordinate list")
    return Positions(np.asarray(coords, dtype=np.float64).reshape(len(coords), -1))


def _sector_ids(dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    deg = np.degrees(np.arctan2(dy, dx)) % 360.0
    return (np.floor_divide(deg, 60.0).astype(np.int64) % NUM_SECTORS).astype(np.int8)


@dataclass(frozen=True, eq=False)
class Topology:
    """Unit disk graph over ``positions`` in CSR form.

    ``indices[indptr[u]:indptr[u+1]]`` are the neighbors of ``u`` in ascending
    order, and ``sectors`` holds the matching sector id (0..5) of each
    neighbor as seen from ``u``.
    """

    positions: Positions
    indptr: np.ndarray
    indices: np.ndarray
    sectors: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.positions.n

    @cached_property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(u).tolist() for u in range(self.n)]

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix (int32)."""
        data = np.ones(len(self.indices), dtype=np.int32)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def _check(self, u: int) -> int:
        if not 0 <= int(u) < self.n:
            raise KeyError(f"unknown node id {u}")
        return int(u)

    def neighbors(self, u: int) -> np.ndarray:
        u = self._check(u)
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def neighbor_sectors(self, u: int) -> np.ndarray:
        u = self._check(u)
        return self.sectors[self.indptr[u]:self.indptr[u + 1]]

    def sector_members(self, u: int, sector: int) -> np.ndarray:
        """Neighbors of ``u`` lying in ``sector``."""
        if not 0 <= sector < NUM_SECTORS:
            raise ValueError(f"sector must be in 0..5, got {sector}")
        return self.neighbors(u)[self.neighbor_sectors(u) == sector]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)


def build_udg(positions: Positions) -> Topology:
    """Build the unit disk graph: edge iff squared distance <= 1.0."""
    pts = positions.coords
    n = positions.n
    # KD-tree only proposes candidates; the exact rule is applied below.
    pairs = cKDTree(pts).query_pairs(1.0 + 1e-9, output_type="ndarray")
    if len(pairs):
        d = pts[pairs[:, 0]] - pts[pairs[:, 1]]
        pairs = pairs[(d * d).sum(axis=1) <= 1.0]
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]]).astype(np.int64)
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]]).astype(np.int64)
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    d = pts[cols] - pts[rows]
    sectors = _sector_ids(d[:, 0], d[:, 1])
    for a in (indptr, cols, sectors):
        a.setflags(write=False)
    return Topology(positions, indptr, cols, sectors)


def disk(t: Topology, u: int) -> set[int]:
    """Closed unit disk ``N(u) | {u}``."""
    return set(t.neighbors(u).tolist()) | {int(u)}


def sector_of(t: Topology, u: int, w: int) -> int:
    if not t.has_edge(u, w):
        raise ValueError(f"node {w} is not a neighbor of {u}")
    d = t.positions.coords[w] - t.positions.coords[u]
    return int(_sector_ids(np.array([d[0]]), np.array([d[1]]))[0])


@dataclass(frozen=True)
class RegimeReport:
    connected: bool
    components: int
    min_disk: int
    density_threshold: float
    density_ok: bool

    def as_dict(self) -> dict:
        return {
            "connected": self.connected,
            "components": self.components,
            "min_disk": self.min_disk,
            "density_threshold": self.density_threshold,
            "density_ok": self.density_ok,
        }


def validate_regime(t: Topology, epsilon: float) -> RegimeReport:
    """Check connectivity and the ``|D(v)| >= 2/epsilon`` density condition."""
    ncomp, _ = connected_components(t.matrix, directed=False)
    min_disk = int(t.degree.min()) + 1
    threshold = 2.0 / epsilon
    return RegimeReport(
        connected=ncomp == 1,
        components=int(ncomp),
        min_disk=min_disk,
        density_threshold=threshold,
        density_ok=min_disk >= threshold,
    )


def disk_area_density(n: int, side: float) -> float:
    """Expected nodes per unit disk for ``n`` uniform nodes on a square."""
    return n / (side * side) * math.pi
