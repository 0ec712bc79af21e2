"""User placement, fixed-radius neighborhoods, and the virtual-cluster grid.

Users live in the unit square. Two users can talk when their Euclidean
distance is at most the collaboration radius r, which makes the network a
random geometric graph. Neighbor search uses a uniform spatial hash with
cell width r, so construction is near-linear in n for sparse regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ROOT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Placement:
    """n points in [0, 1]^2, one per user."""

    n: int
    points: np.ndarray  # shape (n, 2)


@dataclass(frozen=True)
class Adjacency:
    """Symmetric, irreflexive fixed-radius adjacency.

    pairs holds each unordered neighbor pair once with i < j; indptr and
    indices form a CSR view of the same relation with both directions.
    """

    n: int
    r: float
    pairs: np.ndarray  # shape (M, 2), int64, i < j
    indptr: np.ndarray
    indices: np.ndarray

    def neighbors_of(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)


@dataclass(frozen=True)
class ClusterGrid:
    """Axis-aligned square grid with cell edge r/sqrt(2).

    The cell diagonal equals r, so any two users sharing a cell can talk.
    Cells are indexed row-major: cell_id = row * cells_per_axis + col,
    rows from the y coordinate, columns from x.
    """

    side: float
    cells_per_axis: int
    assignment: np.ndarray  # length n, int64 cell ids

    @property
    def num_cells(self) -> int:
        return self.cells_per_axis**2


def sample_placement(n: int, rng: np.random.Generator) -> Placement:
    """Place n users i.i.d. uniform in the unit square."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"number of users must be a positive integer, got {n!r}")
    points = rng.random((int(n), 2))
    points.flags.writeable = False
    return Placement(n=int(n), points=points)


def _csr_from_pairs(n: int, pairs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(pairs) == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
    src = np.concatenate([pairs[:, 0], pairs[:, 1]])
    dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst


def _expand_ranges(starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Concatenate arange(starts[k], starts[k] + counts[k]) for all k."""
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    out = np.repeat(starts + counts, counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(
        np.cumsum(counts) - counts, counts
    )
    return out - np.repeat(counts, counts) + offsets


def neighbors(placement: Placement, r: float) -> Adjacency:
    """All user pairs at distance <= r (closed ball), via spatial hashing.

    Points are bucketed into cells of width r; only the same cell and the
    forward half of the 8-neighborhood are scanned, so every pair is
    generated at most once.
    """
    r = float(r)
    if not math.isfinite(r) or r <= 0:
        raise ValueError(f"radius must be positive and finite, got {r}")
    pts = placement.points
    n = placement.n

    cx = np.floor(pts[:, 0] / r).astype(np.int64)
    cy = np.floor(pts[:, 1] / r).astype(np.int64)
    ncols = int(max(cx.max(), cy.max())) + 3
    enc = cx * ncols + cy

    order = np.argsort(enc, kind="stable")
    senc = enc[order]

    cand_left = []
    cand_right = []
    # Forward half-neighborhood offsets; (0, 0) handled with j > i below.
    for dx, dy in ((0, 0), (0, 1), (1, -1), (1, 0), (1, 1)):
        target = senc + (dx * ncols + dy)
        lo = np.searchsorted(senc, target, side="left")
        hi = np.searchsorted(senc, target, side="right")
        if dx == 0 and dy == 0:
            lo = np.arange(1, n + 1, dtype=np.int64)
        counts = np.maximum(hi - lo, 0)
        left = np.repeat(np.arange(n, dtype=np.int64), counts)
        right = _expand_ranges(lo.astype(np.int64), counts)
        cand_left.append(left)
        cand_right.append(right)

    li = order[np.concatenate(cand_left)] if cand_left else np.empty(0, np.int64)
    ri = order[np.concatenate(cand_right)] if cand_right else np.empty(0, np.int64)
    if len(li):
        d2 = ((pts[li] - pts[ri]) ** 2).sum(axis=1)
        keep = d2 <= r * r
        li, ri = li[keep], ri[keep]

    lo_id = np.minimum(li, ri)
    hi_id = np.maximum(li, ri)
    pairs = np.stack([lo_id, hi_id], axis=1) if len(li) else np.empty((0, 2), np.int64)
    if len(pairs):
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    pairs.flags.writeable = False

    indptr, indices = _csr_from_pairs(n, pairs)
    return Adjacency(n=n, r=r, pairs=pairs, indptr=indptr, indices=indices)


def cluster_partition(placement: Placement, r: float) -> ClusterGrid:
    """Partition the unit square into virtual clusters of edge r/sqrt(2).

    Grid anchored at the origin; a point belongs to cell floor(coord/side)
    (so a point exactly on a boundary falls in the higher cell), with
    coordinate 1.0 clamped into the last cell. cells_per_axis is
    ceil(1/side); the outermost row and column may be partial.
    """
    r = float(r)
    if not math.isfinite(r) or r <= 0 or r > ROOT2 + 1e-12:
        raise ValueError(f"radius must lie in (0, sqrt(2)], got {r}")
    side = r / ROOT2
    cells_per_axis = int(math.ceil(1.0 / side - 1e-12))
    pts = placement.points
    col = np.minimum(np.floor(pts[:, 0] / side).astype(np.int64), cells_per_axis - 1)
    row = np.minimum(np.floor(pts[:, 1] / side).astype(np.int64), cells_per_axis - 1)
    assignment = row * cells_per_axis + col
    assignment.flags.writeable = False
    return ClusterGrid(side=side, cells_per_axis=cells_per_axis, assignment=assignment)
