"""Interference-free link selection: exact MIS, greedy MIS, and the
virtual-cluster scheduler with its deterministic 1-in-17 activation floor.

All schedulers return an independent set of the conflict graph. The exact
solver is capped because maximum independent set is NP-hard; the greedy
solver scales to the sizes the scaling experiments need; the cluster
scheduler never materializes the conflict graph at all and comes with the
guarantee that at least ceil(G/17) of the G good clusters activate.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heapify, heappop, heappush

import numpy as np

from .caching import NetworkState
from .geometry import cluster_partition
from .linkplan import ConflictGraph, PotentialLinks, enumerate_potential_links


class GraphTooLargeError(ValueError):
    """Raised when a graph exceeds the exact solver's vertex cap."""


@dataclass(frozen=True)
class Schedule:
    """An activated link set. active holds sorted vertex ids of the
    conflict graph (equivalently, indices into the potential-link list)."""

    active: np.ndarray
    method: str
    good_clusters: int | None = None

    def __len__(self) -> int:
        return len(self.active)


def is_independent_set(graph: ConflictGraph, active: np.ndarray) -> bool:
    """True when no two of the given vertices are adjacent."""
    mask = np.zeros(graph.num_vertices, dtype=bool)
    mask[np.asarray(active, dtype=np.int64)] = True
    edges = graph.edges()
    if len(edges) == 0:
        return True
    return not bool(np.any(mask[edges[:, 0]] & mask[edges[:, 1]]))


def mis_exact(graph: ConflictGraph, max_vertices: int = 40) -> Schedule:
    """Maximum independent set by branch and bound.

    Branches on a maximum-degree vertex of the residual graph (ties broken
    by lowest index), include-first, pruning whenever the current set plus
    all remaining vertices cannot beat the incumbent.
    """
    nv = graph.num_vertices
    if nv > max_vertices:
        raise GraphTooLargeError(
            f"graph has {nv} vertices, exact solver capped at {max_vertices}; "
            "use mis_greedy for larger instances"
        )
    adj = [0] * nv
    for v in range(nv):
        bits = 0
        for w in graph.neighbors_of(v).tolist():
            bits |= 1 << w
        adj[v] = bits

    best_size = 0
    best_set = 0

    def expand(alive: int, current: int, size: int) -> None:
        nonlocal best_size, best_set
        if alive == 0:
            if size > best_size:
                best_size, best_set = size, current
            return
        if size + alive.bit_count() <= best_size:
            return
        pick, pick_deg = -1, -1
        scan = alive
        while scan:
            low = scan & -scan
            v = low.bit_length() - 1
            d = (adj[v] & alive).bit_count()
            if d > pick_deg:
                pick_deg, pick = d, v
            scan ^= low
        expand(alive & ~(adj[pick] | (1 << pick)), current | (1 << pick), size + 1)
        expand(alive & ~(1 << pick), current, size)

    expand((1 << nv) - 1, 0, 0)
    active = np.array([v for v in range(nv) if (best_set >> v) & 1], dtype=np.int64)
    return Schedule(active=active, method="exact")


def mis_greedy(graph: ConflictGraph) -> Schedule:
    """Maximal independent set by repeated minimum-degree selection.

    Selects the minimum-degree vertex of the residual graph (ties by
    lowest index), removes it and its neighbors, repeats. Implemented with
    a lazy heap keyed on degree * V + vertex so stale entries are skipped.
    """
    nv = graph.num_vertices
    if nv == 0:
        return Schedule(active=np.empty(0, dtype=np.int64), method="greedy")
    indptr = graph.indptr
    indices = graph.indices
    deg = np.diff(indptr).tolist()
    alive = bytearray([1]) * nv
    heap = [deg[v] * nv + v for v in range(nv)]
    heapify(heap)
    chosen: list[int] = []
    while heap:
        key = heappop(heap)
        d, v = divmod(key, nv)
        if not alive[v] or deg[v] != d:
            continue
        chosen.append(v)
        alive[v] = 0
        for w in indices[indptr[v] : indptr[v + 1]].tolist():
            if alive[w]:
                alive[w] = 0
                for x in indices[indptr[w] : indptr[w + 1]].tolist():
                    if alive[x]:
                        nd = deg[x] - 1
                        deg[x] = nd
                        heappush(heap, nd * nv + x)
    return Schedule(active=np.array(sorted(chosen), dtype=np.int64), method="greedy")


def _intra_cluster_links(state: NetworkState, links: PotentialLinks):
    grid = cluster_partition(state.placement, state.r)
    cells = grid.assignment
    intra = np.nonzero(cells[links.tx] == cells[links.rx])[0]
    return grid, intra, cells


def count_good_clusters(state: NetworkState, links: PotentialLinks | None = None) -> int:
    """Clusters containing at least one fully intra-cluster potential link.

    Because the cell diagonal equals r, a cluster is good exactly when
    some user in it requests a file cached by a different user in the same
    cell (self-requests already excluded at link enumeration).
    """
    if links is None:
        links = enumerate_potential_links(state)
    if len(links) == 0:
        return 0
    _, intra, cells = _intra_cluster_links(state, links)
    return len(np.unique(cells[links.tx[intra]]))


def cluster_schedule(state: NetworkState, links: PotentialLinks | None = None) -> Schedule:
    """Activate one link per good cluster, skipping conflicted clusters.

    Good clusters are visited in row-major cell order; each contributes
    its lexicographically first (rx, tx) intra-cluster link, activated
    unless it conflicts under the protocol model with a link already
    activated nearby. One activation can block at most 16 other clusters,
    so the schedule always reaches at least ceil(G/17) links.
    """
    if links is None:
        links = enumerate_potential_links(state)
    empty = np.empty(0, dtype=np.int64)
    if len(links) == 0:
        return Schedule(active=empty, method="cluster", good_clusters=0)
    grid, intra, cells = _intra_cluster_links(state, links)
    if len(intra) == 0:
        return Schedule(active=empty, method="cluster", good_clusters=0)

    txs = links.tx[intra]
    rxs = links.rx[intra]
    cell_of = cells[txs]
    order = np.lexsort((txs, rxs, cell_of))
    good_cells, first = np.unique(cell_of[order], return_index=True)
    reps = intra[order[first]]
    num_good = len(good_cells)

    pts = state.placement.points
    r2 = state.r * state.r
    naxis = grid.cells_per_axis
    occupied: dict[int, int] = {}
    active: list[int] = []
    for cell, lid in zip(good_cells.tolist(), reps.tolist()):
        row, col = divmod(cell, naxis)
        t = pts[links.tx[lid]]
        x = pts[links.rx[lid]]
        blocked = False
        # Endpoints of links in cells more than 2 apart are over r away,
        # so only the 5x5 neighborhood can hold a conflicting activation.
        for drow in range(-2, 3):
            nrow = row + drow
            if nrow < 0 or nrow >= naxis:
                continue
            for dcol in range(-2, 3):
                ncol = col + dcol
                if ncol < 0 or ncol >= naxis:
                    continue
                other = occupied.get(nrow * naxis + ncol)
                if other is None:
                    continue
                ot = pts[links.tx[other]]
                ox = pts[links.rx[other]]
                if ((t - ox) ** 2).sum() <= r2 or ((ot - x) ** 2).sum() <= r2:
                    blocked = True
                    break
            if blocked:
                break
        if not blocked:
            occupied[cell] = lid
            active.append(lid)

    return Schedule(
        active=np.array(sorted(active), dtype=np.int64),
        method="cluster",
        good_clusters=num_good,
    )
