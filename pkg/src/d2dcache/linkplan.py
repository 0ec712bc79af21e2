"""Potential D2D links and their protocol-model conflict graph.

A potential link is an ordered pair (tx, rx): tx caches exactly the file
rx requests and the two sit within the collaboration radius. A user whose
own cache already holds its requested file is served locally and spawns
no links at all; self-requests never appear as links.

Two links conflict when either transmitter lands within the radius of the
other receiver, or when they share a user in any role. The second rule is
the half-duplex assumption: a single-radio node cannot take part in two
simultaneous transmissions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .caching import NetworkState
from .geometry import Adjacency, Placement, neighbors


@dataclass(frozen=True)
class PotentialLink:
    tx: int
    rx: int
    file: int


@dataclass(frozen=True)
class PotentialLinks:
    """Columnar list of potential links, sorted by (rx, tx)."""

    tx: np.ndarray
    rx: np.ndarray
    file: np.ndarray

    def __len__(self) -> int:
        return len(self.tx)

    def __getitem__(self, i: int) -> PotentialLink:
        return PotentialLink(int(self.tx[i]), int(self.rx[i]), int(self.file[i]))

    def as_tuples(self) -> list[tuple[int, int, int]]:
        return [(int(t), int(r), int(f)) for t, r, f in zip(self.tx, self.rx, self.file)]


@dataclass(frozen=True)
class ConflictGraph:
    """Vertices are potential links; edges mark pairs that cannot be
    active simultaneously. Adjacency is stored CSR-style with sorted
    neighbor lists; edges() lists each undirected edge once."""

    num_vertices: int
    indptr: np.ndarray
    indices: np.ndarray
    num_edges: int
    links: PotentialLinks | None = field(default=None, repr=False)

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors_of(u)
        pos = np.searchsorted(row, v)
        return bool(pos < len(row) and row[pos] == v)

    def edges(self) -> np.ndarray:
        """All undirected edges, each once, as an (E, 2) array with u < v."""
        src = np.repeat(np.arange(self.num_vertices), np.diff(self.indptr))
        dst = self.indices
        keep = src < dst
        return np.stack([src[keep], dst[keep]], axis=1)

    def to_edge_list(self) -> str:
        """Plain-text format: header 'p V E', then one 'u v' line per edge."""
        lines = [f"p {self.num_vertices} {self.num_edges}"]
        lines.extend(f"{u} {v}" for u, v in self.edges())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edges(
        cls, num_vertices: int, edge_pairs: np.ndarray, links: PotentialLinks | None = None
    ) -> "ConflictGraph":
        edge_pairs = np.asarray(edge_pairs, dtype=np.int64).reshape(-1, 2)
        if len(edge_pairs):
            if edge_pairs.min() < 0 or edge_pairs.max() >= num_vertices:
                raise ValueError("edge endpoint outside vertex range")
            if (edge_pairs[:, 0] == edge_pairs[:, 1]).any():
                raise ValueError("self-loops are not allowed")
            enc = (
                np.minimum(edge_pairs[:, 0], edge_pairs[:, 1]) * num_vertices
                + np.maximum(edge_pairs[:, 0], edge_pairs[:, 1])
            )
            enc = np.unique(enc)
            lo, hi = enc // num_vertices, enc % num_vertices
        else:
            lo = hi = np.empty(0, dtype=np.int64)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        indptr = np.zeros(num_vertices + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(
            num_vertices=int(num_vertices),
            indptr=indptr,
            indices=dst[order],
            num_edges=len(lo),
            links=links,
        )

    @classmethod
    def from_edge_list(cls, text: str) -> "ConflictGraph":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("p "):
            raise ValueError("edge list must start with a 'p <vertices> <edges>' header")
        head = lines[0].split()
        if len(head) != 3:
            raise ValueError(f"malformed header line: {lines[0]!r}")
        num_vertices, num_edges = int(head[1]), int(head[2])
        body = lines[1:]
        if len(body) != num_edges:
            raise ValueError(f"header promises {num_edges} edges, found {len(body)}")
        pairs = np.empty((num_edges, 2), dtype=np.int64)
        for k, ln in enumerate(body):
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"malformed edge line: {ln!r}")
            pairs[k] = (int(parts[0]), int(parts[1]))
        return cls.from_edges(num_vertices, pairs)


def _ragged_cartesian(starts_a, counts_a, starts_b, counts_b):
    """Positions of all A_k x B_k products for ragged slice families."""
    total = counts_a * counts_b
    grand = int(total.sum())
    if grand == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    group = np.repeat(np.arange(len(total), dtype=np.int64), total)
    within = np.arange(grand, dtype=np.int64) - np.repeat(
        np.cumsum(total) - total, total
    )
    cb = counts_b[group]
    return starts_a[group] + within // cb, starts_b[group] + within % cb


def _group_by(keys: np.ndarray, values: np.ndarray, n_keys: int):
    """Sort values by key; return (sorted_values, indptr over keys)."""
    order = np.argsort(keys, kind="stable")
    indptr = np.zeros(n_keys + 1, dtype=np.int64)
    np.add.at(indptr, keys + 1, 1)
    np.cumsum(indptr, out=indptr)
    return values[order], indptr


def enumerate_potential_links(
    state: NetworkState, adjacency: Adjacency | None = None
) -> PotentialLinks:
    """All (tx, rx) pairs within radius where tx caches what rx requests.

    Receivers already holding their own request are skipped entirely.
    The result is sorted by (rx, tx), which fixes vertex numbering for
    the conflict graph.
    """
    if adjacency is None:
        adjacency = neighbors(state.placement, state.r)
    pairs = adjacency.pairs
    if len(pairs) == 0:
        empty = np.empty(0, dtype=np.int64)
        return PotentialLinks(tx=empty, rx=empty, file=empty.copy())
    tx = np.concatenate([pairs[:, 0], pairs[:, 1]])
    rx = np.concatenate([pairs[:, 1], pairs[:, 0]])
    keep = (state.caches[tx] == state.requests[rx]) & (
        state.caches[rx] != state.requests[rx]
    )
    tx, rx = tx[keep], rx[keep]
    order = np.lexsort((tx, rx))
    tx, rx = tx[order], rx[order]
    return PotentialLinks(tx=tx, rx=rx, file=state.requests[rx])


def build_conflict_graph(
    links: PotentialLinks,
    placement: Placement,
    r: float,
    adjacency: Adjacency | None = None,
) -> ConflictGraph:
    """Protocol-model conflict graph over the given links.

    Distinct links a, b are adjacent iff any of:
      (i)  distance(a.tx, b.rx) <= r
      (ii) distance(b.tx, a.rx) <= r
      (iii) they share a user in any role (half-duplex, one radio each).
    """
    nv = len(links)
    if nv == 0:
        return ConflictGraph.from_edges(0, np.empty((0, 2), np.int64), links)
    if adjacency is None:
        adjacency = neighbors(placement, r)
    n = placement.n
    ids = np.arange(nv, dtype=np.int64)

    by_tx, tx_indptr = _group_by(links.tx, ids, n)
    by_rx, rx_indptr = _group_by(links.rx, ids, n)

    # Rules (i)/(ii): for every ordered close pair (u, w), every link
    # transmitting from u conflicts with every link receiving at w.
    upairs = adjacency.pairs
    src = np.concatenate([upairs[:, 0], upairs[:, 1]])
    dst = np.concatenate([upairs[:, 1], upairs[:, 0]])
    ia, ib = _ragged_cartesian(
        tx_indptr[src], tx_indptr[src + 1] - tx_indptr[src],
        rx_indptr[dst], rx_indptr[dst + 1] - rx_indptr[dst],
    )
    interf_a, interf_b = by_tx[ia], by_rx[ib]
    keep = interf_a != interf_b
    interf_a, interf_b = interf_a[keep], interf_b[keep]

    # Rule (iii): links sharing any endpoint. Build the user->link
    # membership relation and pair up links within each user's bucket.
    member_user = np.concatenate([links.tx, links.rx])
    member_link = np.concatenate([ids, ids])
    by_user, user_indptr = _group_by(member_user, member_link, n)
    counts = np.diff(user_indptr)
    ja, jb = _ragged_cartesian(user_indptr[:-1], counts, user_indptr[:-1], counts)
    keep = ja < jb
    share_a, share_b = by_user[ja[keep]], by_user[jb[keep]]

    all_a = np.concatenate([interf_a, share_a])
    all_b = np.concatenate([interf_b, share_b])
    edge_pairs = np.stack([all_a, all_b], axis=1)
    return ConflictGraph.from_edges(nv, edge_pairs, links)
