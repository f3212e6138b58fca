"""Scale-free interaction graphs: generation, rewiring and hop distances.

Adjacency lists are ordered and removal swaps the last neighbour into the
freed slot.  The compiled engine mirrors this layout exactly, which is what
makes uniform choices over neighbours reproducible across both engines.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

STAKE = 10.0


class InteractionGraph:
    """Undirected simple graph with a stable, indexable edge list.

    ``edges[e]`` keeps its slot for the life of the graph; rewiring replaces
    the endpoints in place so that the number of edges never changes.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("graph needs at least one node")
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.edges: list[tuple[int, int]] = []
        self._eid: dict[tuple[int, int], int] = {}

    @staticmethod
    def _key(u: int, v: int) -> tuple[int, int]:
        return (u, v) if u < v else (v, u)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return self._key(u, v) in self._eid

    def edge_id(self, u: int, v: int) -> int:
        return self._eid[self._key(u, v)]

    def neighbors(self, v: int) -> list[int]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adj], dtype=np.int64)

    def add_edge(self, u: int, v: int) -> int:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge {u}-{v} outside 0..{self.n - 1}")
        if u == v:
            raise ValueError(f"self-loop at {u}")
        if self.has_edge(u, v):
            raise ValueError(f"duplicate edge {u}-{v}")
        e = len(self.edges)
        self.edges.append((u, v))
        self._eid[self._key(u, v)] = e
        self.adj[u].append(v)
        self.adj[v].append(u)
        return e

    def _unlink(self, u: int, v: int) -> None:
        row = self.adj[u]
        idx = row.index(v)
        row[idx] = row[-1]
        row.pop()

    def move_edge(self, i: int, j: int, k: int) -> None:
        """Replace edge i-j by i-k, keeping its slot in the edge list."""
        e = self._eid.pop(self._key(i, j))
        self._unlink(i, j)
        self._unlink(j, i)
        self.adj[i].append(k)
        self.adj[k].append(i)
        self.edges[e] = (i, k)
        self._eid[self._key(i, k)] = e

    def copy(self) -> "InteractionGraph":
        g = InteractionGraph(self.n)
        g.adj = [list(a) for a in self.adj]
        g.edges = list(self.edges)
        g._eid = dict(self._eid)
        return g

    def check(self) -> None:
        """Raise AssertionError if any structural invariant is broken."""
        seen = set()
        for u in range(self.n):
            row = self.adj[u]
            assert len(row) == len(set(row)), f"parallel edge at {u}"
            assert u not in row, f"self-loop at {u}"
            for v in row:
                assert u in self.adj[v], f"asymmetric edge {u}-{v}"
                seen.add(self._key(u, v))
        assert seen == set(self._eid), "edge index out of sync with adjacency"
        assert sum(len(r) for r in self.adj) == 2 * len(self.edges)
        for e, (u, v) in enumerate(self.edges):
            assert self._eid[self._key(u, v)] == e

    def to_arrays(self, capacity: int | None = None):
        """Padded adjacency arrays for the compiled engine.

        Returns ``(edges[E,2], nbr[n,cap], nbr_eid[n,cap], deg[n])``.
        """
        deg = self.degrees().astype(np.int32)
        cap = capacity or max(8, int(deg.max()) * 2)
        nbr = np.full((self.n, cap), -1, dtype=np.int32)
        nbr_eid = np.full((self.n, cap), -1, dtype=np.int32)
        for u, row in enumerate(self.adj):
            for s, v in enumerate(row):
                nbr[u, s] = v
                nbr_eid[u, s] = self.edge_id(u, v)
        edges = np.array(self.edges, dtype=np.int32).reshape(-1, 2)
        return edges, nbr, nbr_eid, deg

    @classmethod
    def from_arrays(cls, n, edges, nbr, deg) -> "InteractionGraph":
        g = cls(n)
        g.edges = [(int(u), int(v)) for u, v in edges]
        g._eid = {cls._key(u, v): e for e, (u, v) in enumerate(g.edges)}
        g.adj = [[int(v) for v in nbr[u, :deg[u]]] for u in range(n)]
        return g

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int32)
        indptr[1:] = np.cumsum([len(a) for a in self.adj])
        indices = np.array([v for row in self.adj for v in row], dtype=np.int32)
        return indptr, indices

    def write_edgelist(self, path: str | Path) -> None:
        """One ``u v`` pair per line, in edge-slot order."""
        with open(path, "w") as fh:
            for u, v in self.edges:
                fh.write(f"{u} {v}\n")

    @classmethod
    def read_edgelist(cls, path: str | Path, n: int | None = None) -> "InteractionGraph":
        pairs = []
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    u, v = line.split()
                    pairs.append((int(u), int(v)))
        if n is None:
            n = 1 + max(max(p) for p in pairs)
        g = cls(n)
        for u, v in pairs:
            g.add_edge(u, v)
        return g


def preferential_targets(stubs: list[int], m: int, rng: np.random.Generator) -> list[int]:
    """Pick ``m`` distinct nodes with probability proportional to degree.

    ``stubs`` lists every node once per incident edge end, so a uniform pick
    from it is a degree-proportional pick.  Repeats are redrawn, which gives
    sampling without replacement.
    """
    if m > len(set(stubs)):
        raise ValueError("not enough distinct nodes to attach to")
    chosen: list[int] = []
    while len(chosen) < m:
        t = stubs[int(rng.integers(0, len(stubs)))]
        if t not in chosen:
            chosen.append(t)
    return chosen


def generate_ba(n: int, rng: np.random.Generator, max_links: int = 3) -> InteractionGraph:
    """Barabasi-Albert graph with a random number of links per new node.

    Nodes 0 and 1 start out linked.  Every later node draws ``m`` uniformly
    from ``1..max_links`` (capped by the number of existing nodes) and links
    to ``m`` distinct existing nodes chosen preferentially by degree.
    """
    if n < 2:
        raise ValueError("Barabasi-Albert graph needs n >= 2")
    g = InteractionGraph(n)
    g.add_edge(0, 1)
    stubs = [0, 1]
    for v in range(2, n):
        m = min(int(rng.integers(1, max_links + 1)), v)
        targets = preferential_targets(stubs, m, rng)
        for t in targets:
            g.add_edge(v, t)
        stubs.extend(targets)
        stubs.extend([v] * m)
    return g


def rewire_probability(s_i: float, s_j: float, stake: float = STAKE) -> float:
    """Chance that responder ``i`` drops proposer ``j`` (never negative)."""
    return max(0.0, (s_i - s_j) / stake)


class RewireStatus(enum.IntEnum):
    REWIRED = 0
    BLOCKED_LAST_LINK = 1
    BLOCKED_NO_TARGET = 2


@dataclass(frozen=True)
class RewireResult:
    status: RewireStatus
    target: int = -1

    @property
    def rewired(self) -> bool:
        return self.status == RewireStatus.REWIRED


def rewire(graph: InteractionGraph, i: int, j: int, rng: np.random.Generator) -> RewireResult:
    """Move ``i``'s link from ``j`` to a random neighbour of ``j``.

    Blocked (and nothing changes) when either endpoint would lose its last
    link, or when every other neighbour of ``j`` is already linked to ``i``.
    """
    if not graph.has_edge(i, j):
        raise ValueError(f"no edge {i}-{j} to rewire")
    if graph.degree(i) <= 1 or graph.degree(j) <= 1:
        return RewireResult(RewireStatus.BLOCKED_LAST_LINK)
    mine = graph.adj[i]
    candidates = [k for k in graph.adj[j] if k != i and k not in mine]
    if not candidates:
        return RewireResult(RewireStatus.BLOCKED_NO_TARGET)
    k = candidates[int(rng.integers(0, len(candidates)))]
    graph.move_edge(i, j, k)
    return RewireResult(RewireStatus.REWIRED, k)


def hop_distances(graph: InteractionGraph, source: int, max_h: int) -> np.ndarray:
    """BFS hop counts from ``source``; nodes further than ``max_h`` get -1."""
    dist = np.full(graph.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if dist[u] >= max_h:
            continue
        for v in graph.adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def bfs_distance(graph: InteractionGraph, a: int, b: int, max_h: int) -> float:
    """Shortest hop count from ``a`` to ``b``, or ``inf`` beyond ``max_h``."""
    d = hop_distances(graph, a, max_h)[b]
    return math.inf if d < 0 else int(d)
