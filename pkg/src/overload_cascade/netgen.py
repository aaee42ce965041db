"""
Test networks for the cascade model: generators, edge-list I/O, degree
statistics and giant-component measurement.

All stochastic functions take an explicit integer seed and draw from
numpy's PCG64 bit generator (``numpy.random.default_rng``), so a given
``(function, parameters, seed)`` triple always yields the same graph.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ConfigError, EdgeListError

__all__ = [
    "Network",
    "DegreeStats",
    "gen_er",
    "gen_ba",
    "degree_stats",
    "poisson_degree_stats",
    "giant_component",
    "save_edge_list",
    "load_edge_list",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Network:
    """Undirected simple graph in compressed adjacency form.

    ``indices[indptr[v]:indptr[v+1]]`` holds the sorted neighbours of node
    ``v``. Instances are immutable and safe to share between workers;
    build them with :meth:`from_edges`.
    """

    node_count: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable) -> "Network":
        """Build a network from ``(u, v)`` pairs, rejecting loops and duplicates."""
        node_count = int(node_count)
        if node_count < 1:
            raise ValueError(f"node_count must be positive, got {node_count}")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= node_count):
            raise ValueError(f"edge endpoint outside [0, {node_count})")
        if np.any(e[:, 0] == e[:, 1]):
            v = int(e[e[:, 0] == e[:, 1]][0, 0])
            raise ValueError(f"self-loop on node {v}")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key = lo * node_count + hi
        if np.unique(key).size != key.size:
            raise ValueError("duplicate edge")
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=node_count), out=indptr[1:])
        return cls(node_count, _frozen(indptr), _frozen(dst))

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        """Per-node neighbour lists as plain Python ints."""
        return [self.neighbors(v).tolist() for v in range(self.node_count)]

    def edges(self) -> np.ndarray:
        """Edges as an ``(E, 2)`` array with ``u < v``, lexicographically sorted."""
        src = np.repeat(np.arange(self.node_count), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def to_csr(self) -> csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int8)
        n = self.node_count
        return csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def relabel(self, perm: np.ndarray) -> "Network":
        """Copy of the graph with node ``v`` renamed to ``perm[v]``."""
        perm = np.asarray(perm)
        return Network.from_edges(self.node_count, perm[self.edges()])


@dataclass(frozen=True)
class DegreeStats:
    """Degree distribution ``p_k`` (index = degree) and its first two moments."""

    p_k: np.ndarray
    mean_degree: float
    second_moment: float
    k_max: int
    node_count: int | None = field(default=None, compare=False)

    @classmethod
    def from_distribution(cls, p_k, node_count: int | None = None) -> "DegreeStats":
        p = np.asarray(p_k, dtype=float)
        if p.ndim != 1 or p.size == 0 or np.any(p < 0):
            raise ValueError("p_k must be a non-empty, non-negative 1-D vector")
        p = p / p.sum()
        nz = np.flatnonzero(p)
        p = _frozen(p[: nz[-1] + 1])
        k = np.arange(p.size)
        return cls(p, float(k @ p), float((k * k) @ p), int(p.size - 1), node_count)

    @property
    def excess_degree_mean(self) -> float:
        """Mean excess degree ``(<k^2> - <k>) / <k>`` of a neighbour."""
        return (self.second_moment - self.mean_degree) / self.mean_degree


def degree_stats(net: Network) -> DegreeStats:
    deg = net.degrees
    counts = np.bincount(deg, minlength=1)
    n = net.node_count
    p = _frozen(counts / n)
    # moments from integer sums so <k> = 2E/N holds to round-off
    return DegreeStats(
        p_k=p,
        mean_degree=float(deg.sum()) / n,
        second_moment=float((deg * deg).sum()) / n,
        k_max=int(counts.size - 1),
        node_count=n,
    )


def poisson_degree_stats(mean_degree: float, cutoff: float = 1e-12) -> DegreeStats:
    """Analytic Poisson(``mean_degree``) distribution, truncated once ``p_k < cutoff``
    past the mode and renormalised."""
    from scipy.stats import poisson

    if mean_degree <= 0:
        raise ValueError("mean_degree must be positive")
    k_hi = int(poisson.isf(cutoff, mean_degree)) + 2
    p = poisson.pmf(np.arange(k_hi + 1), mean_degree)
    mode = int(mean_degree)
    tail = np.flatnonzero((p < cutoff) & (np.arange(p.size) > mode))
    if tail.size:
        p = p[: tail[0]]
    return DegreeStats.from_distribution(p)


def gen_er(n: int, mean_degree: float, rng_seed: int) -> Network:
    """Erdos-Renyi G(n, p) graph with ``p = mean_degree / (n - 1)``.

    Pairs ``i < j`` are visited in row-major order and included by geometric
    skipping, which samples exactly G(n, p) in O(n + E).
    """
    if n < 2:
        raise ConfigError(f"ER graph needs n >= 2, got {n}")
    # n = 2 with mean_degree 1 is the one admitted complete graph
    if not (0 < mean_degree < n - 1 or (n == 2 and mean_degree == 1)):
        raise ConfigError(f"mean_degree must lie in (0, n-1), got {mean_degree}")
    p = mean_degree / (n - 1)
    total = n * (n - 1) // 2
    rng = np.random.default_rng(rng_seed)

    if p >= 1.0:
        pos = np.arange(total, dtype=np.int64)
    else:
        chunk = int(total * p + 10 * np.sqrt(total * p) + 16)
        parts = []
        last = -1
        while last < total:
            gaps = rng.geometric(p, size=chunk).astype(np.int64)
            idx = last + np.cumsum(gaps)
            parts.append(idx)
            last = int(idx[-1])
        pos = np.concatenate(parts)
        pos = pos[pos < total]

    rows = np.arange(n, dtype=np.int64)
    starts = rows * (n - 1) - rows * (rows - 1) // 2
    i = np.searchsorted(starts, pos, side="right") - 1
    j = pos - starts[i] + i + 1
    return Network.from_edges(n, np.column_stack([i, j]))


def gen_ba(n: int, m: int, rng_seed: int) -> Network:
    """Barabasi-Albert graph grown from an (m+1)-clique.

    Every new node attaches to ``m`` distinct existing nodes picked with
    probability proportional to their current degree; repeated picks are
    rejected and redrawn. Edge count is exactly ``C(m+1, 2) + (n-m-1) m``.
    """
    if m < 1 or m >= n:
        raise ConfigError(f"BA graph needs 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(rng_seed)
    n_edges = m * (m + 1) // 2 + (n - m - 1) * m
    edges = np.empty((n_edges, 2), dtype=np.int64)
    # each endpoint appears once per incident edge -> degree-proportional urn
    urn = np.empty(2 * n_edges, dtype=np.int64)

    e = 0
    for u in range(m + 1):
        for v in range(u + 1, m + 1):
            edges[e] = (u, v)
            urn[2 * e] = u
            urn[2 * e + 1] = v
            e += 1

    for new in range(m + 1, n):
        size = 2 * e
        chosen: list[int] = []
        while len(chosen) < m:
            draws = rng.random(2 * m)
            for x in draws:
                t = int(urn[int(x * size)])
                if t not in chosen:
                    chosen.append(t)
                    if len(chosen) == m:
                        break
        for t in chosen:
            edges[e] = (t, new)
            urn[2 * e] = t
            urn[2 * e + 1] = new
            e += 1

    return Network.from_edges(n, edges)


def giant_component(net: Network, alive: np.ndarray | None = None) -> tuple[int, np.ndarray]:
    """Largest connected component of the subgraph induced by ``alive`` nodes.

    Returns ``(size, membership)`` where ``membership[v]`` is a component id
    for alive nodes and -1 for removed ones. Component ids are assigned by
    scipy and carry no order.
    """
    n = net.node_count
    if alive is None:
        alive = np.ones(n, dtype=bool)
    alive = np.asarray(alive, dtype=bool)
    if alive.shape != (n,):
        raise ValueError(f"alive mask has length {alive.size}, expected {n}")
    membership = np.full(n, -1, dtype=np.int64)
    idx = np.flatnonzero(alive)
    if idx.size == 0:
        return 0, membership
    sub = net.to_csr()[idx][:, idx]
    _, labels = connected_components(sub, directed=False)
    membership[idx] = labels
    return int(np.bincount(labels).max()), membership


def save_edge_list(net: Network, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# nodes {net.node_count}\n")
        for u, v in net.edges():
            fh.write(f"{u} {v}\n")


def load_edge_list(path: str | os.PathLike, node_count: int | None = None) -> Network:
    """Read a whitespace-separated ``u v`` edge list with ``#`` comments.

    The node count comes from ``node_count`` if given, else from a
    ``# nodes N`` header, else ``1 + max index``.
    """
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    header_n = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line, _, comment = raw.partition("#")
            parts = comment.split()
            if len(parts) == 2 and parts[0] == "nodes" and parts[1].isdigit():
                header_n = int(parts[1])
            line = line.strip()
            if not line:
                continue
            tok = line.split()
            if len(tok) != 2:
                raise EdgeListError(f"expected 2 fields, got {len(tok)}", lineno)
            try:
                u, v = int(tok[0]), int(tok[1])
            except ValueError:
                raise EdgeListError(f"non-integer node index in {line!r}", lineno) from None
            if u < 0 or v < 0:
                raise EdgeListError("negative node index", lineno)
            if u == v:
                raise EdgeListError(f"self-loop on node {u}", lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise EdgeListError(
                    f"duplicate edge {key[0]}-{key[1]} (first on line {seen[key]})", lineno
                )
            seen[key] = lineno
            edges.append((u, v))

    n = node_count or header_n
    top = max((max(e) for e in edges), default=-1) + 1
    if n is None:
        n = max(top, 1)
    if top > n:
        raise EdgeListError(f"node index {top - 1} exceeds declared node count {n}")
    return Network.from_edges(n, edges)
