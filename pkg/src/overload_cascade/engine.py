"""
Synchronous overload cascade with local load sharing.

Every node carries an initial load ``L`` and capacity ``(1 + alpha) L``.
Seed nodes fail at round 0. In each later round, every node that failed in
the previous round hands a fixed load ``delta`` to each neighbour that is
still up; once all of a round's transfers have landed, any surviving node
whose load now strictly exceeds its capacity fails. The run stops after
the first round that produces no new failures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .netgen import Network, giant_component

__all__ = [
    "LoadProfile",
    "CascadeConfig",
    "CascadeOutcome",
    "assign_loads",
    "run_cascade",
    "classify_independent_absorbing",
    "empirical_absorbing_fraction",
]


@dataclass(frozen=True, eq=False)
class LoadProfile:
    initial_load: np.ndarray
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"tolerance alpha must be > 0, got {self.alpha}")
        load = np.asarray(self.initial_load, dtype=float)
        if load.ndim != 1:
            raise ConfigError("initial_load must be one-dimensional")
        object.__setattr__(self, "initial_load", load)

    @property
    def capacity(self) -> np.ndarray:
        return (1.0 + self.alpha) * self.initial_load

    def with_alpha(self, alpha: float) -> "LoadProfile":
        return LoadProfile(self.initial_load, alpha)


@dataclass(frozen=True)
class CascadeConfig:
    """Transfer quantum and seeding.

    Seeds are either given explicitly via ``seed_nodes`` or ``seed_count``
    distinct nodes drawn uniformly with ``rng_seed``.
    """

    delta: float
    seed_nodes: Sequence[int] | None = None
    seed_count: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigError(f"delta must be > 0, got {self.delta}")
        if self.seed_nodes is None and self.seed_count < 1:
            raise ConfigError("seed_count must be >= 1")

    def pick_seeds(self, n: int) -> np.ndarray:
        if self.seed_nodes is not None:
            seeds = np.asarray(self.seed_nodes, dtype=np.int64)
            if seeds.size == 0:
                raise ConfigError("empty seed set")
            if np.unique(seeds).size != seeds.size:
                raise ConfigError("seed nodes must be distinct")
            if seeds.min() < 0 or seeds.max() >= n:
                raise ConfigError(f"seed node outside [0, {n})")
            return np.sort(seeds)
        if self.seed_count > n:
            raise ConfigError(f"seed_count {self.seed_count} exceeds node count {n}")
        rng = np.random.default_rng(self.rng_seed)
        return np.sort(rng.choice(n, size=self.seed_count, replace=False))


@dataclass(frozen=True, eq=False)
class CascadeOutcome:
    """Final state of one cascade.

    ``failure_round[v]`` is the round in which ``v`` failed (0 for seeds,
    -1 if it never failed). ``final_load`` of a failed node is frozen at
    the load it carried when it failed. ``giant_fraction`` is measured over
    all ``N`` nodes; un-failed nodes stranded outside the giant component
    keep their un-failed status.
    """

    failed: np.ndarray
    failure_round: np.ndarray
    rounds: int
    giant_fraction: float
    failed_fraction: float
    final_load: np.ndarray
    seed_nodes: np.ndarray

    @property
    def final_status(self) -> np.ndarray:
        """True where the node is un-failed."""
        return ~self.failed

    @property
    def surviving_fraction(self) -> float:
        return 1.0 - self.failed_fraction


def assign_loads(n: int, l_min: float = 0.0, l_max: float = 1.0, rng_seed: int = 0) -> np.ndarray:
    """I.i.d. uniform initial loads on ``[l_min, l_max)``."""
    if not l_min < l_max:
        raise ConfigError(f"need l_min < l_max, got [{l_min}, {l_max}]")
    rng = np.random.default_rng(rng_seed)
    return rng.uniform(l_min, l_max, size=int(n))


def _gather_neighbors(net: Network, nodes: np.ndarray) -> np.ndarray:
    """Concatenated neighbour lists of ``nodes`` (with repeats)."""
    lens = net.indptr[nodes + 1] - net.indptr[nodes]
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    shift = np.repeat(net.indptr[nodes] - np.cumsum(lens) + lens, lens)
    return net.indices[shift + np.arange(total)]


def run_cascade(net: Network, loads: LoadProfile, cfg: CascadeConfig) -> CascadeOutcome:
    n = net.node_count
    if loads.initial_load.shape != (n,):
        raise ConfigError(
            f"load vector has length {loads.initial_load.size}, network has {n} nodes"
        )
    delta = float(cfg.delta)
    seeds = cfg.pick_seeds(n)

    load = loads.initial_load.copy()
    cap = loads.capacity
    failed = np.zeros(n, dtype=bool)
    failure_round = np.full(n, -1, dtype=np.int64)
    failed[seeds] = True
    failure_round[seeds] = 0

    frontier = seeds
    rounds = 0
    while frontier.size:
        rounds += 1
        hits = np.bincount(_gather_neighbors(net, frontier), minlength=n)
        targets = np.flatnonzero((hits > 0) & ~failed)
        load[targets] += delta * hits[targets]
        frontier = targets[load[targets] > cap[targets]]
        failed[frontier] = True
        failure_round[frontier] = rounds

    size, _ = giant_component(net, ~failed)
    n_failed = int(failed.sum())
    return CascadeOutcome(
        failed=failed,
        failure_round=failure_round,
        rounds=rounds,
        giant_fraction=size / n,
        failed_fraction=n_failed / n,
        final_load=load,
        seed_nodes=seeds,
    )


def classify_independent_absorbing(net: Network, loads: LoadProfile, delta: float) -> np.ndarray:
    """Nodes that stay up even after ``k - 1`` of their ``k`` neighbours fail.

    Degree 0 and 1 nodes are always absorbing.
    """
    k = net.degrees
    L = loads.initial_load
    ok = L + (k - 1) * delta < (1.0 + loads.alpha) * L
    return ok | (k <= 1)


def empirical_absorbing_fraction(
    net: Network,
    alpha: float,
    delta: float,
    trials: int,
    rng_seed: int,
    seed_count: int = 1,
    l_min: float = 0.0,
    l_max: float = 1.0,
) -> np.ndarray:
    """Monte Carlo estimate of the per-degree absorbing fraction.

    In each trial fresh uniform loads are drawn and a cascade is run from
    ``seed_count`` random seeds. A node counts as absorbing if it is
    independently absorbing, or if it ends un-failed and every un-failed
    neighbour is independently absorbing.

    Returns an array indexed by degree; entries for degrees absent from
    the network are NaN.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    n = net.node_count
    k = net.degrees
    src = np.repeat(np.arange(n), k)
    dst = net.indices
    hits = np.zeros(n, dtype=np.int64)

    for child in np.random.SeedSequence(rng_seed).spawn(trials):
        load_seed, cascade_seed = child.generate_state(2, np.uint64)
        profile = LoadProfile(assign_loads(n, l_min, l_max, int(load_seed)), alpha)
        out = run_cascade(net, profile, CascadeConfig(delta, seed_count=seed_count, rng_seed=int(cascade_seed)))
        indep = classify_independent_absorbing(net, profile, delta)
        up = ~out.failed
        risky = up[dst] & ~indep[dst]
        n_risky = np.bincount(src[risky], minlength=n)
        hits += indep | (up & (n_risky == 0))

    per_k = np.bincount(k, weights=hits, minlength=1)
    nodes_k = np.bincount(k, minlength=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return per_k / (nodes_k * trials)
