"""
Monte Carlo sweeps over the tolerance, simulated-onset estimation and
CSV/SVG output.

Seeding
-------
Each grid cell ``(alpha_index, realization_index)`` gets the 64-bit seed::

    base_rng_seed XOR SeedSequence([alpha_index, realization_index]).generate_state(1, uint64)

With ``paired=True`` the alpha index is replaced by 0, so one realization
reuses the same network, loads and seed nodes at every alpha. The cell
seed is expanded by ``SeedSequence(cell_seed).generate_state(3, uint64)``
into the network, load and seed-node seeds.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from typing import Iterable, Sequence

import numpy as np

from .engine import CascadeConfig, LoadProfile, assign_loads, run_cascade
from .errors import ConfigError
from .netgen import (
    DegreeStats,
    Network,
    degree_stats,
    gen_ba,
    gen_er,
    load_edge_list,
    poisson_degree_stats,
)
from .theory import ThresholdReport, find_alpha_c

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "TransitionEstimate",
    "ThresholdComparison",
    "cell_seed",
    "build_network",
    "run_sweep",
    "estimate_transition",
    "threshold_command",
    "emit_csv",
    "read_csv",
    "emit_svg_plot",
    "CSV_COLUMNS",
]

_MASK64 = (1 << 64) - 1

CSV_COLUMNS = (
    "network_kind", "n", "mean_degree", "delta", "alpha",
    "realization", "rng_seed", "G", "failed_fraction", "rounds",
)


@dataclass(frozen=True)
class SweepConfig:
    net: str = "er"
    n: int = 5000
    k_avg: float = 10.0
    m: int | None = None
    edge_file: str | None = None
    delta: float = 0.01
    alpha: float | None = None
    alpha_start: float = 0.01
    alpha_stop: float = 0.2
    alpha_step: float = 0.01
    realizations: int = 50
    seed_count: int = 1
    rng_seed: int = 0
    paired: bool = False
    g_star: float = 0.1
    quantile: float = 0.5
    workers: int = 1
    out: str | None = None
    svg: str | None = None

    def __post_init__(self):
        if self.net not in ("er", "ba", "file"):
            raise ConfigError(f"unknown network kind {self.net!r}")
        if self.net == "file" and not self.edge_file:
            raise ConfigError("--net file needs an edge-list path")
        if self.net != "file" and self.n < 2:
            raise ConfigError("n must be >= 2")
        if self.delta <= 0:
            raise ConfigError("delta must be > 0")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.seed_count < 1:
            raise ConfigError("seed_count must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 0 <= self.quantile <= 1:
            raise ConfigError("quantile must lie in [0, 1]")
        if self.alpha_step <= 0 or self.alpha_stop < self.alpha_start:
            raise ConfigError("alpha grid needs step > 0 and stop >= start")
        if self.alpha_start <= 0:
            raise ConfigError("all alphas must be > 0")

    @property
    def ba_m(self) -> int:
        return self.m if self.m is not None else max(1, int(round(self.k_avg / 2)))

    @property
    def alpha_grid(self) -> np.ndarray:
        count = int(math.floor((self.alpha_stop - self.alpha_start) / self.alpha_step + 1e-9)) + 1
        return np.round(self.alpha_start + self.alpha_step * np.arange(count), 12)


@dataclass(frozen=True)
class SweepRecord:
    network_kind: str
    n: int
    mean_degree: float
    delta: float
    alpha: float
    realization: int
    rng_seed: int
    G: float
    failed_fraction: float
    rounds: int


@dataclass(frozen=True)
class TransitionEstimate:
    """Simulated onset: the smallest grid alpha from which the ``quantile``
    of G stays above ``g_star`` for the rest of the grid (``None`` if none)."""

    alpha_sim: float | None
    g_star: float
    quantile: float
    alphas: tuple[float, ...] = ()
    g_quantile: tuple[float, ...] = ()

    @property
    def found(self) -> bool:
        return self.alpha_sim is not None


@dataclass(frozen=True)
class ThresholdComparison:
    report: ThresholdReport
    stats: DegreeStats
    estimate: TransitionEstimate | None = None
    records: tuple[SweepRecord, ...] = ()

    @property
    def gap(self) -> float | None:
        if self.estimate is None or not self.estimate.found:
            return None
        return self.estimate.alpha_sim - self.report.alpha_c

    @property
    def excess_degree_mean(self) -> float:
        return self.stats.excess_degree_mean

    @property
    def marginal(self) -> bool:
        """Even with every node absorbing the branching factor only reaches 1."""
        return abs(self.stats.excess_degree_mean - 1.0) < 1e-12


def cell_seed(base: int, alpha_index: int, realization_index: int) -> int:
    h = np.random.SeedSequence([alpha_index, realization_index]).generate_state(1, np.uint64)[0]
    return (int(base) & _MASK64) ^ int(h)


def build_network(cfg: SweepConfig, rng_seed: int) -> Network:
    if cfg.net == "er":
        return gen_er(cfg.n, cfg.k_avg, rng_seed)
    if cfg.net == "ba":
        return gen_ba(cfg.n, cfg.ba_m, rng_seed)
    return load_edge_list(cfg.edge_file)


def _simulate_unit(cfg: SweepConfig, cells: Sequence[tuple[int, int]], seed: int,
                   fixed_net: Network | None) -> list[tuple[int, int, SweepRecord]]:
    """Run the given (alpha_index, realization) cells on one shared realization."""
    net_seed, load_seed, cascade_seed = (
        int(s) for s in np.random.SeedSequence(seed).generate_state(3, np.uint64)
    )
    net = fixed_net if fixed_net is not None else build_network(cfg, net_seed)
    loads = assign_loads(net.node_count, 0.0, 1.0, load_seed)
    casc = CascadeConfig(cfg.delta, seed_count=cfg.seed_count, rng_seed=cascade_seed)
    mean_degree = 2.0 * net.edge_count / net.node_count
    grid = cfg.alpha_grid

    out = []
    for ai, ri in cells:
        alpha = float(grid[ai])
        res = run_cascade(net, LoadProfile(loads, alpha), casc)
        rec = SweepRecord(
            network_kind=cfg.net,
            n=net.node_count,
            mean_degree=mean_degree,
            delta=float(cfg.delta),
            alpha=alpha,
            realization=ri,
            rng_seed=seed,
            G=float(res.giant_fraction),
            failed_fraction=float(res.failed_fraction),
            rounds=int(res.rounds),
        )
        out.append((ai, ri, rec))
    return out


def _star(args):
    return _simulate_unit(*args)


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Simulate every (alpha, realization) cell of the grid.

    Records come back ordered by alpha index, then realization index,
    whatever the worker count.
    """
    grid = cfg.alpha_grid
    fixed_net = load_edge_list(cfg.edge_file) if cfg.net == "file" else None

    units = []
    if cfg.paired:
        for ri in range(cfg.realizations):
            cells = [(ai, ri) for ai in range(grid.size)]
            units.append((cfg, cells, cell_seed(cfg.rng_seed, 0, ri), fixed_net))
    else:
        for ai in range(grid.size):
            for ri in range(cfg.realizations):
                units.append((cfg, [(ai, ri)], cell_seed(cfg.rng_seed, ai, ri), fixed_net))

    if cfg.workers > 1 and len(units) > 1:
        chunk = max(1, len(units) // (4 * cfg.workers))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_star, units, chunksize=chunk))
    else:
        results = [_simulate_unit(*u) for u in units]

    flat = [item for unit in results for item in unit]
    flat.sort(key=lambda t: (t[0], t[1]))
    return [rec for _, _, rec in flat]


def estimate_transition(records: Iterable[SweepRecord], g_star: float = 0.1,
                        quantile: float = 0.5) -> TransitionEstimate:
    by_alpha: dict[float, list[float]] = {}
    for r in records:
        by_alpha.setdefault(r.alpha, []).append(r.G)
    alphas = sorted(by_alpha)
    q = [float(np.quantile(by_alpha[a], quantile)) for a in alphas]

    alpha_sim = None
    for a, g in zip(reversed(alphas), reversed(q)):
        if g > g_star:
            alpha_sim = a
        else:
            break
    return TransitionEstimate(alpha_sim, g_star, quantile, tuple(alphas), tuple(q))


def reference_stats(cfg: SweepConfig, source: str = "instance") -> DegreeStats:
    """Degree statistics used for the analytic threshold of one panel.

    ``"instance"`` takes the empirical distribution of a single reference
    network drawn with a seed derived from ``cfg.rng_seed``; ``"poisson"``
    uses the analytic ER distribution.
    """
    if source == "poisson":
        if cfg.net != "er":
            raise ConfigError("poisson degree statistics only apply to ER networks")
        return poisson_degree_stats(cfg.k_avg)
    if source != "instance":
        raise ConfigError(f"unknown degree-statistics source {source!r}")
    seed = int(np.random.SeedSequence([cfg.rng_seed & _MASK64, 0x5EED]).generate_state(1, np.uint64)[0])
    return degree_stats(build_network(cfg, seed))


def threshold_command(cfg: SweepConfig, simulate: bool = False, source: str = "instance",
                      scan_step: float | None = None) -> ThresholdComparison:
    stats = reference_stats(cfg, source)
    report = find_alpha_c(stats, cfg.delta, scan_step=scan_step)
    if not simulate:
        return ThresholdComparison(report, stats)
    records = run_sweep(cfg)
    est = estimate_transition(records, cfg.g_star, cfg.quantile)
    return ThresholdComparison(report, stats, est, tuple(records))


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(records: Iterable[SweepRecord], path) -> None:
    """Write records with a header row; ``path`` may be a filename or a text stream."""
    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            row = asdict(r)
            w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])

    if isinstance(path, io.TextIOBase) or hasattr(path, "write"):
        write(path)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write(fh)


def read_csv(path) -> list[SweepRecord]:
    types = {f.name: f.type for f in fields(SweepRecord)}
    conv = {"str": str, "int": int, "float": float}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [SweepRecord(**{k: conv[types[k]](v) for k, v in row.items()}) for row in reader]


def emit_svg_plot(records: Sequence[SweepRecord], path, alpha_c: float | None = None,
                  title: str | None = None) -> None:
    """Scatter of per-realization G against alpha, with a triangle at ``alpha_c``."""
    W, H = 640, 420
    left, right, top, bottom = 70, 20, 40 if title else 20, 55
    pw, ph = W - left - right, H - top - bottom

    xs = [r.alpha for r in records]
    if alpha_c is not None:
        xs.append(alpha_c)
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    if x1 <= x0:
        x0, x1 = x0 - 0.5 * abs(x0 or 1), x1 + 0.5 * abs(x1 or 1)
    pad = 0.03 * (x1 - x0)
    x0, x1 = x0 - pad, x1 + pad

    def sx(a):
        return left + (a - x0) / (x1 - x0) * pw

    def sy(g):
        return top + (1.0 - g) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="14">{title}</text>')

    for i in range(6):
        g = i / 5
        y = sy(g)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{g:.1f}</text>')
    for t in np.linspace(x0 + pad, x1 - pad, 6):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 19}" text-anchor="middle">{t:.3f}</text>')

    out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 12}" text-anchor="middle">'
               f'tolerance parameter α</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.1f})">giant component fraction G</text>')

    out.append('<g fill="steelblue" fill-opacity="0.5">')
    for r in records:
        out.append(f'<circle cx="{sx(r.alpha):.2f}" cy="{sy(r.G):.2f}" r="2.5"/>')
    out.append("</g>")

    if alpha_c is not None:
        cx, cy = sx(alpha_c), sy(0.0)
        pts = f"{cx:.2f},{cy - 12:.2f} {cx - 7:.2f},{cy:.2f} {cx + 7:.2f},{cy:.2f}"
        out.append(f'<polygon points="{pts}" fill="black"><title>alpha_c = {alpha_c:.6g}</title></polygon>')
    out.append("</svg>\n")

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out))


def with_overrides(cfg: SweepConfig, **kw) -> SweepConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
