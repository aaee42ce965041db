"""
Analytic threshold for the onset of large-scale cascades.

The tolerance threshold ``alpha_c`` is the largest tolerance at which the
surviving (absorbing) nodes stop percolating. It is found by scanning
``alpha`` downwards from the condition-I bound ``(<k> - 1) delta``. At each
value the absorbing probabilities ``a_k`` and the neighbour-absorbing
probability ``sigma`` are solved self-consistently, and the scan stops at
the first ``alpha`` where the branching factor
``sum_k k (k-1) p_k a_k / <k>`` drops below one.

Only the uniform load distribution is treated analytically.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .errors import ConfigError, SolverDivergence, ThresholdNotFound
from .netgen import DegreeStats

log = logging.getLogger(__name__)

__all__ = [
    "UniformCdf",
    "AbsorbingSolution",
    "ThresholdReport",
    "phi",
    "cond1_bound",
    "cond1_bound_excess",
    "condition1_holds",
    "a_k_given_sigma",
    "absorbing_probabilities",
    "solve_sigma",
    "branching_factor",
    "find_alpha_c",
]

# absorbs representation error in ratios such as 0.09 / 0.01 = 8.999999999999998
_FLOOR_EPS = 1e-9


@dataclass(frozen=True)
class UniformCdf:
    """CDF of loads uniform on ``[l_min, l_max]``."""

    l_min: float = 0.0
    l_max: float = 1.0

    def __post_init__(self):
        if not self.l_min < self.l_max:
            raise ConfigError(f"need l_min < l_max, got [{self.l_min}, {self.l_max}]")

    @property
    def is_standard(self) -> bool:
        return self.l_min == 0.0 and self.l_max == 1.0

    def __call__(self, l):
        x = (np.asarray(l, dtype=float) - self.l_min) / (self.l_max - self.l_min)
        out = np.clip(x, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out


STANDARD_CDF = UniformCdf()


def phi(cdf: UniformCdf, l):
    """``P(L < l)`` for the given uniform load distribution."""
    return cdf(l)


def cond1_bound(mean_degree: float, delta: float) -> float:
    """Largest tolerance at which a failure still knocks out more than one
    neighbour on average: ``(<k> - 1) delta``."""
    if mean_degree <= 1:
        raise ConfigError(f"mean degree must exceed 1, got {mean_degree}")
    if delta <= 0:
        raise ConfigError(f"delta must be > 0, got {delta}")
    return (mean_degree - 1.0) * delta


def cond1_bound_excess(stats: DegreeStats, delta: float) -> float:
    """Diagnostic variant of :func:`cond1_bound` that weights neighbours by
    excess degree, ``(<k^2>/<k> - 1) delta``. Not used by the scan."""
    return (stats.second_moment / stats.mean_degree - 1.0) * delta


def condition1_holds(mean_degree: float, alpha: float, delta: float, cdf: UniformCdf = STANDARD_CDF) -> bool:
    """``(<k> - 1) phi(delta / alpha) >= 1``."""
    return (mean_degree - 1.0) * cdf(delta / alpha) >= 1.0


def _check(alpha: float, delta: float) -> None:
    if not alpha > 0:
        raise ConfigError(f"alpha must be > 0, got {alpha}")
    if not delta > 0:
        raise ConfigError(f"delta must be > 0, got {delta}")


def _floor_ratio(alpha: float, delta: float) -> int:
    return int(math.floor(alpha / delta + _FLOOR_EPS))


def _survival_weights(alpha: float, delta: float, cdf: UniformCdf, j_cap: int) -> np.ndarray:
    """``1 - phi(j delta / alpha)`` for ``j = -1 .. J`` where J is the last
    ``j`` that can carry weight (or ``j_cap``)."""
    span = max(cdf.l_max, 0.0) * alpha / delta
    j_top = min(int(math.ceil(span)) + 1, max(j_cap, 0))
    j = np.arange(-1, j_top + 1)
    return np.clip(1.0 - cdf(j * delta / alpha), 0.0, 1.0)


def _a_k_closed(k: int, sigma: float, alpha: float, delta: float) -> float:
    r = delta / alpha
    return 1.0 - (k - 1) * r + k * sigma * r - sigma**k * r


def _a_k_sum(k: int, sigma: float, alpha: float, delta: float, cdf: UniformCdf) -> float:
    w = _survival_weights(alpha, delta, cdf, k - 1)
    j = np.arange(-1, w.size - 1)
    m = k - 1 - j
    return float(binom.pmf(m, k, sigma) @ w)


def a_k_given_sigma(
    k: int,
    sigma: float,
    alpha: float,
    delta: float,
    cdf: UniformCdf = STANDARD_CDF,
    method: str = "auto",
) -> float:
    """Probability that a degree-``k`` node is absorbing, given that each
    neighbour is absorbing independently with probability ``sigma``.

    ``method`` selects the evaluation route: ``"closed"`` is the polynomial
    valid for the standard ``[0, 1]`` loads when ``k <= floor(alpha/delta) + 1``;
    ``"sum"`` is the explicit binomial sum over the number of absorbing
    neighbours; ``"auto"`` uses the closed form wherever it applies.
    """
    _check(alpha, delta)
    if k < 0:
        raise ConfigError(f"degree must be >= 0, got {k}")
    if not 0.0 <= sigma <= 1.0:
        raise ConfigError(f"sigma must lie in [0, 1], got {sigma}")
    closed_ok = cdf.is_standard and k <= _floor_ratio(alpha, delta) + 1
    if method == "closed":
        if not closed_ok:
            raise ConfigError("closed form needs standard loads and k <= floor(alpha/delta) + 1")
        val = _a_k_closed(k, sigma, alpha, delta)
    elif method == "sum" or (method == "auto" and not closed_ok):
        val = _a_k_sum(k, sigma, alpha, delta, cdf)
    elif method == "auto":
        val = _a_k_closed(k, sigma, alpha, delta)
    else:
        raise ConfigError(f"unknown method {method!r}")
    return min(max(val, 0.0), 1.0)


def absorbing_probabilities(
    k_max: int,
    sigma: float,
    alpha: float,
    delta: float,
    cdf: UniformCdf = STANDARD_CDF,
) -> np.ndarray:
    """Vector of ``a_k`` for ``k = 0 .. k_max`` (same values as
    :func:`a_k_given_sigma` with ``method="sum"``)."""
    _check(alpha, delta)
    w = _survival_weights(alpha, delta, cdf, k_max - 1)
    k = np.arange(k_max + 1)[:, None]
    j = np.arange(-1, w.size - 1)[None, :]
    m = k - 1 - j
    pmf = np.where(m >= 0, binom.pmf(np.maximum(m, 0), k, sigma), 0.0)
    return np.clip(pmf @ w, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class AbsorbingSolution:
    sigma_a: float
    a_k: np.ndarray
    alpha: float
    delta: float
    converged: bool
    iterations: int
    residual: float


def _sigma_map(stats: DegreeStats, a: np.ndarray) -> float:
    k = np.arange(stats.k_max + 1)
    return float((k * stats.p_k) @ a[: stats.k_max + 1]) / stats.mean_degree


def solve_sigma(
    stats: DegreeStats,
    alpha: float,
    delta: float,
    cdf: UniformCdf = STANDARD_CDF,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    damping: float = 0.5,
    sigma0: float = 0.0,
) -> AbsorbingSolution:
    """Solve ``sigma = sum_j j p_j a_j(sigma) / <k>`` by damped iteration.

    ``sigma = 1`` always solves the equation (every ``a_k`` is 1 there), so
    starting from ``sigma0 = 0`` is what selects the smallest, physically
    relevant root; the map is nondecreasing, so the iterates climb
    monotonically to it.

    Non-convergence is reported through ``converged=False``.
    """
    _check(alpha, delta)
    if stats.mean_degree <= 0:
        raise ConfigError("degree distribution has zero mean")
    if not 0 < damping <= 1:
        raise ConfigError(f"damping must lie in (0, 1], got {damping}")

    sigma = float(sigma0)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        a = absorbing_probabilities(stats.k_max, sigma, alpha, delta, cdf)
        target = min(max(_sigma_map(stats, a), 0.0), 1.0)
        new = (1.0 - damping) * sigma + damping * target
        step = abs(new - sigma)
        sigma = new
        if step < tol:
            converged = True
            break

    a = absorbing_probabilities(stats.k_max, sigma, alpha, delta, cdf)
    residual = abs(sigma - _sigma_map(stats, a))
    return AbsorbingSolution(sigma, a, alpha, delta, converged, it, residual)


def branching_factor(stats: DegreeStats, sol) -> float:
    """``sum_k k (k-1) p_k a_k / <k>``; the absorbing nodes percolate when
    this reaches 1.

    ``sol`` is an :class:`AbsorbingSolution` or a bare ``a_k`` vector.
    """
    a = sol.a_k if isinstance(sol, AbsorbingSolution) else np.asarray(sol, dtype=float)
    if a.size < stats.k_max + 1:
        raise ValueError(f"a_k has {a.size} entries, need {stats.k_max + 1}")
    k = np.arange(stats.k_max + 1)
    return float((k * (k - 1) * stats.p_k) @ a[: stats.k_max + 1]) / stats.mean_degree


@dataclass(frozen=True, eq=False)
class ThresholdReport:
    alpha_c: float
    cond1_bound: float
    branching_trace: list[tuple[float, float]]
    step: float
    delta: float
    solution: AbsorbingSolution | None = field(default=None, repr=False)

    @property
    def branching_at_alpha_c(self) -> float:
        return self.branching_trace[-1][1]


def find_alpha_c(
    stats: DegreeStats,
    delta: float,
    cdf: UniformCdf = STANDARD_CDF,
    scan_step: float | None = None,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    damping: float = 0.5,
) -> ThresholdReport:
    """Scan ``alpha`` down from ``(<k> - 1) delta`` in steps of ``scan_step``
    (default ``delta / 10``) until the branching factor falls below 1."""
    bound = cond1_bound(stats.mean_degree, delta)
    step = delta / 10 if scan_step is None else float(scan_step)
    if not step > 0:
        raise ConfigError("scan_step must be > 0")

    trace: list[tuple[float, float]] = []
    i = 0
    while True:
        alpha = bound - i * step
        if alpha <= 0:
            raise ThresholdNotFound(
                f"branching factor stayed >= 1 down to alpha = {bound - (i - 1) * step:.6g}"
            )
        sol = solve_sigma(stats, alpha, delta, cdf, tol=tol, max_iter=max_iter, damping=damping)
        if not sol.converged:
            raise SolverDivergence(
                f"sigma iteration did not converge at alpha = {alpha:.6g} "
                f"(residual {sol.residual:.3g} after {sol.iterations} steps)",
                sol,
            )
        bf = branching_factor(stats, sol)
        trace.append((alpha, bf))
        log.debug("alpha=%.6f sigma=%.6g branching=%.6g", alpha, sol.sigma_a, bf)
        if bf < 1.0:
            return ThresholdReport(alpha, bound, trace, step, delta, sol)
        i += 1
