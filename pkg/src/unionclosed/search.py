"""Derivative-free search for distributions with a negative Gilmer gap.

Each local search is a pattern search over pairwise mass transfers between
subsets: propose moving ``step`` probability from one mask to another,
project back onto the simplex, push any marginal above the cap back down,
and keep the move only if the gap drops.  A full sweep without improvement
shrinks the step.  Restarts run from seeded random feasible points.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np

from .gilmer import GapReport, analyze, gap_of_arrays
from .setdist import SetDistribution, make_distribution, union_convolve_array

FEAS_TOL = 1e-12
# Above this many ordered pairs a sweep samples pairs instead of enumerating them.
MAX_SWEEP = 4096


class ConfigError(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class InfeasibleCap(ValueError):
    pass


class InfeasibleStart(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    n: int = 2
    seed: int = 0
    restarts: int = 100
    max_iters: int = 5000
    step_init: float = 0.05
    step_shrink: float = 0.5
    tol: float = 1e-7
    marginal_cap: float = 0.5 - 1e-6

    def __post_init__(self):
        if not 2 <= self.n <= 10:
            raise ConfigError(f"n must lie in [2, 10], got {self.n}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.restarts < 1 or self.max_iters < 1:
            raise ConfigError("restarts and max_iters must be positive")
        if not (self.step_init > 0 and self.tol > 0):
            raise ConfigError("step_init and tol must be positive")
        if not 0 < self.step_shrink < 1:
            raise ConfigError(f"step_shrink must lie in (0, 1), got {self.step_shrink}")
        if not 0 < self.marginal_cap <= 0.5:
            raise ConfigError(f"marginal_cap must lie in (0, 1/2], got {self.marginal_cap}")


@dataclass(frozen=True, eq=False)
class SearchResult:
    best: GapReport
    best_gap: float
    param_trace_length: int
    seed_used: int
    iterations: int = 0
    restart: int = 0

    def to_dict(self) -> dict:
        return {
            "best_gap": self.best_gap,
            "violation_found": self.best.violates_conjecture,
            "seed_used": self.seed_used,
            "restart": self.restart,
            "param_trace_length": self.param_trace_length,
            "iterations": self.iterations,
            "best": self.best.to_dict(),
        }


def project_to_simplex(v: Sequence[float]) -> np.ndarray:
    """Euclidean projection onto {p : p >= 0, sum(p) = 1} by sort and shift."""
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise EmptyInput("cannot project an empty vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    rho = k[u - (css - 1) / k > 0][-1]
    tau = (css[rho - 1] - 1) / rho
    return np.maximum(v - tau, 0.0)


def array_marginals(p: np.ndarray, n: int) -> np.ndarray:
    return np.array([p.reshape(-1, 2, 1 << i)[:, 1, :].sum() for i in range(n)])


def repair_marginals(p: np.ndarray, n: int, cap: float) -> np.ndarray:
    """Lower every marginal above ``cap`` to ``cap``, in place.

    For an offending element i, the same fraction of each set containing i
    is moved to that set minus i.  Other marginals cannot rise, so one pass
    over the elements is enough.
    """
    for i in range(n):
        view = p.reshape(-1, 2, 1 << i)
        m = view[:, 1, :].sum()
        if m > cap:
            moved = view[:, 1, :] * ((m - cap) / m)
            view[:, 0, :] += moved
            view[:, 1, :] -= moved
    return p


def _feasible(p: np.ndarray, n: int, cap: float) -> bool:
    return bool(np.all(array_marginals(p, n) <= cap + FEAS_TOL))


def _gap(p: np.ndarray, n: int) -> float:
    return gap_of_arrays(p, union_convolve_array(p, p, n))


def random_feasible(n: int, seed: int, marginal_cap: float) -> SetDistribution:
    """Dirichlet(1, ..., 1) draw on P([n]) with marginals repaired down to the cap."""
    if not 1 <= n <= 10:
        raise ConfigError(f"n must lie in [1, 10], got {n}")
    if marginal_cap < 0:
        raise InfeasibleCap(f"no distribution has all marginals <= {marginal_cap}")
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(1 << n))
    repair_marginals(p, n, marginal_cap)
    return make_distribution(n, p)


def _sweep(rng: np.random.Generator, size: int) -> np.ndarray:
    if size * (size - 1) <= MAX_SWEEP:
        src, dst = np.nonzero(~np.eye(size, dtype=bool))
        pairs = np.stack([src, dst], axis=1)
        return pairs[rng.permutation(len(pairs))]
    src = rng.integers(0, size, MAX_SWEEP)
    dst = (src + rng.integers(1, size, MAX_SWEEP)) % size
    return np.stack([src, dst], axis=1)


def local_search(start: SetDistribution, cfg: SearchConfig) -> SearchResult:
    """Descend from ``start``; the ground set size is taken from ``start``."""
    n, cap = start.n, cfg.marginal_cap
    p = start.probs.copy()
    if not _feasible(p, n, cap):
        raise InfeasibleStart(f"start has a marginal above the cap {cap}")
    rng = np.random.default_rng([cfg.seed, 1])
    best = _gap(p, n)
    step = cfg.step_init
    iters = accepted = 0
    while step >= cfg.tol and iters < cfg.max_iters:
        improved = False
        for i, j in _sweep(rng, p.size).tolist():
            if p[i] <= 0:
                continue
            if iters >= cfg.max_iters:
                break
            iters += 1
            cand = p.copy()
            amount = min(step, cand[i])
            cand[i] -= amount
            cand[j] += amount
            cand = repair_marginals(project_to_simplex(cand), n, cap)
            if not _feasible(cand, n, cap):
                continue
            g = _gap(cand, n)
            if g < best:
                p, best = cand, g
                accepted += 1
                improved = True
                break
        if not improved:
            step *= cfg.step_shrink
    report = analyze(make_distribution(n, p))
    return SearchResult(
        best=report,
        best_gap=report.gap,
        param_trace_length=accepted + 1,
        seed_used=cfg.seed,
        iterations=iters,
    )


def run_restart(cfg: SearchConfig, r: int) -> SearchResult:
    """Restart ``r`` of a multistart run, seeded with ``cfg.seed + r``."""
    seed = cfg.seed + r
    start = random_feasible(cfg.n, seed, cfg.marginal_cap)
    return replace(local_search(start, replace(cfg, seed=seed)), restart=r)


def multistart_search(cfg: SearchConfig, workers: int = 1) -> SearchResult:
    """Best of ``cfg.restarts`` local searches; ties go to the lower restart.

    With ``workers > 1`` restarts run in a process pool.  The choice of
    winner depends only on the per-restart results, so the output does not
    depend on ``workers``.
    """
    restarts = range(cfg.restarts)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_restart, [cfg] * cfg.restarts, restarts))
    else:
        results = [run_restart(cfg, r) for r in restarts]
    return min(results, key=lambda res: (res.best_gap, res.restart))


def config_dict(cfg: SearchConfig) -> dict:
    return asdict(cfg)
