"""Probability distributions on the subset lattice of [n].

A subset S of [n] = {1, ..., n} is stored as an integer mask: element i
lives at bit i - 1, so for n = 2 the mask order is {}, {1}, {2}, {1, 2}.
A distribution is a dense vector of 2**n probabilities in that order.

All information measures are in bits.  Divergences that leave the support
of the reference distribution are reported as ``math.inf`` rather than
raised, since an infinite left-hand side is a legitimate value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from os import PathLike
from typing import Iterable, Sequence

import numpy as np

MAX_N = 20
SUM_TOL = 1e-12
NEG_TOL = 1e-15


class DistributionError(ValueError):
    """Base class for invalid distribution input."""


class NegativeMass(DistributionError):
    pass


class BadSum(DistributionError):
    pass


class BadLength(DistributionError):
    pass


class DimensionMismatch(DistributionError):
    pass


class IndexOutOfRange(DistributionError, IndexError):
    pass


def mask_of(elements: Iterable[int]) -> int:
    """Mask of a set of 1-based elements, e.g. ``mask_of({1, 3}) == 0b101``."""
    m = 0
    for i in elements:
        if i < 1:
            raise IndexOutOfRange(f"elements are 1-based, got {i}")
        m |= 1 << (i - 1)
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    """Inverse of :func:`mask_of`."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _log2_len(length: int) -> int:
    if length < 1 or length & (length - 1):
        raise BadLength(f"length {length} is not a power of two")
    return length.bit_length() - 1


@dataclass(frozen=True, eq=False)
class SetDistribution:
    """Validated, immutable distribution over the 2**n subsets of [n].

    Build instances with :func:`make_distribution`; the constructor does no
    checking of its own.
    """

    n: int
    probs: np.ndarray

    def __len__(self) -> int:
        return self.probs.shape[0]

    def __getitem__(self, mask: int) -> float:
        return float(self.probs[mask])

    def __iter__(self):
        return iter(self.probs.tolist())

    def __repr__(self) -> str:
        return f"SetDistribution(n={self.n}, probs={self.probs.tolist()!r})"

    def support(self) -> tuple[int, ...]:
        return tuple(int(m) for m in np.flatnonzero(self.probs > 0))

    def marginals(self) -> np.ndarray:
        return marginals(self)

    def to_dict(self) -> dict:
        return {"n": self.n, "probs": self.probs.tolist()}


def make_distribution(n: int, probs: Sequence[float]) -> SetDistribution:
    """Validate ``probs`` as a distribution on P([n]).

    Entries in [-1e-15, 0) are clamped to zero; anything more negative is
    an error.  The vector is never renormalized.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise DistributionError(f"n must be an integer, got {n!r}")
    n = int(n)
    if not 0 <= n <= MAX_N:
        raise DistributionError(f"n must lie in [0, {MAX_N}], got {n}")
    arr = np.array(probs, dtype=np.float64).reshape(-1)
    if arr.shape[0] != 1 << n:
        raise BadLength(f"expected {1 << n} probabilities for n={n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DistributionError("probabilities must be finite")
    if np.any(arr < -NEG_TOL):
        worst = int(np.argmin(arr))
        raise NegativeMass(f"negative probability {arr[worst]!r} at mask {worst}")
    arr[arr < 0] = 0.0
    total = math.fsum(arr.tolist())
    if abs(total - 1.0) > SUM_TOL:
        raise BadSum(f"probabilities sum to {total!r}, not 1")
    arr.setflags(write=False)
    return SetDistribution(n, arr)


def point_mass(n: int, mask: int) -> SetDistribution:
    if not 0 <= mask < 1 << n:
        raise IndexOutOfRange(f"mask {mask} outside P([{n}])")
    probs = np.zeros(1 << n)
    probs[mask] = 1.0
    return make_distribution(n, probs)


def uniform(n: int, masks: Iterable[int] | None = None) -> SetDistribution:
    """Uniform distribution on ``masks`` (all of P([n]) by default)."""
    probs = np.zeros(1 << n)
    if masks is None:
        probs[:] = 1.0
    else:
        for m in masks:
            probs[m] = 1.0
    return make_distribution(n, probs / probs.sum())


def _same_n(q: SetDistribution, p: SetDistribution) -> None:
    if q.n != p.n:
        raise DimensionMismatch(f"ground sets differ: n={q.n} vs n={p.n}")


def marginal(p: SetDistribution, i: int) -> float:
    """P[i in A] for A ~ p, with i a 1-based element."""
    if not 1 <= i <= p.n:
        raise IndexOutOfRange(f"element {i} outside [1, {p.n}]")
    return float(p.probs.reshape(-1, 2, 1 << (i - 1))[:, 1, :].sum())


def marginals(p: SetDistribution) -> np.ndarray:
    return np.array([marginal(p, i) for i in range(1, p.n + 1)])


def entropy(p: SetDistribution) -> float:
    x = p.probs[p.probs > 0]
    return float(max(-(x * np.log2(x)).sum(), 0.0))


def cross_entropy(q: SetDistribution, p: SetDistribution) -> float:
    """Sum of q_x log2(1/p_x); infinite when q charges a point p does not."""
    _same_n(q, p)
    on = q.probs > 0
    if np.any(p.probs[on] == 0):
        return math.inf
    return float(-(q.probs[on] * np.log2(p.probs[on])).sum())


def kl_divergence(q: SetDistribution, p: SetDistribution) -> float:
    """D(q || p) in bits; infinite when q charges a point p does not."""
    _same_n(q, p)
    on = q.probs > 0
    if np.any(p.probs[on] == 0):
        return math.inf
    qx, px = q.probs[on], p.probs[on]
    return float((qx * np.log2(qx / px)).sum())


def _zeta_inplace(a: np.ndarray, n: int) -> None:
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]


def _mobius_inplace(a: np.ndarray, n: int) -> None:
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 1, :] -= view[:, 0, :]


def zeta_transform(v: Sequence[float]) -> np.ndarray:
    """Subset sums: ``out[S] = sum(v[T] for T subset of S)``."""
    a = np.array(v, dtype=np.float64).reshape(-1)
    _zeta_inplace(a, _log2_len(a.shape[0]))
    return a


def mobius_transform(v: Sequence[float]) -> np.ndarray:
    """Inverse of :func:`zeta_transform`."""
    a = np.array(v, dtype=np.float64).reshape(-1)
    _mobius_inplace(a, _log2_len(a.shape[0]))
    return a


def _union_support(p: np.ndarray, r: np.ndarray, n: int) -> np.ndarray:
    # Exact integer count of pairs (T, U) in supp(p) x supp(r) with T | U == S.
    # Keeps structural zeros of q exactly zero, which the float path cannot promise.
    a = (p > 0).astype(np.int64)
    b = (r > 0).astype(np.int64)
    _zeta_inplace(a, n)
    _zeta_inplace(b, n)
    a *= b
    _mobius_inplace(a, n)
    return a > 0


def union_convolve_array(p: np.ndarray, r: np.ndarray, n: int) -> np.ndarray:
    """Fast union convolution on raw probability vectors, no validation."""
    zp = p.astype(np.float64, copy=True)
    zr = r.astype(np.float64, copy=True)
    _zeta_inplace(zp, n)
    _zeta_inplace(zr, n)
    zp *= zr
    _mobius_inplace(zp, n)
    zp[~_union_support(p, r, n)] = 0.0
    np.maximum(zp, 0.0, out=zp)
    return zp


def union_convolve(p: SetDistribution, r: SetDistribution) -> SetDistribution:
    """Law of A | B for independent A ~ p, B ~ r (zeta, product, Moebius)."""
    _same_n(p, r)
    return make_distribution(p.n, union_convolve_array(p.probs, r.probs, p.n))


def union_convolve_naive(p: SetDistribution, r: SetDistribution) -> SetDistribution:
    """Direct O(4**n) accumulation over all pairs; reference for the fast path."""
    _same_n(p, r)
    idx = np.arange(1 << p.n)
    unions = np.bitwise_or.outer(idx, idx).ravel()
    weights = np.outer(p.probs, r.probs).ravel()
    return make_distribution(p.n, np.bincount(unions, weights=weights, minlength=idx.size))


def distribution_from_dict(data: dict) -> SetDistribution:
    try:
        n, probs = data["n"], data["probs"]
    except (KeyError, TypeError) as exc:
        raise DistributionError("distribution JSON needs keys 'n' and 'probs'") from exc
    if not isinstance(probs, list):
        raise DistributionError("'probs' must be a list")
    return make_distribution(n, probs)


def load_distribution(path: str | PathLike) -> SetDistribution:
    with open(path) as fh:
        return distribution_from_dict(json.load(fh))


def dump_distribution(p: SetDistribution, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(p.to_dict(), fh)
        fh.write("\n")
