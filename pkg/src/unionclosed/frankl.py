"""Small-scale checks of Frankl's union-closed sets conjecture.

Families are collections of subset masks (element i at bit i - 1).  The
exhaustive check enumerates every family of subsets of [n] for n <= 3; at
n = 4 it samples random generator sets and checks their union closures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable

import numpy as np

from .setdist import elements_of, mask_of

MAX_N = 16
MAX_RAW_N = 3
MAX_EXHAUSTIVE_N = 4
FRANKL_RATIO = 0.5
GILMER_RATIO = 0.01
DEFAULT_SAMPLES = 100_000


class FamilyError(ValueError):
    pass


class EmptyFamily(FamilyError):
    pass


class OutOfRange(FamilyError):
    pass


class FranklViolation(AssertionError):
    """A union-closed family in which every element is in fewer than half the sets."""

    def __init__(self, family: "SetFamily", ratio: float):
        self.family = family
        self.ratio = ratio
        super().__init__(
            f"union-closed family with max frequency {ratio}: {json.dumps(family.to_dict())}"
        )


@dataclass(frozen=True)
class SetFamily:
    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise OutOfRange(f"n must lie in [1, {MAX_N}], got {self.n}")
        members = tuple(int(m) for m in self.members)
        object.__setattr__(self, "members", members)
        if len(set(members)) != len(members):
            raise FamilyError("family members must be distinct")
        bad = [m for m in members if not 0 <= m < 1 << self.n]
        if bad:
            raise FamilyError(f"masks {bad} lie outside P([{self.n}])")

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(n, tuple(mask_of(s) for s in sets))

    def __len__(self) -> int:
        return len(self.members)

    def sets(self) -> list[tuple[int, ...]]:
        return [elements_of(m) for m in self.members]

    def to_dict(self) -> dict:
        return {"n": self.n, "members": list(self.members)}


def is_union_closed(f: SetFamily) -> bool:
    present = set(f.members)
    return all(a | b in present for a in f.members for b in f.members)


def _close(masks: Iterable[int]) -> set[int]:
    # Adding g to a union-closed C: the closure is C + {g} + {g | c : c in C}.
    closed: set[int] = set()
    for g in masks:
        if g in closed:
            continue
        closed |= {g | c for c in closed}
        closed.add(g)
    return closed


def union_closure(f: SetFamily) -> SetFamily:
    """Smallest union-closed family containing ``f``, members sorted."""
    return SetFamily(f.n, tuple(sorted(_close(f.members))))


def max_frequency(f: SetFamily) -> tuple[int, float]:
    """Most frequent element and the fraction of members containing it.

    Ties go to the smallest element.  The empty set counts as a member.
    """
    if not f.members:
        raise EmptyFamily("max_frequency needs a nonempty family")
    counts = [sum(1 for m in f.members if m >> i & 1) for i in range(f.n)]
    best = max(range(f.n), key=lambda i: (counts[i], -i))
    return best + 1, counts[best] / len(f.members)


@dataclass
class FranklReport:
    n: int
    mode: str
    families_examined: int = 0
    union_closed_checked: int = 0
    min_ratio: float = 1.0
    min_ratio_family: SetFamily | None = None
    violations: list[SetFamily] = field(default_factory=list)

    @property
    def frankl_holds(self) -> bool:
        return not self.violations

    @property
    def gilmer_bound_holds(self) -> bool:
        return self.min_ratio >= GILMER_RATIO

    def record(self, family: SetFamily) -> None:
        _, ratio = max_frequency(family)
        self.union_closed_checked += 1
        if ratio < self.min_ratio or self.min_ratio_family is None:
            self.min_ratio = min(self.min_ratio, ratio)
            self.min_ratio_family = family
        if ratio < FRANKL_RATIO:
            self.violations.append(family)

    def merge(self, other: "FranklReport") -> "FranklReport":
        out = FranklReport(self.n, self.mode)
        out.families_examined = self.families_examined + other.families_examined
        out.union_closed_checked = self.union_closed_checked + other.union_closed_checked
        out.violations = self.violations + other.violations
        pick = min(
            (r for r in (self, other) if r.min_ratio_family is not None),
            key=lambda r: (r.min_ratio, r.min_ratio_family.n, r.min_ratio_family.members),
            default=None,
        )
        if pick is not None:
            out.min_ratio, out.min_ratio_family = pick.min_ratio, pick.min_ratio_family
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "families_examined": self.families_examined,
            "union_closed_checked": self.union_closed_checked,
            "min_ratio": self.min_ratio,
            "min_ratio_family": None if self.min_ratio_family is None else self.min_ratio_family.to_dict(),
            "frankl_holds": self.frankl_holds,
            "gilmer_bound_holds": self.gilmer_bound_holds,
            "violations": [v.to_dict() for v in self.violations],
        }


def _excluded(members: Iterable[int]) -> bool:
    # The conjecture exempts {{}}; the empty family has no frequency at all.
    members = tuple(members)
    return not members or members == (0,)


def enumerate_union_closed(n: int):
    """Every union-closed family of subsets of [n], excluding {} and {{}}."""
    if not 1 <= n <= MAX_RAW_N:
        raise OutOfRange(f"raw enumeration needs 1 <= n <= {MAX_RAW_N}, got {n}")
    size = 1 << n
    for code in range(1, 1 << size):
        members = tuple(m for m in range(size) if code >> m & 1)
        if _excluded(members):
            continue
        f = SetFamily(n, members)
        if is_union_closed(f):
            yield f


def check_raw(n: int) -> FranklReport:
    report = FranklReport(n, "exhaustive")
    report.families_examined = (1 << (1 << n)) - 1
    for f in enumerate_union_closed(n):
        report.record(f)
    return report


def check_sampled(n: int, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> FranklReport:
    """Check union closures of ``samples`` random generator sets.

    Each sample draws k ~ U{1, ..., min(2**n, 16)} distinct masks.  Closures
    already seen are not checked again, so ``union_closed_checked`` counts
    distinct families.
    """
    if not 1 <= n <= MAX_N:
        raise OutOfRange(f"sampling needs 1 <= n <= {MAX_N}, got {n}")
    if samples < 1:
        raise OutOfRange(f"samples must be positive, got {samples}")
    size = 1 << n
    rng = np.random.default_rng(seed)
    report = FranklReport(n, "sample")
    seen: set[tuple[int, ...]] = set()
    ks = rng.integers(1, min(size, 16) + 1, samples)
    for k in ks.tolist():
        gens = rng.choice(size, k, replace=False).tolist()
        members = tuple(sorted(_close(gens)))
        report.families_examined += 1
        if members in seen or _excluded(members):
            continue
        seen.add(members)
        report.record(SetFamily(n, members))
    return report


def check_conjecture_exhaustive(n: int, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> FranklReport:
    """Raw enumeration for n <= 3, sampled closures at n = 4."""
    if not 1 <= n <= MAX_EXHAUSTIVE_N:
        raise OutOfRange(f"exhaustive check needs 1 <= n <= {MAX_EXHAUSTIVE_N}, got {n}")
    if n <= MAX_RAW_N:
        return check_raw(n)
    return check_sampled(n, samples, seed)


def assert_frankl(report: FranklReport) -> None:
    if report.violations:
        bad = report.violations[0]
        raise FranklViolation(bad, max_frequency(bad)[1])


def family_from_dict(data: dict) -> SetFamily:
    try:
        n, members = data["n"], data["members"]
    except (KeyError, TypeError) as exc:
        raise FamilyError("family JSON needs keys 'n' and 'members'") from exc
    if not isinstance(n, int) or not isinstance(members, list):
        raise FamilyError("'n' must be an integer and 'members' a list")
    return SetFamily(n, tuple(members))


def load_family(path: str | PathLike) -> SetFamily:
    with open(path) as fh:
        return family_from_dict(json.load(fh))


def dump_family(f: SetFamily, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(f.to_dict(), fh)
        fh.write("\n")
