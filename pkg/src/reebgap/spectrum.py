"""Reeb orbits of the boundary of a standard ellipsoid.

For E(a_1, ..., a_n) the Reeb flow is the product of harmonic oscillators,
z_j -> exp(2 pi i t / a_j) z_j.  When the a_j are pairwise rationally
independent the only closed orbits are the iterates of the n circles
{z_l = 0 for l != i}, with actions j * a_i.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator, NamedTuple, Sequence

from .certified import CertifiedReal, certified, compare, fraction_json, ratio
from .errors import AperiodicFlow, DegenerateOrbit, PreconditionError

INFINITE = math.inf


@dataclass(frozen=True)
class EllipsoidSpec:
    """Axes sorted non-decreasingly; ``permutation[i]`` is the input position
    of sorted axis ``i``."""

    axes: tuple
    permutation: tuple

    @classmethod
    def from_values(cls, values: Sequence) -> "EllipsoidSpec":
        vals = [certified(v) for v in values]
        if not vals:
            raise PreconditionError("an ellipsoid needs at least one axis")
        for v in vals:
            if v.sign() <= 0:
                raise PreconditionError(f"axis {v} is not positive")
        order = list(range(len(vals)))
        # insertion sort keeps the sort stable with certified comparisons
        for i in range(1, len(order)):
            j = i
            while j > 0 and compare(vals[order[j - 1]], vals[order[j]]) > 0:
                order[j - 1], order[j] = order[j], order[j - 1]
                j -= 1
        return cls(tuple(vals[i] for i in order), tuple(order))

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def is_rational(self) -> bool:
        return all(a.is_rational for a in self.axes)

    def scaled(self, c) -> "EllipsoidSpec":
        c = certified(c)
        if not c.is_rational or c.value <= 0:
            raise PreconditionError("scale factor must be a positive rational")
        return EllipsoidSpec(tuple(a * c.value for a in self.axes), self.permutation)

    def __str__(self):
        return "E(" + ", ".join(str(a) for a in self.axes) + ")"

    def to_json(self):
        return {"axes": [str(a) for a in self.axes],
                "permutation": list(self.permutation)}


class OrbitLabel(NamedTuple):
    """The j-th iterate of the simple orbit on axis i (both 1-based)."""

    axis: int
    iterate: int

    @property
    def is_simple(self) -> bool:
        return self.iterate == 1

    @property
    def multiplicity(self) -> int:
        return self.iterate

    def action(self, e: EllipsoidSpec) -> CertifiedReal:
        return e.axes[self.axis - 1] * self.iterate


class SpectrumEntry(NamedTuple):
    rank: int
    value: CertifiedReal
    label: OrbitLabel


@dataclass(frozen=True)
class ActionSpectrum:
    entries: tuple
    source: EllipsoidSpec

    @property
    def values(self):
        return [en.value for en in self.entries]

    @property
    def labels(self):
        return [en.label for en in self.entries]

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        """1-based access to M_k."""
        if k < 1:
            raise IndexError("ranks start at 1")
        return self.entries[k - 1].value

    def rows(self, bits=64):
        out = []
        for en in self.entries:
            lo, hi = en.value.bounds(bits)
            out.append((en.rank, lo, hi, en.label.axis, en.label.iterate))
        return out

    def to_json(self, bits=64):
        return {
            "ellipsoid": self.source.to_json(),
            "entries": [
                {"k": en.rank, "value": str(en.value),
                 "value_lower": fraction_json(lo), "value_upper": fraction_json(hi),
                 "axis": en.label.axis, "iterate": en.label.iterate}
                for en, (_, lo, hi, _, _) in zip(self.entries, self.rows(bits))
            ],
        }


class _Key:
    """Heap key ordering by certified value, then axis, then iterate."""

    __slots__ = ("value", "axis", "iterate", "budget")

    def __init__(self, value, axis, iterate, budget):
        self.value, self.axis, self.iterate, self.budget = value, axis, iterate, budget

    def __lt__(self, other):
        c = compare(self.value, other.value, self.budget)
        if c:
            return c < 0
        return (self.axis, self.iterate) < (other.axis, other.iterate)


def iter_spectrum(e: EllipsoidSpec, budget=None) -> Iterator[SpectrumEntry]:
    """Lazily merge the arithmetic progressions {j * a_i}."""
    if e.is_rational:
        # exact fast path: tuples of Fractions compare natively
        heap = [(a.value, i + 1, 1) for i, a in enumerate(e.axes)]
        heapq.heapify(heap)
        steps = [a.value for a in e.axes]
        k = 0
        while True:
            v, i, j = heapq.heappop(heap)
            k += 1
            yield SpectrumEntry(k, CertifiedReal(v), OrbitLabel(i, j))
            heapq.heappush(heap, (v + steps[i - 1], i, j + 1))
    heap = [_Key(a, i + 1, 1, budget) for i, a in enumerate(e.axes)]
    heapq.heapify(heap)
    k = 0
    while True:
        key = heapq.heappop(heap)
        k += 1
        yield SpectrumEntry(k, key.value, OrbitLabel(key.axis, key.iterate))
        a = e.axes[key.axis - 1]
        heapq.heappush(heap, _Key(key.value + a, key.axis, key.iterate + 1, budget))


def action_spectrum(e: EllipsoidSpec, count: int, budget=None) -> ActionSpectrum:
    """First ``count`` entries M_1 <= M_2 <= ... of the merged action sequence."""
    if count < 1:
        raise PreconditionError("count must be at least 1")
    it = iter_spectrum(e, budget)
    entries = tuple(next(it) for _ in range(count))
    return ActionSpectrum(entries, e)


def _check_label(e, label):
    label = OrbitLabel(*label)
    if not (1 <= label.axis <= e.n) or label.iterate < 1:
        raise PreconditionError(f"invalid orbit label {tuple(label)} for {e}")
    return label


def orbit_rank(e: EllipsoidSpec, label, budget=None) -> int:
    """Rank of an orbit in the action ordering; DegenerateOrbit on ties."""
    label = _check_label(e, label)
    target = label.action(e)
    rank = None
    for entry in iter_spectrum(e, budget):
        c = compare(entry.value, target, budget)
        if c > 0:
            break
        if c == 0:
            if entry.label == label:
                rank = entry.rank
            else:
                raise DegenerateOrbit(
                    f"action {target} of {tuple(label)} is shared with {tuple(entry.label)}")
    return rank


def cz_index(e: EllipsoidSpec, label, budget=None) -> int:
    """Conley-Zehnder index n - 1 + 2k of a nondegenerate orbit of rank k."""
    return e.n - 1 + 2 * orbit_rank(e, label, budget)


def sft_grading(e: EllipsoidSpec, rank: int, budget=None) -> int:
    """(n - 3) + CZ of the rank-k orbit, i.e. 2(n - 2 + k)."""
    if rank < 1:
        raise PreconditionError("rank must be at least 1")
    action_spectrum(e, rank, budget)  # certifies the ordering up to this rank
    return 2 * (e.n - 2 + rank)


def rational_lcm(values) -> Fraction:
    """Least positive L with L/v an integer for every positive rational v."""
    values = [Fraction(v) for v in values]
    if not values or any(v <= 0 for v in values):
        raise PreconditionError("lcm needs positive rationals")
    num = reduce(math.lcm, (v.numerator for v in values))
    den = reduce(math.gcd, (v.denominator for v in values))
    return Fraction(num, den)


def period(e: EllipsoidSpec):
    """Common period of the Reeb flow: CertifiedReal, or ``INFINITE``."""
    base = e.axes[0]
    rhos = []
    for a in e.axes:
        rho = ratio(a, base)
        if rho is None:
            return INFINITE
        rhos.append(rho)
    return base * rational_lcm(rhos)


def k_T_index(e: EllipsoidSpec):
    """(k_T, T): first rank at which the period T appears in the spectrum."""
    T = period(e)
    if T is INFINITE:
        raise AperiodicFlow(f"{e} has no common period")
    # every multiple m*a_l < T is counted; T/a_l is an integer
    below = sum(ratio(T, a) - 1 for a in e.axes)
    return int(below) + 1, T


def _floor_ratio(x: CertifiedReal, a: CertifiedReal, budget=None) -> int:
    """Largest j >= 0 with j * a <= x (x >= 0), decided by certified comparison."""
    j = max(int(math.floor(float(x) / float(a))), 0)
    while j > 0 and compare(a * j, x, budget) > 0:
        j -= 1
    while compare(a * (j + 1), x, budget) <= 0:
        j += 1
    return j


def count_at_most(e: EllipsoidSpec, x, budget=None) -> int:
    """Number of spectrum entries with value <= x."""
    x = certified(x)
    return sum(_floor_ratio(x, a, budget) for a in e.axes)


def spectrum_slice(e: EllipsoidSpec, start: int, count: int, budget=None) -> ActionSpectrum:
    """Entries of ranks start .. start+count-1 without enumerating lower ranks."""
    if start < 1 or count < 1:
        raise PreconditionError("start and count must be at least 1")
    if start <= 64:
        full = action_spectrum(e, start + count - 1, budget)
        return ActionSpectrum(full.entries[start - 1:], e)
    af = [float(a) for a in e.axes]
    # float estimate of M_start by bisection on the counting function
    lo, hi = 0.0, start * af[0]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sum(math.floor(mid / a) for a in af) >= start:
            hi = mid
        else:
            lo = mid
    margin = Fraction(1, 1 << 20) * max(1, int(hi))
    while True:
        x0 = Fraction(hi).limit_denominator(1 << 30) - margin
        if x0 <= 0:
            x0 = Fraction(0)
        below = count_at_most(e, x0, budget)
        if below < start:
            break
        margin *= 2
    x0c = CertifiedReal(x0)
    heap = []
    for i, a in enumerate(e.axes):
        j = _floor_ratio(x0c, a, budget) + 1
        heap.append(_Key(a * j, i + 1, j, budget))
    heapq.heapify(heap)
    entries = []
    rank = below
    while rank < start + count - 1:
        key = heapq.heappop(heap)
        rank += 1
        if rank >= start:
            entries.append(SpectrumEntry(rank, key.value, OrbitLabel(key.axis, key.iterate)))
        a = e.axes[key.axis - 1]
        heapq.heappush(heap, _Key(key.value + a, key.axis, key.iterate + 1, budget))
    return ActionSpectrum(tuple(entries), e)


def spectrum_value(e: EllipsoidSpec, k: int, budget=None) -> CertifiedReal:
    """M_k."""
    return spectrum_slice(e, k, 1, budget).entries[0].value
