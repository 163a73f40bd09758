"""Generalized lcm and certified simultaneous Dirichlet approximation.

The approximation searches scan integers exactly as in the pigeonhole
argument: candidates are screened in floating point (vectorized) and every
accepted candidate is then certified with exact interval comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .certified import CertifiedReal, certified, compare, fraction_json, ratio
from .errors import CertificateError, PreconditionError, SearchExhausted
from .spectrum import INFINITE, EllipsoidSpec, rational_lcm

SEARCH_CAP = 10 ** 7
_CHUNK = 1 << 18


def lcm_pair(s1, s2):
    """Generalized lcm: inf{c q1 q2 : s_i = c q_i, q_i integers}.

    Returns a CertifiedReal (an exact rational for rational inputs) or
    ``INFINITE`` when s1/s2 is irrational.
    """
    s1, s2 = certified(s1), certified(s2)
    if s1.sign() <= 0 or s2.sign() <= 0:
        raise PreconditionError("lcm arguments must be positive")
    rho = ratio(s1, s2)
    if rho is None:
        return INFINITE
    # s1 = rho * s2, so lcm(s1, s2) = s2 * lcm(rho, 1)
    return s2 * rational_lcm([rho, 1])


def lcm_tuple(values: Sequence) -> Fraction:
    """Least L > 0 with L/v an integer for every (positive rational) v."""
    return rational_lcm([certified(v).value for v in values])


def _candidates(alphas, betas, tols, N, need_positive):
    """Integers k in 1..N, in order, where every |round(k a) - k a| * b <= tol.

    Floating point screen only; callers certify.
    """
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    tols = np.asarray(tols, dtype=float)
    for start in range(1, N + 1, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, N + 1), dtype=float)
        x = np.outer(k, alphas)
        q = np.rint(x)
        err = np.abs(q - x) * betas
        slack = 1e-7 * tols + 1e-12 * k[:, None] * np.abs(alphas * betas)
        ok = np.all(err <= tols + slack, axis=1)
        if need_positive:
            ok &= np.all(q >= 1, axis=1)
        for idx in np.nonzero(ok)[0]:
            yield int(k[idx]), [int(v) for v in q[idx]]


@dataclass(frozen=True)
class DirichletSolution:
    """|a_i q_i - T'| <= bound_i <= a_i / N^(1/n) for every i (certified)."""

    T_prime: int
    q: tuple
    bound: tuple
    N: int

    def to_json(self):
        return {"T_prime": self.T_prime, "q": list(self.q), "N": self.N,
                "bound": [fraction_json(b) for b in self.bound]}


def _error_upper(a: CertifiedReal, q: int, T: int) -> Fraction:
    lo, hi = (a * q - T).bounds(96)
    return max(abs(lo), abs(hi))


def dirichlet_simultaneous(a: Sequence, N: int) -> DirichletSolution:
    """Smallest T' <= N with |a_i q_i - T'| <= a_i / N^(1/n), q_i = round(T'/a_i)."""
    a = [certified(v) for v in a]
    n = len(a)
    if n < 1:
        raise PreconditionError("need at least one value")
    if N < 2:
        raise PreconditionError("N must be at least 2")
    if N > SEARCH_CAP:
        raise SearchExhausted(f"N={N} exceeds the search cap {SEARCH_CAP}", required_n=N)
    if any(v.sign() <= 0 for v in a):
        raise PreconditionError("values must be positive")
    af = [float(v) for v in a]
    root = N ** (1.0 / n)
    for T_prime, q in _candidates([1 / x for x in af], af, [x / root for x in af],
                                  N, need_positive=False):
        bounds = []
        for ai, qi in zip(a, q):
            err = _error_upper(ai, qi, T_prime)
            # err <= a_i N^(-1/n)  <=>  err^n * N <= a_i^n
            if err ** n * N > ai.bounds(96)[0] ** n:
                break
            bounds.append(err)
        else:
            return DirichletSolution(T_prime, tuple(q), tuple(bounds), N)
    raise SearchExhausted(f"no certified solution with T' <= {N}", required_n=N)


@dataclass(frozen=True)
class RationalApproximant:
    """Rational axes r bracketing a with period control.

    InnerOuter: r_i <= a_i <= (1 + eps/T) r_i.
    OuterOnly:  r_i / (1 + eps/T) <= a_i <= r_i.
    """

    a: tuple
    r: tuple
    T: Fraction
    epsilon: Fraction
    direction: str
    search_index: Optional[int] = None
    q: Optional[tuple] = None
    N: Optional[int] = None

    def verify(self) -> bool:
        """Recompute T and re-check the inclusions by certified comparison."""
        if self.direction == "InnerOuter":
            if self.T != rational_lcm(self.r):
                return False
            factor = 1 + self.epsilon / self.T
            return all(compare(ri, ai) <= 0 and compare(ai, ri * factor) <= 0
                       for ai, ri in zip(self.a, self.r))
        if self.direction == "OuterOnly":
            if self.T != rational_lcm([1 / ri for ri in self.r]):
                return False
            factor = 1 + self.epsilon / self.T
            return all(compare(ri / factor, ai) <= 0 and compare(ai, ri) <= 0
                       for ai, ri in zip(self.a, self.r))
        return False

    @property
    def ellipsoid(self) -> EllipsoidSpec:
        return EllipsoidSpec.from_values(self.r)

    def to_json(self):
        d = {"a": [str(x) for x in self.a],
             "r": [fraction_json(x) for x in self.r],
             "T": fraction_json(self.T),
             "epsilon": fraction_json(self.epsilon),
             "direction": self.direction,
             "certificate": {"checked": bool(self.verify())}}
        if self.search_index is not None:
            d["search"] = {"index": self.search_index, "q": list(self.q), "N": self.N}
        return d


def _positive_rational(x, name):
    x = certified(x)
    if not x.is_rational or x.value <= 0:
        raise PreconditionError(f"{name} must be a positive rational")
    return x.value


def _finish(approx):
    if not approx.verify():
        raise CertificateError(f"approximant failed re-verification: {approx}")
    return approx


def approx_ellipsoid(e: EllipsoidSpec, eps) -> RationalApproximant:
    """Rational ellipsoid E(r) with r_i <= a_i <= (1 + eps/T) r_i, T = lcm(r)."""
    if not isinstance(e, EllipsoidSpec):
        e = EllipsoidSpec.from_values(e)
    eps = _positive_rational(eps, "epsilon")
    if compare(e.axes[0], eps) <= 0:
        raise PreconditionError(f"epsilon={eps} must be smaller than the smallest axis {e.axes[0]}")
    if e.is_rational:
        r = tuple(a.value for a in e.axes)
        return _finish(RationalApproximant(e.axes, r, rational_lcm(r), eps, "InnerOuter"))
    n = e.n
    # N > (2 max a / eps)^n, from a rational upper bound of max a
    top = e.axes[-1].bounds(64)[1]
    N = math.floor((2 * top / eps) ** n) + 1
    if N > SEARCH_CAP:
        raise SearchExhausted(f"required N={N} exceeds the search cap {SEARCH_CAP}",
                              required_n=N)
    af = [float(a) for a in e.axes]
    half = eps / 2
    for T_prime, q in _candidates([1 / x for x in af], af, [float(half)] * n,
                                  N, need_positive=True):
        if all(compare(abs(a * qi - T_prime), half) <= 0 for a, qi in zip(e.axes, q)):
            Tc = T_prime - half
            r = tuple(Tc / qi for qi in q)
            return _finish(RationalApproximant(
                e.axes, r, rational_lcm(r), eps, "InnerOuter", T_prime, tuple(q), N))
    raise SearchExhausted(f"no certified approximant with T' <= {N}", required_n=N)


def approx_pair_upper(a: Sequence, delta) -> RationalApproximant:
    """Rational pair r >= a with r_i / (1 + delta/T) <= a_i, T = lcm(1/r_1, 1/r_2)."""
    a = tuple(certified(x) for x in a)
    if len(a) != 2:
        raise PreconditionError("approx_pair_upper takes exactly two values")
    if any(x.sign() <= 0 for x in a):
        raise PreconditionError("values must be positive")
    delta = _positive_rational(delta, "delta")
    if delta >= 1:
        raise PreconditionError("delta must be smaller than 1")
    if all(x.is_rational for x in a):
        r = tuple(x.value for x in a)
        return _finish(RationalApproximant(
            a, r, rational_lcm([1 / x for x in r]), delta, "OuterOnly"))
    lo_min = min(x.bounds(64)[0] for x in a)
    N = math.floor((2 / (delta * lo_min)) ** 2) + 1
    if N > SEARCH_CAP:
        raise SearchExhausted(f"required N={N} exceeds the search cap {SEARCH_CAP}",
                              required_n=N)
    af = [float(x) for x in a]
    for p, q in _candidates(af, [1.0, 1.0], [float(delta) * x / 2 for x in af],
                            N, need_positive=True):
        # |p - q_i/a_i| <= delta/2  <=>  |p a_i - q_i| <= delta a_i / 2
        if all(compare(abs(x * p - qi), x * (delta / 2)) <= 0 for x, qi in zip(a, q)):
            base = p - delta / 2
            r = tuple(Fraction(qi) / base for qi in q)
            T = rational_lcm([1 / ri for ri in r])
            return _finish(RationalApproximant(a, r, T, delta, "OuterOnly", p, tuple(q), N))
    raise SearchExhausted(f"no certified approximant with p <= {N}", required_n=N)
