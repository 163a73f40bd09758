"""Combinatorial model of contact homology of an ellipsoid boundary.

The chain algebra is the free graded-commutative algebra on generators x_k,
one per Reeb orbit (ranked by action).  All gradings 2(n - 2 + k) are even,
so the algebra is an honest polynomial ring and the differential vanishes;
every element is its own minimal representative.  The U-map is modelled as a
derivation of degree -(2n - 2) which does not increase action.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .certified import CertifiedReal, certified, compare, fraction_json
from .diophantine import RationalApproximant, approx_ellipsoid
from .errors import (CertificateError, InvalidDerivation, MixedTargets, PreconditionError,
                     ZeroElement)
from .spectrum import (EllipsoidSpec, action_spectrum, k_T_index, period, spectrum_slice,
                       INFINITE)

Monomial = Tuple[int, ...]  # sorted ranks, with repetition; () is the unit

NORMALIZATION_NOTE = ("action differences are reported unnormalized; the capacity "
                      "c_P(B^2n) of the point constraint is a symbolic positive constant")


def _monomial(ranks: Iterable[int]) -> Monomial:
    out = tuple(sorted(int(r) for r in ranks))
    if out and out[0] < 1:
        raise PreconditionError("generator ranks start at 1")
    return out


class AlgebraElement:
    """Finite rational combination of monomials; zero coefficients are dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping = ()):
        clean = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, c in items:
            c = Fraction(c)
            mono = _monomial(mono)
            clean[mono] = clean.get(mono, Fraction(0)) + c
        object.__setattr__(self, "terms",
                           tuple(sorted((m, c) for m, c in clean.items() if c != 0)))

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def generator(cls, k: int) -> "AlgebraElement":
        return cls({(k,): 1})

    @classmethod
    def unit(cls) -> "AlgebraElement":
        return cls({(): 1})

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls()

    @classmethod
    def monomial(cls, ranks, coeff=1) -> "AlgebraElement":
        return cls({tuple(ranks): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def as_dict(self) -> Dict[Monomial, Fraction]:
        return dict(self.terms)

    def monomials(self):
        return [m for m, _ in self.terms]

    def __add__(self, other):
        d = self.as_dict()
        for m, c in other.terms:
            d[m] = d.get(m, Fraction(0)) + c
        return AlgebraElement(d)

    def __neg__(self):
        return AlgebraElement({m: -c for m, c in self.terms})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            d: Dict[Monomial, Fraction] = {}
            for m1, c1 in self.terms:
                for m2, c2 in other.terms:
                    m = tuple(sorted(m1 + m2))
                    d[m] = d.get(m, Fraction(0)) + c1 * c2
            return AlgebraElement(d)
        q = Fraction(other)
        return AlgebraElement({m: c * q for m, c in self.terms})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = AlgebraElement.unit()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def mod2(self) -> "AlgebraElement":
        """Reduction of the coefficients to Z/2 (odd denominators only)."""
        d = {}
        for m, c in self.terms:
            if c.denominator % 2 == 0:
                raise PreconditionError(f"coefficient {c} has no reduction mod 2")
            if c.numerator % 2:
                d[m] = 1
        return AlgebraElement(d)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            word = "*".join(f"x{k}" for k in m) if m else "1"
            if c == 1:
                parts.append(word)
            elif c == -1:
                parts.append("-" + word)
            else:
                parts.append(f"{c}*{word}" if m else str(c))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"AlgebraElement({str(self)!r})"

    def to_json(self):
        return [{"monomial": list(m), "coeff": fraction_json(c)} for m, c in self.terms]


class CHModel:
    """Generators of the contact homology algebra of the boundary of an ellipsoid."""

    def __init__(self, e: EllipsoidSpec):
        if not isinstance(e, EllipsoidSpec):
            e = EllipsoidSpec.from_values(e)
        self.e = e
        self.n = e.n
        self._actions = []

    @property
    def degree_drop(self) -> int:
        return 2 * self.n - 2

    def grading(self, x) -> int:
        """Grading of a rank, a monomial, or a homogeneous element."""
        if isinstance(x, int):
            return 2 * (self.n - 2 + x)
        if isinstance(x, AlgebraElement):
            degs = {self.grading(m) for m in x.monomials()}
            if len(degs) != 1:
                raise PreconditionError("element is not homogeneous")
            return degs.pop()
        return sum(self.grading(k) for k in x)

    def generator_action(self, k: int) -> CertifiedReal:
        if k <= len(self._actions):
            return self._actions[k - 1]
        if k > 4096:
            return spectrum_slice(self.e, k, 1).entries[0].value
        size = max(k, 2 * len(self._actions), 16)
        self._actions = action_spectrum(self.e, size).values
        return self._actions[k - 1]

    def action(self, mono) -> CertifiedReal:
        out = CertifiedReal(0)
        for k in mono:
            out = out + self.generator_action(k)
        return out


def spectral_invariant(x: AlgebraElement, e) -> CertifiedReal:
    """Largest action of a monomial of x (the differential vanishes)."""
    model = e if isinstance(e, CHModel) else CHModel(e)
    if x.is_zero():
        raise ZeroElement("spectral invariant of the zero element")
    best = None
    for m in x.monomials():
        a = model.action(m)
        if best is None or compare(a, best) > 0:
            best = a
    return best


@dataclass(frozen=True)
class DerivationTable:
    """Images U(x_k) of generators; validated on construction.

    ``status`` is "user" for supplied tables, "licensed" for the single entry
    certified at the period rank and "unverified" for its extrapolation to
    higher multiples of the period.
    """

    model: CHModel = field(repr=False)
    images: Tuple
    status: str = "user"

    def __init__(self, model, images: Mapping[int, AlgebraElement], status="user"):
        if not isinstance(model, CHModel):
            model = CHModel(model)
        if status not in ("user", "licensed", "unverified"):
            raise PreconditionError(f"unknown table status {status!r}")
        for k, img in images.items():
            if not isinstance(img, AlgebraElement):
                raise PreconditionError("derivation images must be AlgebraElements")
            want = model.grading(k) - model.degree_drop
            top = model.generator_action(k)
            for m in img.monomials():
                if model.grading(m) != want:
                    raise InvalidDerivation(
                        f"U(x{k}) contains {m} of grading {model.grading(m)}, expected {want}")
                if compare(model.action(m), top) > 0:
                    raise InvalidDerivation(
                        f"U(x{k}) contains {m} of action {model.action(m)} > {top}")
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "images", tuple(sorted(
            (int(k), v) for k, v in images.items() if not v.is_zero())))
        object.__setattr__(self, "status", status)

    def image(self, k: int) -> AlgebraElement:
        for key, v in self.images:
            if key == k:
                return v
        return AlgebraElement.zero()

    def to_json(self, mod2=False):
        return {"status": self.status,
                "degree_drop": self.model.degree_drop,
                "images": [{"rank": k, "image": (v.mod2() if mod2 else v).to_json()}
                           for k, v in self.images]}


def apply_derivation(U: DerivationTable, x: AlgebraElement) -> AlgebraElement:
    """Unique derivation extending U: U(x_a x_b ...) = U(x_a) x_b ... + ..."""
    table = dict(U.images)
    out: Dict[Monomial, Fraction] = {}
    for mono, c in x.terms:
        for k, e in Counter(mono).items():
            img = table.get(k)
            if img is None:
                continue
            rest = list(mono)
            rest.remove(k)
            for m2, c2 in img.terms:
                m = tuple(sorted(rest + list(m2)))
                out[m] = out.get(m, Fraction(0)) + c * e * c2
    return AlgebraElement(out)


@dataclass(frozen=True)
class GapWitness:
    ellipsoid: EllipsoidSpec
    sigma_rank: int
    target_rank: int
    action_difference: CertifiedReal
    T: Optional[CertifiedReal] = None
    approximant: Optional[RationalApproximant] = None
    epsilon: Optional[Fraction] = None
    table: Optional[DerivationTable] = field(default=None, repr=False)
    normalization_note: str = NORMALIZATION_NOTE

    def verify(self) -> bool:
        """Recompute the action difference from the spectrum."""
        sl = spectrum_slice(self.ellipsoid, self.target_rank,
                            self.sigma_rank - self.target_rank + 1)
        diff = sl.entries[-1].value - sl.entries[0].value
        if compare(diff, self.action_difference) != 0 or diff.sign() < 0:
            return False
        if self.epsilon is not None and compare(diff, self.epsilon) > 0:
            return False
        if self.approximant is not None and not self.approximant.verify():
            return False
        return True

    def to_json(self, mod2=False):
        lo, hi = self.action_difference.bounds(64)
        d = {"ellipsoid": self.ellipsoid.to_json(),
             "sigma_rank": self.sigma_rank,
             "target_rank": self.target_rank,
             "action_difference": str(self.action_difference),
             "action_difference_lower": fraction_json(lo),
             "action_difference_upper": fraction_json(hi),
             "T": None if self.T is None else str(self.T),
             "epsilon": None if self.epsilon is None else fraction_json(self.epsilon),
             "approximant": None if self.approximant is None else self.approximant.to_json(),
             "normalization_note": self.normalization_note,
             "verified": self.verify()}
        if self.table is not None:
            d["table"] = self.table.to_json(mod2)
        return d


def licensed_table(model: CHModel, k: int, status="licensed") -> DerivationTable:
    """{x_{k+n-1} -> x_k}."""
    return DerivationTable(model, {k + model.n - 1: AlgebraElement.generator(k)}, status)


def gap_certificate_rational(e: EllipsoidSpec) -> GapWitness:
    """Witness sigma = x_{k_T+n-1}, target x_{k_T}, action difference 0."""
    if not isinstance(e, EllipsoidSpec):
        e = EllipsoidSpec.from_values(e)
    k, T = k_T_index(e)  # raises AperiodicFlow
    n = e.n
    sl = spectrum_slice(e, k, n)
    diff = sl.entries[-1].value - sl.entries[0].value
    if diff != 0 or sl.entries[0].value != T:
        raise CertificateError(f"period {T} does not fill ranks {k}..{k + n - 1}")
    w = GapWitness(e, k + n - 1, k, diff, T=T, table=licensed_table(CHModel(e), k))
    if not w.verify():
        raise CertificateError("gap certificate failed re-verification")
    return w


def gap_witness_irrational(e: EllipsoidSpec, eps) -> GapWitness:
    """Rank k with certified M_{k+n-1} - M_k <= eps, via a rational approximant."""
    if not isinstance(e, EllipsoidSpec):
        e = EllipsoidSpec.from_values(e)
    eps_c = certified(eps)
    if not eps_c.is_rational or eps_c.value <= 0:
        raise PreconditionError("epsilon must be a positive rational")
    eps = eps_c.value
    if compare(e.axes[0], eps) <= 0:
        raise PreconditionError(f"epsilon={eps} must be smaller than the smallest axis")
    if period(e) is not INFINITE:
        w = gap_certificate_rational(e)
        return GapWitness(e, w.sigma_rank, w.target_rank, w.action_difference, T=w.T,
                          epsilon=eps, table=w.table)
    approx = approx_ellipsoid(e, eps)
    k, T = k_T_index(approx.ellipsoid)
    n = e.n
    sl = spectrum_slice(e, k, n)
    diff = sl.entries[-1].value - sl.entries[0].value
    if diff.sign() < 0 or compare(diff, eps) > 0:
        raise CertificateError(f"action difference {diff} exceeds epsilon {eps}")
    w = GapWitness(e, k + n - 1, k, diff, T=T, approximant=approx, epsilon=eps,
                   table=None)
    if not w.verify():
        raise CertificateError("gap witness failed re-verification")
    return w


@dataclass(frozen=True)
class GapReport:
    ellipsoid: EllipsoidSpec
    rows: tuple  # (epsilon, T, epsilon*T, diff, running infimum)

    @property
    def trend(self):
        return [row[4] for row in self.rows]

    @property
    def differences(self):
        return [row[3] for row in self.rows]

    def to_json(self):
        return {"ellipsoid": self.ellipsoid.to_json(),
                "rows": [{"epsilon": None if eps is None else fraction_json(eps),
                          "T": None if T is None else str(T),
                          "epsilon_times_T": None if eT is None else str(eT),
                          "difference": str(d), "running_infimum": str(m)}
                         for eps, T, eT, d, m in self.rows]}


def limit_gap_report(witnesses) -> GapReport:
    """Running infimum of certified differences over a sequence of witnesses."""
    rows = []
    target = None
    best = None
    for item in witnesses:
        w, eps = item if isinstance(item, tuple) else (item, item.epsilon)
        if target is None:
            target = w.ellipsoid
        elif w.ellipsoid.axes != target.axes:
            raise MixedTargets(f"{w.ellipsoid} differs from {target}")
        if not w.verify():
            raise CertificateError("witness failed re-verification")
        if eps is not None:
            eps = Fraction(eps)
            if compare(w.action_difference, eps) > 0:
                raise CertificateError(f"difference exceeds epsilon {eps}")
        eT = None if (eps is None or w.T is None) else w.T * eps
        if best is None or compare(w.action_difference, best) < 0:
            best = w.action_difference
        rows.append((eps, w.T, eT, w.action_difference, best))
    if target is None:
        raise PreconditionError("no witnesses given")
    return GapReport(target, tuple(rows))


# property suite ---------------------------------------------------------------

def _compositions(total, parts, rng):
    """Random tuple of `parts` positive integers summing to `total`, or None."""
    if parts < 1 or total < parts:
        return None
    cuts = sorted(rng.sample(range(1, total), parts - 1)) if parts > 1 else []
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def random_image_monomial(model: CHModel, k: int, rng, max_len=3):
    """Monomial with grading grading(x_k) - (2n-2), ignoring action."""
    n = model.n
    # sum over factors of (n - 2 + k_i) must equal k - 1
    target = k - 1
    if target == 0:
        return ()
    for _ in range(20):
        w = rng.randint(1, max_len)
        if n == 1:
            # factors contribute k_i - 1 >= 0
            comp = _compositions(target + w, w, rng)
            if comp is not None:
                return _monomial(comp)
            continue
        rest = target - w * (n - 2)
        comp = _compositions(rest, w, rng)
        if comp is not None:
            return _monomial(comp)
    return None


def random_table(model: CHModel, rng, max_rank=8, entries=3) -> DerivationTable:
    """Random valid derivation table (action-decreasing, correctly graded)."""
    images = {}
    for _ in range(entries):
        k = rng.randint(1, max_rank)
        img = AlgebraElement.zero()
        for _ in range(rng.randint(1, 3)):
            m = random_image_monomial(model, k, rng)
            if m is None or compare(model.action(m), model.generator_action(k)) > 0:
                continue
            img = img + AlgebraElement.monomial(m, Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        images[k] = img
    return DerivationTable(model, images)


def random_element(rng, max_rank=8, max_terms=4, max_len=3) -> AlgebraElement:
    d = {}
    for _ in range(rng.randint(1, max_terms)):
        m = tuple(rng.randint(1, max_rank) for _ in range(rng.randint(0, max_len)))
        d[m] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    x = AlgebraElement(d)
    return x if not x.is_zero() else AlgebraElement.generator(1)


@dataclass(frozen=True)
class SuiteReport:
    ellipsoid: str
    samples: int
    seed: int
    checks: dict
    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self):
        return {"ellipsoid": self.ellipsoid, "samples": self.samples, "seed": self.seed,
                "checks": self.checks, "violations": list(self.violations),
                "passed": self.passed}


def axioms_suite(e: EllipsoidSpec, samples: int, seed: int = 0) -> SuiteReport:
    """Conformality, monotonicity and U-map decrease on random elements."""
    if not isinstance(e, EllipsoidSpec):
        e = EllipsoidSpec.from_values(e)
    rng = random.Random(seed)
    model = CHModel(e)
    checks = {"conformality": 0, "monotonicity": 0, "u_decrease": 0}
    violations = []
    for i in range(samples):
        x = random_element(rng)
        s = spectral_invariant(x, model)

        c = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        sc = spectral_invariant(x, CHModel(e.scaled(c)))
        checks["conformality"] += 1
        if compare(sc, s * c) != 0:
            violations.append(f"sample {i}: conformality s(c a)={sc} != c s(a)={s * c}")

        bigger = EllipsoidSpec.from_values(
            [a + Fraction(rng.randint(0, 6), rng.randint(1, 4)) for a in e.axes])
        sb = spectral_invariant(x, CHModel(bigger))
        checks["monotonicity"] += 1
        if compare(s, sb) > 0:
            violations.append(f"sample {i}: monotonicity s(a)={s} > s(b)={sb}")

        U = random_table(model, rng)
        ux = apply_derivation(U, x)
        checks["u_decrease"] += 1
        if not ux.is_zero():
            su = spectral_invariant(ux, model)
            if compare(su, s) > 0:
                violations.append(f"sample {i}: s(Ux)={su} > s(x)={s}")
            drop = model.degree_drop
            for m in ux.monomials():
                if not any(model.grading(m) == model.grading(m0) - drop
                           for m0 in x.monomials()):
                    violations.append(f"sample {i}: grading of {m} not shifted by {drop}")
    return SuiteReport(str(e), samples, seed, checks, tuple(violations))
