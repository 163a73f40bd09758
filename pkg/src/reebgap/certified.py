"""Certified real numbers.

A ``CertifiedReal`` is a rational linear combination of the constants
``1, sqrt(k)`` (k square-free), ``pi`` and ``e``.  Rational arithmetic on the
coefficients is exact.  Enclosures with rational endpoints are produced on
demand at any binary precision, and comparisons refine those enclosures until
the sign is decided or a precision budget runs out.

Because ``{1, sqrt(k) : k square-free}`` is linearly independent over the
rationals, and adjoining either ``pi`` or ``e`` (one transcendental) keeps it so,
a combination that involves at most one of the two transcendental constants is
zero exactly when all of its coefficients vanish.  When both ``pi`` and ``e``
occur together nothing is decided structurally and only numerical separation
is available.
"""

from __future__ import annotations

import math
import os
import re
from fractions import Fraction
from functools import lru_cache, total_ordering
from numbers import Rational

from mpmath.libmp import mpf_e, mpf_pi

from .errors import ParseError, UnknownRationality, UnresolvableOrder

DEFAULT_BUDGET = 256
_FIRST_BITS = 64


def precision_budget(bits=None):
    """Maximum refinement precision, honoring ``REEBGAP_PRECISION``."""
    if bits is not None:
        return int(bits)
    env = os.environ.get("REEBGAP_PRECISION")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ParseError(f"REEBGAP_PRECISION must be an integer, got {env!r}")
        if value < _FIRST_BITS:
            raise ParseError(f"REEBGAP_PRECISION must be at least {_FIRST_BITS}")
        return value
    return DEFAULT_BUDGET


def _squarefree_split(k):
    """Write k = c^2 * s with s square-free; return (c, s)."""
    c, s = 1, 1
    rest = k
    p = 2
    while p * p <= rest:
        while rest % (p * p) == 0:
            rest //= p * p
            c *= p
        if rest % p == 0:
            rest //= p
            s *= p
        p += 1
    return c, s * rest


def _sym_key(sym):
    if sym.startswith("sqrt("):
        return (0, int(sym[5:-1]))
    return (1 if sym == "pi" else 2, 0)


def _mpf_to_fraction(m):
    sign, man, exp, _ = m
    v = Fraction(man) * (Fraction(2) ** exp)
    return -v if sign else v


@lru_cache(maxsize=4096)
def _symbol_bounds(sym, bits):
    """Rational enclosure of a basis constant with width at most ~2^-bits."""
    if sym == "pi":
        return (_mpf_to_fraction(mpf_pi(bits + 4, "f")),
                _mpf_to_fraction(mpf_pi(bits + 4, "c")))
    if sym == "e":
        return (_mpf_to_fraction(mpf_e(bits + 4, "f")),
                _mpf_to_fraction(mpf_e(bits + 4, "c")))
    k = int(sym[5:-1])
    s = math.isqrt(k << (2 * bits))
    scale = 1 << bits
    return Fraction(s, scale), Fraction(s + 1, scale)


def _as_fraction(v):
    if isinstance(v, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, Rational):
        return Fraction(v.numerator, v.denominator)
    if isinstance(v, float):
        raise TypeError("floating point inputs are rejected; pass a Fraction or a string")
    raise TypeError(f"cannot interpret {v!r} as an exact rational")


@total_ordering
class CertifiedReal:
    """Exact element of Q + Q*sqrt(2) + Q*sqrt(3) + ... + Q*pi + Q*e."""

    __slots__ = ("rational", "terms", "_hash")

    def __init__(self, rational=0, terms=()):
        rational = _as_fraction(rational)
        merged = {}
        for sym, coeff in terms:
            coeff = _as_fraction(coeff)
            if sym.startswith("sqrt("):
                c, s = _squarefree_split(int(sym[5:-1]))
                if s == 1:
                    rational += coeff * c
                    continue
                sym, coeff = f"sqrt({s})", coeff * c
            elif sym not in ("pi", "e"):
                raise ParseError(f"unknown symbolic constant {sym!r}")
            merged[sym] = merged.get(sym, Fraction(0)) + coeff
        object.__setattr__(self, "rational", rational)
        object.__setattr__(self, "terms", tuple(
            (s, merged[s]) for s in sorted(merged, key=_sym_key) if merged[s] != 0))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("CertifiedReal is immutable")

    # construction -------------------------------------------------------

    @classmethod
    def exact(cls, value):
        return cls(_as_fraction(value))

    @classmethod
    def sqrt(cls, k, coeff=1):
        k = int(k)
        if k <= 0:
            raise ParseError("sqrt argument must be a positive integer")
        return cls(0, ((f"sqrt({k})", coeff),))

    @classmethod
    def pi(cls, coeff=1):
        return cls(0, (("pi", coeff),))

    @classmethod
    def e(cls, coeff=1):
        return cls(0, (("e", coeff),))

    @classmethod
    def parse(cls, text):
        return _Parser(text).parse()

    # structure ----------------------------------------------------------

    @property
    def is_rational(self):
        """True for exact rationals, False for declared irrationals."""
        if not self.terms:
            return True
        if self._mixes_transcendentals():
            raise UnknownRationality(f"rationality of {self} is not decidable")
        return False

    @property
    def value(self):
        """The exact rational value; only valid when ``is_rational``."""
        if self.terms:
            raise TypeError(f"{self} is not an exact rational")
        return self.rational

    def _mixes_transcendentals(self):
        syms = {s for s, _ in self.terms}
        return "pi" in syms and "e" in syms

    def coefficients(self):
        """Coefficient vector as a dict including the key ``"1"``."""
        d = {"1": self.rational}
        d.update(self.terms)
        return d

    # enclosures ---------------------------------------------------------

    def bounds(self, bits=_FIRST_BITS):
        """Rational (lower, upper) enclosure."""
        if not self.terms:
            return self.rational, self.rational
        guard = max(abs(c).numerator.bit_length() - abs(c).denominator.bit_length()
                    for _, c in self.terms)
        prec = bits + max(guard, 0) + len(self.terms).bit_length()
        lo = hi = self.rational
        for sym, c in self.terms:
            a, b = _symbol_bounds(sym, prec)
            if c > 0:
                lo += c * a
                hi += c * b
            else:
                lo += c * b
                hi += c * a
        return lo, hi

    @property
    def lower(self):
        return self.bounds()[0]

    @property
    def upper(self):
        return self.bounds()[1]

    def refine(self, bits):
        return self.bounds(bits)

    def __float__(self):
        if not self.terms:
            return float(self.rational)
        lo, hi = self.bounds(80)
        return float((lo + hi) / 2)

    def sign(self, budget=None):
        """Certified sign in {-1, 0, 1}."""
        if not self.terms:
            return (self.rational > 0) - (self.rational < 0)
        budget = precision_budget(budget)
        bits = _FIRST_BITS
        while True:
            lo, hi = self.bounds(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if bits >= budget:
                break
            bits = min(2 * bits, budget)
        raise UnresolvableOrder(
            f"sign of {self} not resolved at {budget} bits")

    def floor(self, budget=None):
        """Certified integer floor."""
        if not self.terms:
            return math.floor(self.rational)
        f = math.floor(self.bounds(_FIRST_BITS)[0])
        # an irrational value is never an integer, so f < x < f+1 is decidable
        while (self - f).sign(budget) < 0:
            f -= 1
        while (self - (f + 1)).sign(budget) >= 0:
            f += 1
        return f

    def round(self, budget=None):
        """Nearest integer, halves rounded up."""
        return (self + Fraction(1, 2)).floor(budget)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return CertifiedReal(self.rational + other.rational, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return CertifiedReal(-self.rational, tuple((s, -c) for s, c in self.terms))

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CertifiedReal):
            if not other.terms:
                other = other.rational
            elif not self.terms:
                return other * self.rational
            else:
                raise TypeError("product of two irrational CertifiedReals is not supported")
        try:
            q = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return CertifiedReal(self.rational * q, tuple((s, c * q) for s, c in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, CertifiedReal):
            if other.terms:
                raise TypeError("division by an irrational CertifiedReal is not supported")
            other = other.rational
        q = _as_fraction(other)
        if q == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1 / q)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.rational == other.rational and self.terms == other.terms:
            return True
        diff = self - other
        if diff.terms and diff._mixes_transcendentals():
            return diff.sign() == 0  # raises when not separable
        return False

    def __lt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other) < 0

    def __hash__(self):
        if self._hash is None:
            h = hash(self.rational) if not self.terms else hash((self.rational, self.terms))
            object.__setattr__(self, "_hash", h)
        return self._hash

    # presentation -------------------------------------------------------

    def __str__(self):
        parts = []
        if self.rational != 0 or not self.terms:
            parts.append(str(self.rational))
        for sym, c in self.terms:
            if c == 1:
                parts.append(sym)
            elif c == -1:
                parts.append("-" + sym)
            else:
                parts.append(f"{c}*{sym}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"CertifiedReal({str(self)!r})"

    def to_json(self, bits=_FIRST_BITS):
        lo, hi = self.bounds(bits)
        d = {"expr": str(self),
             "lower": fraction_json(lo),
             "upper": fraction_json(hi),
             "rational": not self.terms}
        return d


def fraction_json(q):
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def _coerce(v):
    if isinstance(v, CertifiedReal):
        return v
    try:
        return CertifiedReal(_as_fraction(v))
    except TypeError:
        return NotImplemented


def certified(v):
    """Convert ints, Fractions and strings to ``CertifiedReal``; reject floats."""
    if isinstance(v, CertifiedReal):
        return v
    if isinstance(v, str):
        return CertifiedReal.parse(v)
    return CertifiedReal(_as_fraction(v))


def compare(x, y, budget=None):
    """Certified three-way comparison."""
    x, y = certified(x), certified(y)
    if x.rational == y.rational and x.terms == y.terms:
        return 0
    return (x - y).sign(budget)


def ratio(x, y):
    """Exact value of x/y when it is rational, else None.

    Raises ``UnknownRationality`` when the answer depends on an open
    problem (combinations of pi and e).
    """
    x, y = certified(x), certified(y)
    if y.sign() == 0:
        raise ZeroDivisionError("ratio with zero denominator")
    if not x.terms and not y.terms:
        return x.rational / y.rational
    cx, cy = x.coefficients(), y.coefficients()
    keys = set(cx) | set(cy)
    rho = None
    proportional = True
    for key in keys:
        a, b = cx.get(key, Fraction(0)), cy.get(key, Fraction(0))
        if b == 0:
            if a != 0:
                proportional = False
                break
            continue
        if rho is None:
            rho = a / b
        elif a != rho * b:
            proportional = False
            break
    if proportional:
        return rho if rho is not None else Fraction(0)
    if "pi" in keys and "e" in keys:
        raise UnknownRationality(f"rationality of ({x})/({y}) is not decidable")
    return None


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|(sqrt|pi|e)\b|(.))")


class _Parser:
    """Recursive descent parser for expressions like ``3/2*sqrt(2) + 1``."""

    def __init__(self, text):
        if not isinstance(text, str):
            raise ParseError(f"expected a string, got {type(text).__name__}")
        self.text = text
        self.tokens = []
        pos = 0
        stripped = text.strip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if m is None:
                raise ParseError(f"cannot parse {text!r}")
            num, name, sym = m.groups()
            if num is not None:
                self.tokens.append(("num", Fraction(num)))
            elif name is not None:
                self.tokens.append(("name", name))
            elif sym.strip():
                self.tokens.append(("op", sym))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def _take(self):
        tok = self._peek()
        self.i += 1
        return tok

    def _expect(self, op):
        kind, val = self._take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r} in {self.text!r}")

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression")
        out = self._expr()
        if self.i != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return out

    def _expr(self):
        out = self._term()
        while self._peek() in (("op", "+"), ("op", "-")):
            _, op = self._take()
            rhs = self._term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def _term(self):
        out = self._unary()
        while self._peek() in (("op", "*"), ("op", "/")):
            _, op = self._take()
            rhs = self._unary()
            try:
                out = out * rhs if op == "*" else out / rhs
            except (TypeError, ZeroDivisionError) as exc:
                raise ParseError(f"{exc} in {self.text!r}")
        return out

    def _unary(self):
        if self._peek() == ("op", "-"):
            self._take()
            return -self._unary()
        if self._peek() == ("op", "+"):
            self._take()
            return self._unary()
        return self._atom()

    def _atom(self):
        kind, val = self._take()
        if kind == "num":
            return CertifiedReal(val)
        if kind == "name":
            if val == "pi":
                return CertifiedReal.pi()
            if val == "e":
                return CertifiedReal.e()
            self._expect("(")
            k_kind, k = self._take()
            if k_kind != "num" or k.denominator != 1 or k <= 0:
                raise ParseError(f"sqrt takes a positive integer in {self.text!r}")
            self._expect(")")
            return CertifiedReal.sqrt(int(k))
        if kind == "op" and val == "(":
            out = self._expr()
            self._expect(")")
            return out
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")
