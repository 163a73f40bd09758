"""Robbin-Salamon and Conley-Zehnder indices of paths of symplectic matrices.

Coordinates are interleaved, (x_1, y_1, x_2, y_2, ...), so that
``J0 = blockdiag([[0, -1], [1, 0]], ...)`` is multiplication by i and the
standard symplectic form is ``omega0(v, w) = v^T J0 w``.  With these
conventions a path solving ``Phi' = J0 S Phi`` has crossing form S restricted
to ker(Phi - Id), so the rotation ``exp(J0 theta t)`` with theta > 0 crosses
with signature +2.

Indices are returned as ``fractions.Fraction`` (half-integers are exact).
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from .errors import (DegenerateCrossing, DegenerateEndpoint, IndefiniteHessian,
                     NotACrossing, PreconditionError, UnresolvedCrossing, ZeroRate)

# tolerances, all relative to the path scale max(1, |Phi|)
SYMPLECTIC_TOL = 1e-10
ZERO_TOL = 1e-8         # sigma_min below this is a crossing
AMBIGUOUS_TOL = 1e-6    # between ZERO_TOL and this: refuse to decide
KERNEL_TOL = 1e-6       # singular values below this span the crossing kernel
DEGENERATE_TOL = 1e-8   # crossing form eigenvalues below this (relative) are zero
TIME_TOL = 1e-12        # crossing localisation, relative to T
DEFAULT_SAMPLES = 2001


def standard_j(m: int) -> np.ndarray:
    """J0 in dimension 2m."""
    return np.kron(np.eye(m), np.array([[0.0, -1.0], [1.0, 0.0]]))


def omega0(v, w):
    m = len(v) // 2
    return float(np.asarray(v) @ standard_j(m) @ np.asarray(w))


def symplectic_inverse(phi: np.ndarray) -> np.ndarray:
    j = standard_j(phi.shape[0] // 2)
    return -j @ phi.T @ j


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def block_diag(*blocks) -> np.ndarray:
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def _four_point_derivative(func, t, h, t0, t1):
    if t - 2 * h >= t0 and t + 2 * h <= t1:
        return (-func(t + 2 * h) + 8 * func(t + h) - 8 * func(t - h) + func(t - 2 * h)) / (12 * h)
    if t - 2 * h < t0:
        f = [func(t + k * h) for k in range(5)]
        return (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    f = [func(t - k * h) for k in range(5)]
    return (25 * f[0] - 48 * f[1] + 36 * f[2] - 16 * f[3] + 3 * f[4]) / (12 * h)


@dataclass(frozen=True)
class SymplecticPathSample:
    """Sampled path t -> Phi(t) on [0, T].

    ``func`` evaluates the path between samples; paths loaded from plain
    samples are interpolated entrywise by cubic splines.
    """

    times: np.ndarray
    matrices: np.ndarray
    func: Callable = field(repr=False)
    derivative_hint: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        t = self.times
        if t.ndim != 1 or len(t) < 2 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise PreconditionError("times must increase strictly from 0")
        d = self.matrices.shape[1]
        if self.matrices.shape != (len(t), d, d) or d % 2:
            raise PreconditionError("matrices must be square of even size")
        j = standard_j(d // 2)
        for k, phi in enumerate(self.matrices):
            err = np.abs(phi.T @ j @ phi - j).max()
            if err > SYMPLECTIC_TOL * max(1.0, np.abs(phi).max() ** 2):
                raise PreconditionError(
                    f"sample {k} at t={t[k]:.6g} is not symplectic (error {err:.2e})")

    @classmethod
    def from_function(cls, func, T, n_samples=DEFAULT_SAMPLES, derivative=None):
        if not T > 0:
            raise PreconditionError("path length must be positive")
        times = np.linspace(0.0, float(T), int(n_samples))
        mats = np.array([np.asarray(func(t), dtype=float) for t in times])
        return cls(times, mats, func, derivative)

    @classmethod
    def from_samples(cls, times, matrices):
        times = np.asarray(times, dtype=float)
        matrices = np.asarray(matrices, dtype=float)
        spline = CubicSpline(times, matrices, axis=0)
        dspline = spline.derivative()
        return cls(times, matrices, lambda t: spline(t), lambda t: dspline(t))

    @classmethod
    def from_csv(cls, text):
        """Rows: t, then the row-major entries of Phi(t)."""
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]
        data = np.array([[float(x) for x in r] for r in rows])
        d = math.isqrt(data.shape[1] - 1)
        if d * d != data.shape[1] - 1:
            raise PreconditionError("CSV rows must hold t and a square matrix")
        return cls.from_samples(data[:, 0], data[:, 1:].reshape(-1, d, d))

    def to_csv(self):
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        d = self.dim
        w.writerow(["t"] + [f"m{i}{j}" for i in range(d) for j in range(d)])
        for t, phi in zip(self.times, self.matrices):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in phi.ravel()])
        return out.getvalue()

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def __call__(self, t):
        return np.asarray(self.func(t), dtype=float)

    def deriv(self, t):
        if self.derivative_hint is not None:
            return np.asarray(self.derivative_hint(t), dtype=float)
        return _four_point_derivative(self, t, 1e-5 * self.T, 0.0, self.T)


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


# path constructors ------------------------------------------------------

def rotation_path(theta, T, n_samples=DEFAULT_SAMPLES):
    """t -> exp(J0 theta t) in dimension 2."""
    j = standard_j(1)
    return SymplecticPathSample.from_function(
        lambda t: rotation(theta * t), T, n_samples,
        derivative=lambda t: theta * j @ rotation(theta * t))


def rotation_sum_path(thetas, T, n_samples=DEFAULT_SAMPLES):
    """Direct sum of planar rotations exp(J0 theta_l t)."""
    thetas = [float(x) for x in thetas]
    j = standard_j(1)
    return SymplecticPathSample.from_function(
        lambda t: block_diag(*[rotation(th * t) for th in thetas]), T, n_samples,
        derivative=lambda t: block_diag(*[th * j @ rotation(th * t) for th in thetas]))


def linear_flow_path(S, T, start=None, n_samples=DEFAULT_SAMPLES):
    """t -> exp(J0 S t) @ start for a symmetric matrix S."""
    S = np.asarray(S, dtype=float)
    A = standard_j(S.shape[0] // 2) @ S
    P = np.eye(S.shape[0]) if start is None else np.asarray(start, dtype=float)
    return SymplecticPathSample.from_function(
        lambda t: expm(A * t) @ P, T, n_samples,
        derivative=lambda t: A @ expm(A * t) @ P)


def concatenate(first: SymplecticPathSample, second: SymplecticPathSample,
                n_samples=None):
    """Run ``first`` then ``second``; ``second`` must start where ``first`` ends."""
    if np.abs(first(first.T) - second(0.0)).max() > 1e-9 * max(1.0, np.abs(second(0.0)).max()):
        raise PreconditionError("concatenated paths do not match at the junction")
    T1, T2 = first.T, second.T

    def func(t):
        return first(t) if t <= T1 else second(t - T1)

    def deriv(t):
        return first.deriv(t) if t <= T1 else second.deriv(t - T1)

    if n_samples is None:
        n_samples = len(first.times) + len(second.times) - 1
    return SymplecticPathSample.from_function(func, T1 + T2, n_samples, derivative=deriv)


def direct_sum(first: SymplecticPathSample, second: SymplecticPathSample,
               n_samples=None):
    """Block sum, with ``second`` reparametrized onto the time interval of ``first``."""
    T = first.T
    c = second.T / T

    def func(t):
        return block_diag(first(t), second(c * t))

    def deriv(t):
        return block_diag(first.deriv(t), c * second.deriv(c * t))

    if n_samples is None:
        n_samples = max(len(first.times), len(second.times))
    return SymplecticPathSample.from_function(func, T, n_samples, derivative=deriv)


def conjugated(path: SymplecticPathSample, P: np.ndarray):
    """t -> P Phi(t) P^{-1} for a constant symplectic P."""
    Pinv = symplectic_inverse(P)
    return SymplecticPathSample.from_function(
        lambda t: P @ path(t) @ Pinv, path.T, len(path.times),
        derivative=lambda t: P @ path.deriv(t) @ Pinv)


# crossings ---------------------------------------------------------------

@dataclass(frozen=True)
class CrossingDatum:
    t: float
    kernel: np.ndarray = field(repr=False)
    signature: int

    @property
    def kernel_dim(self):
        return self.kernel.shape[1]

    def to_json(self):
        return {"t": float(self.t), "kernel_dim": int(self.kernel_dim),
                "signature": int(self.signature)}


def _crossing_matrix(phi, dphi):
    """Symmetric matrix of Gamma(v, w) = omega0(Phi' Phi^{-1} v, w)."""
    j = standard_j(phi.shape[0] // 2)
    A = dphi @ symplectic_inverse(phi)
    M = A.T @ j
    return 0.5 * (M + M.T)


def _signature(phi, dphi, kernel, t):
    M = _crossing_matrix(phi, dphi)
    G = kernel.T @ M @ kernel
    G = 0.5 * (G + G.T)
    lam = np.linalg.eigvalsh(G)
    ref = max(np.abs(lam).max(), np.linalg.norm(M, 2), 1e-300)
    if np.abs(lam).min() < DEGENERATE_TOL * ref:
        raise DegenerateCrossing(
            f"crossing form at t={t:.12g} is singular (eigenvalues {lam})")
    return int((lam > 0).sum() - (lam < 0).sum())


def _kernel(phi, scale, tol=KERNEL_TOL):
    _, s, vt = np.linalg.svd(phi - np.eye(phi.shape[0]))
    return vt[s < tol * scale].T


def crossing_form(path: SymplecticPathSample, t: float) -> CrossingDatum:
    """Kernel of Phi(t) - Id and the signature of the crossing form on it."""
    phi = path(t)
    scale = max(1.0, np.abs(phi).max())
    K = _kernel(phi, scale)
    if K.shape[1] == 0:
        raise NotACrossing(f"Phi({t}) - Id is invertible")
    return CrossingDatum(float(t), K, _signature(phi, path.deriv(t), K, t))


def _common_kernel(mats, scale):
    d = mats.shape[1]
    stack = (mats - np.eye(d)).reshape(-1, d)
    _, s, vt = np.linalg.svd(stack, full_matrices=False)
    return vt[s < 1e-9 * scale * math.sqrt(len(mats))].T


def _symplectic_basis(W, j):
    """Symplectic basis (e_1, f_1, ...) of span(W) with omega0(e_k, f_k) = -1."""
    vecs = [W[:, k].copy() for k in range(W.shape[1])]
    out = []
    while vecs:
        e = vecs.pop(0)
        vals = [abs(e @ j @ v) for v in vecs]
        k = int(np.argmax(vals))
        f = vecs.pop(k)
        f = f / -(e @ j @ f)
        out += [e, f]
        vecs = [v + (v @ j @ f) * e - (v @ j @ e) * f for v in vecs]
    return np.array(out).T


class _Reduced:
    """Path restricted to the symplectic complement of a constant fixed subspace."""

    def __init__(self, path, B):
        self.path = path
        self.B = B
        m = B.shape[1] // 2
        jr = standard_j(m)
        jf = standard_j(path.dim // 2)
        self.Bplus = -jr @ B.T @ jf

    def __call__(self, t):
        return self.Bplus @ self.path(t) @ self.B

    def deriv(self, t):
        return self.Bplus @ self.path.deriv(t) @ self.B


def _reduce(path):
    """Split off a constant symplectic subspace fixed along the whole path."""
    mats = path.matrices
    scale = max(1.0, np.abs(mats).max())
    K = _common_kernel(mats, scale)
    d = path.dim
    if K.shape[1] == 0:
        return _Reduced(path, np.eye(d)), scale
    jf = standard_j(d // 2)
    G = K.T @ jf @ K
    if K.shape[1] % 2 or np.linalg.svd(G, compute_uv=False).min() < 1e-6:
        return None, scale  # isotropic part: handled by the rank test
    if K.shape[1] == d:
        return _Reduced(path, np.zeros((d, 0))), scale
    # W = K^omega = null(K^T J0)
    _, s, vt = np.linalg.svd(K.T @ jf)
    W = vt[K.shape[1]:].T
    return _Reduced(path, _symplectic_basis(W, jf)), scale


def _sigma_min(phi):
    return np.linalg.svd(phi - np.eye(phi.shape[0]), compute_uv=False)[-1]


def _rank_profile(mats, scale):
    d = mats.shape[1]
    s = np.linalg.svd(mats - np.eye(d), compute_uv=False)
    return (s >= KERNEL_TOL * scale).sum(axis=1), s


def _constant_rank_test(path, scale):
    """RS of a path whose every sample has a kernel; 0 iff the rank is constant."""
    ranks, s = _rank_profile(path.matrices, scale)
    if ranks.min() != ranks.max():
        raise DegenerateCrossing(
            "the kernel of Phi - Id jumps along a path that never leaves the Maslov cycle")
    r = int(ranks[0])
    # smallest singular value that is not part of the persistent kernel
    sv = s[:, r - 1] if r > 0 else None
    if sv is not None:
        i = int(np.argmin(sv))
        lo = path.times[max(i - 1, 0)]
        hi = path.times[min(i + 1, len(path.times) - 1)]
        res = minimize_scalar(
            lambda t: np.linalg.svd(path(t) - np.eye(path.dim), compute_uv=False)[r - 1],
            bounds=(lo, hi), method="bounded", options={"xatol": TIME_TOL * path.T})
        if res.fun < AMBIGUOUS_TOL * scale:
            raise DegenerateCrossing("the kernel of Phi - Id jumps between samples")
    return Fraction(0), []


_INVPHI = (math.sqrt(5) - 1) / 2


def _golden_min(f, lo, hi, tol):
    """Bounded golden-section minimisation with an absolute tolerance.

    Unlike scipy's bounded Brent method the bracket can shrink to ``tol``
    regardless of the magnitude of t.  The endpoints are candidates too.
    """
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    best = min(((fc, c), (fd, d), (f(lo), lo), (f(hi), hi)))
    return best[1], best[0]


def _search_zeros(sfun, lo, hi, T, scale, depth=0):
    """Zeros of sigma_min in [lo, hi], located to TIME_TOL * T."""
    if hi - lo <= 4 * TIME_TOL * T:
        return []
    t, s = _golden_min(sfun, lo, hi, TIME_TOL * T)
    edge = 100 * TIME_TOL * T
    interior = lo + edge < t < hi - edge
    # a minimum pinned to the window edge is the flank of a neighbouring
    # zero (or an endpoint, which is examined separately)
    if interior and s < ZERO_TOL * scale:
        zeros = [t]
        if depth < 3:
            gap = 1e-7 * T
            zeros += _search_zeros(sfun, lo, t - gap, T, scale, depth + 1)
            zeros += _search_zeros(sfun, t + gap, hi, T, scale, depth + 1)
        return zeros
    if interior and s < AMBIGUOUS_TOL * scale:
        raise UnresolvedCrossing(
            f"near-crossing at t={t:.12g} (sigma_min={s:.3e}) cannot be resolved")
    return []


@dataclass(frozen=True)
class RSResult:
    value: Fraction
    crossings: tuple

    def to_json(self, path_id="path"):
        return {"path_id": path_id, "rs_num": self.value.numerator,
                "rs_den": self.value.denominator,
                "crossings": [c.to_json() for c in self.crossings]}


def rs_report(path: SymplecticPathSample) -> RSResult:
    """Robbin-Salamon index together with the crossings that produced it."""
    red, scale = _reduce(path)
    if red is None:
        value, crossings = _constant_rank_test(path, scale)
        return RSResult(value, tuple(crossings))
    if red.B.shape[1] == 0:
        return RSResult(Fraction(0), ())
    T = path.T
    d = red.B.shape[1]
    eye = np.eye(d)
    mats = red.Bplus @ path.matrices @ red.B
    profile = np.linalg.svd(mats - eye, compute_uv=False)
    ranks = (profile >= KERNEL_TOL * scale).sum(axis=1)
    if ranks.max() < d:
        return RSResult(*_constant_rank_test(
            SymplecticPathSample(path.times, mats, red, red.deriv), scale))
    s = profile[:, -1]

    def sfun(t):
        return _sigma_min(red(t))

    times = path.times
    N = len(times) - 1
    zeros = []
    for end in (0, N):
        if s[end] < ZERO_TOL * scale:
            zeros.append(float(times[end]))
        elif s[end] < AMBIGUOUS_TOL * scale:
            raise UnresolvedCrossing(
                f"endpoint t={times[end]:.12g} is within {s[end]:.2e} of a crossing")
    for i in range(N + 1):
        left = s[i - 1] if i > 0 else np.inf
        right = s[i + 1] if i < N else np.inf
        if s[i] <= left and s[i] <= right:
            lo, hi = float(times[max(i - 1, 0)]), float(times[min(i + 1, N)])
            zeros += _search_zeros(sfun, lo, hi, T, scale)
    zeros.sort()
    merged = []
    for t in zeros:
        if merged and t - merged[-1] < 1e-9 * T:
            # keep exact endpoints over nearby numerical minima
            if t in (0.0, T):
                merged[-1] = t
            continue
        if t > T - 1e-9 * T and T not in merged and s[N] < ZERO_TOL * scale:
            t = T
        elif t < 1e-9 * T and s[0] < ZERO_TOL * scale:
            t = 0.0
        if merged and t == merged[-1]:
            continue
        merged.append(t)
    total = Fraction(0)
    crossings = []
    for t in merged:
        phi = red(t)
        K = _kernel(phi, scale)
        if K.shape[1] == 0:
            K = np.linalg.svd(phi - eye)[2][-1:].T
        sig = _signature(phi, red.deriv(t), K, t)
        crossings.append(CrossingDatum(t, red.B @ K if red.B.size else K, sig))
        total += Fraction(sig, 2) if t in (0.0, T) else sig
    return RSResult(total, tuple(crossings))


def rs_index(path: SymplecticPathSample) -> Fraction:
    """Robbin-Salamon index: half the endpoint signatures plus the interior ones."""
    return rs_report(path).value


def rs_rotation_block(theta: float, T: float) -> Fraction:
    """Closed form RS index of t -> exp(J0 theta t) on [0, T]."""
    if theta == 0:
        raise ZeroRate("rotation rate must be nonzero")
    if not T > 0:
        raise PreconditionError("T must be positive")
    sgn = 1 if theta > 0 else -1
    turns = abs(theta) * T / (2 * math.pi)
    nearest = round(turns)
    if abs(turns - nearest) <= 1e-12 * max(1.0, turns):
        interior, at_end = nearest - 1, 1
    else:
        interior, at_end = math.floor(turns), 0
    return Fraction(sgn * (2 + 4 * interior + 2 * at_end), 2)


def cz_nondegenerate(path: SymplecticPathSample) -> int:
    """Conley-Zehnder index of a path from Id to a matrix without eigenvalue 1."""
    phi0 = path(0.0)
    if np.abs(phi0 - np.eye(path.dim)).max() > SYMPLECTIC_TOL:
        raise PreconditionError("path must start at the identity")
    end = path(path.T)
    scale = max(1.0, np.abs(path.matrices).max())
    if _sigma_min(end) < AMBIGUOUS_TOL * scale:
        raise DegenerateEndpoint("Phi(T) has eigenvalue 1")
    value = rs_index(path)
    if value.denominator != 1:
        raise DegenerateEndpoint(f"non-integral index {value} at a nondegenerate endpoint")
    return int(value)


# Morse-Bott corrections ---------------------------------------------------

@dataclass(frozen=True)
class MorseBottOrbitDatum:
    rs_family: Fraction
    dim_family: int
    morse_index: int

    def __post_init__(self):
        object.__setattr__(self, "rs_family", Fraction(self.rs_family))
        if self.rs_family.denominator not in (1, 2):
            raise PreconditionError("RS index must be a half-integer")
        if self.dim_family < 0 or self.dim_family % 2:
            raise PreconditionError("family dimension must be even and non-negative")
        if not 0 <= self.morse_index <= self.dim_family:
            raise PreconditionError("Morse index must lie in [0, dim]")


def cz_morse_bott(d: MorseBottOrbitDatum):
    """rs + dim/2 - morse_index, as an int when integral."""
    v = d.rs_family + Fraction(d.dim_family, 2) - d.morse_index
    return int(v) if v.denominator == 1 else v


def grading_parity_check(n: int, d: MorseBottOrbitDatum) -> bool:
    cz = Fraction(cz_morse_bott(d))
    if cz.denominator != 1:
        return False
    return (n - 3 + int(cz) - d.morse_index) % 2 == 0


class Definiteness(enum.Enum):
    PositiveDefinite = "positive"
    NegativeDefinite = "negative"
    Indefinite = "indefinite"


def normal_cz_from_hessian(hessian, eps=0.1) -> int:
    """Normal CZ index of a Morse-Bott perturbed orbit.

    ``hessian`` is a ``Definiteness`` member or a symmetric 2x2 matrix of the
    perturbing function restricted to the normal plane.  The index is computed
    from the linearized normal flow exp(-J0 eps H t) on [0, 1].
    """
    if isinstance(hessian, Definiteness):
        if hessian is Definiteness.Indefinite:
            raise IndefiniteHessian("normal Hessian is indefinite")
        H = np.eye(2) if hessian is Definiteness.PositiveDefinite else -np.eye(2)
    else:
        H = np.asarray(hessian, dtype=float)
        if H.shape != (2, 2):
            raise PreconditionError("normal Hessian must be 2x2")
        H = 0.5 * (H + H.T)
        lam = np.linalg.eigvalsh(H)
        if lam[0] * lam[1] <= 0:
            raise IndefiniteHessian(f"normal Hessian has eigenvalues {lam}")
    H = H / np.abs(np.linalg.eigvalsh(H)).max()
    path = linear_flow_path(-eps * H, 1.0, n_samples=201)
    return cz_nondegenerate(path)


# ellipsoid orbits -----------------------------------------------------------

def ellipsoid_orbit_paths(axes, label, samples_per_turn=40):
    """Linearized Reeb flow along the orbit ``label`` of E(axes).

    Returns (full, normal).  ``full`` is the flow on all of C^n.  ``normal``
    is the flow on the contact planes, the n-1 complex lines transverse to
    the orbit, written in a frame that extends over a capping disk of the
    orbit inside the boundary.  That frame differs from the constant one by
    the orbit's own rotation, which we put on the first transverse line.
    """
    axes = [float(a) for a in axes]
    i, j = label
    T = j * axes[i - 1]
    thetas = [2 * math.pi / a for a in axes]
    turns = sum(abs(th) * T / (2 * math.pi) for th in thetas) + j
    n_samples = max(DEFAULT_SAMPLES, int(samples_per_turn * turns) + 1)
    full = rotation_sum_path(thetas, T, n_samples)
    others = [th for k, th in enumerate(thetas) if k != i - 1]
    if not others:
        return full, None
    others[0] += thetas[i - 1]
    return full, rotation_sum_path(others, T, n_samples)


def ellipsoid_cz(axes, label, samples_per_turn=40) -> int:
    """CZ index of an ellipsoid orbit from the sampled linearized flow."""
    _, normal = ellipsoid_orbit_paths(axes, label, samples_per_turn)
    return cz_nondegenerate(normal) if normal is not None else 2 * label[1]
