"""Reeb dynamics on ellipsoid boundaries and the two-frequency torus model.

State vectors are complex arrays z = (z_1, ..., z_n).  On the boundary of
E(a) the moment coordinates mu_j = pi |z_j|^2 / a_j sum to one, and the Reeb
flow rotates each z_j with angular speed 2 pi / a_j.

For a torus-invariant perturbation f = g(mu) of the contact form,
exp(h) lambda with h = eps * g, the Reeb field is again diagonal,
dz_j/dt = i w_j(mu) z_j, with

    w_j = exp(-h) (2 pi / a_j) (1 - (dh/dmu_j - sum_l mu_l dh/dmu_l)),

so each invariant torus {mu = const} carries a linear flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .certified import certified, ratio
from .errors import CalibrationFailure, NotFound, OffSurface, PreconditionError, StepFailure
from .spectrum import INFINITE, EllipsoidSpec, period

SURFACE_TOL = 1e-10
DRIFT_TOL = 1e-8
TWO_PI = 2 * math.pi


def _axes(e):
    if not isinstance(e, EllipsoidSpec):
        e = EllipsoidSpec.from_values(e)
    return e, np.array([float(a) for a in e.axes])


def moment(axes, z) -> np.ndarray:
    return math.pi * np.abs(np.asarray(z)) ** 2 / axes


def _check_surface(axes, z):
    z = np.asarray(z, dtype=complex)
    if z.shape != axes.shape:
        raise PreconditionError(f"point has {z.size} coordinates, ellipsoid has {axes.size}")
    err = abs(moment(axes, z).sum() - 1.0)
    if err > SURFACE_TOL:
        raise OffSurface(f"point is off the ellipsoid boundary by {err:.3e}")
    return z


def point_on_torus(e, mu, phases=None) -> np.ndarray:
    """Point of the boundary with moment coordinates mu and the given phases."""
    _, axes = _axes(e)
    mu = np.asarray(mu, dtype=float)
    if np.any(mu < 0) or abs(mu.sum() - 1) > 1e-12:
        raise PreconditionError("mu must lie in the simplex")
    phases = np.zeros_like(mu) if phases is None else np.asarray(phases, dtype=float)
    return np.sqrt(axes * mu / math.pi) * np.exp(1j * phases)


@dataclass(frozen=True)
class InvariantPerturbation:
    """f = g(mu) with analytic gradient; the perturbed form is exp(eps f) lambda."""

    g: Callable = field(repr=False)
    grad: Callable = field(repr=False)
    eps: float = 0.0
    support: str = "simplex"
    name: str = "custom"

    def h(self, mu):
        return self.eps * float(self.g(mu))

    def dh(self, mu):
        return self.eps * np.asarray(self.grad(mu), dtype=float)

    def with_eps(self, eps):
        return InvariantPerturbation(self.g, self.grad, eps, self.support, self.name)


class _LogProfile:
    """h = log(1 + t g): the form (1 + t g) lambda."""

    def __init__(self, profile: InvariantPerturbation, t: float):
        self.profile, self.t = profile, t

    def h(self, mu):
        return math.log1p(self.t * float(self.profile.g(mu)))

    def dh(self, mu):
        g = float(self.profile.g(mu))
        return self.t * np.asarray(self.profile.grad(mu), dtype=float) / (1 + self.t * g)


def zero_perturbation(n):
    return InvariantPerturbation(lambda mu: 0.0, lambda mu: np.zeros(n), 0.0, "empty", "zero")


def linear_profile(c, j=1, n=2):
    """g = c * mu_j."""
    c = float(c)
    e_j = np.zeros(n)
    e_j[j - 1] = c
    return InvariantPerturbation(lambda mu: c * mu[j - 1], lambda mu: e_j.copy(), 1.0,
                                 f"mu_{j} > 0", f"linear:{c}:{j}")


def constant_profile(c, n=2):
    c = float(c)
    return InvariantPerturbation(lambda mu: c, lambda mu: np.zeros(n), 1.0,
                                 "simplex", f"const:{c}")


def bump_profile(c, center, width, j=1, n=2):
    """g = c * exp(1 - 1/(1 - x^2)) with x = (mu_j - center)/width, zero for |x| >= 1."""
    c, center, width = float(c), float(center), float(width)

    def g(mu):
        x = (mu[j - 1] - center) / width
        return c * math.exp(1 - 1 / (1 - x * x)) if abs(x) < 1 else 0.0

    def grad(mu):
        out = np.zeros(n)
        x = (mu[j - 1] - center) / width
        if abs(x) < 1:
            val = math.exp(1 - 1 / (1 - x * x))
            out[j - 1] = c * val * (-2 * x / (1 - x * x) ** 2) / width
        return out

    return InvariantPerturbation(g, grad, 1.0, f"|mu_{j} - {center}| < {width}",
                                 f"bump:{c}:{center}:{width}:{j}")


def parse_profile(spec: str, n: int) -> InvariantPerturbation:
    """``linear:c[:j]``, ``const:c`` or ``bump:c:center:width[:j]``."""
    parts = spec.split(":")
    try:
        kind, nums = parts[0], [float(p) for p in parts[1:]]
    except ValueError:
        raise PreconditionError(f"bad profile spec {spec!r}")
    if kind == "linear" and len(nums) in (1, 2):
        j = int(nums[1]) if len(nums) == 2 else 1
        if not 1 <= j <= n:
            raise PreconditionError(f"profile coordinate {j} out of range")
        return linear_profile(nums[0], j, n)
    if kind == "const" and len(nums) == 1:
        return constant_profile(nums[0], n)
    if kind == "bump" and len(nums) in (3, 4):
        j = int(nums[3]) if len(nums) == 4 else 1
        return bump_profile(nums[0], nums[1], nums[2], j, n)
    raise PreconditionError(f"bad profile spec {spec!r}")


def _omega(axes, prof, mu):
    dh = prof.dh(mu)
    return math.exp(-prof.h(mu)) * (TWO_PI / axes) * (1 - (dh - mu @ dh))


def frequencies(e, f: Optional[InvariantPerturbation], mu) -> np.ndarray:
    """Angular frequencies of the perturbed Reeb flow on the torus mu."""
    e, axes = _axes(e)
    mu = np.asarray(mu, dtype=float)
    if f is None:
        return TWO_PI / axes
    return _omega(axes, f, mu)


def exact_flow(e, z, t) -> np.ndarray:
    """z_j -> exp(2 pi i t / a_j) z_j."""
    _, axes = _axes(e)
    z = _check_surface(axes, z)
    return z * np.exp(1j * (TWO_PI * float(t) / axes))


def perturbed_reeb_field(e, f: Optional[InvariantPerturbation], z) -> np.ndarray:
    """R_f = exp(-eps f)(R - eps X_f) at z, as a complex vector."""
    _, axes = _axes(e)
    z = _check_surface(axes, z)
    if f is None:
        return 1j * (TWO_PI / axes) * z
    return 1j * _omega(axes, f, moment(axes, z)) * z


def _real(z):
    return np.column_stack([z.real, z.imag]).ravel()


def _complex(u):
    u = np.asarray(u)
    return u[..., 0::2] + 1j * u[..., 1::2]


@dataclass(frozen=True)
class TrajectorySample:
    times: np.ndarray
    points: np.ndarray  # shape (len(times), n), complex
    field_tag: str
    stats: dict
    constraint_drift: np.ndarray
    mu_drift: np.ndarray
    failed: bool

    def to_csv(self):
        n = self.points.shape[1]
        head = ["t"] + [f"{p}_z{j + 1}" for j in range(n) for p in ("re", "im")] + ["constraint_drift"]
        lines = [",".join(head)]
        for t, z, d in zip(self.times, self.points, self.constraint_drift):
            vals = [t] + [v for zj in z for v in (zj.real, zj.imag)] + [d]
            lines.append(",".join(repr(float(v)) for v in vals))
        return "\n".join(lines) + "\n"


def integrate(e, f: Optional[InvariantPerturbation], z0, t_end, tol=1e-10,
              n_points=None, drift_tol=None, _profile=None) -> TrajectorySample:
    """Adaptive DOP853 integration of the perturbed Reeb field.

    The sample is marked failed when the surface constraint or any mu_j
    drifts by more than ``drift_tol`` (default max(1e-8, 100 tol)).
    """
    _, axes = _axes(e)
    if not 1e-12 <= tol <= 1e-4:
        raise PreconditionError("tol must lie in [1e-12, 1e-4]")
    z0 = _check_surface(axes, z0)
    if drift_tol is None:
        drift_tol = max(DRIFT_TOL, 100 * tol)
    prof = _profile if _profile is not None else f
    t_end = float(t_end)
    if n_points is None:
        n_points = max(201, int(40 * t_end / axes.min()) + 1)

    def rhs(_, u):
        z = _complex(u)
        w = TWO_PI / axes if prof is None else _omega(axes, prof, moment(axes, z))
        return _real(1j * w * z)

    t_eval = np.linspace(0.0, t_end, n_points)
    sol = solve_ivp(rhs, (0.0, t_end), _real(z0), method="DOP853", t_eval=t_eval,
                    rtol=tol, atol=tol * 1e-2, dense_output=True)
    if sol.status < 0:
        raise StepFailure(sol.message)
    pts = _complex(sol.y.T)
    mu = moment(axes, pts)
    constraint = np.abs(mu.sum(axis=1) - 1.0)
    mu_drift = np.abs(mu - moment(axes, z0)).max(axis=1)
    failed = bool(constraint.max() > drift_tol or mu_drift.max() > drift_tol)
    tag = "reeb" if prof is None else getattr(prof, "name", "perturbed")
    stats = {"nfev": int(sol.nfev), "status": int(sol.status), "method": "DOP853",
             "rtol": tol, "atol": tol * 1e-2}
    return TrajectorySample(sol.t, pts, tag, stats, constraint, mu_drift, failed)


def fit_frequencies(traj: TrajectorySample, min_modulus=1e-8) -> np.ndarray:
    """Least-squares slope of the unwrapped phase of each coordinate."""
    out = []
    for j in range(traj.points.shape[1]):
        zj = traj.points[:, j]
        if np.abs(zj).min() < min_modulus:
            out.append(float("nan"))
            continue
        phase = np.unwrap(np.angle(zj))
        out.append(float(np.polyfit(traj.times, phase, 1)[0]))
    return np.array(out)


# closing search ---------------------------------------------------------------

@dataclass(frozen=True)
class ClosingResult:
    t_star: float
    period: float
    ratio: Optional[tuple]
    residual: float
    orbit: np.ndarray
    mu: np.ndarray
    profile: str

    def to_json(self):
        return {"t_star": self.t_star, "period": self.period,
                "ratio": None if self.ratio is None else {"p": self.ratio[0], "q": self.ratio[1]},
                "residual": self.residual,
                "mu": [float(m) for m in self.mu],
                "orbit_start": [[float(z.real), float(z.imag)] for z in self.orbit],
                "profile": self.profile}


def _return_residual(e, prof, z0, tau, i):
    """Integrate one candidate period, polish tau by a Newton step on the phase of z_i."""
    _, axes = _axes(e)
    traj = integrate(e, None, z0, tau, tol=1e-12, n_points=2, _profile=prof)
    z1 = traj.points[-1]
    w = _omega(axes, prof, moment(axes, z0))[i]
    slip = math.remainder(float(np.angle(z1[i] / z0[i])), TWO_PI)
    tau2 = tau - slip / w
    traj = integrate(e, None, z0, tau2, tol=1e-12, n_points=2, _profile=prof)
    return tau2, float(np.abs(traj.points[-1] - z0).max())


def find_closing_t(e, profile: InvariantPerturbation, mu_star, bound,
                   t_range=(0.0, 1.0), grid=2001) -> ClosingResult:
    """Smallest t in t_range for which (1 + t g) lambda has a closed orbit on the
    torus mu_star with period at most ``bound``."""
    e, axes = _axes(e)
    mu = np.asarray(mu_star, dtype=float)
    if mu.shape != axes.shape or np.any(mu < 0) or abs(mu.sum() - 1) > 1e-12:
        raise PreconditionError("mu_star must be a point of the simplex")
    if not float(profile.g(mu)) > 0:
        raise PreconditionError("mu_star is not in the support of the profile")
    bound = float(bound)
    if bound <= 0:
        raise NotFound("period bound is not positive", nearest=None)
    z0 = point_on_torus(e, mu)
    active = [j for j in range(len(mu)) if mu[j] > 0]
    T = period(e)
    if len(active) == 1 or T is not INFINITE:
        tau = float(T) if len(active) > 1 else float(axes[active[0]])
        if tau > bound:
            raise NotFound(f"closed orbit at t=0 has period {tau} > bound", nearest=tau)
        res = float(np.abs(exact_flow(e, z0, tau) - z0).max())
        return ClosingResult(0.0, tau, None, res, z0, mu, profile.name)
    if len(active) > 2:
        raise NotFound("closing search supports tori with two active coordinates", nearest=None)
    i, j = active
    t0, t1 = float(t_range[0]), float(t_range[1])
    ts = np.linspace(t0, t1, grid)

    def omegas(t):
        return _omega(axes, _LogProfile(profile, t), mu)

    def rho(t):
        w = omegas(t)
        return w[i] / w[j]

    rhos = np.array([rho(t) for t in ts])
    wj_max = max(omegas(t)[j] for t in ts)
    q_max = int(bound * wj_max / TWO_PI) + 1
    lo, hi = rhos.min(), rhos.max()
    hits = []
    nearest = None
    for q in range(1, q_max + 1):
        for p in range(max(1, math.ceil(q * lo - 1e-12)), math.floor(q * hi + 1e-12) + 1):
            if math.gcd(p, q) != 1:
                continue
            d = rhos - p / q
            for k in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) <= 0)[0]:
                a, b = ts[k], ts[k + 1]
                if d[k] == 0:
                    t = a
                elif d[k + 1] == 0:
                    t = b
                else:
                    t = brentq(lambda s: rho(s) - p / q, a, b, xtol=1e-15, rtol=1e-15)
                tau = TWO_PI * q / omegas(t)[j]
                if tau <= bound:
                    hits.append((t, tau, p, q))
                elif nearest is None or tau < nearest[1]:
                    nearest = (t, tau, p, q)
    if not hits:
        # report the rational p/q closest to the attainable ratio interval
        if nearest is None:
            best = None
            for q in range(1, q_max + 1):
                for r in (lo, hi):
                    p = max(1, round(q * r))
                    gap = min(abs(p / q - lo), abs(p / q - hi)) if not lo <= p / q <= hi else 0.0
                    if best is None or gap < best[0]:
                        best = (gap, p, q)
            nearest = {"ratio_range": [float(lo), float(hi)], "p": best[1], "q": best[2],
                       "distance": float(best[0])} if best else None
        else:
            nearest = {"t": nearest[0], "period": nearest[1], "p": nearest[2], "q": nearest[3]}
        raise NotFound(f"no rational frequency ratio with period <= {bound} for t in "
                       f"[{t0}, {t1}]", nearest=nearest)
    t, tau, p, q = min(hits)
    prof = _LogProfile(profile, t)
    tau, residual = _return_residual(e, prof, z0, tau, i)
    if tau > bound * (1 + 1e-9):
        raise NotFound(f"polished period {tau} exceeds the bound", nearest=tau)
    return ClosingResult(float(t), float(tau), (p, q), residual, z0, mu, profile.name)


# period detection ----------------------------------------------------------------

@dataclass(frozen=True)
class TorusFlowSpec:
    """R_a = a_1 R_1 + a_2 R_2 for two commuting 1-periodic generators R_1, R_2."""

    a: tuple
    generators: tuple = ("R1: unit-speed rotation of the first circle factor, period 1",
                         "R2: unit-speed rotation of the second circle factor, period 1")

    def __init__(self, a, generators=None):
        a = tuple(certified(x) for x in a)
        if len(a) != 2 or any(x.sign() <= 0 for x in a):
            raise PreconditionError("TorusFlowSpec takes two positive coefficients")
        object.__setattr__(self, "a", a)
        if generators is not None:
            object.__setattr__(self, "generators", tuple(generators))

    def expected_period(self):
        """lcm(1/a_1, 1/a_2): finite iff a_1/a_2 is rational."""
        rho = ratio(self.a[0], self.a[1])
        if rho is None:
            return INFINITE
        # 1/a_1 = (1/a_2) / rho, so lcm = (1/a_2) * lcm(1/rho, 1)
        from .spectrum import rational_lcm
        return rational_lcm([1 / rho, 1]) / float(self.a[1])

    def state(self, t, phi0=(0.123, 0.456)):
        ang = [TWO_PI * (p + float(x) * t) for p, x in zip(phi0, self.a)]
        return np.array([math.cos(v) for v in ang] + [math.sin(v) for v in ang])


def _first_return(state, angle, rate, t_max, tol):
    """Smallest section return t <= t_max (section: the phase of `angle`)."""
    s0 = state(0.0)
    a0 = angle(0.0)

    def psi(t):
        return math.remainder(angle(t) - a0, TWO_PI)

    sgn = 1.0 if rate > 0 else -1.0
    dt = min(math.pi / (4 * abs(rate)), t_max / 8)
    steps = int(math.ceil(t_max / dt))
    prev_t, prev = 0.0, None
    for k in range(1, steps + 1):
        t = min(k * dt, t_max)
        v = sgn * psi(t)
        if prev is not None and prev < 0 <= v and v - prev < math.pi:
            tc = brentq(lambda s: sgn * psi(s), prev_t, t, xtol=1e-15, rtol=1e-15)
            if np.abs(state(tc) - s0).max() < tol:
                return tc
        prev_t, prev = t, v
    return None


def detect_period(spec, t_max, tol=1e-6, z0=None) -> Optional[float]:
    """Minimal full-state return time up to t_max, or None.

    ``spec`` is a ``TorusFlowSpec``, or an ellipsoid (with a start point
    ``z0``) whose exact Reeb flow is examined.
    """
    if t_max <= 0 or not math.isfinite(t_max):
        raise PreconditionError("t_max must be finite and positive")
    if isinstance(spec, TorusFlowSpec):
        a1 = float(spec.a[0])
        return _first_return(spec.state, lambda t: TWO_PI * (0.123 + a1 * t),
                             TWO_PI * a1, t_max, tol)
    e, axes = _axes(spec)
    if z0 is None:
        z0 = point_on_torus(e, np.full(len(axes), 1 / len(axes)), np.linspace(0.1, 0.7, len(axes)))
    z0 = _check_surface(axes, z0)
    j = int(np.argmax(np.abs(z0)))

    def state(t):
        return _real(exact_flow(e, z0, t))

    return _first_return(state, lambda t: float(np.angle(exact_flow(e, z0, t)[j])),
                         TWO_PI / axes[j], t_max, tol)


# base of the torus-action example -------------------------------------------------

def _fs_term(x):
    if x is None or (isinstance(x, float) and math.isinf(x)) or x == "inf":
        return 1.0
    r2 = abs(complex(x)) ** 2
    return r2 / (1 + r2)


def base_hamiltonian(x, y) -> float:
    """H(x, y) = (pi/2)(|x|^2/(1+|x|^2) + |y|^2/(1+|y|^2)) + 1 on CP^1 x CP^1.

    Pass ``math.inf`` (or None) for the point at infinity of a factor.
    """
    return math.pi / 2 * (_fs_term(x) + _fs_term(y)) + 1.0


CRITICAL_POINTS = ((0, 0), (0, math.inf), (math.inf, 0), (math.inf, math.inf))


def _factor_field(c):
    """Hamiltonian field of h = (pi/2) r^2/(1+r^2) for c du dv/(1+r^2)^2."""

    def rhs(_, u):
        x, y = u
        r2 = x * x + y * y
        rho = c / (1 + r2) ** 2
        hx = math.pi * x / (1 + r2) ** 2
        hy = math.pi * y / (1 + r2) ** 2
        return [-hy / rho, hx / rho]

    return rhs


@dataclass(frozen=True)
class Calibration:
    scale: float
    unit_scale_period: float
    return_errors: dict
    hamiltonian_drift: float
    pole_speeds: tuple

    def to_json(self):
        return {"scale": self.scale, "unit_scale_period": self.unit_scale_period,
                "return_errors": {str(k): v for k, v in self.return_errors.items()},
                "hamiltonian_drift": self.hamiltonian_drift,
                "pole_speeds": list(self.pole_speeds)}


def _factor_h(u):
    r2 = u[0] ** 2 + u[1] ** 2
    return math.pi / 2 * r2 / (1 + r2)


def base_flow_calibrate(radii=(1.0, 0.3, 2.5), tol=1e-12) -> Calibration:
    """Scale c of the round form making the flow of H 1-periodic on each factor."""
    sol = solve_ivp(_factor_field(1.0), (0.0, 10.0), [1.0, 0.0], method="DOP853",
                    rtol=tol, atol=tol * 1e-2, dense_output=True)
    if sol.status < 0:
        raise CalibrationFailure(sol.message)
    P = _first_return(lambda t: sol.sol(t), lambda t: math.atan2(sol.sol(t)[1], sol.sol(t)[0]),
                      -1.0, 10.0, 1e-8)
    if P is None:
        P = _first_return(lambda t: sol.sol(t), lambda t: math.atan2(sol.sol(t)[1], sol.sol(t)[0]),
                          1.0, 10.0, 1e-8)
    if P is None:
        raise CalibrationFailure("unit-scale flow did not return within t=10")
    c = 1.0 / P
    errors = {}
    drift = 0.0
    for r in radii:
        s = solve_ivp(_factor_field(c), (0.0, 1.0), [r, 0.0], method="DOP853",
                      rtol=tol, atol=tol * 1e-2, t_eval=np.linspace(0, 1, 101))
        errors[r] = float(np.abs(s.y[:, -1] - [r, 0.0]).max())
        h = np.array([_factor_h(u) for u in s.y.T])
        drift = max(drift, float(np.abs(h - h[0]).max()))
    # the pole at 0 in the chart x and the pole at infinity (w = 1/x, where
    # h = pi/2 - (pi/2)|w|^2/(1+|w|^2) and the form has the same shape)
    origin = float(np.abs(_factor_field(c)(0.0, [0.0, 0.0])).max())
    poles = (origin, origin)
    if max(errors.values()) > 1e-6 or drift > 1e-9 or max(poles) > 0:
        raise CalibrationFailure(f"calibration checks failed: {errors}, drift {drift}")
    return Calibration(c, P, errors, drift, poles)
