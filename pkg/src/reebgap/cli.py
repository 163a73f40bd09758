"""Command line front end.

Every subcommand prints one JSON document (or a CSV table) to stdout.
Exit codes: 0 success, 1 usage or precondition, 2 resolution failure,
3 search exhaustion, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import chmodel, diophantine, flow, index, spectrum
from .certified import DEFAULT_BUDGET, CertifiedReal, certified, fraction_json
from .errors import CertificateError, NotFound, ParseError, ReebGapError, SearchExhausted

SCHEMA_VERSION = 1
SUITE_CHUNK = 25


@dataclass
class RunConfig:
    precision: int = DEFAULT_BUDGET
    tol: float = 1e-10
    format: str = "json"
    seed: int = 0
    jobs: int = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _axes(text):
    try:
        return spectrum.EllipsoidSpec.from_values(
            [CertifiedReal.parse(s) for s in _split(text)])
    except ReebGapError:
        raise
    except Exception as exc:
        raise ParseError(f"cannot parse axes {text!r}: {exc}")


def _split(text):
    """Split on commas outside parentheses."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    out.append(cur)
    if any(not s.strip() for s in out):
        raise ParseError(f"empty entry in {text!r}")
    return [s.strip() for s in out]


def _rational(text, name):
    v = CertifiedReal.parse(text)
    if not v.is_rational:
        raise ParseError(f"{name} must be rational, got {text!r}")
    return v.value


def _floats(text):
    try:
        return [float(s) for s in _split(text)]
    except ValueError:
        raise ParseError(f"expected comma separated numbers, got {text!r}")


def _read_config(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"config line {line!r} is not key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _build_config(args) -> RunConfig:
    cfg = RunConfig()
    env = os.environ.get("REEBGAP_PRECISION")
    if env:
        cfg.precision = int(env)
    if args.config:
        for key, value in _read_config(args.config).items():
            if not hasattr(cfg, key):
                raise ParseError(f"unknown config key {key!r}")
            setattr(cfg, key, type(getattr(cfg, key))(value))
    for key in ("precision", "tol", "format", "seed", "jobs"):
        v = getattr(args, key)
        if v is not None:
            setattr(cfg, key, v)
    if cfg.format not in ("json", "csv"):
        raise ParseError("format must be json or csv")
    if cfg.precision < 64:
        raise ParseError("precision must be at least 64 bits")
    return cfg


def _emit(out, cfg, command, result, csv_rows=None, csv_header=None):
    if cfg.format == "csv" and csv_rows is not None:
        out.write(f"# schema_version={SCHEMA_VERSION}\n")
        out.write("# config=" + json.dumps(asdict(cfg), sort_keys=True) + "\n")
        out.write(",".join(csv_header) + "\n")
        for row in csv_rows:
            out.write(",".join(_csv_cell(v) for v in row) + "\n")
        return
    doc = {"schema_version": SCHEMA_VERSION, "command": command,
           "config": asdict(cfg), "result": result}
    out.write(json.dumps(doc, indent=2, default=_json_default) + "\n")


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_default(v):
    if isinstance(v, Fraction):
        return fraction_json(v)
    if isinstance(v, CertifiedReal):
        return v.to_json()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialize {type(v).__name__}")


# subcommands -------------------------------------------------------------------

def cmd_spectrum(args, cfg, out):
    e = _axes(args.axes)
    sp = spectrum.action_spectrum(e, args.count)
    rows = sp.rows()
    _emit(out, cfg, "spectrum", sp.to_json(),
          csv_rows=[(k, str(lo), str(hi), ax, it) for k, lo, hi, ax, it in rows],
          csv_header=["k", "value_lower", "value_upper", "axis", "iterate"])
    return 0


def cmd_gap_witness(args, cfg, out):
    e = _axes(args.axes)
    if args.epsilon is None:
        w = chmodel.gap_certificate_rational(e)
    else:
        w = chmodel.gap_witness_irrational(e, _rational(args.epsilon, "epsilon"))
    if not w.verify():
        raise CertificateError("witness failed re-verification")
    _emit(out, cfg, "gap-witness", w.to_json(mod2=args.mod2))
    return 0


def cmd_close(args, cfg, out):
    e = _axes(args.axes)
    prof = flow.parse_profile(args.profile, e.n)
    mu = _floats(args.mu) if args.mu else [1.0 / e.n] * e.n
    t_range = _floats(args.t_range)
    if len(t_range) != 2:
        raise ParseError("--t-range takes two numbers")
    bound = float(_rational(args.bound, "bound"))
    try:
        res = flow.find_closing_t(e, prof, mu, bound, tuple(t_range), args.t_grid)
    except NotFound as exc:
        _emit(out, cfg, "close", {"found": False, "reason": str(exc),
                                   "nearest": exc.nearest})
        return exc.exit_code
    result = res.to_json()
    result["found"] = True
    _emit(out, cfg, "close", result)
    return 0


def _path_from_args(args):
    if args.csv:
        with open(args.csv) as fh:
            return index.SymplecticPathSample.from_csv(fh.read())
    if args.rotation:
        thetas = _floats(args.rotation)
        return index.rotation_sum_path(thetas, args.T)
    raise ParseError("give --csv FILE or --rotation THETA[,THETA...]")


def cmd_index(args, cfg, out):
    path = _path_from_args(args)
    rep = index.rs_report(path)
    result = rep.to_json(args.path_id)
    if args.kind == "cz":
        result["cz"] = index.cz_nondegenerate(path)
    _emit(out, cfg, f"index {args.kind}", result)
    return 0


def cmd_lcm(args, cfg, out):
    values = [certified(s) for s in _split(args.values)]
    acc = values[0]
    for v in values[1:]:
        acc = diophantine.lcm_pair(acc, v)
        if acc is spectrum.INFINITE:
            break
    result = {"values": [str(v) for v in values],
              "lcm": "Infinite" if acc is spectrum.INFINITE else str(acc),
              "finite": acc is not spectrum.INFINITE}
    _emit(out, cfg, "lcm", result)
    return 0


def cmd_approx(args, cfg, out):
    e = _axes(args.axes)
    eps = _rational(args.epsilon, "epsilon")
    if args.upper:
        ap = diophantine.approx_pair_upper([e.axes[i] for i in np.argsort(e.permutation)], eps)
    else:
        ap = diophantine.approx_ellipsoid(e, eps)
    if not ap.verify():
        raise CertificateError("approximant failed re-verification")
    _emit(out, cfg, "approx", ap.to_json())
    return 0


def cmd_simulate(args, cfg, out):
    e = _axes(args.axes)
    mu = _floats(args.mu) if args.mu else [1.0 / e.n] * e.n
    phases = _floats(args.phases) if args.phases else None
    z0 = flow.point_on_torus(e, mu, phases)
    prof = None
    if args.profile:
        prof = flow.parse_profile(args.profile, e.n).with_eps(args.eps)
    traj = flow.integrate(e, prof, z0, args.t_end, tol=cfg.tol, n_points=args.points)
    if cfg.format == "csv":
        out.write(f"# schema_version={SCHEMA_VERSION}\n")
        out.write("# config=" + json.dumps(asdict(cfg), sort_keys=True) + "\n")
        out.write(traj.to_csv())
    else:
        _emit(out, cfg, "simulate", {
            "field": traj.field_tag, "stats": traj.stats, "failed": traj.failed,
            "max_constraint_drift": float(traj.constraint_drift.max()),
            "max_mu_drift": float(traj.mu_drift.max()),
            "frequencies": flow.frequencies(e, prof, mu).tolist(),
            "fitted_frequencies": flow.fit_frequencies(traj).tolist(),
            "end": [[float(z.real), float(z.imag)] for z in traj.points[-1]]})
    return 4 if traj.failed else 0


def _suite_chunk(job):
    axes, samples, seed = job
    e = spectrum.EllipsoidSpec.from_values([CertifiedReal.parse(a) for a in axes])
    return chmodel.axioms_suite(e, samples, seed).to_json()


def cmd_axioms(args, cfg, out):
    e = _axes(args.axes)
    axes = [str(a) for a in e.axes]
    jobs = []
    left, i = args.samples, 0
    while left > 0:
        k = min(SUITE_CHUNK, left)
        jobs.append((axes, k, cfg.seed * 100003 + i))
        left -= k
        i += 1
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            parts = list(pool.map(_suite_chunk, jobs))
    else:
        parts = [_suite_chunk(j) for j in jobs]
    checks = {}
    violations = []
    for p in parts:
        for k, v in p["checks"].items():
            checks[k] = checks.get(k, 0) + v
        violations += p["violations"]
    result = {"ellipsoid": str(e), "samples": args.samples, "seed": cfg.seed,
              "checks": checks, "violations": violations, "passed": not violations}
    _emit(out, cfg, "axioms-check", result)
    return 0 if not violations else 4


def cmd_ham(args, cfg, out):
    crit = [{"point": ["inf" if math.isinf(x) else x for x in p],
             "H": flow.base_hamiltonian(*p)} for p in flow.CRITICAL_POINTS]
    cal = flow.base_flow_calibrate()
    result = {"critical_values": crit, "calibration": cal.to_json()}
    if args.a:
        spec = flow.TorusFlowSpec([CertifiedReal.parse(s) for s in _split(args.a)])
        exp = spec.expected_period()
        t_max = args.t_max if args.t_max else (1.5 * float(exp) if exp is not spectrum.INFINITE else 50.0)
        det = flow.detect_period(spec, t_max, args.return_tol)
        result["torus"] = {"a": [str(x) for x in spec.a],
                           "expected_period": None if exp is spectrum.INFINITE else float(exp),
                           "detected_period": det, "t_max": t_max}
    _emit(out, cfg, "ham-example", result)
    return 0


def _add_globals(p, default):
    p.add_argument("--format", choices=["json", "csv"], default=default)
    p.add_argument("--precision", type=int, default=default, help="refinement budget in bits")
    p.add_argument("--tol", type=float, default=default, help="integration tolerance")
    p.add_argument("--seed", type=int, default=default)
    p.add_argument("--jobs", type=int, default=default)
    p.add_argument("--config", default=default, help="flat key=value file mirroring the flags")


def build_parser():
    p = _Parser(prog="reebgap", description=__doc__.splitlines()[0])
    _add_globals(p, None)
    common = _Parser(add_help=False)
    # global flags are also accepted after the subcommand
    _add_globals(common, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectrum", parents=[common], help="merged action spectrum M_k")
    s.add_argument("-a", "--axes", required=True)
    s.add_argument("-k", "--count", type=int, required=True)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("gap-witness", parents=[common], help="spectral gap certificate")
    s.add_argument("-a", "--axes", required=True)
    s.add_argument("-e", "--epsilon", default=None)
    s.add_argument("--mod2", action="store_true")
    s.set_defaults(func=cmd_gap_witness)

    s = sub.add_parser("close", parents=[common], help="closing search for (1 + t g) lambda")
    s.add_argument("-a", "--axes", required=True)
    s.add_argument("--profile", required=True, help="linear:c[:j], const:c, bump:c:center:width[:j]")
    s.add_argument("--bound", required=True)
    s.add_argument("--mu", default=None)
    s.add_argument("--t-range", default="0,1")
    s.add_argument("--t-grid", type=int, default=2001)
    s.set_defaults(func=cmd_close)

    s = sub.add_parser("index", parents=[common], help="Robbin-Salamon / Conley-Zehnder index of a path")
    s.add_argument("kind", choices=["rs", "cz"])
    s.add_argument("--csv", default=None, help="path samples: t, row-major matrix")
    s.add_argument("--rotation", default=None, help="rates of a sum of rotations")
    s.add_argument("--T", type=float, default=1.0)
    s.add_argument("--path-id", default="path")
    s.set_defaults(func=cmd_index)

    s = sub.add_parser("lcm", parents=[common], help="generalized lcm")
    s.add_argument("values")
    s.set_defaults(func=cmd_lcm)

    s = sub.add_parser("approx", parents=[common], help="certified rational approximant")
    s.add_argument("-a", "--axes", required=True)
    s.add_argument("-e", "--epsilon", required=True)
    s.add_argument("--upper", action="store_true", help="outer approximation of a pair")
    s.set_defaults(func=cmd_approx)

    s = sub.add_parser("simulate", parents=[common], help="integrate the (perturbed) Reeb flow")
    s.add_argument("-a", "--axes", required=True)
    s.add_argument("--mu", default=None)
    s.add_argument("--phases", default=None)
    s.add_argument("--t-end", type=float, required=True)
    s.add_argument("--profile", default=None)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--points", type=int, default=None)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("axioms-check", parents=[common], help="spectral invariant axiom suite")
    s.add_argument("-a", "--axes", required=True)
    s.add_argument("--samples", type=int, default=100)
    s.set_defaults(func=cmd_axioms)

    s = sub.add_parser("ham-example", parents=[common], help="base Hamiltonian and torus-action periods")
    s.add_argument("--a", default=None, help="torus coefficients a1,a2")
    s.add_argument("--t-max", type=float, default=None)
    s.add_argument("--return-tol", type=float, default=1e-6)
    s.set_defaults(func=cmd_ham)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    old_env = os.environ.get("REEBGAP_PRECISION")
    try:
        cfg = _build_config(args)
        os.environ["REEBGAP_PRECISION"] = str(cfg.precision)
        buf = io.StringIO()
        code = args.func(args, cfg, buf)
        out.write(buf.getvalue())
        return code
    except ReebGapError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, SearchExhausted) and exc.required_n is not None:
            payload["required_n"] = exc.required_n
        err.write(json.dumps(payload) + "\n")
        return exc.exit_code
    except (OSError, ValueError) as exc:
        err.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        err.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 4
    finally:
        if old_env is None:
            os.environ.pop("REEBGAP_PRECISION", None)
        else:
            os.environ["REEBGAP_PRECISION"] = old_env


if __name__ == "__main__":
    sys.exit(main())
