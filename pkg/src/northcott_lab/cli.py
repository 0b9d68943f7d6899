"""northcott-lab: one binary, one subcommand per experiment.

Output is JSON on stdout (CSV with ``--csv``).  Exit status is 0 on success,
1 when a verification fails and 2 on usage errors or malformed literals.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import __version__
from .curve import Curve, Endomorphism, Point, torsion_test
from .dynamics import back_chain, decay_check, orbit
from .galois import (ExtensionSpec, NotInKernelError, kernel_test, trace_map,
                     twist_transfer)
from .heights import DEFAULT_TOL, canonical_height, naive_height
from .nf import FieldSpec, LiteralError, squarefree_part
from .northcott import (cc_points_demo, enumerate_bounded, kab_min_k,
                        mult_dep_test, mult_dep_witness, qtr_family)
from .report import ExperimentReport, emit
from .verify import verify_suite


class UsageError(ValueError):
    pass


# flags shared by the subcommands; a config file may supply any of them
FLAGS: dict[str, dict] = {
    "curve": {"help": 'curve literal "a,b,c over <field>"'},
    "field": {"help": 'field literal: Q, "Q(sqrt,d)" or "Q(zeta,n)"'},
    "point": {"help": 'point literal "(x,y)" or "inf"'},
    "ext": {"help": 'extension literal, e.g. "Q(sqrt,10)/Q"'},
    "map": {"help": 'endomorphism: "[m]" or "a+bi"'},
    "d": {"type": int, "help": "twist parameter"},
    "k": {"type": int, "help": "shift parameter"},
    "a": {"help": "rational coefficient a"},
    "b": {"help": "rational coefficient b"},
    "N": {"type": int, "help": "family size"},
    "T": {"type": float, "help": "height bound"},
    "tol": {"type": float, "help": f"height tolerance (default {DEFAULT_TOL:g})"},
    "max": {"type": int, "help": "iteration cap"},
    "depth": {"type": int, "help": "backward chain depth"},
    "x": {"help": "rational x"},
    "y": {"help": "rational y"},
    "primes": {"help": "comma-separated primes"},
    "only": {"help": "comma-separated criterion numbers"},
}

COMMANDS: dict[str, tuple[str, list[str]]] = {
    "height": ("naive height h(x(P))", ["curve", "point"]),
    "canonical-height": ("canonical height with radius and torsion verdict", ["curve", "point", "tol"]),
    "trace": ("trace of a point over L/F", ["ext", "curve", "point"]),
    "twist-transfer": ("map a zero-trace point onto the twist by d", ["d", "curve", "point"]),
    "enumerate": ("points with h(x) <= T", ["curve", "field", "T"]),
    "qtr-family": ("totally real family of bounded height", ["a", "b", "k", "N"]),
    "kab": ("least k meeting the family threshold", ["a", "b"]),
    "orbit": ("forward orbit under an endomorphism", ["curve", "map", "point", "max"]),
    "back-chain": ("backward chain under [2] over Q", ["curve", "point", "depth", "tol"]),
    "verify-suite": ("run the acceptance checks", ["tol", "only"]),
    "mult-dep": ("multiplicative dependence of two rationals", ["x", "y"]),
    "cc-demo": ("points (+-p, sqrt(+-p(p^2+1))) on y^2 = x^3 + x", ["primes"]),
}

DEFAULTS = {"field": "Q", "tol": DEFAULT_TOL, "max": 50, "depth": 6, "T": math.log(6),
            "primes": "2,3,5", "map": "[2]"}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 2 through main()
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="northcott-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (hlp, flags) in COMMANDS.items():
        sp = sub.add_parser(name, help=hlp, description=hlp)
        for f in flags:
            spec = dict(FLAGS[f])
            sp.add_argument(f"--{f}", default=None, **spec)
        sp.add_argument("--csv", action="store_true", default=None, help="emit CSV instead of JSON")
        sp.add_argument("--config", help="key=value file supplying any flag; flags win")
        sp.add_argument("--timing", action="store_true", default=None,
                        help="add a wall-clock timing field to the report")
    return p


def load_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().lstrip("-")] = value.strip()
    return out


def resolve(ns: argparse.Namespace) -> dict:
    """Flags, then config values, then defaults."""
    cfg = load_config(ns.config) if ns.config else {}
    flags = COMMANDS[ns.command][1] + ["csv", "timing"]
    unknown = set(cfg) - set(flags)
    if unknown:
        raise UsageError(f"config keys not valid for {ns.command}: {', '.join(sorted(unknown))}")
    out = {}
    for f in flags:
        v = getattr(ns, f, None)
        if v is None and f in cfg:
            raw = cfg[f]
            if f in ("csv", "timing"):
                v = raw.lower() in ("1", "true", "yes", "on")
            else:
                conv = FLAGS[f].get("type", str)
                try:
                    v = conv(raw)
                except ValueError:
                    raise UsageError(f"config value for {f} is not a valid {conv.__name__}: {raw!r}")
        if v is None:
            v = DEFAULTS.get(f, False if f in ("csv", "timing") else None)
        out[f] = v
    return out


def _need(cfg: dict, *names: str) -> None:
    missing = [n for n in names if cfg.get(n) is None]
    if missing:
        raise UsageError("missing required flag(s): " + ", ".join(f"--{n}" for n in missing))


def _fraction(text: str, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise LiteralError(text, 0, f"--{name} must be a rational p/q") from None


def _curve_point(cfg: dict, field: Optional[FieldSpec] = None) -> tuple[Curve, Point]:
    _need(cfg, "curve", "point")
    C = Curve.parse(cfg["curve"])
    if field is not None and C.field != field:
        if not C.is_rational():
            raise UsageError(f"curve must be over Q or {field}")
        C = C.lift(field)
    return C, C.parse_point(cfg["point"])


# --------------------------------------------------------------------------
# commands: each returns (result, rows or None, columns or None, passed)

def cmd_height(cfg):
    C, P = _curve_point(cfg)
    h = naive_height(C, P)
    return {"point": P, "h": h.value, "estimate": h}, None, None, True


def cmd_canonical_height(cfg):
    C, P = _curve_point(cfg)
    tol = cfg["tol"]
    hh = canonical_height(C, P, tol)
    h = naive_height(C, P)
    verdict = str(torsion_test(C, P, tol=tol))
    row = {"point": P, "h": h.value, "hhat": hh.value, "radius": hh.radius, "verdict": verdict}
    res = {"point": P, "h": h.value, "hhat": hh, "converged": hh.converged, "verdict": verdict}
    return res, [row], ["point", "h", "hhat", "radius", "verdict"], True


def _trace_payload(ext: ExtensionSpec, C: Curve, P: Point) -> dict:
    T = trace_map(ext, C, P)
    in_kernel = T.is_infinity
    transfer = None
    if in_kernel and ext.L.kind == "quadratic" and ext.degree == 2 and C.is_rational():
        transfer = twist_transfer(ext, C, P)
    return {"input": P, "trace": T, "in_kernel": in_kernel, "transfer": transfer}


def cmd_trace(cfg):
    _need(cfg, "ext")
    ext = ExtensionSpec.parse(cfg["ext"])
    C, P = _curve_point(cfg, ext.L)
    return _trace_payload(ext, C, P), None, None, True


def cmd_twist_transfer(cfg):
    _need(cfg, "d")
    d = cfg["d"]
    s = squarefree_part(d) if d else 0
    if s in (0, 1):
        raise UsageError(f"--d {d} is zero or a square")
    L = FieldSpec.quadratic(s)
    C, P = _curve_point(cfg, L)
    ext = ExtensionSpec.over_q(L)
    if not kernel_test(ext, C, P):
        raise NotInKernelError(f"{P} has nonzero trace over {ext}")
    res = _trace_payload(ext, C, P)
    res["d"] = d
    return res, None, None, True


def cmd_enumerate(cfg):
    _need(cfg, "curve")
    C = Curve.parse(cfg["curve"])
    F = FieldSpec.parse(cfg["field"])
    pts = enumerate_bounded(C, F, cfg["T"])
    rows = [{"point": P, "x": None if P.is_infinity else P.x, "y": None if P.is_infinity else P.y,
             "h": naive_height(C.lift(F), P).value} for P in pts]
    res = {"curve": C, "field": F, "T": cfg["T"], "count": len(pts)}
    return res, rows, ["point", "x", "y", "h"], True


def cmd_qtr_family(cfg):
    _need(cfg, "a", "b", "k", "N")
    rec = qtr_family(_fraction(cfg["a"], "a"), _fraction(cfg["b"], "b"), cfg["k"], cfg["N"])
    rows = [{"n": p.n, "x_minpoly": p.minpoly, "h": p.h.value, "bound_ok": p.bound_ok,
             "totally_positive": p.totally_positive} for p in rec.points]
    res = {"a": rec.a, "b": rec.b, "k": rec.k, "N": len(rec.points), "height_bound": rec.height_bound,
           "distinct": rec.distinct, "all_bounded": rec.all_bounded,
           "all_totally_positive": rec.all_totally_positive}
    ok = rec.distinct and rec.all_bounded and rec.all_totally_positive
    return res, rows, ["n", "x_minpoly", "h", "bound_ok", "totally_positive"], ok


def cmd_kab(cfg):
    _need(cfg, "a", "b")
    return {"k_min": kab_min_k(_fraction(cfg["a"], "a"), _fraction(cfg["b"], "b"))}, None, None, True


def _orbit_rows(points, heights):
    return [{"index": i, "point": P, "h": h.value} for i, (P, h) in enumerate(zip(points, heights))]


def cmd_orbit(cfg):
    C, P = _curve_point(cfg)
    f = Endomorphism.parse(C, cfg["map"])
    rec = orbit(f, P, cfg["max"])
    res = {"start": P, "map": str(f), "length": len(rec.iterates), "preperiodic": rec.preperiodic,
           "cycle_start": rec.cycle_start, "period": rec.period, "truncated": rec.truncated}
    return res, _orbit_rows(rec.iterates, rec.heights), ["index", "point", "h"], True


def cmd_back_chain(cfg):
    C, P = _curve_point(cfg)
    f = Endomorphism.scalar(C, 2)
    ch = back_chain(f, P, cfg["depth"], cfg["tol"])
    v = decay_check(ch, cfg["tol"])
    res = {"base": P, "map": "[2]", "length": ch.length, "stopped_early": ch.stopped_early,
           "complete_search": ch.complete_search, "decay_passed": v.passed, "ratios": v.ratios}
    return res, _orbit_rows(ch.chain, ch.heights), ["index", "point", "h"], v.passed


def cmd_verify_suite(cfg):
    only = None
    if cfg.get("only"):
        try:
            only = [int(t) for t in str(cfg["only"]).split(",")]
        except ValueError:
            raise UsageError("--only takes comma-separated integers") from None
        if any(n < 1 or n > 11 for n in only):
            raise UsageError("criterion numbers run from 1 to 11")
    results = verify_suite(cfg["tol"], only)
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [{"criterion": r.number, "name": r.name, "passed": r.ok, "cap": r.cap} for r in results]
    ok = all(r.ok for r in results)
    res = {"passed": ok, "criteria": [{k: v for k, v in r.to_dict().items() if k != "elapsed"}
                                      for r in results]}
    return res, rows, ["criterion", "name", "passed", "cap"], ok


def cmd_mult_dep(cfg):
    _need(cfg, "x", "y")
    x, y = _fraction(cfg["x"], "x"), _fraction(cfg["y"], "y")
    w = mult_dep_witness(x, y)
    return {"x": x, "y": y, "dependent": mult_dep_test(x, y), "witness": list(w) if w else None}, \
        None, None, True


def cmd_cc_demo(cfg):
    try:
        primes = [int(t) for t in str(cfg["primes"]).split(",")]
    except ValueError:
        raise UsageError("--primes takes comma-separated integers") from None
    rows = [{"p": r.p, "sign": r.sign, "field": r.field, "point": r.point, "on_curve": r.on_curve,
             "h": r.h.value} for r in cc_points_demo(primes)]
    ok = all(r["on_curve"] for r in rows)
    return {"count": len(rows), "all_on_curve": ok}, rows, \
        ["p", "sign", "field", "point", "on_curve", "h"], ok


HANDLERS: dict[str, Callable] = {
    "height": cmd_height, "canonical-height": cmd_canonical_height, "trace": cmd_trace,
    "twist-transfer": cmd_twist_transfer, "enumerate": cmd_enumerate, "qtr-family": cmd_qtr_family,
    "kab": cmd_kab, "orbit": cmd_orbit, "back-chain": cmd_back_chain,
    "verify-suite": cmd_verify_suite, "mult-dep": cmd_mult_dep, "cc-demo": cmd_cc_demo,
}


def run(argv: Sequence[str]) -> tuple[ExperimentReport, bool]:
    ns = build_parser().parse_args(list(argv))
    cfg = resolve(ns)
    t0 = time.perf_counter()
    result, rows, columns, ok = HANDLERS[ns.command](cfg)
    elapsed = time.perf_counter() - t0
    config = {k: v for k, v in cfg.items() if k not in ("csv", "timing") and v is not None}
    rep = ExperimentReport(ns.command, config, result, __version__, columns, rows,
                           elapsed if cfg["timing"] else None, ok)
    return rep, bool(cfg["csv"])


def _literal_message(exc: LiteralError) -> str:
    return f"error: {exc.reason} at position {exc.position}\n  {exc.text}\n  {' ' * exc.position}^"


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        rep, as_csv = run(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except LiteralError as exc:
        print(_literal_message(exc), file=sys.stderr)
        return 2
    except NotInKernelError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.buffer.write(emit(rep, "csv" if as_csv else "json"))
    sys.stdout.flush()
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
