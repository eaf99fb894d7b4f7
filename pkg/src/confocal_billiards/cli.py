"""Command-line interface: check, catalog, find, simulate, pell, freq."""
import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from functools import reduce

import mpmath
import numpy as np

from .billiard import count_winding, launch_from_caustics, trace
from .catalog import build_catalog
from .cayley import check_periodicity
from .confocal import ConfocalFamily, classify_caustics, interval_system
from .errors import BilliardError
from .extremal import (analyze_alternance, find_caustics_d_plus_1, hyperboloid_4periodic,
                       pell_solve, unique_pair_in_family)
from .freqmap import DEFAULT_NODES, frequency, rotation_number
from .literal import parse_list, parse_number
from .numeric import DEFAULT_PREC, DEFAULT_THRESHOLD_EXP, to_float, workprec

SCHEMA = "confocal-billiards/1"


@dataclass
class RunConfig:
    precision: int = DEFAULT_PREC
    threshold_exp: int = DEFAULT_THRESHOLD_EXP
    nodes: int = DEFAULT_NODES
    closure_tol: float = 1e-8
    fmt: str = "text"
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.precision < 64:
            raise ValueError("precision must be at least 64 bits")
        if self.threshold_exp >= 0:
            raise ValueError("threshold exponent must be negative")
        if self.nodes < 8 or self.closure_tol <= 0 or self.jobs < 1:
            raise ValueError("node cap, closure tolerance and jobs must be positive")
        if self.fmt not in ("json", "csv", "text"):
            raise ValueError(f"unknown format {self.fmt}")


# -- serialization --------------------------------------------------------

def plain(x):
    """JSON-ready copy: rationals become 'p/q', multiprecision values strings."""
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 40)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return plain(x.tolist())
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if hasattr(x, "coeffs"):
        return [plain(c) for c in x.coeffs]
    return str(x)


def report(command, **fields):
    return plain(dict({"schema": SCHEMA, "command": command}, **fields))


def _rows_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def render(rep, fmt, table=None):
    """Serialize a report; ``table`` is (header, rows) for CSV output."""
    if fmt == "json":
        return json.dumps(rep, indent=2)
    if fmt == "csv":
        if table is not None:
            return _rows_csv(*table)
        return _rows_csv(["key", "value"], [(k, json.dumps(v)) for k, v in rep.items()])
    lines = []
    for k, v in rep.items():
        if k == "schema":
            continue
        lines.append(f"{k}: {v if not isinstance(v, (list, dict)) else json.dumps(v)}")
    return "\n".join(lines)


# -- commands -------------------------------------------------------------

def _simulation(family, cs, cfg, n_max):
    x, v = launch_from_caustics(family, cs, cfg.seed)
    tr = trace(family, x, v, n_max=n_max, closure_tol=cfg.closure_tol)
    out = {"closed": tr.closed, "closure_error": tr.closure_error, "period": tr.period}
    if tr.closed:
        m = count_winding(tr, cs)
        tr.winding = m
        out["winding"] = m
        out["elliptic_period"] = tr.period // reduce(gcd, m)
    return out, tr


def cmd_check(args, cfg):
    family = ConfocalFamily(parse_list(args.a))
    cs = classify_caustics(family, parse_list(args.alpha))
    v = check_periodicity(family, cs, args.n, cfg.precision, cfg.threshold_exp)
    fields = {
        "a": list(family.a), "alpha": list(cs.alpha), "types": list(cs.types), "n": args.n,
        "periodic": v.periodic, "elliptic_period": v.elliptic_period,
        "cartesian_period": v.cartesian_period, "winding": v.predicted_winding,
        "signature": v.signature, "pell_residual": v.pell_residual,
        "reason": [vars(c) for c in v.reason],
    }
    if args.simulate:
        fields["simulation"], _ = _simulation(family, cs, cfg, max(200, 4 * args.n))
    return report("check", **fields), None


def cmd_catalog(args, cfg):
    entries = build_catalog(cfg.precision, cfg.seed)
    rows = []
    for i, e in enumerate(entries):
        rows.append({
            "name": e.name, "n": e.n, "a": list(e.a), "alpha": list(e.alpha),
            "conditions": e.conditions, "signature": e.signature,
            "cayley": vars(e.cayley), "pell": vars(e.pell), "simulation": vars(e.simulation),
            "agree": e.agree, "pell_residual": e.pell_residual,
            "closure_error": e.closure_error,
            "witness": None if e.witness is None else
            {"p2": e.witness[0][0], "p1": e.witness[0][1], "residual": e.witness[1]},
            "notes": e.notes,
        })
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            with open(os.path.join(args.out_dir, f"p_hat_{i}.csv"), "w") as fh:
                fh.write(_rows_csv(["s", "value"], e.graph))
            with open(os.path.join(args.out_dir, f"trajectory_{i}.json"), "w") as fh:
                json.dump(plain(e.trajectory.to_dict()), fh)
    sets = sorted({tuple(e.pell.winding) for e in entries if e.n == 6}, reverse=True)
    rep = report("catalog", d=3, entries=rows, six_periodic_windings=[list(s) for s in sets])
    table = (["name", "n", "winding", "signature", "elliptic_period", "agree"],
             [(e.name, e.n, " ".join(map(str, e.pell.winding)), " ".join(map(str, e.signature)),
               e.pell.elliptic_period, e.agree) for e in entries])
    if cfg.fmt == "text":
        lines = [f"{e.name}: n={e.n} winding={tuple(e.pell.winding)} signature={tuple(e.signature)}"
                 f" elliptic period={e.pell.elliptic_period} routes agree={e.agree}"
                 for e in entries]
        return {"text": "\n".join(lines)}, None
    return rep, table


def cmd_find(args, cfg):
    if args.kind == "hyperboloid4":
        if args.a2 is None or args.a3 is None:
            raise ValueError("hyperboloid4 needs --a2 and --a3")
        pair = hyperboloid_4periodic(parse_number(args.a2), parse_number(args.a3), cfg.precision)
        return report("find", kind=args.kind, a1=pair.a1, alpha=pair.alpha,
                      alpha_expr=pair.alpha_expr), None
    if args.a is None:
        raise ValueError(f"{args.kind} needs --a")
    family = ConfocalFamily(parse_list(args.a))
    if args.kind == "dplus1":
        r = find_caustics_d_plus_1(family, cfg.precision)
        return report("find", kind=args.kind, a=list(family.a), gamma=r.gamma, alpha=r.alpha,
                      admissible=r.admissible, reason=r.reason), None
    up = unique_pair_in_family(family, cfg.precision)
    return report("find", kind=args.kind, a=list(family.a), lam=up.lam,
                  hyperboloid_alpha=up.hyperboloid_alpha, shifted=list(up.shifted)), None


def cmd_simulate(args, cfg):
    family = ConfocalFamily(parse_list(args.a))
    cs = classify_caustics(family, parse_list(args.alpha))
    sim, tr = _simulation(family, cs, cfg, args.n_max)
    if cfg.fmt == "csv":
        return {"text": tr.to_csv().rstrip("\n")}, None
    return report("simulate", a=list(family.a), alpha=list(cs.alpha), **sim,
                  trajectory=tr.to_dict()), None


def cmd_pell(args, cfg):
    family = ConfocalFamily(parse_list(args.a))
    cs = classify_caustics(family, parse_list(args.alpha))
    system = interval_system(cs)
    sol = pell_solve(system, args.n, cfg.precision, cfg.threshold_exp)
    wd = analyze_alternance(sol, system, cfg.precision)
    c1 = to_float(system.c[0])
    s = np.linspace(0.0, 1.02 * c1, args.samples)
    p = np.array([to_float(c) for c in sol.p_hat.coeffs])
    table = (["s", "value"], list(zip(s.tolist(), np.polynomial.polynomial.polyval(s, p).tolist())))
    return report("pell", n=args.n, c=list(system.c), p_hat=sol.p_hat, q_hat=sol.q_hat,
                  residual=sol.residual, winding=wd.m, signature=wd.tau,
                  elliptic_period=wd.n_tilde, law_holds=wd.law_holds), table


def _rho_point(args):
    a, b, lam, nodes = args
    return rotation_number(a, b, lam, nodes)


def _sweep(text):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = to_float(parse_number(lo)), to_float(parse_number(hi)), int(n)
    except ValueError as exc:
        raise ValueError(f"sweep must be lo:hi:count, got {text!r}") from exc
    if n < 2 or not lo < hi:
        raise ValueError("sweep needs lo < hi and at least two samples")
    return np.linspace(lo, hi, n)


def cmd_freq(args, cfg):
    family = ConfocalFamily(parse_list(args.a))
    if args.sweep_lambda:
        if family.d != 2:
            raise ValueError("rotation-number sweeps are planar (two semi-axes)")
        b, a = [to_float(x) for x in family.a]
        lams = [float(x) for x in _sweep(args.sweep_lambda) if x not in (0.0, b)]
        jobs = [(a, b, lam, cfg.nodes) for lam in lams]
        if cfg.jobs > 1:
            with ProcessPoolExecutor(cfg.jobs) as pool:
                rho = list(pool.map(_rho_point, jobs))
        else:
            rho = [_rho_point(j) for j in jobs]
        rows = list(zip(lams, rho))
        return report("freq", a=list(family.a), sweep=[{"lambda": l, "rho": r} for l, r in rows]), \
            (["lambda", "rho"], rows)
    if args.alpha is None:
        raise ValueError("freq needs --alpha or --sweep-lambda")
    cs = classify_caustics(family, parse_list(args.alpha))
    fv = frequency(family, cs, cfg.nodes)
    fields = {"a": list(family.a), "alpha": list(cs.alpha), "F": fv.f,
              "band_measures": fv.band_measures, "total_mass": float(sum(fv.band_measures))}
    if family.d == 2:
        b, a = [to_float(x) for x in family.a]
        fields["rho"] = rotation_number(a, b, to_float(cs.alpha[0]), cfg.nodes)
    return report("freq", **fields), None


COMMANDS = {"check": cmd_check, "catalog": cmd_catalog, "find": cmd_find,
            "simulate": cmd_simulate, "pell": cmd_pell, "freq": cmd_freq}


def build_parser():
    p = argparse.ArgumentParser(prog="confocal-billiards",
                                description="Periodic billiard trajectories in ellipsoids.")
    p.add_argument("--precision", type=int, default=DEFAULT_PREC, help="working precision in bits")
    p.add_argument("--threshold-exp", type=int, default=DEFAULT_THRESHOLD_EXP,
                   help="rank/vanishing threshold 10^exp")
    p.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="quadrature node count")
    p.add_argument("--closure-tol", type=float, default=1e-8)
    p.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="text")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide n-periodicity")
    c.add_argument("--a", required=True)
    c.add_argument("--alpha", required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--simulate", action="store_true")

    c = sub.add_parser("catalog", help="dimension-three catalog of small periods")
    c.add_argument("--d", type=int, default=3, choices=(3,))
    c.add_argument("--out-dir", help="write p_hat graphs (CSV) and trajectories (JSON) here")

    c = sub.add_parser("find", help="closed-form caustic constructions")
    c.add_argument("kind", choices=("dplus1", "hyperboloid4", "unique-pair"))
    c.add_argument("--a")
    c.add_argument("--a2")
    c.add_argument("--a3")

    c = sub.add_parser("simulate", help="trace a trajectory with given caustics")
    c.add_argument("--a", required=True)
    c.add_argument("--alpha", required=True)
    c.add_argument("--n-max", type=int, default=200)

    c = sub.add_parser("pell", help="Pell solution and alternance data")
    c.add_argument("--a", required=True)
    c.add_argument("--alpha", required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--samples", type=int, default=801)

    c = sub.add_parser("freq", help="frequency map or rotation-number sweep")
    c.add_argument("--a", required=True)
    c.add_argument("--alpha")
    c.add_argument("--sweep-lambda", metavar="LO:HI:N")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.precision, args.threshold_exp, args.nodes, args.closure_tol,
                        args.fmt, args.seed, args.jobs)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        with workprec(cfg.precision):
            rep, table = COMMANDS[args.command](args, cfg)
    except ValueError as exc:
        parser.error(str(exc))
    except BilliardError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if "text" in rep and len(rep) == 1:
        print(rep["text"])
    else:
        print(render(rep, cfg.fmt, table))
    return 0


if __name__ == "__main__":
    sys.exit(main())
