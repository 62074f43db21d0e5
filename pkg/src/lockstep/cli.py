"""``lockstep`` command line: F1 tables, exact distributions, Monte Carlo, verification."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import mpmath as mp

from . import __version__

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_BUDGET = 4
EXIT_UNDERSPAN = 5

DEFAULTS = {
    "tw1": {"x_min": -10.0, "x_max": 6.0, "x_step": 0.05, "bits": 133, "tol": 1e-8},
    "exact": {"bits": 256, "tol": 1e-24},
    "montecarlo": {"N": 100, "t": 0.5, "seed": 0, "samples": 10_000, "workers": 1},
    "verify": {},
}


class UsageError(Exception):
    pass


def _provenance(cmd, cfg):
    keys = sorted(k for k, v in cfg.items() if v is not None and k not in {"out", "config"})
    echo = " ".join(f"{k}={cfg[k]}" for k in keys)
    return f"lockstep {__version__} {cmd} {echo}".strip()


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _merge(cmd, args):
    cfg = dict(DEFAULTS.get(cmd, {}))
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in data.items()})
    for k, v in vars(args).items():
        if v is not None and k not in {"command", "func"}:
            cfg[k] = v
    return cfg


# ----------------------------------------------------------------------------
# tw1


def cmd_tw1(cfg):
    from . import painleve as pl

    x_min, x_max, step = float(cfg["x_min"]), float(cfg["x_max"]), float(cfg["x_step"])
    x_right = 8.0
    if step <= 0 or x_min >= x_max:
        raise UsageError("need x_min < x_max and x_step > 0")
    if x_max > x_right or x_min < -14:
        raise UsageError(f"grid must lie within [-14, {x_right}]")
    for end in (x_min, x_max):
        q = (x_right - end) / step
        if abs(q - round(q)) > 1e-9:
            raise UsageError(f"x={end} is not on the {step} lattice anchored at {x_right}")
    dps = max(30, int(int(cfg["bits"]) * math.log10(2)))
    sol = pl.hastings_mcleod(x_left=x_min, x_right=x_right, step=step, dps=dps, agree_tol=float(cfg["tol"]))
    table = pl.f1_table(sol, x_min, x_max)
    _emit(table.to_csv(_provenance("tw1", cfg)), cfg.get("out"))
    return EXIT_OK


# ----------------------------------------------------------------------------
# exact


def cmd_exact(cfg):
    from fractions import Fraction

    from . import asymptotics as asy
    from . import combinatorics as cb
    from . import exact_dist as ed
    from . import sampler as sp

    N = cfg.get("N")
    if N is None:
        raise UsageError("--N is required")
    N = int(N)
    k, t = cfg.get("k"), cfg.get("t")
    if k is None and t is None:
        raise UsageError("give --k or --t")
    explicit_k = k is not None
    if t is None:
        k = int(k)
        t = math.sqrt(k / (N * N + k)) if k else None
        if t is None:
            raise UsageError("k=0 fixes t=0; give --t")
    t = float(t)
    if k is None:
        k = sp.k_for(N, t)
    k = int(k)
    policy = ed.PrecisionPolicy(bits=int(cfg["bits"]), target_tol=float(cfg["tol"]))
    ls = _l_range(cfg.get("l"), N, k)

    cdf = {}
    if explicit_k or (k <= cb.MAX_SIZE and N <= cb.MAX_ENTRY):
        for l in ls:
            cdf[l] = cb.conditional_cdf_exact(N, k, l)  # BudgetError -> exit 4

    buf = io.StringIO()
    buf.write("# " + _provenance("exact", dict(cfg, N=N, k=k, t=t)) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["l", "phi_hankel", "phi_opuc", "route_gap", "tol", "conditional_cdf_exact", "x"])
    for l in ls:
        if l % 2:
            h = ed.phi_hankel(N, l, t, policy)
            o = ed.phi_opuc(N, l, t, policy)
            gap = abs(h - o)
            if gap > policy.target_tol * 10:
                raise ed.PrecisionError(f"routes disagree at l={l}: {float(gap):.3g}")
            hs, os_, gs = mp.nstr(h, 17), mp.nstr(o, 17), mp.nstr(gap, 3)
        else:
            hs = os_ = gs = ""
        c = cdf.get(l)
        cs = "" if c is None else (str(c) if isinstance(c, Fraction) else str(c))
        w.writerow([l, hs, os_, gs, f"{policy.target_tol * 10:.3g}", cs, f"{asy.x_of(N, t, l):.17g}"])
    _emit(buf.getvalue(), cfg.get("out"))
    return EXIT_OK


def _l_range(spec, N, k):
    if spec is None:
        return list(range(1, max(1, min(N, k)) + 1))
    spec = str(spec)
    try:
        if ":" in spec:
            a, b = spec.split(":")
            ls = list(range(int(a), int(b) + 1))
        else:
            ls = [int(v) for v in spec.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --l '{spec}': use 'a:b' or 'a,b,c'") from exc
    if not ls or min(ls) < 1 or ls != sorted(set(ls)):
        raise UsageError("--l values must be positive and strictly increasing")
    return ls


# ----------------------------------------------------------------------------
# montecarlo


def cmd_montecarlo(cfg):
    from . import painleve as pl
    from . import sampler as sp

    N, t = int(cfg["N"]), float(cfg["t"])
    if not 0 < t < 1:
        raise UsageError("t must lie in (0, 1)")
    k = sp.k_for(N, t)
    sc = sp.SamplerConfig(N, k, seed=int(cfg["seed"]), n_samples=int(cfg["samples"]),
                          worker_count=int(cfg["workers"]))
    table = pl.f1_table(pl.default_solution())
    res = sp.empirical_cdf(sc, t, table)
    prov = _provenance("montecarlo", dict(cfg, k=k))
    out = cfg.get("out")
    csv_text = res.ecdf.to_csv(prov)
    if out in (None, "-"):
        sys.stdout.write(res.summary_json())
    else:
        base = Path(out)
        base.parent.mkdir(parents=True, exist_ok=True)
        base.with_suffix(".csv").write_text(csv_text, encoding="utf-8")
        base.with_suffix(".json").write_text(res.summary_json(), encoding="utf-8")
    return EXIT_OK


# ----------------------------------------------------------------------------
# verify


def cmd_verify(cfg):
    from . import verify

    names = cfg.get("suite") or list(verify.SUITES)
    if isinstance(names, str):
        names = [names]
    unknown = [n for n in names if n not in verify.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {sorted(verify.SUITES)}")
    report = []
    ok = True
    for name in names:
        kw = {}
        if name == "convergence" and cfg.get("samples"):
            kw["n_samples"] = int(cfg["samples"])
        r = verify.run_suite(name, **kw)
        ok &= r.passed
        report.append(r.as_dict())
        for c in r.checks:
            print(f"[{'PASS' if c.passed else 'FAIL'}] {name}: {c.name}", file=sys.stderr)
    text = json.dumps({"passed": ok, "suites": report}, indent=2, default=str) + "\n"
    _emit(text, cfg.get("out"))
    return EXIT_OK if ok else EXIT_VERIFY


# ----------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser():
    p = _Parser(prog="lockstep", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON file with defaults; flags override")
        sp.add_argument("--out", help="output path ('-' for stdout)")

    s = sub.add_parser("tw1", help="GOE Tracy-Widom table as CSV")
    common(s)
    s.add_argument("--x-min", dest="x_min", type=float)
    s.add_argument("--x-max", dest="x_max", type=float)
    s.add_argument("--x-step", dest="x_step", type=float)
    s.add_argument("--bits", type=int, help="working precision in bits")
    s.add_argument("--tol", type=float, help="integrator agreement tolerance")
    s.set_defaults(func=cmd_tw1)

    s = sub.add_parser("exact", help="exact phi(N,l,t) columns and exact conditional CDF")
    common(s)
    s.add_argument("--N", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--t", type=float)
    s.add_argument("--l", help="'a:b' or comma list")
    s.add_argument("--bits", type=int)
    s.add_argument("--tol", type=float)
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("montecarlo", help="sample L_1 and compare with F1")
    common(s)
    s.add_argument("--N", type=int)
    s.add_argument("--t", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--samples", type=int)
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_montecarlo)

    s = sub.add_parser("verify", help="run acceptance suites")
    common(s)
    s.add_argument("--suite", action="append", help="suite name (repeatable); default all")
    s.add_argument("--samples", type=int, help="override Monte Carlo sample count")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    from .combinatorics import BudgetError
    from .exact_dist import PrecisionError
    from .painleve import BlowUpError, GridError, IntegratorDisagreement
    from .sampler import UnderspanError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge(args.command, args)
        return args.func(cfg)
    except (UsageError, GridError) as exc:
        print(f"lockstep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"lockstep: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except UnderspanError as exc:
        print(f"lockstep: F1 table underspan: {exc}", file=sys.stderr)
        return EXIT_UNDERSPAN
    except (IntegratorDisagreement, PrecisionError, BlowUpError) as exc:
        print(f"lockstep: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"lockstep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"lockstep: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
