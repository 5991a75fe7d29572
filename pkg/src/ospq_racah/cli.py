"""Command-line front end: ``ospq {eval,racah,rep,verify,limit}``.

Data goes to stdout (JSON or CSV), diagnostics to stderr. Exit codes:
0 success, 1 verification failure or degenerate input, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import limits as lim
from . import qbialgebra as qb
from . import racah as rc
from .errors import OspqError
from .polyfamilies import (ABCDParams, ClassicalBIParams, classical_bi_eval,
                           qbi_eval_recurrence, pracah_eval, racah_lattice)
from .qkernel import QContext
from .verify import SUITES, VerifyConfig, run

SCHEMA_VERSION = 1
DEFAULT_X = (-1.5, -0.5, 0.25, 1.0, 2.0)


@dataclass
class RunConfig:
    command: str
    q: float = 0.7
    mu: tuple = (0.3, 0.55, 0.8)
    eps: tuple = (1, 1, 1)
    N: int = 3
    n: Optional[int] = None
    s: Optional[int] = None
    x: tuple = DEFAULT_X
    family: str = "qbi"
    method: str = "closed"
    suite: str = "all"
    format: str = "json"
    tol: Optional[float] = None
    seed: int = 0
    abcd: tuple = (0.6, 0.4, 0.5, 0.3)
    abcd_given: bool = False
    classical: tuple = (0.3, 0.7, -0.4, -0.2)


class UsageError(Exception):
    pass


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ospq", description="Racah coefficients of osp_q(1|2) "
                                "and q-Bannai-Ito polynomials")
    p.add_argument("command", choices=("eval", "racah", "rep", "verify", "limit"))
    p.add_argument("--q", type=float, default=0.7)
    for i, m in enumerate((0.3, 0.55, 0.8), 1):
        p.add_argument(f"--mu{i}", type=float, default=m)
        p.add_argument(f"--eps{i}", type=int, default=1)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--x", type=_floats, default=DEFAULT_X,
                   help="comma-separated evaluation points (eval)")
    p.add_argument("--family", choices=("qbi", "pracah", "bi"), default="qbi")
    p.add_argument("--method", choices=("closed", "diag", "tensor", "all"), default="closed")
    p.add_argument("--suite", default="all")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int, default=0)
    for name in "abcd":
        p.add_argument(f"--{name}", type=float, help="q-BI parameters (default 0.6,0.4,0.5,0.3)")
    for name, v in zip(("rho1", "rho2", "r1", "r2"), (0.3, 0.7, -0.4, -0.2)):
        p.add_argument(f"--{name}", type=float, default=v)
    return p


def parse_config(argv) -> RunConfig:
    parser = build_parser()
    a = parser.parse_args(argv)
    if not 0 < a.q < 1:
        parser.error("--q must lie in (0, 1)")
    if a.N < 0:
        parser.error("--N must be non-negative")
    eps = (a.eps1, a.eps2, a.eps3)
    if any(e not in (1, -1) for e in eps):
        parser.error("--eps1..3 must be +1 or -1")
    mu = (a.mu1, a.mu2, a.mu3)
    if any(m <= 0 for m in mu):
        parser.error("--mu1..3 must be positive")
    if a.suite != "all" and a.suite not in SUITES:
        parser.error(f"unknown suite {a.suite!r}; choose from all, {', '.join(SUITES)}")
    given = [getattr(a, k) for k in "abcd"]
    if any(v is not None for v in given) and any(v is None for v in given):
        parser.error("--a --b --c --d must be given together")
    abcd = tuple(given) if given[0] is not None else (0.6, 0.4, 0.5, 0.3)
    for name in ("n", "s"):
        v = getattr(a, name)
        if v is not None and v < 0:
            parser.error(f"--{name} must be non-negative")
    if a.command == "eval" and a.family in ("qbi", "bi") and a.n is None:
        parser.error(f"--n is required for family {a.family}")
    return RunConfig(command=a.command, q=a.q, mu=mu, eps=eps, N=a.N, n=a.n, s=a.s, x=a.x,
                     family=a.family, method=a.method, suite=a.suite, format=a.format,
                     tol=a.tol, seed=a.seed, abcd=abcd, abcd_given=given[0] is not None,
                     classical=(a.rho1, a.rho2, a.r1, a.r2))


# --------------------------------------------------------------------------

def _instance(cfg: RunConfig):
    ctx = QContext(cfg.q)
    return ctx, qb.build_instance(qb.labels_from(cfg.mu, cfg.eps), cfg.N, ctx)


def _header(cfg: RunConfig) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": cfg.command, "q": cfg.q}


def cmd_eval(cfg: RunConfig) -> tuple[dict, list]:
    ctx = QContext(cfg.q)
    rows = []
    if cfg.family == "qbi":
        prm = ABCDParams(*cfg.abcd)
        for x in cfg.x:
            z = (x + np.sqrt(x * x + 4)) / 2  # positive root of z - 1/z = x
            rows.append({"n": cfg.n, "x": x, "value": float(qbi_eval_recurrence(cfg.n, z, prm, ctx))})
        params = dict(zip("abcd", cfg.abcd))
    elif cfg.family == "bi":
        prm = ClassicalBIParams(*cfg.classical)
        for x in cfg.x:
            rows.append({"n": cfg.n, "x": x, "value": float(classical_bi_eval(cfg.n, x, prm))})
        params = dict(zip(("rho1", "rho2", "r1", "r2"), cfg.classical))
    else:
        _, inst = _instance(cfg)
        prm = rc.para_map(inst, ctx)
        ns = range(cfg.N + 1) if cfg.n is None else [cfg.n]
        ss = range(cfg.N + 1) if cfg.s is None else [cfg.s]
        if any(v > cfg.N for v in list(ns) + list(ss)):
            raise UsageError("--n and --s must not exceed --N")
        for n in ns:
            for s in ss:
                rows.append({"n": n, "s": s, "mu_s": racah_lattice(s, prm, ctx),
                             "value": pracah_eval(n, s, prm, ctx)})
        params = {"alpha": prm.alpha, "beta": prm.beta, "gamma": prm.gamma,
                  "delta": prm.delta, "N": cfg.N}
    out = _header(cfg) | {"family": cfg.family, "params": params, "rows": rows}
    return out, rows


def cmd_racah(cfg: RunConfig) -> tuple[dict, list]:
    ctx, inst = _instance(cfg)
    methods = ("closed", "diag", "tensor") if cfg.method == "all" else (cfg.method,)
    tables = {m: rc.racah_table(inst, ctx, m) for m in methods}
    main = tables[methods[0]]
    cross = {}
    for i, m1 in enumerate(methods):
        for m2 in methods[i + 1:]:
            cross[f"{m1}_vs_{m2}"] = float(np.max(np.abs(tables[m1].W - tables[m2].W)))
    residuals = {"orthogonality": max(rc.orthogonality_check(t) for t in tables.values()),
                 "cross_method": cross}
    out = _header(cfg) | {"N": cfg.N, "mu": list(cfg.mu), "eps": list(cfg.eps),
                          "method": cfg.method, "coefficients": main.W.tolist(),
                          "residuals": residuals}
    rows = [{"s": s, "n": n, "value": float(main.W[s, n])}
            for s in range(cfg.N + 1) for n in range(cfg.N + 1)]
    return out, rows


def cmd_rep(cfg: RunConfig) -> tuple[dict, list]:
    ctx, inst = _instance(cfg)
    rep = qb.build_rep(inst, ctx)
    _, value = qb.casimir_rep(rep, ctx)
    res = qb.check_qbi_relations(rep, ctx) | qb.casimir_residuals(rep, ctx)
    out = _header(cfg) | {
        "N": cfg.N, "mu": list(cfg.mu), "eps": list(cfg.eps),
        "lambda": rep.lam.tolist(), "U": rep.U.tolist(), "V": rep.V.tolist(),
        "iota": list(rep.iota), "tau": list(rep.tau), "tau_N": rep.tau_N,
        "casimir_value": value, "residuals": res,
    }
    rows = [{"n": n, "lambda": float(rep.lam[n]), "U": float(rep.U[n]), "V": float(rep.V[n])}
            for n in range(cfg.N + 1)]
    return out, rows


def cmd_verify(cfg: RunConfig) -> tuple[dict, list]:
    vc = VerifyConfig(seed=cfg.seed, tol=cfg.tol, abcd=cfg.abcd if cfg.abcd_given else None)
    out = run(cfg.suite, vc)
    rows = [{"suite": s, "name": c["name"], "residual": c["residual"],
             "threshold": c["threshold"], "passed": c["passed"]}
            for s, cs in out["suites"].items() for c in cs]
    return out, rows


def cmd_limit(cfg: RunConfig) -> tuple[dict, list]:
    prm = ClassicalBIParams(*cfg.classical)
    reports = lim.limit_recurrence(prm)
    reports["operator"] = lim.limit_operator(prm)
    labels = qb.labels_from(cfg.mu, cfg.eps)
    alg = lim.limit_algebra(labels, cfg.N)
    reports |= {k: v for k, v in alg.items() if isinstance(v, lim.LimitReport)}
    body = {k: {"near_one": r.near_one, "order": r.order, "richardson_order": r.richardson,
                "q": r.qs.tolist(), "errors": r.errors.tolist()} for k, r in reports.items()}
    out = _header(cfg) | {"classical": dict(zip(("rho1", "rho2", "r1", "r2"), cfg.classical)),
                          "N": cfg.N, "mu": list(cfg.mu), "eps": list(cfg.eps),
                          "reports": body, "anticommutators": alg["anticommutators"]}
    rows = [{"quantity": k, "q": float(q), "error": float(e)}
            for k, r in reports.items() for q, e in zip(r.qs, r.errors)]
    return out, rows


COMMANDS = {"eval": cmd_eval, "racah": cmd_racah, "rep": cmd_rep, "verify": cmd_verify,
            "limit": cmd_limit}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return v


def write_csv(rows: list, stream):
    if not rows:
        return
    w = csv.DictWriter(stream, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(v) for k, v in r.items()})


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    try:
        out, rows = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"ospq: error: {exc}", file=sys.stderr)
        return 2
    except OspqError as exc:
        err = {"schema_version": SCHEMA_VERSION, "command": cfg.command,
               "error": {"code": exc.code, "message": str(exc)}}
        print(json.dumps(err), file=sys.stdout)
        print(f"ospq: {exc}", file=sys.stderr)
        return 1
    if cfg.format == "csv":
        buf = io.StringIO()
        write_csv(rows, buf)
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(json.dumps(_jsonable(out), indent=1) + "\n")
    if cfg.command == "verify" and not out["passed"]:
        print("verification failed: " + ", ".join(out["failed"]), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
