"""Seeded invariant suites behind ``ospq verify``.

Each suite returns a list of :class:`Check` records. A check aggregates one
invariant over a parameter grid and keeps the worst residual. Random
parameters come from ``numpy.random.default_rng(seed)`` so a fixed seed gives
byte-identical reports.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import bargmann as bg
from . import limits as lim
from . import qbialgebra as qb
from . import racah as rc
from . import reflectionop as ro
from .errors import OspqError
from .polyfamilies import (ABCDParams, ClassicalBIParams, qbi_eval_hypergeometric,
                           qbi_eval_recurrence)
from .qkernel import QContext

SUITES = ("ospq", "qbialgebra", "operator", "racah", "limits")
DEFAULT_MU = (0.3, 0.55, 0.8)
# an estimated convergence order counts as >= 1 within this estimation error
ORDER_TOL = 0.02


@dataclass
class Check:
    name: str
    threshold: float
    kind: str = "max"  # "max": residual <= threshold, "min": residual >= threshold
    residual: float = 0.0
    cases: int = 0
    errors: list = field(default_factory=list)  # structured errors from skipped cases

    def add(self, value: float):
        value = float(value)
        if self.cases == 0:
            self.residual = value
        elif self.kind == "max":
            self.residual = max(self.residual, value)
        else:
            self.residual = min(self.residual, value)
        self.cases += 1

    @property
    def passed(self) -> Optional[bool]:
        if self.cases == 0:
            return None if self.errors else False
        if not np.isfinite(self.residual):
            return False
        if self.kind == "max":
            return bool(self.residual <= self.threshold)
        return bool(self.residual >= self.threshold)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        if not d["errors"]:
            del d["errors"]
        return d


@dataclass
class VerifyConfig:
    seed: int = 0
    tol: Optional[float] = None
    abcd: Optional[tuple] = None  # extra user parameter set for the operator suite
    labels: Optional[tuple] = None  # extra user instance for the algebra suites
    fast: bool = False  # smaller grids (used by unit tests)


@dataclass
class Suite:
    name: str
    config: VerifyConfig
    checks: dict = field(default_factory=dict)

    def check(self, name: str, threshold: float, kind: str = "max") -> Check:
        if name not in self.checks:
            if self.config.tol is not None:
                threshold = self.config.tol
            self.checks[name] = Check(name, threshold, kind)
        return self.checks[name]

    def guarded(self, name: str, threshold: float, fn: Callable[[], float], kind: str = "max"):
        c = self.check(name, threshold, kind)
        try:
            c.add(fn())
        except OspqError as exc:
            c.errors.append({"code": exc.code, "message": str(exc)})

    def results(self) -> list[dict]:
        return [c.to_dict() for c in self.checks.values()]


def _mus(rng, count: int):
    return [DEFAULT_MU] + [tuple(float(x) for x in rng.uniform(0.1, 1.2, 3)) for _ in range(count)]


def _random_abcd(rng, positive_product: bool = False) -> ABCDParams:
    mags = rng.uniform(0.2, 0.9, 4)
    signs = rng.choice([-1.0, 1.0], 4)
    if positive_product and np.prod(signs) < 0:
        signs[3] = -signs[3]
    return ABCDParams(*(float(x) for x in mags * signs))


# --------------------------------------------------------------------------

def suite_ospq(cfg: VerifyConfig) -> Suite:
    S = Suite("ospq", cfg)
    rng = np.random.default_rng(cfg.seed)
    nmax = 20
    qs = (0.7,) if cfg.fast else (0.5, 0.7)
    for q in qs:
        ctx = QContext(q)
        labels = [bg.ModuleLabel(int(e), float(m))
                  for e, m in zip((1, -1, 1, -1), [0.3, *rng.uniform(0.1, 1.2, 3)])]
        mods = [bg.build_module(lab, nmax, ctx) for lab in labels]
        for m in mods:
            S.check("module_relations", 1e-12).add(max(bg.verify_module_relations(m, ctx).values()))
            S.check("module_casimir_scalar", 1e-12).add(bg.casimir_residual(m, ctx))
            bad = 0.0
            for gen, mat in (("A+", m.Aplus), ("A-", m.Aminus), ("A0", m.A0), ("P", m.P), ("K", m.K)):
                for n in range(nmax):
                    col = np.zeros(m.dim)
                    for k, v in bg.bargmann_apply(gen, n, m.label, ctx).items():
                        col[k] = v
                    bad = max(bad, bg.relative_residual(col - mat[:, n], col, mat[:, n]))
            S.check("bargmann_realization", 1e-12).add(bad)
        for mA, mB in itertools.combinations(mods, 2):
            S.check("delta_q_two_route", 1e-11).add(bg.delta_q_two_route_residual(mA, mB, ctx))
        small = [bg.build_module(lab, 6, ctx) for lab in labels[:3]]
        S.check("coassociativity", 1e-12).add(max(bg.coassociativity_residual(*small).values()))
    # spectral lemma: 5 random (mu1, mu2) x 4 sign pairs, n <= 8
    ctx = QContext(0.7)
    for _ in range(2 if cfg.fast else 5):
        mu1, mu2 = rng.uniform(0.1, 1.2, 2)
        for e1, e2 in itertools.product((1, -1), repeat=2):
            la, lb = bg.ModuleLabel(e1, float(mu1)), bg.ModuleLabel(e2, float(mu2))
            mA, mB = bg.build_module(la, 8, ctx), bg.build_module(lb, 8, ctx)
            for n in range(9):
                vals = bg.un_spectrum(mA, mB, n, ctx, tol=np.inf)
                target = np.sort(bg.lemma_targets(la, lb, n, ctx))
                S.check("lemma_spectrum", 1e-9).add(
                    np.max(np.abs(vals - target) / (1 + np.abs(target))))
    return S


def _instances(cfg: VerifyConfig, rng, Nmax: int):
    qs = (0.7,) if cfg.fast else (0.5, 0.7)
    mus = _mus(rng, 1 if cfg.fast else 5)
    signs = list(itertools.product((1, -1), repeat=3))
    if cfg.fast:
        signs = signs[::3]
    grid = [(q, qb.labels_from(mu, eps)) for q in qs for mu in mus for eps in signs]
    if cfg.labels is not None:
        grid.append((qs[-1], tuple(cfg.labels)))
    for q, labels in grid:
        ctx = QContext(q)
        for N in range(Nmax + 1):
            yield ctx, qb.build_instance(labels, N, ctx)


def suite_qbialgebra(cfg: VerifyConfig) -> Suite:
    S = Suite("qbialgebra", cfg)
    rng = np.random.default_rng(cfg.seed + 1)
    for ctx, inst in _instances(cfg, rng, 6 if cfg.fast else 12):
        try:
            rep = qb.build_rep(inst, ctx)
        except OspqError as exc:
            S.check("build_rep", 0.0).errors.append({"code": exc.code, "message": str(exc)})
            continue
        S.check("qbi_relations", 1e-9).add(max(qb.check_qbi_relations(rep, ctx).values()))
        cas = qb.casimir_residuals(rep, ctx)
        S.check("casimir_scalar", 1e-9).add(cas["C-value"])
        S.check("casimir_commutes", 1e-10).add(max(cas["[C,I1]"], cas["[C,I2]"], cas["[C,I3]"]))
        S.check("v_quotient_form", 1e-10).add(
            np.max(np.abs(rep.V - qb.v_quotient(rep, ctx)) / np.maximum(1.0, np.abs(rep.V))))
        S.check("un_squared_recurrence", 1e-9).add(qb.un_squared_recurrence_check(rep, inst, ctx).max())
        if inst.N <= 10:
            prep = qb.permuted_rep(inst, ctx)
            eig = np.sort(np.linalg.eigvalsh(rep.I1()))
            S.check("spectrum_duality", 1e-9).add(
                np.max(np.abs(eig - np.sort(prep.lam)) / (1 + np.abs(prep.lam).max())))
            pinst = qb.permuted_instance(inst, ctx)
            S.check("casimir_cyclic_invariance", 1e-12).add(
                abs(qb.casimir_value(inst.tau, inst.tau_N, ctx)
                    - qb.casimir_value(pinst.tau, pinst.tau_N, ctx))
                / max(1.0, abs(qb.casimir_value(inst.tau, inst.tau_N, ctx))))
        if inst.N >= 2:
            S.check("tridiagonality_certificate", 1e-12, "min").add(qb.eq1_certificate(rep, ctx))
    return S


def suite_operator(cfg: VerifyConfig) -> Suite:
    S = Suite("operator", cfg)
    rng = np.random.default_rng(cfg.seed + 2)
    # two evaluation routes for Q_n
    nsets = 3 if cfg.fast else 10
    for q in (0.3, 0.7, 0.9):
        ctx = QContext(q)
        for _ in range(nsets):
            prm = _random_abcd(rng)
            zs = rng.uniform(0.3, 3.0, 20)
            worst = 0.0
            for n in range(16):
                rec = qbi_eval_recurrence(n, zs, prm, ctx)
                hyp = qbi_eval_hypergeometric(n, zs, prm, ctx)
                worst = max(worst, float(np.max(np.abs(rec - hyp) / np.maximum(np.abs(hyp), 1e-300))))
            S.check("qbi_two_route", 1e-10).add(worst)
    params = []
    for q in (0.5, 0.7, 0.9):
        ctx = QContext(q)
        for _ in range(2 if cfg.fast else 5):
            params.append((ctx, _random_abcd(rng, positive_product=True)))
    if cfg.abcd is not None:
        params.append((QContext(0.7), ABCDParams(*cfg.abcd)))
    for ctx, prm in params:
        zs = ro.sample_points(rng, 20, ctx)
        S.check("dz_eigenvalue", 1e-9).add(max(ro.eigen_residual(n, zs, prm, ctx) for n in range(11)))
        S.check("dz_degree_preservation", 1e-9).add(
            max(ro.degree_preservation_residual(n, prm, ctx, rng) for n in range(5)))
        S.check("j2_recurrence", 1e-12).add(
            max(ro.j2_recurrence_residual(n, zs, prm, ctx) for n in range(10)))
        S.guarded("realization_relations", 1e-8,
                  lambda: max(ro.realization_check(prm, ctx, K=8).values()))
        S.guarded("realization_casimir_scalar", 1e-8,
                  lambda: ro.realization_casimir_spread(prm, ctx))
    return S


def suite_racah(cfg: VerifyConfig) -> Suite:
    S = Suite("racah", cfg)
    rng = np.random.default_rng(cfg.seed + 3)
    tables = {}
    for ctx, inst in _instances(cfg, rng, 6 if cfg.fast else 10):
        try:
            C = rc.racah_table_closed(inst, ctx)
            D = rc.racah_by_diagonalization(inst, ctx)
        except OspqError as exc:
            S.check("closed_vs_diag", 1e-8).errors.append({"code": exc.code, "message": str(exc)})
            continue
        S.check("closed_vs_diag", 1e-8).add(np.max(np.abs(C.W - D.W)))
        S.check("orthogonality_closed", 1e-8).add(rc.orthogonality_check(C))
        S.check("orthogonality_diag", 1e-12).add(rc.orthogonality_check(D))
        if inst.N <= 5:
            T = rc.racah_by_tensor(inst, ctx)
            S.check("closed_vs_tensor", 1e-6).add(np.max(np.abs(C.W - T.W)))
            S.check("diag_vs_tensor", 1e-6).add(np.max(np.abs(D.W - T.W)))
            S.check("orthogonality_tensor", 1e-8).add(rc.orthogonality_check(T))
        S.check("weight_identification", 1e-10).add(rc.weight_identification(C, inst, ctx))
        key = (ctx.q, inst.mu, inst.N)
        if key in tables:
            S.check("sign_independence", 1e-12).add(np.max(np.abs(tables[key] - C.W)))
        else:
            tables[key] = C.W
            S.check("recurrence_in_n", 1e-8).add(rc.recurrence1_residual(C, inst, ctx))
            S.check("row_polynomial_fit", 1e-4).add(rc.row_polynomial_residual(C, inst, ctx))
    return S


def suite_limits(cfg: VerifyConfig) -> Suite:
    S = Suite("limits", cfg)
    rng = np.random.default_rng(cfg.seed + 4)
    cparams = [ClassicalBIParams(0.3, 0.7, -0.4, -0.2)]
    for _ in range(0 if cfg.fast else 2):
        rho1, rho2 = rng.uniform(0.1, 0.9, 2)
        r1, r2 = rng.uniform(-0.9, -0.1, 2)
        cparams.append(ClassicalBIParams(float(rho1), float(rho2), float(r1), float(r2)))
    xs = np.array([0.37, 1.2, 2.7, -0.8, 3.3, -1.9])
    for prm in cparams:
        S.check("classical_eigenvalue", 1e-9).add(
            max(lim.classical_eigen_residual(n, xs, prm) for n in range(11)))
        reports = lim.limit_recurrence(prm)
        reports["operator"] = lim.limit_operator(prm)
        for key, r in reports.items():
            near = 1e-2 if key == "operator" else 5e-3
            S.check(f"{key}_near_one", near).add(r.near_one)
            S.check(f"{key}_order", 1 - ORDER_TOL, "min").add(r.order)
            S.check(f"{key}_richardson_order", 1 - ORDER_TOL, "min").add(r.richardson)
    for eps in ((1, 1, 1), (1, -1, 1), (-1, -1, 1)):
        labels = qb.labels_from(DEFAULT_MU, eps)
        for N in (2, 3):
            out = lim.limit_algebra(labels, N)
            for key in ("structure_constants", "casimir_value"):
                r = out[key]
                S.check(f"{key}_near_one", 5e-3).add(r.near_one)
                S.check(f"{key}_order", 1 - ORDER_TOL, "min").add(r.order)
            S.check("anticommutators_near_one", 5e-3).add(max(out["anticommutators"].values()))
    for eps, mu in ((1, 0.3), (-1, 0.85)):
        out = lim.sl_minus1_relations(bg.ModuleLabel(eps, mu))
        S.check("sl_minus1_relations", 1e-12).add(max(out["relations"].values()))
        S.check("module_near_one", 5e-3).add(out["convergence"].near_one)
        S.check("module_order", 1 - ORDER_TOL, "min").add(out["convergence"].order)
    return S


RUNNERS = {"ospq": suite_ospq, "qbialgebra": suite_qbialgebra, "operator": suite_operator,
           "racah": suite_racah, "limits": suite_limits}


def run(suite: str = "all", config: VerifyConfig | None = None) -> dict:
    config = config or VerifyConfig()
    names = SUITES if suite == "all" else (suite,)
    if any(n not in RUNNERS for n in names):
        raise KeyError(suite)
    results = {n: RUNNERS[n](config).results() for n in names}
    failed = [f"{n}.{c['name']}" for n, cs in results.items() for c in cs if c["passed"] is False]
    return {"schema_version": 1, "command": "verify", "suite": suite, "seed": config.seed,
            "suites": results, "failed": failed, "passed": not failed}
