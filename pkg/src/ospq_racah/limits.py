"""The q -> 1 limit: classical Bannai-Ito operator, limits of the q-BI
recurrence, of the structure constants, of D_z and of the module matrices.

Every limit is checked numerically along a geometric schedule
q_k = 1 - 2^-k. Two order estimates are reported: the slope of
log|error| against log(1 - q) (needs the analytic target), and a
target-free Richardson estimate from successive differences.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bargmann import ModuleLabel, build_module, relative_residual
from .errors import ExcludedPoint
from .polyfamilies import (ABCDParams, ClassicalBIParams, classical_bi_coeffs,
                           classical_bi_eval, qbi_recurrence_coeffs)
from .qbialgebra import build_instance, build_rep, casimir_value
from .qkernel import QContext
from .reflectionop import apply_dz

NEAR_ONE = 1 - 1e-3
# points at the q -> 1 end of the schedule used for order estimates
TAIL = 5


@dataclass(frozen=True)
class LimitSchedule:
    ks: tuple = tuple(range(4, 13))

    def __post_init__(self):
        qs = self.qs
        if not (np.all(np.diff(qs) > 0) and np.all((qs > 0) & (qs < 1))):
            raise ValueError("schedule must increase strictly inside (0, 1)")

    @property
    def qs(self) -> np.ndarray:
        return 1.0 - 2.0 ** -np.asarray(self.ks, dtype=float)


@dataclass
class LimitReport:
    name: str
    qs: np.ndarray
    errors: np.ndarray
    values: np.ndarray = field(default=None)
    near_one: float = np.nan  # error at q = 1 - 1e-3

    @property
    def order(self) -> float:
        return convergence_order(1 - self.qs[-TAIL:], self.errors[-TAIL:])

    @property
    def richardson(self) -> float:
        if self.values is None:
            return np.nan
        return richardson_order(self.values[-TAIL:])


def convergence_order(h, err, floor: float = 1e-13) -> float:
    """Least-squares slope of log err against log h, over points above the floor."""
    h, err = np.asarray(h, float), np.asarray(err, float)
    keep = err > floor
    if keep.sum() < 3:
        return np.inf  # already at round-off over the schedule
    return float(np.polyfit(np.log(h[keep]), np.log(err[keep]), 1)[0])


def richardson_order(values) -> float:
    """Median of log2(|v_k - v_{k-1}| / |v_{k+1} - v_k|) for a halving step.

    ``values`` has shape (len(schedule), ...); the max norm over trailing axes
    is used for the differences.
    """
    v = np.asarray(values, float)
    d = np.abs(np.diff(v, axis=0)).reshape(len(v) - 1, -1).max(axis=1)
    ok = (d[:-1] > 1e-13) & (d[1:] > 1e-13)
    if not ok.any():
        return np.inf
    return float(np.median(np.log2(d[:-1][ok] / d[1:][ok])))


# --------------------------------------------------------------------------
# classical operator

def classical_D(x, params: ClassicalBIParams):
    return (x - params.rho1) * (x - params.rho2) / x


def classical_E(x, params: ClassicalBIParams):
    return (x - params.r1 + 0.5) * (x - params.r2 + 0.5) / (x + 0.5)


def classical_bi_operator_apply(f, x, params: ClassicalBIParams):
    """D(x)(f(x) - f(-x)) + E(x)(f(-x-1) - f(x)) + kappa f(x)."""
    x = np.asarray(x, dtype=float)
    if np.any(x == 0) or np.any(x == -0.5):
        raise ExcludedPoint("evaluation at excluded point")
    fx = f(x)
    out = (classical_D(x, params) * (fx - f(-x)) + classical_E(x, params) * (f(-x - 1) - fx)
           + params.kappa * fx)
    return float(out) if np.ndim(out) == 0 else out


def classical_eigen_residual(n: int, xs, params: ClassicalBIParams) -> float:
    xs = np.asarray(xs, dtype=float)
    f = lambda x: classical_bi_eval(n, x, params)
    lhs = classical_bi_operator_apply(f, xs, params)
    val = f(xs)
    rhs = (-1) ** n * (n + params.kappa) * val
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(val))))


# --------------------------------------------------------------------------
# recurrence

def limit_abcd(params: ClassicalBIParams, q: float) -> ABCDParams:
    return ABCDParams(a=q ** (2 * params.rho1 + 0.5), b=-(q ** (-2 * params.r2 + 0.5)),
                      c=-(q ** (2 * params.rho2 + 0.5)), d=q ** (-2 * params.r1 + 0.5))


def limit_targets(params: ClassicalBIParams, nmax: int) -> np.ndarray:
    """Rows (A~_n, C~_n) = 2 (A_n, C_n) of the classical recurrence."""
    return np.array([[2 * x for x in classical_bi_coeffs(n, params)] for n in range(nmax + 1)])


def scaled_coeffs(params: ClassicalBIParams, q: float, nmax: int) -> tuple[np.ndarray, float]:
    """(A_n, C_n) / (q - 1/q) for n <= nmax, and (a - 1/a) / (q - 1/q)."""
    ctx = QContext(q)
    prm = limit_abcd(params, q)
    AC = np.array([qbi_recurrence_coeffs(n, prm, ctx) for n in range(nmax + 1)]) / ctx.qdiff
    return AC, (prm.a - 1 / prm.a) / ctx.qdiff


def normalized_qbi(n: int, x, params: ClassicalBIParams, q: float):
    """Monic normalized q-BI polynomial at z = q^x, variable (z - 1/z)/(q - 1/q)."""
    AC, a0 = scaled_coeffs(params, q, max(n, 1))
    x = np.asarray(x, dtype=float)
    X = (q**x - q ** (-x)) / (q - 1 / q)
    prev, cur = np.zeros_like(X), np.ones_like(X)
    for k in range(n):
        A, C = AC[k]
        Ap = AC[k - 1, 0] if k > 0 else 0.0
        prev, cur = cur, (X - (a0 - A - C)) * cur - Ap * C * prev
    return cur


def limit_recurrence(params: ClassicalBIParams, schedule: LimitSchedule = LimitSchedule(),
                     nmax: int = 6, xs=(0.17, 0.83, 1.61, 2.3)) -> dict[str, LimitReport]:
    """Coefficient limits and the polynomial identity Q~_n(x) = 2^n B_n((x - 1/2)/2)."""
    target = limit_targets(params, nmax)
    diag_target = 2 * params.rho1 + 0.5
    xs = np.asarray(xs, dtype=float)
    poly_target = np.array([2.0**n * classical_bi_eval(n, (xs - 0.5) / 2, params)
                            for n in range(nmax + 1)])

    def coeff_error(q):
        AC, a0 = scaled_coeffs(params, q, nmax)
        scale = np.maximum(1.0, np.abs(target))
        return AC, a0, max(float(np.max(np.abs(AC - target) / scale)),
                           abs(a0 - diag_target) / max(1.0, abs(diag_target)))

    def poly_vals(q):
        return np.array([normalized_qbi(n, xs, params, q) for n in range(nmax + 1)])

    def poly_error(v):
        return float(np.max(np.abs(v - poly_target) / np.maximum(1.0, np.abs(poly_target))))

    qs = schedule.qs
    cv, ce, pv, pe = [], [], [], []
    for q in qs:
        AC, a0, e = coeff_error(q)
        cv.append(np.concatenate([AC.ravel(), [a0]]))
        ce.append(e)
        v = poly_vals(q)
        pv.append(v)
        pe.append(poly_error(v))
    return {
        "recurrence_coefficients": LimitReport("recurrence_coefficients", qs, np.array(ce),
                                               np.array(cv), coeff_error(NEAR_ONE)[2]),
        "polynomial_identity": LimitReport("polynomial_identity", qs, np.array(pe),
                                           np.array(pv), poly_error(poly_vals(NEAR_ONE))),
    }


# --------------------------------------------------------------------------
# structure constants and Casimir value

def omega_limit(labels, N: int) -> np.ndarray:
    """omega_k = 2 (t_i t_j + t_k t_N) with t = -eps mu, (ijk) cyclic."""
    t = [-lab.epsilon * lab.mu for lab in labels]
    e1, e2, e3 = (lab.epsilon for lab in labels)
    mu_N = N + sum(lab.mu for lab in labels) + 1
    tN = -((-1) ** N) * e1 * e2 * e3 * mu_N
    return np.array([2 * (t[1] * t[2] + t[0] * tN), 2 * (t[2] * t[0] + t[1] * tN),
                     2 * (t[0] * t[1] + t[2] * tN)])


def casimir_limit(labels, N: int) -> float:
    mu_N = N + sum(lab.mu for lab in labels) + 1
    return sum(lab.mu**2 for lab in labels) + mu_N**2 - 0.25


def limit_algebra(labels, N: int, schedule: LimitSchedule = LimitSchedule()) -> dict:
    """iota_k(q) -> omega_k, Casimir value -> its classical value, and the
    undeformed anticommutation relations for the rep matrices near q = 1."""
    w = omega_limit(labels, N)
    cval = casimir_limit(labels, N)

    def at(q):
        inst = build_instance(labels, N, QContext(q))
        c = casimir_value(inst.tau, inst.tau_N, QContext(q))
        return np.array(inst.iota), c

    def errs(q):
        iota, c = at(q)
        return (float(np.max(np.abs(iota - w)) / max(1.0, np.max(np.abs(w)))),
                abs(c - cval) / max(1.0, abs(cval)), iota, c)

    qs = schedule.qs
    rows = [errs(q) for q in qs]
    near = errs(NEAR_ONE)
    reports = {
        "structure_constants": LimitReport("structure_constants", qs,
                                           np.array([r[0] for r in rows]),
                                           np.array([r[2] for r in rows]), near[0]),
        "casimir_value": LimitReport("casimir_value", qs, np.array([r[1] for r in rows]),
                                     np.array([r[3] for r in rows]), near[1]),
    }
    return reports | {"anticommutators": limit_anticommutators(labels, N, qs[-1])}


def limit_anticommutators(labels, N: int, q: float) -> dict[str, float]:
    """{I_i, I_j} - I_k - omega_k with I2 := {I3, I1} - omega_2, at ``q``."""
    ctx = QContext(q)
    rep = build_rep(build_instance(labels, N, ctx), ctx)
    w1, w2, w3 = omega_limit(labels, N)
    I1, I3 = rep.I1(), rep.I3()
    Id = np.eye(N + 1)
    I2 = I3 @ I1 + I1 @ I3 - w2 * Id
    rels = {"{I1,I2}-I3-w3": (I1 @ I2, I2 @ I1, -I3, -w3 * Id),
            "{I2,I3}-I1-w1": (I2 @ I3, I3 @ I2, -I1, -w1 * Id),
            "C-value": (I1 @ I1, I2 @ I2, I3 @ I3, -casimir_limit(labels, N) * Id)}
    return {k: relative_residual(sum(t), *t) for k, t in rels.items()}


# --------------------------------------------------------------------------
# operator

def classical_limit_operator(g, x, params: ClassicalBIParams):
    """Limit of D_z / (q - 1/q) at z = q^x acting on g(x)."""
    x = np.asarray(x, dtype=float)
    gx = g(x)
    minus = (x - 2 * params.rho1 - 0.5) * (x - 2 * params.rho2 - 0.5) / (2 * x - 1)
    plus = (x - 2 * params.r1 + 0.5) * (x - 2 * params.r2 + 0.5) / (2 * x + 1)
    return minus * (g(1 - x) - gx) - plus * (g(-x - 1) - gx)


def scaled_dz(g, x, params: ClassicalBIParams, q: float):
    """D_z / (q - 1/q) at z = q^x, acting on g(log_q z)."""
    ctx = QContext(q)
    lq = np.log(q)
    f = lambda z: g(np.log(z) / lq)
    return apply_dz(f, q ** np.asarray(x, dtype=float), limit_abcd(params, q), ctx) / ctx.qdiff


def limit_operator(params: ClassicalBIParams, schedule: LimitSchedule = LimitSchedule(),
                   degree: int = 4, xs=(0.13, 0.91, 1.37, 2.2)) -> LimitReport:
    xs = np.asarray(xs, dtype=float)
    basis = [lambda x, k=k: x**k for k in range(degree + 1)]
    target = np.array([classical_limit_operator(g, xs, params) for g in basis])

    def vals(q):
        return np.array([scaled_dz(g, xs, params, q) for g in basis])

    def err(v):
        return float(np.max(np.abs(v - target) / np.maximum(1.0, np.abs(target))))

    qs = schedule.qs
    vs = np.array([vals(q) for q in qs])
    return LimitReport("operator", qs, np.array([err(v) for v in vs]), vs, err(vals(NEAR_ONE)))


# --------------------------------------------------------------------------
# sl_{-1}(2) modules

def sigma_tilde(n, mu: float):
    n = np.asarray(n)
    return n + mu * (1 - np.where(n % 2 == 0, 1.0, -1.0))


def limit_module(label: ModuleLabel, nmax: int) -> dict[str, np.ndarray]:
    n = np.arange(nmax + 1)
    Ap = np.diag(np.sqrt(sigma_tilde(np.arange(1, nmax + 1), label.mu)), -1)
    return {"A0": np.diag(n + label.mu + 0.5), "Aplus": Ap, "Aminus": Ap.T.copy(),
            "P": np.diag(label.epsilon * np.where(n % 2 == 0, 1.0, -1.0))}


def sl_minus1_relations(label: ModuleLabel, nmax: int = 20,
                        schedule: LimitSchedule = LimitSchedule()) -> dict:
    m = limit_module(label, nmax)
    A0, Ap, Am, P = m["A0"], m["Aplus"], m["Aminus"], m["P"]
    s = slice(0, nmax)
    Q = (Ap @ Am - (A0 - 0.5 * np.eye(nmax + 1))) @ P
    rels = {
        "[A0,P]": (A0 @ P, -P @ A0),
        "{A+,P}": (Ap @ P, P @ Ap),
        "{A-,P}": (Am @ P, P @ Am),
        "[A0,A+]-A+": (A0 @ Ap, -Ap @ A0, -Ap),
        "[A0,A-]+A-": (A0 @ Am, -Am @ A0, Am),
        "{A+,A-}-2A0": (Ap @ Am, Am @ Ap, -2 * A0),
        "Q+eps*mu": (Q, label.epsilon * label.mu * np.eye(nmax + 1)),
    }
    out = {k: relative_residual(sum(t)[s, s], *(x[s, s] for x in t)) for k, t in rels.items()}

    def dev(q):
        mq = build_module(label, nmax, QContext(q))
        return max(float(np.max(np.abs(getattr(mq, k) - m[k]))) for k in m) / (nmax + 1)

    qs = schedule.qs
    errors = np.array([dev(q) for q in qs])
    return {"relations": out,
            "convergence": LimitReport("module_matrices", qs, errors, None, dev(NEAR_ONE))}
