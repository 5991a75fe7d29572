"""The q-deformed Bannai-Ito algebra {I_i, I_j}_q = I_k + iota_k and its
(N+1)-dimensional tridiagonal representations.

I3 = -Q12 is diagonal with eigenvalues ``lambda_n``; I1 = -Q23 is the
symmetric tridiagonal matrix with off-diagonal ``U`` and diagonal ``V``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bargmann import ModuleLabel, relative_residual
from .errors import NonUnitarizable, ReducibleRepresentation
from .polyfamilies import ABCDParams, qbi_recurrence_coeffs
from .qkernel import as_context, q_number


@dataclass(frozen=True)
class RacahInstance:
    labels: tuple
    N: int
    q: float
    eps_N: int
    mu_N: float
    tau: tuple
    tau_N: float
    iota: tuple

    @property
    def mu(self) -> tuple:
        return tuple(lab.mu for lab in self.labels)

    @property
    def eps(self) -> tuple:
        return tuple(lab.epsilon for lab in self.labels)


def build_instance(labels, N: int, ctx) -> RacahInstance:
    if N < 0:
        raise ValueError("N must be non-negative")
    ctx = as_context(ctx)
    labels = tuple(labels)
    (e1, m1), (e2, m2), (e3, m3) = ((lab.epsilon, lab.mu) for lab in labels)
    eps_N = (-1) ** N * e1 * e2 * e3
    mu_N = N + m1 + m2 + m3 + 1
    tau = tuple(-lab.epsilon * q_number(lab.mu, ctx) for lab in labels)
    tau_N = -eps_N * q_number(mu_N, ctx)
    t1, t2, t3 = tau
    s = ctx.qsym
    iota = (s * (tau_N * t1 + t2 * t3), s * (tau_N * t2 + t3 * t1), s * (tau_N * t3 + t1 * t2))
    return RacahInstance(labels, N, ctx.q, eps_N, mu_N, tau, tau_N, iota)


def permuted_instance(inst: RacahInstance, ctx) -> RacahInstance:
    """Cyclic relabelling (1, 2, 3) -> (2, 3, 1)."""
    l1, l2, l3 = inst.labels
    return build_instance((l2, l3, l1), inst.N, ctx)


def abcd_params(inst: RacahInstance, ctx) -> ABCDParams:
    q = as_context(ctx).q
    (e1, m1), (e2, m2), (e3, m3) = ((lab.epsilon, lab.mu) for lab in inst.labels)
    eN, muN = inst.eps_N, inst.mu_N
    return ABCDParams(
        a=e2 * e3 * q ** (m2 + m3 + 0.5),
        b=-e1 * eN * q ** (m1 - muN + 0.5),
        c=-e1 * eN * q ** (m1 + muN + 0.5),
        d=e2 * e3 * q ** (m2 - m3 + 0.5),
    )


def intermediate_eigenvalues(inst: RacahInstance, ctx, pair: str = "12") -> np.ndarray:
    """-tau_ij(k) = (-1)^k eps_i eps_j [k + mu_i + mu_j + 1/2]_q, k = 0..N."""
    i, j = {"12": (0, 1), "23": (1, 2)}[pair]
    li, lj = inst.labels[i], inst.labels[j]
    k = np.arange(inst.N + 1)
    sign = np.where(k % 2 == 0, 1.0, -1.0) * li.epsilon * lj.epsilon
    return sign * q_number(k + li.mu + lj.mu + 0.5, ctx)


@dataclass(frozen=True, eq=False)
class TridiagonalRep:
    N: int
    lam: np.ndarray
    U: np.ndarray  # length N + 2, U[0] = U[N+1] = 0
    V: np.ndarray
    iota: tuple
    tau: tuple
    tau_N: float
    A: np.ndarray
    C: np.ndarray
    a: float

    def I3(self) -> np.ndarray:
        return np.diag(self.lam)

    def I1(self) -> np.ndarray:
        off = self.U[1:self.N + 1]
        return np.diag(self.V) + np.diag(off, 1) + np.diag(off, -1)


def build_rep(inst: RacahInstance, ctx) -> TridiagonalRep:
    ctx = as_context(ctx)
    N = inst.N
    prm = abcd_params(inst, ctx)
    AC = np.array([qbi_recurrence_coeffs(n, prm, ctx) for n in range(N + 1)])
    A, C = AC[:, 0], AC[:, 1]
    prod = A[:-1] * C[1:]
    if np.any(prod < 0):
        raise NonUnitarizable("non-unitarizable parameter set")
    U = np.zeros(N + 2)
    # positive root: |q - q^-1|^-1 fixes the phase so that U_n > 0
    U[1:N + 1] = np.sqrt(prod) / abs(ctx.qdiff)
    if N and np.any(U[1:N + 1] == 0):
        raise ReducibleRepresentation("reducible representation")
    a = prm.a
    V = (a - 1 / a - A - C) / ctx.qdiff
    lam = intermediate_eigenvalues(inst, ctx, "12")
    return TridiagonalRep(N, lam, U, V, inst.iota, inst.tau, inst.tau_N, A, C, a)


def permuted_rep(inst: RacahInstance, ctx) -> TridiagonalRep:
    """Representation in the I1 eigenbasis: diagonal entries are -tau_23(s)."""
    return build_rep(permuted_instance(inst, ctx), ctx)


def v_quotient(rep: TridiagonalRep, ctx) -> np.ndarray:
    """V_n from the quotient form (iota1 + (q^1/2+q^-1/2) iota2 lam) / (lam^2 (2+q+q^-1) - 1)."""
    ctx = as_context(ctx)
    q, lam = ctx.q, rep.lam
    i1, i2, _ = rep.iota
    return (i1 + ctx.qsym * i2 * lam) / (lam**2 * (2 + q + 1 / q) - 1)


def q_anticommutator(A, B, ctx):
    sq = as_context(ctx).sqrt_q
    return sq * A @ B + B @ A / sq


def i2_matrix(rep: TridiagonalRep, ctx) -> np.ndarray:
    """I2 := {I3, I1}_q - (q^1/2 + q^-1/2)(tau3 tau1 + tau2 tau_N)."""
    ctx = as_context(ctx)
    t1, t2, t3 = rep.tau
    Id = np.eye(rep.N + 1)
    return q_anticommutator(rep.I3(), rep.I1(), ctx) - ctx.qsym * (t3 * t1 + t2 * rep.tau_N) * Id


def check_qbi_relations(rep: TridiagonalRep, ctx) -> dict[str, float]:
    """Scale-relative residuals of the three q-anticommutator relations and
    of the two cubic relations obtained by eliminating I2."""
    ctx = as_context(ctx)
    sq = ctx.sqrt_q
    I1, I3 = rep.I1(), rep.I3()
    I2 = i2_matrix(rep, ctx)
    Id = np.eye(rep.N + 1)
    i1, i2, i3 = rep.iota
    qq = ctx.q + 1 / ctx.q
    rels = {
        "{I3,I1}_q-I2-iota2": (sq * I3 @ I1, I1 @ I3 / sq, -I2, -i2 * Id),
        "{I1,I2}_q-I3-iota3": (sq * I1 @ I2, I2 @ I1 / sq, -I3, -i3 * Id),
        "{I2,I3}_q-I1-iota1": (sq * I2 @ I3, I3 @ I2 / sq, -I1, -i1 * Id),
        "rel_A": (I1 @ I1 @ I3, qq * I1 @ I3 @ I1, I3 @ I1 @ I1, -I3,
                  -ctx.qsym * i2 * I1, -i3 * Id),
        "rel_B": (I3 @ I3 @ I1, qq * I3 @ I1 @ I3, I1 @ I3 @ I3, -I1,
                  -ctx.qsym * i2 * I3, -i1 * Id),
    }
    return {k: relative_residual(sum(t), *t) for k, t in rels.items()}


def casimir_value(tau, tau_N: float, ctx) -> float:
    q = as_context(ctx).q
    t1, t2, t3 = tau
    return (-(q - 1 / q) ** 2 * t1 * t2 * t3 * tau_N + t1**2 + t2**2 + t3**2 + tau_N**2
            - q / (1 + q) ** 2)


def casimir_rep(rep: TridiagonalRep, ctx) -> tuple[np.ndarray, float]:
    ctx = as_context(ctx)
    q = ctx.q
    I1, I3 = rep.I1(), rep.I3()
    I2 = i2_matrix(rep, ctx)
    i1, i2, i3 = rep.iota
    C = ((q**-0.5 - q**1.5) * I1 @ I2 @ I3 + q * I1 @ I1 + I2 @ I2 / q + q * I3 @ I3
         - (1 - q) * i1 * I1 - (1 - 1 / q) * i2 * I2 - (1 - q) * i3 * I3)
    return C, casimir_value(rep.tau, rep.tau_N, ctx)


def casimir_residuals(rep: TridiagonalRep, ctx) -> dict[str, float]:
    """C - value*Id and [C, I_k], each relative to max(1, |value|)."""
    C, value = casimir_rep(rep, ctx)
    scale = max(1.0, abs(value))
    I1, I3 = rep.I1(), rep.I3()
    I2 = i2_matrix(rep, ctx)
    out = {"C-value": float(np.max(np.abs(C - value * np.eye(rep.N + 1)))) / scale}
    for name, M in (("[C,I1]", I1), ("[C,I2]", I2), ("[C,I3]", I3)):
        out[name] = relative_residual(C @ M - M @ C, C @ M, M @ C)
    return out


def un_squared_recurrence_check(rep: TridiagonalRep, inst: RacahInstance, ctx) -> np.ndarray:
    """Per-n relative residual of the two-term recurrence satisfied by U_n^2."""
    ctx = as_context(ctx)
    qq = ctx.q + 1 / ctx.q
    lam = np.concatenate([[0.0], rep.lam, [0.0]])  # lam[-1] and lam[N+1] multiply U = 0
    U, V = rep.U, rep.V
    _, i2, i3 = rep.iota
    out = np.empty(rep.N + 1)
    for n in range(rep.N + 1):
        ln = lam[n + 1]
        terms = [(2 * ln + qq * lam[n + 2]) * U[n + 1] ** 2,
                 (2 * ln + qq * ln) * V[n] ** 2,
                 (2 * ln + qq * lam[n]) * U[n] ** 2 if n > 0 else 0.0,
                 -ln, -ctx.qsym * i2 * V[n], -i3]
        out[n] = abs(sum(terms)) / max(1.0, max(abs(t) for t in terms))
    return out


def eq1_certificate(rep: TridiagonalRep, ctx) -> float:
    """min |lam_n^2 + (q+1/q) lam_n lam_k + lam_k^2 - 1| over |n - k| >= 2.

    Nonzero means the I1 matrix in the I3 eigenbasis must be tridiagonal.
    """
    ctx = as_context(ctx)
    lam = rep.lam
    qq = ctx.q + 1 / ctx.q
    best = np.inf
    for n in range(rep.N + 1):
        for k in range(rep.N + 1):
            if abs(n - k) >= 2:
                v = lam[n] ** 2 + qq * lam[n] * lam[k] + lam[k] ** 2 - 1
                best = min(best, abs(v))
    return float(best)


def labels_from(mu, eps) -> tuple:
    return tuple(ModuleLabel(int(e), float(m)) for m, e in zip(mu, eps))
