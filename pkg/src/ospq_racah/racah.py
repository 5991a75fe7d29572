"""Racah coefficients of osp_q(1|2), three ways.

* :func:`racah_closed_form` -- weight, norm and p-Racah polynomial.
* :func:`racah_by_diagonalization` -- eigenvectors of the tridiagonal I1.
* :func:`racah_by_tensor` -- intermediate Casimirs on a triple tensor block.

Tables are indexed ``W[s, n]`` and brought to one gauge by
:func:`canonical_signs`: row signs make ``W[s, 0] > 0``, then column signs
make ``sign W[0, n] = (-1)**n``. The closed form is already in this gauge.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bargmann import tensor3_block
from .errors import NonGenericSpectrum, SpectralMismatch
from .polyfamilies import PRacahParams, pracah_eval, pracah_norm, pracah_weight
from .qbialgebra import RacahInstance, build_rep, intermediate_eigenvalues
from .qkernel import as_context

MATCH_TOL = 1e-6
GENERIC_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class RacahTable:
    N: int
    W: np.ndarray
    method: str

    def __post_init__(self):
        if self.W.shape != (self.N + 1, self.N + 1):
            raise ValueError("table must be (N+1) x (N+1)")


def para_map(inst: RacahInstance, ctx) -> PRacahParams:
    q = as_context(ctx).q
    m1, m2, m3 = inst.mu
    muN, N = inst.mu_N, inst.N
    sgn = -((-1) ** N)
    return PRacahParams(
        alpha=sgn * q ** (m1 + m2 + m3 - muN),
        beta=sgn * q ** (m1 + m2 - m3 + muN),
        gamma=-(q ** (2 * m2)),
        delta=-(q ** (2 * m3)),
        N=N,
    )


def racah_closed_form(inst: RacahInstance, n: int, s: int, ctx) -> float:
    """(-1)^n sqrt(Omega_s / h_n) R_n(mu(s))."""
    prm = para_map(inst, ctx)
    ratio = pracah_weight(s, prm, ctx) / pracah_norm(n, prm, ctx)
    return (-1) ** n * np.sqrt(ratio) * pracah_eval(n, s, prm, ctx)


def racah_table_closed(inst: RacahInstance, ctx) -> RacahTable:
    N = inst.N
    W = np.array([[racah_closed_form(inst, n, s, ctx) for n in range(N + 1)]
                  for s in range(N + 1)])
    return RacahTable(N, W, "closed")


def canonical_signs(W: np.ndarray) -> np.ndarray:
    W = W * np.where(W[:, [0]] < 0, -1.0, 1.0)
    target = (-1.0) ** np.arange(W.shape[1])
    return W * np.where(np.sign(W[[0], :]) == target, 1.0, -1.0)


def _check_generic(targets: np.ndarray):
    if len(targets) > 1:
        gaps = np.abs(targets[:, None] - targets[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() < GENERIC_TOL:
            raise NonGenericSpectrum("non-generic spectrum; perturb mu parameters")


def _match(values: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Index into ``values`` of the eigenvalue matching each target."""
    order = np.empty(len(targets), dtype=int)
    for k, t in enumerate(targets):
        j = int(np.argmin(np.abs(values - t)))
        if abs(values[j] - t) > MATCH_TOL * (1 + abs(t)):
            raise SpectralMismatch("spectral mismatch")
        order[k] = j
    if len(set(order)) != len(order):
        raise SpectralMismatch("spectral mismatch")
    return order


def racah_by_diagonalization(inst: RacahInstance, ctx, canonical: bool = True) -> RacahTable:
    rep = build_rep(inst, ctx)
    targets = intermediate_eigenvalues(inst, ctx, "23")
    _check_generic(targets)
    _check_generic(rep.lam)
    vals, vecs = np.linalg.eigh(rep.I1())
    order = _match(vals, targets)
    W = vecs[:, order].T
    W = W * np.where(W[:, [0]] < 0, -1.0, 1.0)
    return RacahTable(inst.N, canonical_signs(W) if canonical else W, "diag")


def racah_by_tensor(inst: RacahInstance, ctx, canonical: bool = True) -> RacahTable:
    """Overlaps between the Q12 and Q23 eigenbases inside the tau_N
    eigenspace of the total Casimir on the level-N block."""
    N = inst.N
    block = tensor3_block(inst.labels, N, ctx)
    qt = (block.Qtot + block.Qtot.T) / 2
    w, v = np.linalg.eigh(qt)
    keep = np.abs(w - inst.tau_N) < MATCH_TOL * (1 + abs(inst.tau_N))
    if keep.sum() != N + 1:
        raise SpectralMismatch("spectral mismatch")
    V = v[:, keep]
    t12 = -intermediate_eigenvalues(inst, ctx, "12")
    t23 = -intermediate_eigenvalues(inst, ctx, "23")
    _check_generic(t12)
    _check_generic(t23)
    a, b = np.linalg.eigh(V.T @ block.Q12 @ V)
    c, d = np.linalg.eigh(V.T @ block.Q23 @ V)
    bn = b[:, _match(a, t12)]
    ds = d[:, _match(c, t23)]
    W = ds.T @ bn
    # overlaps with the n = 0 vector positive
    W = W * np.where(W[:, [0]] < 0, -1.0, 1.0)
    return RacahTable(N, canonical_signs(W) if canonical else W, "tensor")


def racah_table(inst: RacahInstance, ctx, method: str = "closed") -> RacahTable:
    builders = {"closed": racah_table_closed, "diag": racah_by_diagonalization,
                "tensor": racah_by_tensor}
    if method not in builders:
        raise ValueError(f"unknown method {method!r}")
    return builders[method](inst, ctx)


def orthogonality_check(table: RacahTable) -> float:
    W = table.W
    Id = np.eye(table.N + 1)
    return float(max(np.max(np.abs(W.T @ W - Id)), np.max(np.abs(W @ W.T - Id))))


def recurrence1_residual(table: RacahTable, inst: RacahInstance, ctx) -> float:
    """Residual of the three-term recurrence in n for G_n(s) = W(s,n)/W(s,0),
    with left side (-1)^s (a q^s - a^-1 q^-s).

    Off-diagonal coefficients enter as (q - 1/q) U_n, which carries the sign
    fixed by the table's column gauge; the check is sign-agnostic by
    comparing against the raw diagonalization gauge.
    """
    ctx = as_context(ctx)
    rep = build_rep(inst, ctx)
    N = inst.N
    G = table.W / table.W[:, [0]]
    # column gauge relative to the U_n > 0 eigenvector gauge
    raw = racah_by_diagonalization(inst, ctx, canonical=False).W
    gauge = np.sign(raw[0] * table.W[0])
    Gr = G * gauge
    s = np.arange(N + 1)
    q, a = ctx.q, rep.a
    lhs = (-1.0) ** s * (a * q**s - q ** (-s) / a)
    diag = a - 1 / a - rep.A - rep.C
    off = ctx.qdiff * rep.U  # (q - 1/q) U_n = -sqrt(A_{n-1} C_n)
    worst = 0.0
    for n in range(N + 1):
        rhs = diag[n] * Gr[:, n]
        if n < N:
            rhs = rhs + off[n + 1] * Gr[:, n + 1]
        if n > 0:
            rhs = rhs + off[n] * Gr[:, n - 1]
        res = np.abs(lhs * Gr[:, n] - rhs) / np.maximum(1.0, np.abs(lhs * Gr[:, n]))
        worst = max(worst, float(res.max()))
    return worst


def weight_identification(table: RacahTable, inst: RacahInstance, ctx) -> float:
    """max |W(s,0)^2 - Omega_s / sum_t Omega_t|."""
    prm = para_map(inst, ctx)
    om = np.array([pracah_weight(s, prm, ctx) for s in range(inst.N + 1)])
    return float(np.max(np.abs(table.W[:, 0] ** 2 - om / om.sum())))


def row_polynomial_residual(table: RacahTable, inst: RacahInstance, ctx) -> float:
    """W(s,n)/W(s,0) is a degree-n polynomial in (-1)^s (a q^s - a^-1 q^-s)."""
    ctx = as_context(ctx)
    a = build_rep(inst, ctx).a
    N = inst.N
    s = np.arange(N + 1)
    x = (-1.0) ** s * (a * ctx.q**s - ctx.q ** (-s) / a)
    G = table.W / table.W[:, [0]]
    xs = x / np.max(np.abs(x))
    worst = 0.0
    for n in range(N):
        # degree-n least-squares fit over all N+1 nodes is exact for a
        # degree-n polynomial and leaves a residual otherwise
        fit = np.polynomial.Polynomial.fit(xs, G[:, n], n)
        scale = max(1.0, float(np.max(np.abs(G[:, n]))))
        worst = max(worst, float(np.max(np.abs(fit(xs) - G[:, n]))) / scale)
    return worst

__all__ = [
    "RacahTable", "para_map", "racah_closed_form", "racah_table_closed", "racah_table",
    "racah_by_diagonalization", "racah_by_tensor", "canonical_signs",
    "orthogonality_check", "recurrence1_residual", "weight_identification",
    "row_polynomial_residual",
]
