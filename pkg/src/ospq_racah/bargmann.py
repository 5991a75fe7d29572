"""Truncated unitary osp_q(1|2)-modules W^(eps, mu), the coproduct and the
Casimir operators on two- and three-fold tensor products.

Matrices act on column vectors; basis vector ``n`` of a module is index
``n``. Tensor products use ``np.kron`` with the ungraded product rule, so
the basis of a product is lexicographic in the factor indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import LemmaVerificationFailure
from .qkernel import as_context, q_number


@dataclass(frozen=True)
class ModuleLabel:
    epsilon: int
    mu: float

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        if not self.mu > 0:
            raise ValueError("mu must be positive")


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    A0: np.ndarray
    Aplus: np.ndarray
    Aminus: np.ndarray
    P: np.ndarray
    K: np.ndarray
    Kinv: np.ndarray

    @property
    def dim(self) -> int:
        return self.A0.shape[0]


@dataclass(frozen=True, eq=False)
class TruncatedModule(GeneratorSet):
    label: ModuleLabel = None
    nmax: int = 0
    Q: np.ndarray = None


def sigma(n, mu: float, ctx):
    """sigma_n = [n + mu]_q - (-1)^n [mu]_q."""
    n = np.asarray(n)
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    return q_number(n + mu, ctx) - sign * q_number(mu, ctx)


def build_module(label: ModuleLabel, nmax: int, ctx) -> TruncatedModule:
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    ctx = as_context(ctx)
    n = np.arange(nmax + 1)
    weight = n + label.mu + 0.5
    off = np.sqrt(sigma(np.arange(1, nmax + 1), label.mu, ctx))
    Aplus = np.diag(off, -1)
    parity = np.where(n % 2 == 0, 1.0, -1.0) * label.epsilon
    return TruncatedModule(
        A0=np.diag(weight),
        Aplus=Aplus,
        Aminus=Aplus.T.copy(),
        P=np.diag(parity),
        K=np.diag(ctx.q ** (weight / 2)),
        Kinv=np.diag(ctx.q ** (-weight / 2)),
        label=label,
        nmax=nmax,
        Q=-label.epsilon * q_number(label.mu, ctx) * np.eye(nmax + 1),
    )


def _maxabs(M) -> float:
    return float(np.max(np.abs(M))) if M.size else 0.0


def relative_residual(residual: np.ndarray, *terms: np.ndarray) -> float:
    """max|residual| divided by max(1, max|term|) over the terms that built it."""
    scale = max([1.0] + [_maxabs(t) for t in terms])
    return _maxabs(residual) / scale


def verify_module_relations(m: TruncatedModule, ctx) -> dict[str, float]:
    """Scale-relative residuals of the defining relations on rows/cols 0..nmax-1.

    The last row/column is excluded: there A- A+ misses sigma_{nmax+1}.
    """
    ctx = as_context(ctx)
    s = slice(0, m.nmax)
    A0, Ap, Am, P, K, Ki = m.A0, m.Aplus, m.Aminus, m.P, m.K, m.Kinv
    # [2 A0] in base q^1/2
    w = 2 * np.diag(A0)
    two_a0 = np.diag((ctx.sqrt_q**w - ctx.sqrt_q ** (-w)) / (ctx.sqrt_q - 1 / ctx.sqrt_q))
    rels = {
        "[A0,P]": (A0 @ P, -P @ A0),
        "{A+,P}": (Ap @ P, P @ Ap),
        "{A-,P}": (Am @ P, P @ Am),
        "[A0,A+]-A+": (A0 @ Ap, -Ap @ A0, -Ap),
        "[A0,A-]+A-": (A0 @ Am, -Am @ A0, Am),
        "{A+,A-}-[2A0]": (Ap @ Am, Am @ Ap, -two_a0),
        "KA+K^-1-q^1/2A+": (K @ Ap @ Ki, -ctx.sqrt_q * Ap),
        "KA-K^-1-q^-1/2A-": (K @ Am @ Ki, -Am / ctx.sqrt_q),
        "P^2-1": (P @ P, -np.eye(m.dim)),
        "A+^T-A-": (Ap.T, -Am),
    }
    return {k: relative_residual(sum(t)[s, s], *(x[s, s] for x in t)) for k, t in rels.items()}


def _casimir_terms(m: GeneratorSet, ctx) -> list[np.ndarray]:
    ctx = as_context(ctx)
    K2 = m.K @ m.K
    Ki2 = m.Kinv @ m.Kinv
    return [m.Aplus @ m.Aminus @ m.P, -(K2 / ctx.sqrt_q - ctx.sqrt_q * Ki2) / ctx.qdiff @ m.P]


def casimir_matrix(m: GeneratorSet, ctx) -> np.ndarray:
    """Q = [A+ A- - (q^-1/2 K^2 - q^1/2 K^-2) / (q - q^-1)] P."""
    return sum(_casimir_terms(m, ctx))


def casimir_residual(m: TruncatedModule, ctx) -> float:
    """Casimir matrix minus -eps [mu]_q, relative to the terms it cancels from."""
    terms = _casimir_terms(m, ctx)
    return relative_residual(sum(terms) - m.Q, *terms, m.Q)


def coproduct_matrices(mA: GeneratorSet, mB: GeneratorSet, ctx=None) -> GeneratorSet:
    """Images of the generators under the coproduct, on the tensor space."""
    kron = np.kron
    IA, IB = np.eye(mA.dim), np.eye(mB.dim)
    KP = mB.K @ mB.P
    return GeneratorSet(
        A0=kron(mA.A0, IB) + kron(IA, mB.A0),
        Aplus=kron(mA.Aplus, KP) + kron(mA.Kinv, mB.Aplus),
        Aminus=kron(mA.Aminus, KP) + kron(mA.Kinv, mB.Aminus),
        P=kron(mA.P, mB.P),
        K=kron(mA.K, mB.K),
        Kinv=kron(mA.Kinv, mB.Kinv),
    )


def coassociativity_residual(mA, mB, mC, ctx=None) -> dict[str, float]:
    """(Delta x 1) Delta(X) - (1 x Delta) Delta(X) for each generator,
    relative to the size of the entries."""
    left = coproduct_matrices(coproduct_matrices(mA, mB), mC)
    right = coproduct_matrices(mA, coproduct_matrices(mB, mC))
    out = {}
    for name in ("A0", "Aplus", "Aminus", "K", "P"):
        L, R = getattr(left, name), getattr(right, name)
        out[name] = relative_residual(L - R, L, R)
    return out


def _delta_q_terms(mA: TruncatedModule, mB: TruncatedModule, ctx) -> list[np.ndarray]:
    ctx = as_context(ctx)
    kron = np.kron
    KiP = mA.Kinv @ mA.P
    Ki2P = mA.Kinv @ mA.Kinv @ mA.P
    K2P = mB.K @ mB.K @ mB.P
    half = q_number(0.5, ctx)
    return [ctx.sqrt_q * kron(mA.Aminus @ KiP, mB.Aplus @ mB.K),
            -kron(mA.Aplus @ KiP, mB.Aminus @ mB.K) / ctx.sqrt_q,
            -half * kron(Ki2P, K2P),
            kron(mA.Q, K2P),
            kron(Ki2P, mB.Q)]


def delta_q_matrix(mA: TruncatedModule, mB: TruncatedModule, ctx) -> np.ndarray:
    """Delta(Q) from its closed five-term expression."""
    return sum(_delta_q_terms(mA, mB, ctx))


def delta_q_two_route_residual(mA: TruncatedModule, mB: TruncatedModule, ctx) -> float:
    """Five-term Delta(Q) against the Casimir formula evaluated on the
    coproduct generators, on basis vectors with n1 < nmaxA and n2 < nmaxB,
    relative to the largest term of either route."""
    ctx = as_context(ctx)
    dterms = _delta_q_terms(mA, mB, ctx)
    cterms = _casimir_terms(coproduct_matrices(mA, mB), ctx)
    idx = np.flatnonzero(np.logical_and(*np.meshgrid(np.arange(mA.dim) < mA.nmax,
                                                     np.arange(mB.dim) < mB.nmax,
                                                     indexing="ij")).ravel())
    sel = np.ix_(idx, idx)
    diff = sum(dterms) - sum(cterms)
    return relative_residual(diff[sel], *(t[sel] for t in dterms + cterms))

def tensor_levels(*dims: int) -> np.ndarray:
    """Total level n1 + n2 + ... of every lexicographic tensor basis vector."""
    grids = np.meshgrid(*[np.arange(d) for d in dims], indexing="ij")
    return sum(grids).ravel()


def lemma_targets(la: ModuleLabel, lb: ModuleLabel, n: int, ctx) -> np.ndarray:
    """theta_k = (-1)^(k+1) eps1 eps2 [k + mu1 + mu2 + 1/2]_q, k = 0..n."""
    k = np.arange(n + 1)
    sign = np.where(k % 2 == 0, -1.0, 1.0) * la.epsilon * lb.epsilon
    return sign * q_number(k + la.mu + lb.mu + 0.5, ctx)


def un_spectrum(mA: TruncatedModule, mB: TruncatedModule, n: int, ctx,
                tol: float = 1e-9) -> np.ndarray:
    """Sorted eigenvalues of Delta(Q) restricted to U_n (level n of the product)."""
    if n > min(mA.nmax, mB.nmax):
        raise ValueError("U_n must lie inside both truncations")
    DQ = delta_q_matrix(mA, mB, ctx)
    idx = np.flatnonzero(tensor_levels(mA.dim, mB.dim) == n)
    block = DQ[np.ix_(idx, idx)]
    vals = np.sort(np.linalg.eigvalsh(0.5 * (block + block.T)))
    target = np.sort(lemma_targets(mA.label, mB.label, n, ctx))
    if np.max(np.abs(vals - target) / (1 + np.abs(target))) > tol:
        raise LemmaVerificationFailure("Lemma verification failure")
    return vals


@dataclass(frozen=True, eq=False)
class TensorBlock:
    labels: tuple
    m: int
    basis: list
    Q12: np.ndarray
    Q23: np.ndarray
    Qtot: np.ndarray
    E: float

    @property
    def dim(self) -> int:
        return len(self.basis)


def total_casimir(m1, m2, m3, ctx) -> np.ndarray:
    """Total Casimir on W1 (x) W2 (x) W3 from its closed expression."""
    ctx = as_context(ctx)
    kron = np.kron
    I2 = np.eye(m2.dim)
    KiP = m1.Kinv @ m1.P
    Ki2P = m1.Kinv @ m1.Kinv @ m1.P
    K2P = m3.K @ m3.K @ m3.P
    return (ctx.sqrt_q * kron(kron(m1.Aminus @ KiP, I2), m3.Aplus @ m3.K)
            - kron(kron(m1.Aplus @ KiP, I2), m3.Aminus @ m3.K) / ctx.sqrt_q
            - kron(kron(Ki2P, m2.Q), K2P)
            + kron(delta_q_matrix(m1, m2, ctx), K2P)
            + kron(Ki2P, delta_q_matrix(m2, m3, ctx)))


def tensor3_block(labels, m: int, ctx, nmax: int | None = None) -> TensorBlock:
    """Q12, Q23 and the total Casimir restricted to the E-eigenspace of level m."""
    nmax = max(m, 1) if nmax is None else nmax
    if nmax < m:
        raise ValueError("each factor must be truncated at nmax >= m")
    mods = [build_module(lab, nmax, ctx) for lab in labels]
    d = nmax + 1
    idx = np.flatnonzero(tensor_levels(d, d, d) == m)
    sel = np.ix_(idx, idx)
    Q12 = np.kron(delta_q_matrix(mods[0], mods[1], ctx), np.eye(d))[sel]
    Q23 = np.kron(np.eye(d), delta_q_matrix(mods[1], mods[2], ctx))[sel]
    Qtot = total_casimir(*mods, ctx)[sel]
    basis = [t for t in product(range(d), repeat=3) if sum(t) == m]
    E = m + sum(lab.mu for lab in labels) + 1.5
    return TensorBlock(tuple(labels), m, basis, Q12, Q23, Qtot, E)


# --------------------------------------------------------------------------
# Bargmann z-realization on monomials

def _monomials_to_basis(poly: dict[int, float], label: ModuleLabel, ctx) -> dict[int, float]:
    out = {}
    for k, coef in poly.items():
        norm = np.sqrt(np.prod(sigma(np.arange(1, k + 1), label.mu, ctx))) if k else 1.0
        if coef != 0.0:
            out[k] = out.get(k, 0.0) + coef * norm
    return out


def bargmann_apply(generator: str, n: int, label: ModuleLabel, ctx) -> dict[int, float]:
    """Apply a generator of the z-realization to e_n; result in the e_k basis.

    ``generator`` is one of ``A0``, ``A+``, ``A-``, ``P``, ``K``.  Operators
    act on the monomial ``z^n`` literally (scaling, reflection, division by z).
    """
    ctx = as_context(ctx)
    q, mu, eps = ctx.q, label.mu, label.epsilon
    norm_n = np.sqrt(np.prod(sigma(np.arange(1, n + 1), mu, ctx))) if n else 1.0
    c = 1.0 / norm_n  # e_n = c z^n
    refl = (-1.0) ** n  # R_z z^n = (-z)^n
    if generator == "A+":
        poly = {n + 1: c}
    elif generator == "A-":
        if n == 0:
            return {}
        # q^mu (T_q - R)/((q - q^-1) z) - q^-mu (T_q^-1 - R)/((q - q^-1) z)
        coef = (q**mu * (q**n - refl) - q ** (-mu) * (q ** (-n) - refl)) / (q - 1 / q)
        poly = {n - 1: c * coef}
    elif generator == "A0":
        poly = {n: c * (n + mu + 0.5)}
    elif generator == "P":
        poly = {n: c * eps * refl}
    elif generator == "K":
        poly = {n: c * q ** ((mu + 0.5) / 2) * q ** (n / 2)}
    else:
        raise ValueError(f"unknown generator {generator!r}")
    return _monomials_to_basis(poly, label, ctx)
