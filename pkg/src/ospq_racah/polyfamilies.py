"""The three polynomial families.

* ``Q_n(x; a, b, c, d | q)`` -- q-Bannai-Ito polynomials with base p = -q,
  variable ``x = z - 1/z`` (functions take ``z``).
* ``R_n(mu(s); alpha, beta, gamma, delta | p)`` -- p-Racah polynomials on the
  lattice ``mu(s) = p**-s + gamma*delta*p**(s+1)``.
* ``B_n(x)`` -- classical (monic) Bannai-Ito polynomials.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateParameters, RecurrenceBreakdown
from .qkernel import QContext, QParam, as_context, phi43_terminating, q_pochhammer


@dataclass(frozen=True)
class ABCDParams:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            if getattr(self, name) == 0.0:
                raise DegenerateParameters(f"parameter {name} must be nonzero")

    @property
    def abcd(self) -> float:
        return self.a * self.b * self.c * self.d


@dataclass(frozen=True)
class PRacahParams:
    alpha: float
    beta: float
    gamma: float
    delta: float
    N: int


@dataclass(frozen=True)
class ClassicalBIParams:
    rho1: float
    rho2: float
    r1: float
    r2: float
    kappa: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "kappa", self.rho1 + self.rho2 - self.r1 - self.r2 + 0.5)


# --------------------------------------------------------------------------
# q-Bannai-Ito

def qbi_recurrence_coeffs(n: int, params: ABCDParams, ctx) -> tuple[float, float]:
    """Recurrence coefficients (A_n, C_n) with base p = -q."""
    p = as_context(ctx).p
    a, b, c, d = params.a, params.b, params.c, params.d
    abcd = a * b * c * d
    den_a = a * (1 - abcd * p ** (2 * n - 1)) * (1 - abcd * p ** (2 * n))
    den_c = (1 - abcd * p ** (2 * n - 2)) * (1 - abcd * p ** (2 * n - 1))
    if den_a == 0.0 or den_c == 0.0:
        raise DegenerateParameters("degenerate parameter set")
    A = -((1 + a * b * p**n) * (1 - a * c * p**n) * (1 - a * d * p**n)
          * (1 - abcd * p ** (n - 1))) / den_a
    C = (a * (1 - p**n) * (1 - b * c * p ** (n - 1)) * (1 - b * d * p ** (n - 1))
         * (1 + c * d * p ** (n - 1))) / den_c
    return A, C


def qbi_eval_all(nmax: int, z, params: ABCDParams, ctx) -> np.ndarray:
    """Q_0 .. Q_nmax at ``z`` by forward recurrence; shape (nmax+1,) + shape(z)."""
    z = np.asarray(z, dtype=float)
    x = z - 1.0 / z
    a = params.a
    out = np.empty((nmax + 1,) + z.shape)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    out[0] = cur
    for k in range(nmax):
        A, C = qbi_recurrence_coeffs(k, params, ctx)
        if A == 0.0:
            raise RecurrenceBreakdown("recurrence breakdown")
        prev, cur = cur, ((x - (a - 1 / a - A - C)) * cur - C * prev) / A
        out[k + 1] = cur
    return out


def qbi_eval_recurrence(n: int, z, params: ABCDParams, ctx):
    """Q_n at x = z - 1/z by forward recurrence (seed Q_0 = 1, Q_-1 = 0)."""
    if np.any(np.asarray(z) == 0):
        raise ValueError("z must be nonzero")
    out = qbi_eval_all(n, z, params, ctx)[n]
    return float(out) if out.ndim == 0 else out


def qbi_eval_hypergeometric(n: int, z, params: ABCDParams, ctx):
    """Q_n as the terminating 4phi3 (p^-n, abcd p^(n-1), -az, a/z; -ab, ac, ad; p, p).

    ``z`` may be an array; all points share one summation pass.
    """
    p = as_context(ctx).p
    z = np.asarray(z, dtype=float)
    if np.any(z == 0):
        raise ValueError("z must be nonzero")
    z = float(z) if z.ndim == 0 else z
    a, b, c, d = params.a, params.b, params.c, params.d
    num = [QParam(power=-n), QParam((a, b, c, d), power=n - 1),
           QParam((-a, z)), QParam((a,), (z,))]
    den = [QParam((-a, b)), QParam((a, c)), QParam((a, d))]
    return phi43_terminating(num, den, p, p, n)


# --------------------------------------------------------------------------
# p-Racah

def racah_lattice(s: int, params: PRacahParams, ctx) -> float:
    p = as_context(ctx).p
    return p ** (-s) + params.gamma * params.delta * p ** (s + 1)


def pracah_eval(n: int, s: int, params: PRacahParams, ctx) -> float:
    """R_n(mu(s)) as a terminating 4phi3 with base p = -q."""
    if not (0 <= n <= params.N and 0 <= s <= params.N):
        raise ValueError("need 0 <= n, s <= N")
    p = as_context(ctx).p
    al, be, ga, de, N = params.alpha, params.beta, params.gamma, params.delta, params.N
    if abs(al * p - p ** (-N)) <= 1e-10 * abs(p ** (-N)):
        # truncation alpha p = p^-N: rebuild alpha exactly, the sum cancels
        # far too strongly to tolerate a rounded alpha
        ab, ap = QParam((be,), power=n - N), QParam(power=-N)
    else:
        ab, ap = QParam((al, be), power=n + 1), QParam((al,), power=1)
    num = [QParam(power=-n), ab, QParam(power=-s), QParam((ga, de), power=s + 1)]
    den = [ap, QParam((be, de), power=1), QParam((ga,), power=1)]
    return phi43_terminating(num, den, p, p, n)


def pracah_leading_coeff(n: int, params: PRacahParams, ctx) -> float:
    """Leading coefficient of R_n as a polynomial in mu(s)."""
    p = as_context(ctx).p
    al, be, ga, de = params.alpha, params.beta, params.gamma, params.delta
    # (p^-s, gd p^(s+1); p)_k = prod_j (1 + gd p^(2j+1) - p^j mu(s))
    top = q_pochhammer([p ** (-n), al * be * p ** (n + 1)], p, n)
    bot = q_pochhammer([al * p, be * de * p, ga * p, p], p, n)
    lead = 1.0
    for j in range(n):
        lead *= -(p**j)
    return top / bot * p**n * lead


def pracah_weight(s: int, params: PRacahParams, ctx) -> float:
    p = as_context(ctx).p
    al, be, ga, de = params.alpha, params.beta, params.gamma, params.delta
    num = q_pochhammer([al * p, be * de * p, ga * p, ga * de * p], p, s)
    den = q_pochhammer([p, ga * de * p / al, ga * p / be, de * p], p, s)
    tail = (al * be * p) ** s * (1 - ga * de * p)
    if den == 0.0 or tail == 0.0:
        raise DegenerateParameters("degenerate weight")
    return num / den * (1 - ga * de * p ** (2 * s + 1)) / tail


def pracah_norm(n: int, params: PRacahParams, ctx) -> float:
    if not 0 <= n <= params.N:
        raise ValueError("need 0 <= n <= N")
    p = as_context(ctx).p
    al, be, ga, de, N = params.alpha, params.beta, params.gamma, params.delta, params.N
    head_den = q_pochhammer([ga * p / be, de * p], p, N) * (1 - be * p ** (2 * n - N))
    tail_den = q_pochhammer([be * p ** (-N), be * de * p, ga * p, p ** (-N)], p, n)
    if head_den == 0.0 or tail_den == 0.0:
        raise DegenerateParameters("degenerate normalization")
    head = q_pochhammer([1 / be, ga * de * p * p], p, N) * (1 - be * p ** (-N)) * (ga * de * p) ** n
    tail = q_pochhammer([p, be * p, be / ga * p ** (-N), p ** (-N) / de], p, n)
    return head / head_den * tail / tail_den


def monic_normalize(rep_coeffs: Sequence[tuple[float, float]], a: float) -> list[tuple[float, float]]:
    """(A_n, C_n) -> (-a A_n, -a C_n) for the monic recurrence in mu(s)."""
    return [(-a * A, -a * C) for A, C in rep_coeffs]


def monic_recurrence_residual(G: np.ndarray, lattice: np.ndarray, checks, const: float) -> float:
    """Max residual of mu G_n = G_{n+1} + (const - Ac_n - Cc_n) G_n + Ac_{n-1} Cc_n G_{n-1}.

    ``G`` has shape (n_degrees, n_points); ``checks`` are the monic (Ac, Cc).
    """
    worst = 0.0
    for n in range(G.shape[0] - 1):
        Ac, Cc = checks[n]
        lower = checks[n - 1][0] * Cc * G[n - 1] if n > 0 else 0.0
        rhs = G[n + 1] + (const - Ac - Cc) * G[n] + lower
        scale = np.maximum(1.0, np.abs(lattice * G[n]))
        worst = max(worst, float(np.max(np.abs(lattice * G[n] - rhs) / scale)))
    return worst


# --------------------------------------------------------------------------
# classical Bannai-Ito

def classical_bi_coeffs(n: int, params: ClassicalBIParams) -> tuple[float, float]:
    r1, r2, rho1, rho2, kappa = params.r1, params.r2, params.rho1, params.rho2, params.kappa
    da, dc = 4 * (n + kappa + 0.5), 4 * (n + kappa - 0.5)
    if da == 0.0 or dc == 0.0:
        raise DegenerateParameters("degenerate classical parameters")
    if n % 2 == 0:
        A = (n + 2 * rho1 - 2 * r1 + 1) * (n + 2 * rho1 - 2 * r2 + 1) / da
        C = -n * (n - 2 * r1 - 2 * r2) / dc
    else:
        A = (n + 2 * kappa) * (n + 2 * rho1 + 2 * rho2 + 1) / da
        C = -(n + 2 * rho2 - 2 * r1) * (n + 2 * rho2 - 2 * r2) / dc
    return A, C


def classical_bi_eval(n: int, x, params: ClassicalBIParams):
    """Monic B_n(x) by forward recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    A_prev = 0.0
    for k in range(n):
        A, C = classical_bi_coeffs(k, params)
        prev, cur = cur, (x - (params.rho1 - A - C)) * cur - A_prev * C * prev
        A_prev = A
    return float(cur) if cur.ndim == 0 else cur
