import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ospq_racah import QContext, q_number
from ospq_racah import bargmann as bg
from ospq_racah.bargmann import ModuleLabel
from ospq_racah.errors import LemmaVerificationFailure

labels = st.builds(ModuleLabel, st.sampled_from([1, -1]), st.floats(0.05, 1.5))
qs = st.sampled_from([0.3, 0.5, 0.7, 0.9])


def _interior(m):
    return np.flatnonzero(
        np.logical_and(*np.meshgrid(np.arange(m.dim) < m.nmax, np.arange(m.dim) < m.nmax,
                                    indexing="ij")).ravel())


def test_label_validation():
    with pytest.raises(ValueError):
        ModuleLabel(0, 0.5)
    with pytest.raises(ValueError):
        ModuleLabel(1, 0.0)
    with pytest.raises(ValueError):
        bg.build_module(ModuleLabel(1, 0.5), 0, 0.7)


def test_sigma_values(ctx):
    assert bg.sigma(0, 0.5, ctx) == 0.0
    q = 0.7
    s1 = (q**1.5 - q**-1.5) / (q - 1 / q) + (q**0.5 - q**-0.5) / (q - 1 / q)
    assert bg.sigma(1, 0.5, ctx) == pytest.approx(s1, rel=1e-15)
    assert np.all(bg.sigma(np.arange(1, 40), 0.5, ctx) > 0)


@given(label=labels, q=qs)
@settings(max_examples=30)
def test_module_shapes_and_parity(label, q):
    m = bg.build_module(label, 12, q)
    n = np.arange(13)
    np.testing.assert_array_equal(np.diag(m.P), label.epsilon * (-1.0) ** n)
    np.testing.assert_array_equal(m.Aplus.T, m.Aminus)
    assert np.allclose(np.triu(m.Aplus), 0) and np.allclose(np.tril(m.Aminus), 0)
    np.testing.assert_allclose(np.diag(m.K) * np.diag(m.Kinv), 1.0, rtol=1e-15)


@given(label=labels, q=qs)
@settings(max_examples=30)
def test_interior_relations(label, q):
    m = bg.build_module(label, 20, q)
    res = bg.verify_module_relations(m, q)
    assert max(res.values()) <= 1e-12, res


def test_truncation_edge_is_excluded(ctx):
    """The last row breaks {A+, A-} = [2A0]; the interior check does not see it."""
    m = bg.build_module(ModuleLabel(1, 0.5), 10, ctx)
    w = 2 * np.diag(m.A0)
    sq = ctx.sqrt_q
    full = m.Aplus @ m.Aminus + m.Aminus @ m.Aplus - np.diag((sq**w - sq**-w) / (sq - 1 / sq))
    assert abs(full[-1, -1]) > 1e-3
    assert max(bg.verify_module_relations(m, ctx).values()) <= 1e-12


@given(label=labels, q=qs)
@settings(max_examples=30)
def test_casimir_is_the_module_scalar(label, q):
    m = bg.build_module(label, 20, q)
    C = bg.casimir_matrix(m, q)
    np.testing.assert_allclose(np.diag(m.Q), -label.epsilon * q_number(label.mu, q))
    assert bg.casimir_residual(m, q) <= 1e-12
    s = slice(0, m.nmax)
    # C is a difference of terms as large as q^-(nmax+mu); its rounding
    # is relative to those terms, not to C itself
    K2 = m.K @ m.K
    terms = [m.Aplus @ m.Aminus, (K2 / np.sqrt(q) - np.sqrt(q) * np.linalg.inv(K2)) / (q - 1 / q)]
    for X in (m.A0, m.Aplus, m.Aminus, m.P, m.K):
        comm = (C @ X - X @ C)[s, s]
        assert bg.relative_residual(comm, *(t @ X for t in terms)) <= 1e-12


def test_casimir_sign_flips_with_epsilon(ctx):
    plus = bg.build_module(ModuleLabel(1, 0.4), 6, ctx)
    minus = bg.build_module(ModuleLabel(-1, 0.4), 6, ctx)
    np.testing.assert_allclose(bg.casimir_matrix(plus, ctx), -bg.casimir_matrix(minus, ctx),
                               atol=1e-13)
    assert bg.casimir_matrix(plus, ctx)[0, 0] == pytest.approx(-q_number(0.4, ctx))


def test_coproduct_is_a_homomorphism_on_the_interior(ctx):
    mA = bg.build_module(ModuleLabel(1, 0.3), 8, ctx)
    mB = bg.build_module(ModuleLabel(-1, 0.55), 8, ctx)
    G = bg.coproduct_matrices(mA, mB)
    np.testing.assert_allclose(G.P @ G.P, np.eye(G.dim))
    sq = ctx.sqrt_q
    two = (G.K @ G.K - G.Kinv @ G.Kinv) / (sq - 1 / sq)
    sel = np.ix_(_interior(mA), _interior(mA))
    pieces = {
        "{A+,A-}": (G.Aplus @ G.Aminus, G.Aminus @ G.Aplus, -two),
        "[A0,A+]": (G.A0 @ G.Aplus, -G.Aplus @ G.A0, -G.Aplus),
        "[A0,A-]": (G.A0 @ G.Aminus, -G.Aminus @ G.A0, G.Aminus),
        "{A+,P}": (G.Aplus @ G.P, G.P @ G.Aplus),
        "KA+K^-1": (G.K @ G.Aplus @ G.Kinv, -sq * G.Aplus),
    }
    for name, terms in pieces.items():
        assert bg.relative_residual(sum(terms)[sel], *(t[sel] for t in terms)) <= 1e-12, name


def test_coassociativity(ctx):
    mods = [bg.build_module(ModuleLabel(e, m), 5, ctx) for e, m in ((1, 0.3), (-1, 0.7), (1, 1.1))]
    assert max(bg.coassociativity_residual(*mods).values()) <= 1e-12


@given(la=labels, lb=labels, q=qs)
@settings(max_examples=20)
def test_delta_q_two_routes(la, lb, q):
    mA, mB = bg.build_module(la, 10, q), bg.build_module(lb, 10, q)
    assert bg.delta_q_two_route_residual(mA, mB, q) <= 1e-11


def test_delta_q_commutes_with_total_weight(ctx):
    mA = bg.build_module(ModuleLabel(1, 0.3), 8, ctx)
    mB = bg.build_module(ModuleLabel(1, 0.55), 8, ctx)
    DQ = bg.delta_q_matrix(mA, mB, ctx)
    A0 = bg.coproduct_matrices(mA, mB).A0
    assert bg.relative_residual(DQ @ A0 - A0 @ DQ, DQ @ A0) <= 1e-14


@pytest.mark.parametrize("e1,e2", list(itertools.product((1, -1), repeat=2)))
def test_lemma_spectrum(e1, e2, ctx):
    la, lb = ModuleLabel(e1, 0.3), ModuleLabel(e2, 0.55)
    mA, mB = bg.build_module(la, 8, ctx), bg.build_module(lb, 8, ctx)
    u0 = bg.un_spectrum(mA, mB, 0, ctx)
    assert u0 == pytest.approx([-e1 * e2 * q_number(0.3 + 0.55 + 0.5, ctx)], rel=1e-12)
    for n in range(9):
        vals = bg.un_spectrum(mA, mB, n, ctx)
        assert len(vals) == n + 1
        target = np.sort(bg.lemma_targets(la, lb, n, ctx))
        assert np.max(np.abs(vals - target) / (1 + np.abs(target))) <= 1e-9


def test_lemma_failure_and_range(ctx):
    la, lb = ModuleLabel(1, 0.3), ModuleLabel(1, 0.55)
    mA, mB = bg.build_module(la, 4, ctx), bg.build_module(lb, 4, ctx)
    wrong = dataclasses.replace(mA, label=ModuleLabel(-1, 0.3))
    with pytest.raises(LemmaVerificationFailure):
        bg.un_spectrum(wrong, mB, 2, ctx)
    with pytest.raises(ValueError):
        bg.un_spectrum(mA, mB, 5, ctx)


def test_tensor_levels_lexicographic():
    np.testing.assert_array_equal(bg.tensor_levels(2, 3), [0, 1, 2, 1, 2, 3])


def test_tensor_block_lowest_level(ctx):
    lab = (ModuleLabel(1, 0.3), ModuleLabel(-1, 0.55), ModuleLabel(1, 0.8))
    blk = bg.tensor3_block(lab, 0, ctx)
    assert blk.dim == 1 and blk.basis == [(0, 0, 0)]
    assert blk.Q12[0, 0] == pytest.approx(q_number(0.3 + 0.55 + 0.5, ctx), rel=1e-12)
    assert blk.Qtot[0, 0] == pytest.approx(q_number(0.3 + 0.55 + 0.8 + 1, ctx), rel=1e-12)
    assert blk.E == pytest.approx(0.3 + 0.55 + 0.8 + 1.5)


@pytest.mark.parametrize("m", [1, 3, 5])
def test_tensor_block_spectra(m, ctx):
    e = (1, -1, -1)
    mu = (0.3, 0.55, 0.8)
    lab = tuple(ModuleLabel(a, b) for a, b in zip(e, mu))
    blk = bg.tensor3_block(lab, m, ctx)
    assert blk.dim == (m + 1) * (m + 2) // 2
    assert blk.basis == sorted(blk.basis)
    for Qx in (blk.Q12, blk.Q23):
        assert bg.relative_residual(Qx @ blk.Qtot - blk.Qtot @ Qx, Qx @ blk.Qtot) <= 1e-11
    # total Casimir: tau_N with multiplicity N + 1 for N <= m
    expect = []
    for N in range(m + 1):
        eN = (-1) ** N * e[0] * e[1] * e[2]
        expect += [-eN * q_number(N + sum(mu) + 1, ctx)] * (N + 1)
    got = np.linalg.eigvalsh((blk.Qtot + blk.Qtot.T) / 2)
    np.testing.assert_allclose(np.sort(got), np.sort(expect), rtol=1e-9, atol=1e-9)
    # Q12: (-1)^k eps1 eps2 [k + mu1 + mu2 + 1/2], multiplicity m - k + 1
    expect12 = []
    for k in range(m + 1):
        expect12 += [-((-1) ** k) * e[0] * e[1] * q_number(k + mu[0] + mu[1] + 0.5, ctx)] * (m - k + 1)
    got12 = np.linalg.eigvalsh((blk.Q12 + blk.Q12.T) / 2)
    np.testing.assert_allclose(np.sort(got12), np.sort(expect12), rtol=1e-9, atol=1e-9)


def test_tensor_block_truncation_guard(ctx):
    lab = (ModuleLabel(1, 0.3),) * 3
    with pytest.raises(ValueError):
        bg.tensor3_block(lab, 3, ctx, nmax=2)


def test_bargmann_realization_trivial_actions(ctx):
    lab = ModuleLabel(-1, 0.45)
    assert bg.bargmann_apply("A-", 0, lab, ctx) == {}
    for n in range(6):
        assert bg.bargmann_apply("P", n, lab, ctx) == {n: pytest.approx(-((-1.0) ** n))}
    with pytest.raises(ValueError):
        bg.bargmann_apply("B", 1, lab, ctx)


@given(label=labels, q=qs)
@settings(max_examples=20)
def test_bargmann_realization_matches_matrices(label, q):
    m = bg.build_module(label, 12, q)
    for gen, mat in (("A+", m.Aplus), ("A-", m.Aminus), ("A0", m.A0), ("P", m.P), ("K", m.K)):
        for n in range(11):
            col = np.zeros(m.dim)
            for k, v in bg.bargmann_apply(gen, n, label, q).items():
                col[k] = v
            assert bg.relative_residual(col - mat[:, n], mat[:, n]) <= 1e-12, (gen, n)
    for n in range(11):
        out = bg.bargmann_apply("A+", n, label, q)
        assert out[n + 1] == pytest.approx(np.sqrt(bg.sigma(n + 1, label.mu, q)), rel=1e-12)
