import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import L1, L3
from ckfields import verifier
from ckfields.catalog import (
    build_pair,
    product_cases,
    so3_diag_so2,
    so_full_diagonal,
    so_xi2,
)
from ckfields.decomposition import HomogeneousPair
from ckfields.errors import NumericError, PreconditionError
from ckfields.lie_core import mat_exp
from ckfields.orbit import sample_orbit
from ckfields.verifier import (
    CONSTANT,
    INCONCLUSIVE,
    NON_CONSTANT,
    VerifyConfig,
    carryover_check,
    classify,
    equivalence_check,
    f_xi,
    killing_length,
    product_conditions,
    single_factor_constancy,
    verify_constant_length,
)

QUICK = VerifyConfig(n_samples=200, search_iterations=60)


@pytest.fixture(scope="module")
def sphere2(so3):
    return HomogeneousPair.build(so3, np.eye(3)[:, 2:], name="so(3)/so(2)")


def test_f_xi_rotation_oracle(sphere2):
    assert f_xi(sphere2, L3, np.eye(3)) == pytest.approx(-2.0)
    g = mat_exp(np.pi / 2 * L1)
    assert f_xi(sphere2, L3, g) == pytest.approx(0.0, abs=1e-14)
    # brute force along the one-parameter group: f(t) = -2 cos^2 t
    for t in np.linspace(0, np.pi, 7):
        assert f_xi(sphere2, L3, mat_exp(t * L1)) == pytest.approx(-2 * np.cos(t) ** 2, abs=1e-13)


def test_f_xi_trivial_cases(sphere2):
    m_elem = sphere2.m_coords[:, 0]
    assert f_xi(sphere2, m_elem, np.eye(3)) == pytest.approx(0.0, abs=1e-14)
    grp = build_pair("sl(n,R)/{0}", (2,))
    g = mat_exp(np.array([[0.3, 1.2], [0.4, -0.3]]))
    assert f_xi(grp.pair, grp.canonical_xi, g) == 0.0


def test_killing_length_vanishes_at_pole(sphere2):
    assert killing_length(sphere2, L3, np.eye(3)) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("entry,params", [
    ("su(2p,2q)/sp(p,q)", (1, 1)), ("sl(2n,R)/sp(n,R)", (2,)), ("so(2p+2,2q)/so(2p+1,2q)", (1, 1)),
    ("so(3,4)/g2_split", ()), ("so(2p+1,2q+1)/so(2p+1,2q)", (0, 1)), ("so(n)/so(n-1)", (5,)),
    ("su(n)/{0}", (2,)),
])
def test_complementarity(entry, params):
    e = build_pair(entry, params)
    pair, x = e.pair, e.canonical_xi.coords
    b0 = pair.g.form(x, x)
    s = sample_orbit(pair, x, n_samples=100, seed=11, precision="double")
    for G in s.group:
        total = f_xi(pair, x, G) + killing_length(pair, x, G)
        assert abs(total - b0) <= 1e-9 * max(abs(b0), 1.0) * max(np.linalg.cond(G) ** 2, 1.0)


def test_su4_sp2_constant():
    e = build_pair("su(2p,2q)/sp(p,q)", (2, 0))
    rep = verify_constant_length(e.pair, e.canonical_xi)
    assert rep.verdict == CONSTANT and rep.defect < 1e-8
    assert rep.n_samples == 1000 and rep.search_iterations >= 200
    assert rep.min_f <= rep.baseline <= rep.max_f
    length = rep.b_xi_xi - rep.baseline
    for G in rep.witnesses:
        assert killing_length(e.pair, e.canonical_xi, G) == pytest.approx(length, abs=1e-8 * abs(rep.b_xi_xi))


def test_sphere_non_constant(sphere2):
    rep = verify_constant_length(sphere2, L3)
    assert rep.verdict == NON_CONSTANT
    assert rep.max_f - rep.min_f == pytest.approx(2.0, abs=1e-6)
    assert rep.min_f <= rep.baseline <= rep.max_f
    lo, hi = rep.witnesses
    assert f_xi(sphere2, L3, lo) == pytest.approx(rep.min_f)
    assert f_xi(sphere2, L3, hi) == pytest.approx(rep.max_f)


@pytest.mark.parametrize("params", [(1, 0), (0, 1)])
def test_excluded_family_non_constant(params):
    e = build_pair("so(2p+1,2q+1)/so(2p+1,2q)", params)
    rep = verify_constant_length(e.pair, e.canonical_xi, QUICK)
    assert rep.verdict == NON_CONSTANT and rep.defect > 1e-3


def test_non_constant_above_band():
    e = build_pair("so(n)/so(n-1)", (5,))
    rep = verify_constant_length(e.pair, e.canonical_xi, QUICK)
    assert rep.verdict == NON_CONSTANT
    assert rep.defect > 100 * rep.tolerance_used


@pytest.mark.parametrize("c", [2.0, -0.5, 3.0])
def test_scale_covariance(c):
    for entry, params in (("su(2p,2q)/sp(p,q)", (1, 0)), ("so(n)/so(n-1)", (5,)), ("so(7)/g2", ())):
        e = build_pair(entry, params)
        x = e.canonical_xi.coords
        r1 = verify_constant_length(e.pair, x, QUICK, precision="double")
        r2 = verify_constant_length(e.pair, c * x, QUICK, precision="double")
        assert r2.verdict == r1.verdict
        assert r2.baseline == pytest.approx(c * c * r1.baseline, rel=1e-9, abs=1e-12)
        if r1.verdict == CONSTANT:
            assert r2.max_f == pytest.approx(c * c * r1.max_f, rel=1e-9, abs=1e-12)
        else:
            # sampled extremes scale exactly; the search may wander to a different maximum
            assert r2.defect == pytest.approx(r1.defect, rel=0.05)


def test_classify_band():
    cfg = VerifyConfig()
    assert classify(1e-9, cfg) == CONSTANT
    assert classify(1e-6, cfg) == INCONCLUSIVE
    assert classify(1e-3, cfg) == NON_CONSTANT
    assert classify(float("nan"), cfg) == INCONCLUSIVE
    with pytest.raises(ValueError):
        VerifyConfig(const_tol=1e-3, nonconst_tol=1e-5)


def test_numeric_failure_is_inconclusive(monkeypatch, sphere2):
    def broken(*args, **kwargs):
        raise NumericError("sample left the level set")

    monkeypatch.setattr(verifier, "sample_orbit", broken)
    rep = verify_constant_length(sphere2, L3)
    assert rep.verdict == INCONCLUSIVE
    assert "NumericError" in rep.diagnostics["error"]
    assert rep.diagnostics["precision"] == np.dtype(np.longdouble).name
    assert "escalated_from" in rep.diagnostics


def test_equivalence_checks():
    pos = build_pair("su(2p,2q)/sp(p,q)", (1, 1))
    eq = equivalence_check(pos.pair, pos.canonical_xi, QUICK)
    assert eq.verdict == CONSTANT and eq.l_orbit_open and eq.h_orbit_open and eq.agree
    neg = build_pair("so(2p+1,2q+1)/so(2p+1,2q)", (1, 0))
    eq = equivalence_check(neg.pair, neg.canonical_xi, QUICK)
    assert eq.verdict == NON_CONSTANT and eq.l_orbit_open is False and eq.agree
    grp = build_pair("sl(n,R)/{0}", (2,))
    eq = equivalence_check(grp.pair, grp.canonical_xi, QUICK)
    assert eq.verdict == CONSTANT and eq.agree is None


def test_carryover_su22():
    e = build_pair("su(2p,2q)/sp(p,q)", (1, 1))
    co = carryover_check(e.pair, e.canonical_xi, QUICK)
    assert co.noncompact.verdict == co.compact.verdict == CONSTANT
    assert co.agree and not co.flagged and not co.excluded_family


def test_carryover_excluded_family_flagged():
    e = build_pair("so(2p+1,2q+1)/so(2p+1,2q)", (1, 0))
    co = carryover_check(e.pair, e.canonical_xi, QUICK)
    assert co.excluded_family and co.flagged
    assert "excluded family" in co.note


def test_carryover_group_manifold():
    e = build_pair("sl(n,R)/{0}", (2,))
    co = carryover_check(e.pair, e.canonical_xi, QUICK)
    assert co.noncompact.verdict == co.compact.verdict == CONSTANT and co.agree


def test_carryover_needs_theta_fixed():
    e = build_pair("sl(2n,R)/sp(n,R)", (2,))
    with pytest.raises(PreconditionError):
        carryover_check(e.pair, np.diag([1.0, 1.0, -1.0, -1.0]), QUICK)


def test_product_counterexample():
    case = product_cases()[0]
    pc = product_conditions(case.product, case.xi_parts, QUICK)
    assert (pc.cond1, pc.cond2, pc.cond3, pc.cond4) == (False, True, True, False)
    assert pc.implications_ok


def test_product_hypotheses_enforced():
    case = product_cases()[-1]
    assert case.single_factor
    with pytest.raises(PreconditionError):
        product_conditions(case.product, case.xi_parts, QUICK)
    rep = single_factor_constancy(case.product, case.xi_parts, QUICK)
    assert rep.verdict == CONSTANT
    with pytest.raises(PreconditionError):
        single_factor_constancy(so3_diag_so2(), (so_xi2(3), so_xi2(3)), QUICK)
    with pytest.raises(PreconditionError):
        single_factor_constancy(so_full_diagonal(3), (so_xi2(3), so_xi2(3)), QUICK)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_report_invariants(seed):
    e = build_pair("so(n)/so(n-1)", (3,))
    rep = verify_constant_length(e.pair, e.canonical_xi, QUICK, seed=seed)
    assert rep.min_f <= rep.baseline <= rep.max_f
    assert rep.seed == seed and rep.tolerance_used == QUICK.const_tol
    assert (rep.verdict == CONSTANT) == (rep.defect < rep.tolerance_used)
    d = rep.to_dict()
    assert d["verdict"] == rep.verdict and len(d["witnesses"]) == 2


@pytest.mark.parametrize("phi", [0.0, 0.4, np.pi / 4, 1.2, np.pi / 2, 2.5])
def test_sl4_torus_directions_all_non_constant(phi):
    # elliptic elements of sl(4,R) are conjugate to diag{a J, b J}; none has constant length
    e = build_pair("sl(2n,R)/sp(n,R)", (2,))
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    xi = np.zeros((4, 4))
    xi[:2, :2], xi[2:, 2:] = np.cos(phi) * J, np.sin(phi) * J
    rep = verify_constant_length(e.pair, xi, QUICK)
    assert rep.verdict == NON_CONSTANT


def test_projective_element_has_no_real_form():
    spectrum = np.linalg.eigvals(1j * np.diag([-3.0, 1.0, 1.0, 1.0]))
    assert not np.allclose(np.sort_complex(spectrum), np.sort_complex(spectrum.conj()))
