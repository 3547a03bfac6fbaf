import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import L3
from ckfields.catalog import (
    block_j,
    build_algebra,
    build_pair,
    build_product_pair,
    product_xi,
    so_diagonal_product,
    so_xi2,
)
from ckfields.decomposition import HomogeneousPair
from ckfields.errors import InvalidInputError, PreconditionError
from ckfields.lie_core import mat_exp, numeric_kernel, realify
from ckfields.orbit import (
    arithmetic,
    centralizer,
    is_elliptic,
    kostant_souriau,
    mirror_orbit_check,
    moment_map_h,
    open_orbit_check,
    parabolic_profile,
    sample_orbit,
)
from ckfields.verifier import f_xi


def group_pair(g):
    return HomogeneousPair.build(g, np.zeros((g.dim, 0)), name=f"{g.name}/0")


@pytest.fixture(scope="module")
def su4_sp2():
    return build_pair("su(2p,2q)/sp(p,q)", (2, 0))


def test_ellipticity_examples(so3):
    sl2 = group_pair(build_algebra("sl_R", (2,)))
    assert is_elliptic(group_pair(so3), L3).elliptic
    diag = is_elliptic(sl2, np.diag([1.0, -1.0]))
    assert not diag.elliptic and diag.semisimple and not diag.pure_imaginary
    nil = is_elliptic(sl2, np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert not nil.elliptic and not nil.semisimple
    assert is_elliptic(sl2, np.array([[0.0, 1.0], [-1.0, 0.0]])).elliptic


def test_centralizer_su4(su4_sp2):
    pair = su4_sp2.pair
    res = centralizer(pair, su4_sp2.canonical_xi)
    # oracle: ker ad xi straight from matrix commutators
    X = su4_sp2.canonical_xi.xi.matrix
    comm = np.array([(X @ B - B @ X).ravel() for B in pair.g.basis])
    assert res.dim == 9 == pair.g.dim - np.linalg.matrix_rank(comm.T)
    # l is a subalgebra
    C = res.coords
    br = np.einsum("ia,jb,ijk->abk", C, C, pair.g.struct_consts).reshape(-1, pair.g.dim)
    resid = br - br @ C @ np.linalg.pinv(C)
    assert np.abs(resid).max() < 1e-9


def test_centralizer_so4():
    g = build_algebra("so", (4,))
    pair = group_pair(g)
    assert centralizer(pair, block_j(2)).dim == 4


def test_centralizer_abelian():
    g = build_algebra("so2", ())
    assert centralizer(group_pair(g), [1.0]).dim == g.dim


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_centralizer_dimension_along_orbit(seed):
    e = build_pair("so(3,4)/g2_split")
    pts = sample_orbit(e.pair, e.canonical_xi, n_samples=3, seed=seed).points.astype(float)
    d = centralizer(e.pair, e.canonical_xi).dim
    for p in pts:
        assert centralizer(e.pair, p).dim == d


def test_open_orbit_su4(su4_sp2):
    rep = open_orbit_check(su4_sp2.pair, su4_sp2.canonical_xi)
    assert (rep.dim_l, rep.dim_l_cap_h, rep.dim_l - rep.dim_l_cap_h) == (9, 4, 5)
    assert rep.dim_l - rep.dim_l_cap_h == su4_sp2.pair.dim_m
    assert rep.is_open and not rep.skipped


def test_open_orbit_product_counterexample():
    prod = so_diagonal_product(4)
    pair = build_product_pair(prod)
    x = product_xi(prod, (so_xi2(4), so_xi2(4)))
    rep = open_orbit_check(pair, x)
    assert pair.dim_m == 9 and rep.dim_l == 8
    assert rep.is_open is False
    assert mirror_orbit_check(pair, x) is False


def test_open_orbit_group_manifold_skipped():
    e = build_pair("sl(n,R)/{0}", (2,))
    rep = open_orbit_check(e.pair, e.canonical_xi)
    assert rep.skipped and rep.is_open is None


def test_open_orbit_needs_elliptic():
    e = build_pair("sl(2n,R)/sp(n,R)", (2,))
    with pytest.raises(PreconditionError):
        open_orbit_check(e.pair, np.diag([1.0, 1.0, -1.0, -1.0]))


@pytest.mark.parametrize("entry,params", [
    ("su(2p,2q)/sp(p,q)", (1, 1)), ("so(2p+2,2q)/so(2p+1,2q)", (1, 1)), ("so(7)/g2", ()),
    ("so(2p+1,2q+1)/so(2p+1,2q)", (1, 0)), ("so(n)/so(n-1)", (3,)),
])
def test_mirror_matches_open_orbit(entry, params):
    e = build_pair(entry, params)
    assert open_orbit_check(e.pair, e.canonical_xi).is_open == mirror_orbit_check(e.pair, e.canonical_xi)


def test_profile_su4(su4_sp2):
    prof = parabolic_profile(su4_sp2.pair, su4_sp2.canonical_xi)
    assert prof.positive == 3
    # the real form counts each complex root space once per sign, so totals are the real dimension
    assert prof.negative == prof.positive
    assert sum(prof.as_tuple()) == su4_sp2.pair.dim_g
    assert prof.zero == centralizer(su4_sp2.pair, su4_sp2.canonical_xi).dim


def test_profile_so6():
    g = build_algebra("so", (6,))
    prof = parabolic_profile(group_pair(g), block_j(3))
    assert prof.as_tuple() == (3, 9, 3)


def test_profile_zero():
    g = build_algebra("so", (5,))
    assert parabolic_profile(group_pair(g), np.zeros(g.dim)).as_tuple() == (0, g.dim, 0)


def test_profile_rejects_non_elliptic():
    g = build_algebra("sl_R", (2,))
    with pytest.raises(PreconditionError):
        parabolic_profile(group_pair(g), np.diag([1.0, -1.0]))


def test_kostant_souriau_so3(so3):
    pair = group_pair(so3)
    e1, e2, e3 = np.eye(3)
    assert kostant_souriau(pair, e1, e1, e2) == pytest.approx(0.0, abs=1e-14)
    assert kostant_souriau(pair, e3, e1, e2) == pytest.approx(-2.0)
    assert kostant_souriau(pair, e3, e2, e2) == 0.0


def test_kostant_souriau_radical_is_centralizer():
    e = build_pair("so(3,4)/g2_split")
    g, x = e.pair.g, e.canonical_xi.coords
    W = np.array([[kostant_souriau(e.pair, x, a, b) for b in np.eye(g.dim)] for a in np.eye(g.dim)])
    assert np.allclose(W, -W.T)
    assert numeric_kernel(W).nullity == centralizer(e.pair, x).dim
    for eta in centralizer(e.pair, x).coords.T:
        assert abs(kostant_souriau(e.pair, x, eta, np.arange(g.dim, dtype=float))) < 1e-9


def test_moment_map_consistency(su4_sp2):
    pair, x = su4_sp2.pair, su4_sp2.canonical_xi
    s = sample_orbit(pair, x, n_samples=100, seed=7, precision="double")
    for p, G in zip(s.points, s.group):
        mu = moment_map_h(pair, p)
        assert pair.g.form(mu.coords, mu.coords) == pytest.approx(f_xi(pair, x, G, precision="double"), abs=1e-12)


def test_moment_map_trivial_cases(su4_sp2):
    pair = su4_sp2.pair
    assert np.allclose(moment_map_h(pair, pair.m_coords[:, 0]).coords, 0, atol=1e-12)
    grp = build_pair("su(n)/{0}", (2,))
    assert moment_map_h(grp.pair, grp.canonical_xi).norm() == 0


def test_sample_determinism_and_level(so3):
    pair = HomogeneousPair.build(so3, np.eye(3)[:, 2:], name="so(3)/so(2)")
    a = sample_orbit(pair, L3, n_samples=50, radius=2.0, seed=3)
    b = sample_orbit(pair, L3, n_samples=50, radius=2.0, seed=3)
    assert np.array_equal(a.points, b.points) and np.array_equal(a.indices, b.indices)
    assert not np.array_equal(a.points, sample_orbit(pair, L3, n_samples=50, radius=2.0, seed=4).points)
    bp = np.einsum("ni,ij,nj->n", a.points, so3.form_gram, a.points)
    assert np.allclose(bp, -2.0, atol=1e-12)
    assert np.all(np.abs(a.coefficients) <= 2.0)


def test_sample_points_are_conjugates(so3):
    pair = group_pair(so3)
    s = sample_orbit(pair, L3, n_samples=5, word_length=2, seed=0)
    for k in range(5):
        G = np.eye(3)
        for i, c in zip(s.indices[k], s.coefficients[k]):
            G = G @ mat_exp(c * so3.basis[i])
        assert np.allclose(so3.coords_of(G @ L3 @ G.T), s.points[k], atol=1e-13)


def test_zero_word_returns_xi(su4_sp2):
    ar = arithmetic(su4_sp2.pair, "double")
    G, Gi = ar.words(np.zeros((1, 3), dtype=int), np.zeros((1, 3)))
    assert np.allclose(ar.adjoint(G, Gi, su4_sp2.canonical_xi.coords)[0], su4_sp2.canonical_xi.coords)


def test_sample_input_errors(so3):
    pair = group_pair(so3)
    with pytest.raises(InvalidInputError):
        sample_orbit(pair, L3, n_samples=0)
    with pytest.raises(InvalidInputError):
        sample_orbit(pair, L3, radius=-1.0)
    with pytest.raises(InvalidInputError):
        sample_orbit(pair, L3, word_length=0)
    with pytest.raises(InvalidInputError):
        sample_orbit(pair, np.ones(5))


def test_complex_realified_xi_elliptic():
    e = build_pair("sl(2n,C)/sp(n,C)", (2,))
    Z = 1j * np.diag([-3.0, 1, 1, 1])
    assert np.allclose(e.canonical_xi.xi.matrix, realify(Z))
    assert is_elliptic(e.pair, realify(Z)).elliptic
