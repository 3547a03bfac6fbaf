"""Classical and exceptional algebras, the classified pairs, and product pairs.

Conventions
-----------
* Indefinite forms are S = diag(I_p, -I_q), positive block first.
* Complex algebras are realified: Z = A + iB -> [[A, -B], [B, A]].
* sp(p, q) sits in su(2p, 2q) as the matrices that also preserve the
  complex symplectic form diag(J, ..., J), J = [[0, 1], [-1, 0]], with the
  Hermitian form diag(I_p, -I_q) (x) I_2.
* sp(n, R) sits in sl(2n, R) as X^T W + W X = 0, W = [[0, I], [-I, 0]].
* so(a-1, b) (or so(a, b-1)) is the stabilizer of the first (last) basis vector.
* Every algebra here is closed under transpose, and the Cartan involution
  is X -> -X^T (the realified form of X -> -X^dagger).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy

from .decomposition import HomogeneousPair, check_theta_candidate
from .errors import CatalogError, ConstructionError, InvalidInputError
from .lie_core import MatrixLieAlgebra, numeric_kernel, realify
from .octonions import derivation_algebra, norm_form, octonion_table
from .orbit import KillingElement, make_killing_element

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
MAX_MATRIX_SIZE = 16


def signature_matrix(p, q):
    return np.diag([1.0] * p + [-1.0] * q)


def _unit(n, i, j, dtype=float):
    E = np.zeros((n, n), dtype=dtype)
    E[i, j] = 1
    return E


# ---------------------------------------------------------------------------
# bases of the classical families (as lists of matrices)


def so_matrices(p, q=0):
    """E_ij - s_i s_j E_ji for i < j; X^T S + S X = 0."""
    n = p + q
    s = np.diag(signature_matrix(p, q))
    return [_unit(n, i, j) - s[i] * s[j] * _unit(n, j, i) for i in range(n) for j in range(i + 1, n)]


def su_matrices(p, q=0):
    """Complex basis of su(p, q): X^dagger S + S X = 0, trace zero."""
    n = p + q
    s = np.diag(signature_matrix(p, q))
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            out.append(_unit(n, i, j, complex) - s[i] * s[j] * _unit(n, j, i, complex))
            out.append(1j * (_unit(n, i, j, complex) + s[i] * s[j] * _unit(n, j, i, complex)))
    for k in range(n - 1):
        out.append(1j * (_unit(n, k, k, complex) - _unit(n, k + 1, k + 1, complex)))
    return out


def sl_matrices(n):
    out = [_unit(n, i, j) for i in range(n) for j in range(n) if i != j]
    out += [_unit(n, k, k) - _unit(n, k + 1, k + 1) for k in range(n - 1)]
    return out


def symplectic_form(n):
    W = np.zeros((2 * n, 2 * n))
    W[:n, n:] = np.eye(n)
    W[n:, :n] = -np.eye(n)
    return W


def sp_real_matrices(n):
    """sp(n, R) in block form [[A, B], [C, -A^T]], B and C symmetric."""
    out = []
    for i in range(n):
        for j in range(n):
            X = np.zeros((2 * n, 2 * n))
            X[i, j] = 1.0
            X[n + j, n + i] = -1.0
            out.append(X)
    for i in range(n):
        for j in range(i, n):
            for top in (True, False):
                X = np.zeros((2 * n, 2 * n))
                S = _unit(n, i, j) + _unit(n, j, i)
                if i == j:
                    S = _unit(n, i, i)
                if top:
                    X[:n, n:] = S
                else:
                    X[n:, :n] = S
                out.append(X)
    return out


def realified_complexification(mats):
    """Real basis {Z, iZ} of the complex span of the given matrices, realified."""
    mats = np.asarray(mats, dtype=complex)
    return np.concatenate([realify(mats), realify(1j * mats)])


def _complex_part(X):
    n = X.shape[0] // 2
    return X[:n, :n] + 1j * X[n:, :n]


def block_j(n_blocks, size=None, offset=0):
    """diag{J, ..., J} with n_blocks copies starting at ``offset``."""
    size = size or 2 * n_blocks + offset
    X = np.zeros((size, size))
    for b in range(n_blocks):
        i = offset + 2 * b
        X[i : i + 2, i : i + 2] = J2
    return X


# ---------------------------------------------------------------------------
# subalgebras cut out by linear constraints


def exact_subalgebra_coords(g, constraint):
    """As ``subalgebra_coords`` for integer constraints, with integer coordinate vectors.

    An exact nullspace keeps h an honest subalgebra to the last bit, which
    matters when f_xi is evaluated far out on noncompact orbits.
    """
    cols = [np.atleast_1d(np.asarray(constraint(M))).ravel() for M in g.basis]
    A = np.array(cols).T
    if np.iscomplexobj(A):
        A = np.vstack([A.real, A.imag])
    Ai = np.rint(A)
    if np.abs(A - Ai).max(initial=0.0) > 1e-12:
        raise ConstructionError("constraint is not integral on the basis")
    vecs = sympy.Matrix(Ai.astype(int)).nullspace()
    out = []
    for v in vecs:
        den = sympy.ilcm(*[sympy.fraction(x)[1] for x in v])
        out.append([int(x * den) for x in v])
    return np.array(out, dtype=float).T.reshape(g.dim, -1)


def subalgebra_coords(g, constraint):
    """g-coordinates (columns) of {X in g : constraint(X) = 0}; constraint linear on matrices."""
    cols = [np.atleast_1d(np.asarray(constraint(M))).ravel() for M in g.basis]
    A = np.array(cols).T
    if np.iscomplexobj(A):
        A = np.vstack([A.real, A.imag])
    return numeric_kernel(A).basis


# ---------------------------------------------------------------------------
# build_algebra

_ALIASES = {
    "su": "su", "su(p,q)": "su", "su(n)": "su",
    "u": "u", "u(n)": "u",
    "so": "so", "so(p,q)": "so", "so(n)": "so",
    "sl_r": "sl_R", "sl(n,r)": "sl_R", "sl": "sl_R",
    "sp": "sp", "sp(p,q)": "sp", "sp(n)": "sp",
    "sp_r": "sp_R", "sp(n,r)": "sp_R",
    "sl_c": "sl_C", "sl(n,c)": "sl_C",
    "so_c": "so_C", "so(n,c)": "so_C",
    "sp_c": "sp_C", "sp(n,c)": "sp_C",
    "g2": "g2_compact", "g2_compact": "g2_compact",
    "g2_split": "g2_split", "g2_r": "g2_split",
    "g2_complex": "g2_complex", "g2_c": "g2_complex", "g2c": "g2_complex",
    "so2": "so2", "so(2)": "so2",
}


def normalize_name(name):
    """Map unicode / decorated spellings (sl(2n,ℂ)ᴿ, so(2n−1,…)) to ASCII ids."""
    s = name.strip()
    for a, b in (("ℝ", "R"), ("ℂ", "C"), ("ᴿ", ""), ("^R", ""), ("−", "-"), ("₂", "2"), (" ", "")):
        s = s.replace(a, b)
    return s


def _family_key(family):
    key = _ALIASES.get(normalize_name(family).lower())
    if key is None:
        raise CatalogError(f"unknown algebra family {family!r}")
    return key


def _pq(params, key):
    params = tuple(int(x) for x in params)
    if len(params) == 1:
        return params[0], 0
    if len(params) == 2:
        return params
    raise CatalogError(f"{key}: expected (p, q) or (n,), got {params}")


def _one(params, key):
    params = tuple(int(x) for x in params)
    if len(params) != 1:
        raise CatalogError(f"{key}: expected a single parameter n, got {params}")
    return params[0]


def _trace_form(mats):
    mats = np.asarray(mats)
    return np.einsum("iab,jba->ij", mats, mats)


def _g2(kind):
    T = octonion_table(split=(kind == "g2_split"))
    return derivation_algebra(T, name="g2" if kind == "g2_compact" else kind)


def _check_size(key, n):
    if n > MAX_MATRIX_SIZE:
        raise CatalogError(f"{key}: matrix size {n} exceeds the desk-scale limit {MAX_MATRIX_SIZE}")


def build_algebra(family, params=()):
    """Construct one of the supported real (or realified complex) Lie algebras."""
    key = _family_key(family)
    params = tuple(params)
    if key == "su":
        p, q = _pq(params, key)
        if p < 0 or q < 0 or p + q < 2:
            raise CatalogError("su(p,q) needs p + q >= 2")
        _check_size(key, 2 * (p + q))
        return MatrixLieAlgebra(f"su({p},{q})", realify(np.array(su_matrices(p, q))))
    if key == "u":
        n = _one(params, key)
        if n < 1:
            raise CatalogError("u(n) needs n >= 1")
        _check_size(key, 2 * n)
        mats = realify(np.array(su_matrices(n) + [1j * np.eye(n)]))
        return MatrixLieAlgebra(f"u({n})", mats, form_gram=_trace_form(mats))
    if key == "so2":
        mats = np.array([J2.T])
        return MatrixLieAlgebra("so(2)", mats, form_gram=_trace_form(mats))
    if key == "so":
        p, q = _pq(params, key)
        if p < 0 or q < 0 or p + q < 3:
            raise CatalogError("so(p,q) needs p + q >= 3 (so(2) is abelian, use 'so2')")
        _check_size(key, p + q)
        return MatrixLieAlgebra(f"so({p},{q})" if q else f"so({p})", np.array(so_matrices(p, q)))
    if key == "sl_R":
        n = _one(params, key)
        if n < 2:
            raise CatalogError("sl(n,R) needs n >= 2")
        _check_size(key, n)
        return MatrixLieAlgebra(f"sl({n},R)", np.array(sl_matrices(n)))
    if key == "sp_R":
        n = _one(params, key)
        if n < 1:
            raise CatalogError("sp(n,R) needs n >= 1")
        _check_size(key, 2 * n)
        return MatrixLieAlgebra(f"sp({n},R)", np.array(sp_real_matrices(n)))
    if key == "sp":
        p, q = _pq(params, key)
        if p < 0 or q < 0 or p + q < 1:
            raise CatalogError("sp(p,q) needs p + q >= 1")
        g = build_algebra("su", (2 * p, 2 * q))
        coords = _sp_in_su_coords(g, p + q)
        return MatrixLieAlgebra(f"sp({p},{q})" if q else f"sp({p})", g.matrix_of(coords.T))
    if key == "sl_C":
        n = _one(params, key)
        if n < 2:
            raise CatalogError("sl(n,C) needs n >= 2")
        _check_size(key, 2 * n)
        return MatrixLieAlgebra(f"sl({n},C)", realified_complexification(sl_matrices(n)))
    if key == "so_C":
        n = _one(params, key)
        if n < 3:
            raise CatalogError("so(n,C) needs n >= 3")
        _check_size(key, 2 * n)
        return MatrixLieAlgebra(f"so({n},C)", realified_complexification(so_matrices(n)))
    if key == "sp_C":
        n = _one(params, key)
        if n < 1:
            raise CatalogError("sp(n,C) needs n >= 1")
        _check_size(key, 4 * n)
        return MatrixLieAlgebra(f"sp({n},C)", realified_complexification(sp_real_matrices(n)))
    if key in ("g2_compact", "g2_split"):
        return _g2(key)
    if key == "g2_complex":
        g2 = _g2("g2_compact")
        return MatrixLieAlgebra("g2(C)", realified_complexification(g2.basis))
    raise CatalogError(f"unsupported family {family!r}")  # pragma: no cover


def expected_dimension(family, params=()):
    key = _family_key(family)
    if key == "su":
        p, q = _pq(params, key)
        return (p + q) ** 2 - 1
    if key == "u":
        return _one(params, key) ** 2
    if key == "so2":
        return 1
    if key == "so":
        p, q = _pq(params, key)
        n = p + q
        return n * (n - 1) // 2
    if key == "sl_R":
        return _one(params, key) ** 2 - 1
    if key == "sp_R":
        n = _one(params, key)
        return n * (2 * n + 1)
    if key == "sp":
        p, q = _pq(params, key)
        n = p + q
        return n * (2 * n + 1)
    if key == "sl_C":
        return 2 * (_one(params, key) ** 2 - 1)
    if key == "so_C":
        n = _one(params, key)
        return n * (n - 1)
    if key == "sp_C":
        n = _one(params, key)
        return 2 * n * (2 * n + 1)
    if key in ("g2_compact", "g2_split"):
        return 14
    if key == "g2_complex":
        return 28
    raise CatalogError(family)  # pragma: no cover


def _sp_in_su_coords(g, n):
    """Coordinates in su(2p,2q) of sp(p,q): Z^T Omega + Omega Z = 0."""
    omega = np.kron(np.eye(n), J2)

    def constraint(X):
        Z = _complex_part(X)
        return Z.T @ omega + omega @ Z

    return exact_subalgebra_coords(g, constraint)


# ---------------------------------------------------------------------------
# catalog entries


VERDICTS = ("constant", "non-constant", "group-manifold")


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    id: str
    params: tuple
    pair: HomogeneousPair
    canonical_xi: KillingElement | None
    expected_verdict: str
    citation: str
    notes: str = ""

    def __post_init__(self):
        if self.expected_verdict not in VERDICTS:
            raise InvalidInputError(f"bad expected verdict {self.expected_verdict!r}")
        xi = self.canonical_xi
        if xi is not None and (xi.xi.norm() == 0 or not xi.elliptic):
            raise ConstructionError(f"{self.id}: canonical element must be nonzero and elliptic")


@dataclass(frozen=True)
class EntrySpec:
    id: str
    param_names: tuple
    default_params: tuple
    grid: tuple  # small parameter sets used by batteries
    kind: str  # "positive", "negative" or "group"
    citation: str
    builder: object = field(repr=False)
    expected: object = field(repr=False)

    def describe(self):
        return {
            "id": self.id,
            "params": list(self.param_names),
            "default_params": list(self.default_params),
            "battery_params": [list(p) for p in self.grid],
            "kind": self.kind,
            "expected_verdict": self.expected(self.default_params),
            "citation": self.citation,
        }


def transpose_theta(X):
    return -X.T


def _pair(g, h_coords, name, **meta):
    return HomogeneousPair.build(g, h_coords, theta=transpose_theta, name=name, meta=meta)


def _su_sp(params):
    p, q = params
    n = p + q
    if p < 0 or q < 0 or n < 1:
        raise CatalogError("su(2p,2q)/sp(p,q) needs p, q >= 0 and p + q >= 1")
    _check_size("su(2p,2q)", 4 * n)
    g = build_algebra("su", (2 * p, 2 * q))
    h = _sp_in_su_coords(g, n)
    xi = np.diag([-(2 * n - 1)] + [1] * (2 * n - 1)).astype(complex) * 1j
    pair = _pair(g, h, f"su({2*p},{2*q})/sp({p},{q})")
    return pair, g.coords_of(realify(xi)), ""


def _sl_sp_real(params):
    (n,) = params
    if n < 1:
        raise CatalogError("sl(2n,R)/sp(n,R) needs n >= 1")
    _check_size("sl(2n,R)", 2 * n)
    g = build_algebra("sl_R", (2 * n,))
    h = g.coords_of(np.array(sp_real_matrices(n))).T
    pair = _pair(g, h, f"sl({2*n},R)/sp({n},R)")
    note = (
        "no element of sl(2n,R) is conjugate to a multiple of i*diag{-(2n-1),1,...,1} "
        "(its spectrum is not closed under conjugation); the entry carries diag{J,...,J}"
    )
    return pair, g.coords_of(block_j(n)), note


def _sl_sp_complex(params):
    (n,) = params
    if n < 1:
        raise CatalogError("sl(2n,C)/sp(n,C) needs n >= 1")
    g = build_algebra("sl_C", (2 * n,))
    h = g.coords_of(realified_complexification(sp_real_matrices(n))).T
    xi = 1j * np.diag([-(2 * n - 1)] + [1] * (2 * n - 1)).astype(complex)
    pair = _pair(g, h, f"sl({2*n},C)/sp({n},C)")
    return pair, g.coords_of(realify(xi)), ""


def _so_h_first(n):
    """Indices of so-basis elements not touching coordinate 0."""
    idx, k = [], 0
    for i in range(n):
        for j in range(i + 1, n):
            if i != 0:
                idx.append(k)
            k += 1
    return idx


def _so_h_last(n):
    idx, k = [], 0
    for i in range(n):
        for j in range(i + 1, n):
            if j != n - 1:
                idx.append(k)
            k += 1
    return idx


def _so_even(params):
    p, q = params
    if p < 0 or q < 0:
        raise CatalogError("so(2p+2,2q)/so(2p+1,2q) needs p, q >= 0")
    a, b = 2 * p + 2, 2 * q
    n = a + b
    if n < 4:
        raise CatalogError("so(2p+2,2q)/so(2p+1,2q) needs 2p+2+2q >= 4")
    g = build_algebra("so", (a, b))
    h = np.eye(g.dim)[:, _so_h_first(n)]
    pair = _pair(g, h, f"so({a},{b})/so({a-1},{b})" if b else f"so({a})/so({a-1})")
    return pair, g.coords_of(block_j(n // 2)), ""


def _so_even_complex(params):
    (n,) = params
    if n < 2:
        raise CatalogError("so(2n,C)/so(2n-1,C) needs n >= 2")
    N = 2 * n
    g = build_algebra("so_C", (N,))
    base = so_matrices(N)
    keep = [base[k] for k in _so_h_first(N)]
    h = g.coords_of(realified_complexification(keep)).T
    pair = _pair(g, h, f"so({N},C)/so({N-1},C)")
    return pair, g.coords_of(realify(block_j(n).astype(complex))), ""


def _g2_embedding(split):
    T = octonion_table(split=split)
    S = np.diag(norm_form(T)[1:])
    return derivation_algebra(T, name="g2_split" if split else "g2"), S


def _xi3(size=7):
    X = np.zeros((size, size))
    X[:2, :2] = J2
    return X


def _so7_g2(params):
    if params:
        raise CatalogError("so(7)/g2 takes no parameters")
    g = build_algebra("so", (7,))
    d, _ = _g2_embedding(False)
    h = g.coords_of(d.basis).T
    return _pair(g, h, "so(7)/g2"), g.coords_of(_xi3()), ""


def _so34_g2split(params):
    if params:
        raise CatalogError("so(3,4)/g2_split takes no parameters")
    d, S = _g2_embedding(True)
    g = build_algebra("so", (3, 4))
    if not np.allclose(S, signature_matrix(3, 4)):
        raise ConstructionError("split octonion norm does not have the (3,4) block layout")
    h = g.coords_of(d.basis).T
    return _pair(g, h, "so(3,4)/g2_split"), g.coords_of(_xi3()), ""


def _so7c_g2c(params):
    if params:
        raise CatalogError("so(7,C)/g2_C takes no parameters")
    g = build_algebra("so_C", (7,))
    d, _ = _g2_embedding(False)
    h = g.coords_of(realified_complexification(d.basis)).T
    xi = realify(_xi3().astype(complex))
    return _pair(g, h, "so(7,C)/g2_C"), g.coords_of(xi), ""


def _group_sl(params):
    (n,) = params
    g = build_algebra("sl_R", (n,))
    X = np.zeros((n, n))
    X[:2, :2] = J2
    return _pair(g, np.zeros((g.dim, 0)), f"sl({n},R)/{{0}}"), g.coords_of(X), ""


def _group_su(params):
    (n,) = params
    g = build_algebra("su", (n, 0))
    Z = np.zeros((n, n), complex)
    Z[0, 0], Z[1, 1] = 1j, -1j
    return _pair(g, np.zeros((g.dim, 0)), f"su({n})/{{0}}"), g.coords_of(realify(Z)), ""


def _so_odd_negative(params):
    p, q = params
    if p < 0 or q < 0:
        raise CatalogError("so(2p+1,2q+1)/so(2p+1,2q) needs p, q >= 0")
    a, b = 2 * p + 1, 2 * q + 1
    n = a + b
    if n < 4:
        raise CatalogError("so(2p+1,2q+1)/so(2p+1,2q) needs p + q >= 1")
    g = build_algebra("so", (a, b))
    h = np.eye(g.dim)[:, _so_h_last(n)]
    xi = block_j(p, size=n) + block_j(q, size=n, offset=a)
    return _pair(g, h, f"so({a},{b})/so({a},{b-1})"), g.coords_of(xi), ""


def _so_sphere(params):
    (n,) = params
    if n < 3:
        raise CatalogError("so(n)/so(n-1) needs n >= 3")
    g = build_algebra("so", (n,))
    h = np.eye(g.dim)[:, _so_h_first(n)]
    xi = block_j(n // 2, size=n)
    return _pair(g, h, f"so({n})/so({n-1})"), g.coords_of(xi), ""


def _const(v):
    return lambda params: v


ENTRIES = {
    spec.id: spec
    for spec in (
        EntrySpec("su(2p,2q)/sp(p,q)", ("p", "q"), (1, 1), ((1, 0), (2, 0), (1, 1)), "positive",
                  "simple classification, projective-space flag: (SU(2p,2q), Sp(p,q))", _su_sp, _const("constant")),
        EntrySpec("sl(2n,R)/sp(n,R)", ("n",), (2,), ((2,),), "positive",
                  "simple classification, projective-space flag: (SL(2n,R), Sp(n,R))", _sl_sp_real, _const("constant")),
        EntrySpec("sl(2n,C)/sp(n,C)", ("n",), (2,), ((2,),), "positive",
                  "complex simple classification: (SL(2n,C), Sp(n,C))", _sl_sp_complex, _const("constant")),
        EntrySpec("so(2p+2,2q)/so(2p+1,2q)", ("p", "q"), (1, 1), ((1, 0), (2, 0), (1, 1)), "positive",
                  "simple classification, unitary-structure flag: (SO(2p+2,2q), SO(2p+1,2q))", _so_even, _const("constant")),
        EntrySpec("so(2n,C)/so(2n-1,C)", ("n",), (3,), ((3,),), "positive",
                  "complex simple classification: (SO(2n,C), SO(2n-1,C))", _so_even_complex, _const("constant")),
        EntrySpec("so(7)/g2", (), (), ((),), "positive",
                  "simple classification, quadric flag: (Spin(7), G2)", _so7_g2, _const("constant")),
        EntrySpec("so(3,4)/g2_split", (), (), ((),), "positive",
                  "simple classification, quadric flag: (Spin(3,4), split G2)", _so34_g2split, _const("constant")),
        EntrySpec("so(7,C)/g2_C", (), (), ((),), "positive",
                  "complex simple classification: (Spin(7,C), G2(C))", _so7c_g2c, _const("constant")),
        EntrySpec("sl(n,R)/{0}", ("n",), (2,), ((2,),), "group",
                  "group manifold (G, {1}), centralized by right translations", _group_sl, _const("group-manifold")),
        EntrySpec("su(n)/{0}", ("n",), (2,), ((2,),), "group",
                  "group manifold (G, {1}), centralized by right translations", _group_su, _const("group-manifold")),
        EntrySpec("so(2p+1,2q+1)/so(2p+1,2q)", ("p", "q"), (1, 0), ((1, 0), (0, 1)), "negative",
                  "excluded family (SO(2p+1,2q+1), SO(2p+1,2q)): no elliptic element of constant length",
                  _so_odd_negative, _const("non-constant")),
        EntrySpec("so(n)/so(n-1)", ("n",), (3,), ((3,), (5,)), "negative",
                  "round spheres: constant only in odd dimension (n even)", _so_sphere,
                  lambda params: "constant" if params and params[0] % 2 == 0 else "non-constant"),
    )
}

_ID_ALIASES = {
    "so(2n,c)/so(2n-1,c)": "so(2n,C)/so(2n-1,C)",
    "sl(2n,c)/sp(n,c)": "sl(2n,C)/sp(n,C)",
    "sl(2n,r)/sp(n,r)": "sl(2n,R)/sp(n,R)",
    "so(7,c)/g2c": "so(7,C)/g2_C",
    "so(7,c)/g2_c": "so(7,C)/g2_C",
    "so(7)/g2_compact": "so(7)/g2",
    "sl(n,r)/0": "sl(n,R)/{0}",
    "su(n)/0": "su(n)/{0}",
}


def resolve_entry_id(entry_id):
    s = normalize_name(entry_id)
    if s in ENTRIES:
        return s
    low = s.lower()
    for key in ENTRIES:
        if key.lower() == low:
            return key
    if low in _ID_ALIASES:
        return _ID_ALIASES[low]
    raise CatalogError(f"unknown catalog entry {entry_id!r}; known: {', '.join(ENTRIES)}")


def build_pair(entry_id, params=None):
    """Build a catalog entry: the pair, its canonical element and expected verdict."""
    key = resolve_entry_id(entry_id)
    spec = ENTRIES[key]
    params = spec.default_params if params is None else tuple(int(x) for x in params)
    if len(params) != len(spec.param_names):
        raise CatalogError(f"{key} takes parameters {spec.param_names}, got {params}")
    pair, xi_coords, note = spec.builder(params)
    meta = dict(pair.meta, entry=key, params=list(params), kind=spec.kind)
    pair = HomogeneousPair(pair.g, pair.h_coords, pair.m_coords, pair.proj_h, pair.proj_m,
                           pair.theta, pair.signature_m, pair.name, meta)
    xi = make_killing_element(pair.g.element(xi_coords))
    return CatalogEntry(key, params, pair, xi, spec.expected(params), spec.citation, note)


def catalog_listing():
    return [spec.describe() for spec in ENTRIES.values()]


def battery_entries(kinds=("positive", "group", "negative")):
    """(entry id, params) for every battery parameter set, in catalog order."""
    out = []
    for spec in ENTRIES.values():
        if spec.kind in kinds:
            out.extend((spec.id, p) for p in spec.grid)
    return out


# ---------------------------------------------------------------------------
# product pairs


@dataclass(frozen=True, eq=False)
class ProductPair:
    """G = G_0 x ... x G_r with H the image of phi = (phi_0, ..., phi_r).

    ``h_images[j][i]`` is the matrix phi_i(Y_j) in factor i for the j-th
    basis vector Y_j of the abstract algebra of H (zero matrices allowed).
    """

    factors: tuple
    h_images: tuple
    weights: tuple = ()
    name: str = "product"

    def __post_init__(self):
        r = len(self.factors)
        if r == 0:
            raise ConstructionError("product needs at least one factor")
        for j, row in enumerate(self.h_images):
            if len(row) != r:
                raise ConstructionError(f"h basis vector {j}: {len(row)} images for {r} factors")
            for i, M in enumerate(row):
                if np.shape(M) != (self.factors[i].n, self.factors[i].n):
                    raise ConstructionError(
                        f"h basis vector {j}: image in factor {i} has shape {np.shape(M)}, "
                        f"factor acts on {self.factors[i].n}-space"
                    )

    @property
    def n_factors(self):
        return len(self.factors)

    def factor_weights(self):
        return tuple(self.weights) if self.weights else (1.0,) * self.n_factors

    def offsets(self):
        out, k = [], 0
        for f in self.factors:
            out.append(k)
            k += f.dim
        return out + [k]

    def image_coords(self, i):
        """Coordinates in factor i of phi_i(Y_j), one column per j."""
        f = self.factors[i]
        if not self.h_images:
            return np.zeros((f.dim, 0))
        return f.coords_of(np.array([row[i] for row in self.h_images])).T

    def image_dim(self, i):
        C = self.image_coords(i)
        return numeric_kernel(C, check_gap=False).rank if C.shape[1] else 0

    def factor_pair(self, i):
        """M_i = G_i / phi_i(H~) with the weighted Killing form of G_i."""
        f = self.factors[i]
        w = self.factor_weights()[i]
        fw = f.with_form(w * f.killing_gram) if w != 1.0 else f
        C = self.image_coords(i)
        if C.shape[1]:
            u, s, _ = np.linalg.svd(C, full_matrices=False)
            C = u[:, : int(np.sum(s > 1e-9 * s[0]))]
        return HomogeneousPair.build(fw, C, theta=check_theta_candidate(fw, C, transpose_theta),
                                     name=f"{self.name}[{i}]")


def _block_diag(mats_per_factor, sizes):
    N = sum(sizes)
    out = []
    off = 0
    for mats, n in zip(mats_per_factor, sizes):
        for M in mats:
            B = np.zeros((N, N))
            B[off : off + n, off : off + n] = M
            out.append(B)
        off += n
    return np.array(out)


def build_product_pair(spec):
    """Block-diagonal product algebra with h the image of the diagonal map."""
    sizes = [f.n for f in spec.factors]
    basis = _block_diag([f.basis for f in spec.factors], sizes)
    weights = spec.factor_weights()
    dims = [f.dim for f in spec.factors]
    form = np.zeros((sum(dims), sum(dims)))
    off = spec.offsets()
    for i, f in enumerate(spec.factors):
        form[off[i] : off[i + 1], off[i] : off[i + 1]] = weights[i] * f.killing_gram
    g = MatrixLieAlgebra(" x ".join(f.name for f in spec.factors), basis, form_gram=form)
    h_cols = [np.concatenate([f.coords_of(row[i]) for i, f in enumerate(spec.factors)])
              for row in spec.h_images]
    H = np.array(h_cols).T if h_cols else np.zeros((g.dim, 0))
    if H.shape[1] and numeric_kernel(H, check_gap=False).nullity:
        raise ConstructionError(f"{spec.name}: diagonal map is not injective")
    theta = check_theta_candidate(g, H, transpose_theta)
    meta = {"offsets": off, "product": True}
    return HomogeneousPair.build(g, H, theta=theta, name=spec.name, meta=meta)


def product_xi(spec, xi_parts):
    """Concatenate per-factor coordinates (None or zeros for vanishing parts)."""
    parts = []
    for f, x in zip(spec.factors, xi_parts):
        parts.append(np.zeros(f.dim) if x is None else np.asarray(getattr(x, "coords", x), float))
    return np.concatenate(parts)


def _so_stabilizer_mats(n):
    """so(n-1) inside so(n) as the stabilizer of the first basis vector."""
    base = so_matrices(n)
    return [base[k] for k in _so_h_first(n)]


def so_diagonal_product(n, copies=2, sub=None):
    """SO(n) x ... x SO(n) / diag SO(n-1) (or diag of the given sub-basis)."""
    g = build_algebra("so", (n,))
    name = f"SO({n})^{copies}/diag SO({n-1})" if sub is None else f"SO({n})^{copies}/diag H"
    sub = _so_stabilizer_mats(n) if sub is None else sub
    rows = tuple(tuple(M for _ in range(copies)) for M in sub)
    return ProductPair((g,) * copies, rows, name=name)


def so_full_diagonal(n, copies=2):
    """SO(n) x SO(n) / diag SO(n): the group-manifold-like double."""
    g = build_algebra("so", (n,))
    rows = tuple(tuple(M for _ in range(copies)) for M in g.basis)
    return ProductPair((g,) * copies, rows,
                       name=f"SO({n})^{copies}/diag SO({n})")


def so_product_of_spheres(n, copies=2):
    """(SO(n)/SO(n-1)) x ... with the product embedding of SO(n-1)^copies."""
    g = build_algebra("so", (n,))
    sub = _so_stabilizer_mats(n)
    zero = np.zeros((n, n))
    rows = []
    for c in range(copies):
        for M in sub:
            rows.append(tuple(M if i == c else zero for i in range(copies)))
    return ProductPair((g,) * copies, tuple(rows),
                       name=f"(SO({n})/SO({n-1}))^{copies}")


def so3_diag_so2():
    """SO(3) x SO(3) / diag SO(2)."""
    g = build_algebra("so", (3,))
    M = so_matrices(3)[2]  # rotation in the (2,3) plane, stabilizer of e1
    return ProductPair((g, g), ((M, M),), name="SO(3)^2/diag SO(2)")


def so3_product_so2():
    """SO(3) x SO(3) / (SO(2) x SO(2)), product embedding (coset reducible)."""
    g = build_algebra("so", (3,))
    M = so_matrices(3)[2]
    Z = np.zeros((3, 3))
    return ProductPair((g, g), ((M, Z), (Z, M)),
                       name="SO(3)/SO(2) x SO(3)/SO(2)")


def so_xi2(n):
    """diag{J, ..., J} (padded with a zero row for odd n) as so(n) coordinates."""
    g = build_algebra("so", (n,))
    return g.coords_of(block_j(n // 2, size=n))



@dataclass(frozen=True, eq=False)
class ProductCase:
    name: str
    product: ProductPair
    xi_parts: tuple
    expected: dict  # condition name -> expected boolean
    single_factor: bool = False  # xi lives in a factor that H~ covers entirely


def product_cases():
    """Product pairs with known condition patterns, used by batteries and tests."""
    x4, x3 = so_xi2(4), so_xi2(3)
    return [
        ProductCase("SO(4)xSO(4)/diag SO(3)", so_diagonal_product(4), (x4, x4),
                    {"cond1": False, "cond2": True, "cond3": True, "cond4": False}),
        ProductCase("(SO(4)/SO(3))^2", so_product_of_spheres(4), (x4, x4),
                    {"cond1": True, "cond2": True, "cond3": True, "cond4": True}),
        ProductCase("SO(3)xSO(3)/diag SO(2)", so3_diag_so2(), (x3, x3),
                    {"cond1": False, "cond2": False, "cond3": False, "cond4": False}),
        ProductCase("SO(3)/SO(2) x SO(3)/SO(2)", so3_product_so2(), (x3, None),
                    {"cond1": False, "cond2": False, "cond3": False, "cond4": False}),
        ProductCase("SO(3)xSO(3)/diag SO(3)", so_full_diagonal(3), (x3, None),
                    {"cond1": True}, single_factor=True),
    ]
