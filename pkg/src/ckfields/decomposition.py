"""Reductive decomposition g = h + m, Cartan involutions and compact duals."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError, InvalidInputError, ValidationError
from .lie_core import (
    STRUCT_RTOL,
    AlgebraElement,
    MatrixLieAlgebra,
    numeric_kernel,
    realify,
)


def signature(gram, rtol=STRUCT_RTOL):
    """(plus, minus) counts of a symmetric Gram matrix; zero cut at rtol * spectral radius."""
    gram = np.asarray(gram, dtype=float)
    if gram.size == 0:
        return (0, 0)
    ev = np.linalg.eigvalsh(0.5 * (gram + gram.T))
    cut = rtol * max(np.abs(ev).max(), 1e-300)
    return int(np.sum(ev > cut)), int(np.sum(ev < -cut))


def theta_matrix(g, fn):
    """Coordinate matrix of a linear map given on matrices (e.g. X -> -S X^T S)."""
    images = np.array([fn(M) for M in g.basis])
    return g.coords_of(images, error=ValidationError).T if g.dim else np.zeros((0, 0))


def signature_theta(S):
    """X -> -S X^T S for a diagonal +-1 matrix S."""
    S = np.asarray(S, dtype=float)
    return lambda X: -S @ X.T @ S


@dataclass(frozen=True, eq=False)
class HomogeneousPair:
    """A pair (g, h) with the b-orthogonal complement m and projections.

    Subspaces are stored as coordinate matrices over the g-basis, one column
    per basis vector.
    """

    g: MatrixLieAlgebra
    h_coords: np.ndarray
    m_coords: np.ndarray
    proj_h: np.ndarray
    proj_m: np.ndarray
    theta: np.ndarray | None
    signature_m: tuple
    name: str = ""
    meta: dict = field(default_factory=dict)

    @classmethod
    def build(cls, g, h_coords, theta=None, name="", meta=None, check=True):
        """Decompose g = h + m and validate the pair.

        ``theta`` is either a coordinate matrix or a callable on matrices.
        """
        h_coords = np.asarray(h_coords, dtype=float).reshape(g.dim, -1)
        G = g.form_gram
        if h_coords.shape[1]:
            kr = numeric_kernel(h_coords, check_gap=False)
            if kr.nullity:
                raise ConstructionError(f"{name}: h basis is linearly dependent")
            bh = h_coords.T @ G @ h_coords
            sv = np.linalg.svd(bh, compute_uv=False)
            if sv[-1] <= STRUCT_RTOL * max(sv[0], 1e-300) * 10 or sv[-1] <= STRUCT_RTOL * g.form_scale:
                raise ConstructionError(f"{name}: b restricted to h is degenerate")
            m_coords = numeric_kernel(h_coords.T @ G, check_gap=False).basis
            proj_h = h_coords @ np.linalg.solve(bh, h_coords.T @ G)
        else:
            m_coords = np.eye(g.dim)
            proj_h = np.zeros((g.dim, g.dim))
        proj_m = np.eye(g.dim) - proj_h
        if callable(theta):
            theta = theta_matrix(g, theta)
        sig = signature(m_coords.T @ G @ m_coords)
        pair = cls(g, h_coords, m_coords, proj_h, proj_m, theta, sig, name, dict(meta or {}))
        if check:
            pair.validate()
        return pair

    # -- basic accessors ----------------------------------------------------

    @property
    def dim_g(self):
        return self.g.dim

    @property
    def dim_h(self):
        return self.h_coords.shape[1]

    @property
    def dim_m(self):
        return self.m_coords.shape[1]

    @property
    def h_basis(self):
        return [self.g.element(c) for c in self.h_coords.T]

    @property
    def m_basis(self):
        return [self.g.element(c) for c in self.m_coords.T]

    @property
    def is_group_manifold(self):
        return self.dim_h == 0

    def tol(self):
        return STRUCT_RTOL * self.g.form_scale

    # -- invariants ---------------------------------------------------------

    def residuals(self):
        g, H, Mc = self.g, self.h_coords, self.m_coords
        G = g.form_gram
        out = {}
        out["b(h,m)"] = float(np.abs(H.T @ G @ Mc).max(initial=0.0)) / g.form_scale
        P = self.proj_h
        out["proj_h idempotent"] = float(np.abs(P @ P - P).max(initial=0.0))
        hh = np.einsum("ia,jb,ijk->abk", H, H, g.struct_consts).reshape(-1, g.dim)
        hm = np.einsum("ia,jb,ijk->abk", H, Mc, g.struct_consts).reshape(-1, g.dim)
        cscale = max(1.0, np.abs(g.struct_consts).max(initial=0.0))
        out["[h,h] in h"] = float(np.abs(hh @ self.proj_m.T).max(initial=0.0)) / cscale
        out["[h,m] in m"] = float(np.abs(hm @ P.T).max(initial=0.0)) / cscale
        if self.theta is not None:
            th = self.theta
            out["theta^2 = 1"] = float(np.abs(th @ th - np.eye(g.dim)).max(initial=0.0))
            out["theta preserves h"] = float(np.abs(self.proj_m @ th @ H).max(initial=0.0))
            out["theta preserves b"] = float(np.abs(th.T @ G @ th - G).max(initial=0.0)) / g.form_scale
            # theta [X_i, X_j] = [theta X_i, theta X_j]
            lhs = np.einsum("ijk,lk->ijl", g.struct_consts, th)
            rhs = np.einsum("ai,bj,abk->ijk", th, th, g.struct_consts)
            out["theta automorphism"] = float(np.abs(lhs - rhs).max(initial=0.0)) / cscale
        return out

    def validate(self, rtol=1e-8):
        bad = {k: v for k, v in self.residuals().items() if v > rtol}
        if bad:
            raise ConstructionError(f"{self.name}: pair invariants fail: {bad}")

    # -- projections ----------------------------------------------------------

    def project_h(self, X):
        return AlgebraElement(self.proj_h @ X.coords, self.g)

    def project_m(self, X):
        return AlgebraElement(self.proj_m @ X.coords, self.g)

    def h_form_gram(self):
        return self.h_coords.T @ self.g.form_gram @ self.h_coords

    def summary(self):
        return {
            "name": self.name,
            "dim_g": self.dim_g,
            "dim_h": self.dim_h,
            "dim_m": self.dim_m,
            "signature_m": list(self.signature_m),
        }


def project_h(pair, X):
    return pair.project_h(X)


def project_m(pair, X):
    return pair.project_m(X)


# ---------------------------------------------------------------------------
# Cartan involution


@dataclass(frozen=True)
class CartanData:
    theta: np.ndarray
    k_coords: np.ndarray
    p_coords: np.ndarray
    hk_coords: np.ndarray  # h cap k
    hp_coords: np.ndarray  # h cap p
    mk_coords: np.ndarray
    mp_coords: np.ndarray

    @property
    def dim_k(self):
        return self.k_coords.shape[1]

    @property
    def dim_p(self):
        return self.p_coords.shape[1]


def _eig_split(theta, basis_coords):
    """Split span(basis_coords) (theta-stable) into +1 / -1 eigenspaces."""
    if basis_coords.shape[1] == 0:
        z = np.zeros((basis_coords.shape[0], 0))
        return z, z
    B = basis_coords
    # theta restricted to the subspace, in the subspace's own coordinates
    restricted = np.linalg.lstsq(B, theta @ B, rcond=None)[0]
    plus = numeric_kernel(restricted - np.eye(B.shape[1])).basis
    minus = numeric_kernel(restricted + np.eye(B.shape[1])).basis
    if plus.shape[1] + minus.shape[1] != B.shape[1]:
        raise ValidationError("theta is not diagonalizable with eigenvalues +-1 on the subspace")
    return B @ plus, B @ minus


def cartan_involution(pair, theta=None):
    """Eigenspaces k (+1) and p (-1) of the Cartan involution, with h and m split.

    Validates that theta is an involutive automorphism preserving h and b,
    and that b is negative definite on k and positive definite on p.
    """
    if theta is not None:
        th = theta_matrix(pair.g, theta) if callable(theta) else np.asarray(theta, dtype=float)
        pair = HomogeneousPair(
            pair.g, pair.h_coords, pair.m_coords, pair.proj_h, pair.proj_m, th,
            pair.signature_m, pair.name, pair.meta,
        )
    if pair.theta is None:
        raise ValidationError(f"{pair.name}: no Cartan involution available")
    res = pair.residuals()
    bad = {k: v for k, v in res.items() if k.startswith("theta") and v > 1e-8}
    if bad:
        raise ValidationError(f"{pair.name}: supplied theta fails: {bad}")
    th = pair.theta
    G = pair.g.form_gram
    k, p = _eig_split(th, np.eye(pair.dim_g))
    hk, hp = _eig_split(th, pair.h_coords)
    mk, mp = _eig_split(th, pair.m_coords)
    if k.shape[1] and signature(k.T @ G @ k) != (0, k.shape[1]):
        raise ValidationError(f"{pair.name}: b is not negative definite on k")
    if p.shape[1] and signature(p.T @ G @ p) != (p.shape[1], 0):
        raise ValidationError(f"{pair.name}: b is not positive definite on p")
    return CartanData(th, k, p, hk, hp, mk, mp)


# ---------------------------------------------------------------------------
# compact dual


@dataclass(frozen=True, eq=False)
class CompactDualPair:
    """g_u = k + ip with h_u = (h cap k) + i(h cap p).

    The basis of g_u is ordered [h cap k, m cap k, i(h cap p), i(m cap p)];
    ``k_coords_in_g`` maps the first block-pair back to g coordinates so a
    theta-fixed element of g can be transported.
    """

    pair: HomogeneousPair  # the pair (g_u, h_u)
    source: HomogeneousPair
    k_coords_in_g: np.ndarray  # columns: g-coords of the k part of the g_u basis
    dim_k: int
    identity: bool = False

    @property
    def g_u(self):
        return self.pair.g

    @property
    def h_u_coords(self):
        return self.pair.h_coords

    def transport(self, xi):
        """Coordinates in g_u of an element of k."""
        xi = np.asarray(getattr(xi, "coords", xi), dtype=float)
        if self.identity:
            return self.pair.g.element(xi)
        K = self.k_coords_in_g
        a, *_ = np.linalg.lstsq(K, xi, rcond=None)
        if np.linalg.norm(K @ a - xi) > 1e-8 * max(np.linalg.norm(xi), 1.0):
            raise ValidationError("element is not in k; only theta-fixed elements transport")
        out = np.zeros(self.pair.g.dim)
        out[: self.dim_k] = a
        return self.pair.g.element(out)


def compact_dual(pair, cartan=None):
    """Build the compact dual pair inside the realified complexification.

    g has real n x n matrices X; its complexification is realified with X ->
    diag(X, X) and iX -> [[0, -X], [X, 0]].  For compact g (p = 0) the dual
    is g itself.
    """
    cd = cartan or cartan_involution(pair)
    g = pair.g
    if cd.dim_p == 0:
        return CompactDualPair(pair, pair, np.eye(g.dim), g.dim, identity=True)
    G = g.form_gram
    blocks = [cd.hk_coords, cd.mk_coords, cd.hp_coords, cd.mp_coords]
    k_part = np.hstack(blocks[:2])
    p_part = np.hstack(blocks[2:])
    k_mats = g.matrix_of(k_part.T)
    p_mats = g.matrix_of(p_part.T)
    mats = np.concatenate([realify(k_mats.astype(complex)), realify(1j * p_mats)])
    # transported form: b on k, -b on p, zero across
    form = np.zeros((g.dim, g.dim))
    dk = k_part.shape[1]
    form[:dk, :dk] = k_part.T @ G @ k_part
    form[dk:, dk:] = -(p_part.T @ G @ p_part)
    g_u = MatrixLieAlgebra(f"compact dual of {g.name}", mats, form_gram=form)
    if signature(g_u.form_gram) != (0, g_u.dim):
        raise ConstructionError(f"{pair.name}: dual form is not negative definite (broken theta)")
    nhk, nmk, nhp = (b.shape[1] for b in blocks[:3])
    idx = list(range(nhk)) + list(range(nhk + nmk, nhk + nmk + nhp))
    h_u = np.eye(g.dim)[:, idx]
    dual = HomogeneousPair.build(
        g_u, h_u, theta=np.eye(g.dim), name=f"dual({pair.name})",
        meta={"dual_of": pair.name},
    )
    return CompactDualPair(dual, pair, k_part, dk)


# ---------------------------------------------------------------------------
# ideals and coset space reduction


def simple_ideals(g, seed=0):
    """Decompose a semisimple g into simple ideals (coordinate bases).

    A generic element of the commutant of ad(g) acts on each simple ideal by
    a scalar (real type) or by a + bJ (complex type); its eigenvalues,
    grouped by (Re, |Im|), separate the ideals.
    """
    d = g.dim
    if d == 0:
        return []
    ads = g.ad_basis
    # T ad_i - ad_i T = 0 for all i, unknown vec(T) row-major
    eye = np.eye(d)
    rows = [np.kron(eye, A.T) - np.kron(A, eye) for A in ads]
    kr = numeric_kernel(np.vstack(rows), check_gap=False)
    rng = np.random.default_rng(seed)
    T = (kr.basis @ rng.normal(size=kr.nullity)).reshape(d, d)
    ev, vecs = np.linalg.eig(T)
    keys = np.round(np.c_[ev.real, np.abs(ev.imag)] / max(np.abs(ev).max(), 1e-300), 6)
    groups = {}
    for i, key in enumerate(map(tuple, keys)):
        groups.setdefault(key, []).append(i)
    ideals = []
    for idx in groups.values():
        V = vecs[:, idx]
        span = np.hstack([V.real, V.imag])
        u, s, _ = np.linalg.svd(span, full_matrices=False)
        r = int(np.sum(s > 1e-8 * s[0]))
        ideals.append(u[:, :r])
    ideals.sort(key=lambda B: int(np.argmax(np.abs(B).sum(axis=1) > 1e-8)))
    return ideals


def _intersection_dim(A, B):
    """dim(span A cap span B) for full-column-rank coordinate matrices."""
    if A.shape[1] == 0 or B.shape[1] == 0:
        return 0
    r = numeric_kernel(np.hstack([A, B]), check_gap=False).rank
    return A.shape[1] + B.shape[1] - r


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def coset_reduce(pair):
    """Finest coset space reduction of G/H along a partition of the ideals.

    Returns a list of factor pairs (each a sub-pair inside the same matrix
    representation), or ``[pair]`` when G/H is coset irreducible.
    """
    if pair.dim_m == 0:
        return [pair]
    ideals = simple_ideals(pair.g)
    if len(ideals) < 2:
        return [pair]
    H = pair.h_coords
    best = None
    for part in _set_partitions(list(range(len(ideals)))):
        if len(part) < 2 or (best is not None and len(part) <= len(best[0])):
            continue
        blocks = [np.hstack([ideals[i] for i in block]) for block in part]
        hdims = [_intersection_dim(B, H) for B in blocks]
        if sum(hdims) != pair.dim_h:
            continue
        if any(B.shape[1] - hd == 0 for B, hd in zip(blocks, hdims)):
            continue
        best = (part, blocks)
    if best is None:
        return [pair]
    factors = []
    g = pair.g
    for block, B in zip(*best):
        sub_mats = g.matrix_of(B.T)
        G_sub = B.T @ g.form_gram @ B
        sub = MatrixLieAlgebra(f"{g.name}[ideals {block}]", sub_mats, form_gram=G_sub)
        # h cap ideal block, via the projection killing the complement
        if H.shape[1]:
            ns = numeric_kernel(np.hstack([B, -H]), check_gap=False).basis
            hb = ns[: B.shape[1]]
            hb = np.linalg.svd(hb, full_matrices=False)[0][:, : _intersection_dim(B, H)]
        else:
            hb = np.zeros((B.shape[1], 0))
        theta = None
        if pair.theta is not None:
            theta = np.linalg.lstsq(B, pair.theta @ B, rcond=None)[0]
        factors.append(HomogeneousPair.build(sub, hb, theta=theta, name=f"{pair.name}|{block}"))
    return factors


def check_theta_candidate(g, h_coords, fn):
    """Return the coordinate matrix of ``fn`` if it is a valid Cartan involution for (g, h), else None."""
    try:
        th = theta_matrix(g, fn)
        pair = HomogeneousPair.build(g, h_coords, theta=th, check=False)
        cartan_involution(pair)
    except (ValidationError, ConstructionError, InvalidInputError):
        return None
    return th

