"""Dense numeric kernel for real matrix Lie algebras.

A Lie algebra is presented by a basis of real n x n matrices.  Everything
else (structure constants, Killing form, ad matrices) is derived from that
basis.  Complex algebras enter through realification: the complex matrix
A + iB is stored as the real block matrix [[A, -B], [B, A]].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ClosureViolationError,
    ElementLeftAlgebraError,
    InvalidInputError,
    NumericError,
    RankAmbiguityError,
)

# relative residual allowed when re-expressing a matrix over a basis
REEXPRESS_RTOL = 1e-8
# default relative tolerance for structural identities
STRUCT_RTOL = 1e-9
# required ratio between smallest kept and largest discarded singular value
KERNEL_GAP = 1e3


# ---------------------------------------------------------------------------
# matrix exponential

_TAYLOR_DEGREE = 18


def mat_exp(A):
    """Matrix exponential by scaling and squaring around a Taylor core.

    Works on a single square matrix or a stack of shape (..., n, n), and
    keeps the input dtype so that ``np.longdouble`` input is exponentiated
    in extended precision.  The scaled matrix has 1-norm at most 1/2, where
    the degree-18 remainder is below 1e-22.
    """
    A = np.asarray(A)
    if A.dtype.kind in "iub":
        A = A.astype(float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise InvalidInputError(f"mat_exp needs square matrices, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("mat_exp: non-finite entries")
    n = A.shape[-1]
    norms = np.abs(A).sum(axis=-2).max(axis=-1) if n else np.zeros(A.shape[:-2])
    max_norm = float(np.max(norms)) if np.size(norms) else 0.0
    s = 0
    if max_norm > 0.5:
        s = int(np.ceil(np.log2(max_norm / 0.5)))
    X = A / A.dtype.type(2.0) ** s if s else A
    eye = np.broadcast_to(np.eye(n, dtype=A.dtype), A.shape)
    # Horner evaluation of sum_k X^k / k!
    E = eye + X / A.dtype.type(_TAYLOR_DEGREE)
    for k in range(_TAYLOR_DEGREE - 1, 0, -1):
        E = eye + (X @ E) / A.dtype.type(k)
    for _ in range(s):
        E = E @ E
    if not np.all(np.isfinite(E)):
        raise NumericError("mat_exp overflowed")
    return E


# ---------------------------------------------------------------------------
# numerical kernels


@dataclass(frozen=True)
class KernelResult:
    basis: np.ndarray  # columns span the kernel
    rank: int
    gap: float  # smallest kept / largest discarded singular value (inf if none)
    singular_values: np.ndarray
    atol: float

    @property
    def nullity(self):
        return self.basis.shape[1]


def numeric_kernel(M, rtol=STRUCT_RTOL, atol=None, min_gap=KERNEL_GAP, check_gap=True):
    """Kernel of ``M`` from a full SVD, with an auditable singular-value gap.

    Singular values below ``atol`` (default ``rtol * max(s_max, 1)``) count
    as zero.  When both zero and nonzero singular values exist and their
    ratio is below ``min_gap`` the rank is declared ambiguous.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    rows, cols = M.shape
    if cols == 0:
        return KernelResult(np.zeros((0, 0)), 0, np.inf, np.zeros(0), 0.0)
    if rows == 0:
        return KernelResult(np.eye(cols), 0, np.inf, np.zeros(0), 0.0)
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    smax = s[0] if s.size else 0.0
    if atol is None:
        atol = rtol * max(smax, 1.0)
    rank = int(np.sum(s > atol))
    kept = s[:rank]
    dropped = s[rank:]
    if rank and dropped.size:
        gap = float(kept[-1] / dropped[0]) if dropped[0] > 0 else np.inf
    else:
        gap = np.inf
    if check_gap and gap < min_gap:
        raise RankAmbiguityError(
            f"rank ambiguous: singular-value gap {gap:.3g} < {min_gap:g}",
            singular_values=s,
            gap=gap,
        )
    return KernelResult(vt[rank:].T.copy(), rank, gap, s, float(atol))


def numeric_rank(M, **kw):
    return numeric_kernel(M, **kw).rank


def refined_inverse(M, dtype=np.longdouble, steps=3):
    """Inverse of ``M`` in ``dtype``: a double inverse polished by Newton steps.

    numpy's linear algebra only runs in double; X <- X + X (I - M X) squares
    the residual each step, so three steps reach extended precision.
    """
    M = np.asarray(M, dtype=dtype)
    X = np.linalg.inv(M.astype(float)).astype(dtype)
    eye = np.eye(M.shape[0], dtype=dtype)
    for _ in range(steps):
        X = X + X @ (eye - M @ X)
    return X


# ---------------------------------------------------------------------------
# realification helpers


def realify(Z):
    """Complex (..., n, n) matrices -> real (..., 2n, 2n) via [[A, -B], [B, A]]."""
    Z = np.asarray(Z, dtype=complex)
    A, B = Z.real, Z.imag
    top = np.concatenate([A, -B], axis=-1)
    bot = np.concatenate([B, A], axis=-1)
    return np.concatenate([top, bot], axis=-2)


def complex_structure(n):
    """Left multiplication by i on realified n x n complex matrices."""
    Z = np.zeros((2 * n, 2 * n))
    Z[n:, :n] = np.eye(n)
    Z[:n, n:] = -np.eye(n)
    return Z


# ---------------------------------------------------------------------------
# algebras and elements


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class MatrixLieAlgebra:
    """A real Lie algebra spanned by a basis of real square matrices.

    ``form_gram`` is the invariant form b used for all metric computations;
    it defaults to the Killing form computed from the structure constants.
    Construction validates closure, Jacobi, invariance and nondegeneracy
    unless ``check=False``.
    """

    def __init__(self, name, basis, form_gram=None, check=True):
        basis = np.asarray(basis, dtype=float)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise InvalidInputError(f"basis must have shape (dim, n, n), got {basis.shape}")
        if not np.all(np.isfinite(basis)):
            raise InvalidInputError("basis has non-finite entries")
        self.name = name
        self.basis = _readonly(basis)
        self.dim = basis.shape[0]
        self.n = basis.shape[1]
        flat = basis.reshape(self.dim, -1)
        if self.dim:
            kr = numeric_kernel(flat.T, check_gap=False)
            if kr.rank < self.dim:
                raise InvalidInputError(f"{name}: basis matrices are linearly dependent")
            self._pinv = np.linalg.pinv(flat.T)
        else:
            self._pinv = np.zeros((0, self.n * self.n))
        self._flat = flat
        self.scale = float(max((np.linalg.norm(b) for b in basis), default=1.0))

        comm = np.einsum("iab,jbc->ijac", basis, basis)
        comm = comm - comm.transpose(1, 0, 2, 3)
        c, resid = self._coords_batch(comm.reshape(-1, self.n, self.n), floor=self.scale ** 2)
        if self.dim and resid.max(initial=0.0) > REEXPRESS_RTOL:
            i, j = np.unravel_index(int(np.argmax(resid)), (self.dim, self.dim))
            raise ClosureViolationError(
                f"{name}: [X{i}, X{j}] leaves the span (relative residual {resid.max():.2e})"
            )
        self.struct_consts = _readonly(c.reshape(self.dim, self.dim, self.dim))
        # ad(X_i)[k, j] = c[i, j, k]
        self.ad_basis = _readonly(self.struct_consts.transpose(0, 2, 1))
        self.killing_gram = _readonly(np.einsum("ikj,ljk->il", self.ad_basis, self.ad_basis))
        if form_gram is None:
            form_gram = self.killing_gram
        form_gram = np.asarray(form_gram, dtype=float)
        self.form_gram = _readonly(0.5 * (form_gram + form_gram.T))
        self.form_scale = float(max(np.abs(self.form_gram).max(initial=0.0), 1e-300))
        if check:
            self.validate()

    # -- re-expression ------------------------------------------------------

    def _coords_batch(self, mats, floor=None):
        """Coordinates and relative re-expression residuals.

        Residuals are relative to max(|M|, floor); the floor (default
        1e-6 * basis scale) keeps round-off on near-zero matrices from
        reading as a large relative error.
        """
        mats = np.asarray(mats, dtype=float)
        flat = mats.reshape(mats.shape[0], -1)
        coords = flat @ self._pinv.T
        back = coords @ self._flat
        num = np.linalg.norm(flat - back, axis=1)
        floor = 1e-6 * self.scale if floor is None else floor
        den = np.maximum(np.linalg.norm(flat, axis=1), floor)
        resid = np.where(np.linalg.norm(flat, axis=1) > 0, num / den, 0.0)
        return coords, resid

    def coords_of(self, M, rtol=REEXPRESS_RTOL, error=ClosureViolationError):
        """Coordinates of matrix ``M`` (or a stack of matrices) over the basis."""
        M = np.asarray(M, dtype=float)
        single = M.ndim == 2
        coords, resid = self._coords_batch(M[None] if single else M)
        if resid.size and resid.max() > rtol:
            raise error(
                f"{self.name}: matrix not in span of basis (relative residual {resid.max():.2e})"
            )
        return coords[0] if single else coords

    def matrix_of(self, coords):
        coords = np.asarray(coords, dtype=float)
        return np.tensordot(coords, self.basis, axes=(-1, 0))

    def element(self, coords):
        return AlgebraElement(np.asarray(coords, dtype=float), self)

    def from_matrix(self, M):
        return AlgebraElement(self.coords_of(M), self)

    def basis_element(self, i):
        e = np.zeros(self.dim)
        e[i] = 1.0
        return AlgebraElement(e, self)

    def zero(self):
        return AlgebraElement(np.zeros(self.dim), self)

    # -- coordinate-level operations ----------------------------------------

    def ad_of(self, coords):
        return np.tensordot(np.asarray(coords, dtype=float), self.ad_basis, axes=(-1, 0))

    def bracket_coords(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.struct_consts)

    def form(self, x, y):
        return float(np.asarray(x) @ self.form_gram @ np.asarray(y))

    # -- invariants ---------------------------------------------------------

    def jacobi_residual(self):
        """max over i,j,k of |[[Xi,Xj],Xk] + cyclic| in coordinates."""
        c = self.struct_consts
        # [[Xi,Xj],Xk] = sum_l c_ijl c_lkm X_m
        t = np.einsum("ijl,lkm->ijkm", c, c)
        cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return float(np.abs(cyc).max(initial=0.0))

    def antisymmetry_residual(self):
        c = self.struct_consts
        return float(np.abs(c + c.transpose(1, 0, 2)).max(initial=0.0))

    def invariance_residual(self):
        """max |b([Z,X],Y) + b(X,[Z,Y])| / form_scale over basis triples."""
        # b([Xz, Xx], Xy) = sum_k c_zxk G_ky
        t = np.einsum("zxk,ky->zxy", self.struct_consts, self.form_gram)
        return float(np.abs(t + t.transpose(0, 2, 1)).max(initial=0.0) / self.form_scale)

    def killing_from_matrices(self):
        """Killing Gram recomputed from explicit ad matrices built by re-expression."""
        ads = np.empty((self.dim, self.dim, self.dim))
        for i in range(self.dim):
            comm = self.basis[i] @ self.basis - self.basis @ self.basis[i]
            ads[i] = self.coords_of(comm).T
        return np.einsum("ikj,ljk->il", ads, ads)

    def validate(self):
        if self.dim == 0:
            return
        scale3 = max(self.scale, 1.0) ** 3
        if self.antisymmetry_residual() > STRUCT_RTOL * scale3:
            raise ClosureViolationError(f"{self.name}: structure constants not antisymmetric")
        if self.jacobi_residual() > STRUCT_RTOL * scale3 * max(1.0, np.abs(self.struct_consts).max()):
            raise ClosureViolationError(f"{self.name}: Jacobi identity fails")
        if self.invariance_residual() > STRUCT_RTOL * max(1.0, np.abs(self.struct_consts).max()):
            raise ClosureViolationError(f"{self.name}: invariant form is not ad-invariant")
        sv = np.linalg.svd(self.form_gram, compute_uv=False)
        if sv[-1] <= STRUCT_RTOL * sv[0]:
            raise ClosureViolationError(f"{self.name}: invariant form is degenerate")

    def with_form(self, form_gram, name=None):
        """Same basis, different invariant form."""
        return MatrixLieAlgebra(name or self.name, self.basis, form_gram=form_gram)

    def __repr__(self):
        return f"MatrixLieAlgebra({self.name!r}, dim={self.dim}, n={self.n})"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    coords: np.ndarray
    parent: MatrixLieAlgebra = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float).reshape(-1)
        if c.shape[0] != self.parent.dim:
            raise InvalidInputError(
                f"element has {c.shape[0]} coordinates, algebra has dim {self.parent.dim}"
            )
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("element has non-finite coordinates")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def matrix(self):
        return self.parent.matrix_of(self.coords)

    def _check(self, other):
        if other.parent is not self.parent:
            raise InvalidInputError("elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.coords + other.coords, self.parent)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.coords - other.coords, self.parent)

    def __mul__(self, c):
        return AlgebraElement(self.coords * float(c), self.parent)

    __rmul__ = __mul__

    def __neg__(self):
        return AlgebraElement(-self.coords, self.parent)

    def norm(self):
        return float(np.linalg.norm(self.coords))

    def allclose(self, other, atol=1e-9):
        self._check(other)
        return bool(np.allclose(self.coords, other.coords, atol=atol, rtol=0))


# ---------------------------------------------------------------------------
# operations


def bracket(X, Y):
    """[X, Y] = XY - YX re-expressed over the basis."""
    X._check(Y)
    g = X.parent
    M = X.matrix @ Y.matrix - Y.matrix @ X.matrix
    return AlgebraElement(g.coords_of(M), g)


def ad_matrix(X):
    """Matrix of Y -> [X, Y] in the basis coordinates."""
    return X.parent.ad_of(X.coords)


def killing_form(X, Y):
    X._check(Y)
    return float(X.coords @ X.parent.killing_gram @ Y.coords)


def invariant_form(X, Y):
    """The algebra's invariant form b (Killing form unless overridden)."""
    X._check(Y)
    return X.parent.form(X.coords, Y.coords)


def adjoint_action(g, X):
    """Ad(g) X = g X g^{-1}, re-expressed over the basis."""
    g = np.asarray(g, dtype=float)
    alg = X.parent
    if g.shape != (alg.n, alg.n):
        raise InvalidInputError(f"group element has shape {g.shape}, need {(alg.n, alg.n)}")
    try:
        gi = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise InvalidInputError("group element is singular") from exc
    M = g @ X.matrix @ gi
    return AlgebraElement(alg.coords_of(M, error=ElementLeftAlgebraError), alg)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    semisimple: bool
    clusters: list  # (center, algebraic multiplicity, geometric multiplicity)
    spectral_radius: float

    def pure_imaginary(self, rtol=1e-7):
        return bool(np.all(np.abs(self.eigenvalues.real) <= rtol * max(self.spectral_radius, 1.0)))


def _cluster(values, tol):
    order = np.argsort(values.real + 1e-3 * values.imag, kind="stable")
    clusters = []
    for v in values[order]:
        for cl in clusters:
            if abs(np.mean(cl) - v) <= tol:
                cl.append(v)
                break
        else:
            clusters.append([v])
    return clusters


def spectrum_matrix(A, cluster_rtol=1e-4):
    """Eigenvalues of A plus a semisimplicity test by multiplicity comparison.

    Eigenvalues are grouped into clusters (defective eigenvalues split by
    roughly eps**(1/k)); each cluster is semisimple when the nullity of
    A - center*I equals its size.
    """
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    if d == 0:
        return SpectrumReport(np.zeros(0, complex), True, [], 0.0)
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    nrm = max(np.linalg.norm(A, 2), 1e-300)
    rho = float(np.abs(ev).max())
    clusters = _cluster(ev, cluster_rtol * max(nrm, 1.0))
    out = []
    semisimple = True
    for cl in clusters:
        cl = np.asarray(cl)
        center = complex(np.mean(cl))
        radius = float(np.abs(cl - center).max())
        thresh = max(STRUCT_RTOL * max(nrm, 1.0), 10.0 * radius)
        s = np.linalg.svd(A - center * np.eye(d), compute_uv=False)
        geo = int(np.sum(s <= thresh))
        out.append((center, len(cl), geo))
        if geo != len(cl):
            semisimple = False
    return SpectrumReport(ev, semisimple, out, rho)


def spectrum_ad(X):
    return spectrum_matrix(ad_matrix(X))
