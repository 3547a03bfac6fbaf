"""Octonions, split octonions and their derivation algebras.

Basis is 1 = e0, e1, ..., e7.  The oriented Fano lines below give
e_i e_j = e_k for each cyclic rotation of (i, j, k) and e_j e_i = -e_k.
They come from Cayley-Dickson doubling of the quaternions (1, e1, e2, e3)
with l = e4, so {e1, e2, e3} spans the imaginary quaternions.

Split octonions flip the sign of every product of two of the generators
e4..e7 (so those square to +1).  Their norm restricted to the imaginary
part then has signature (3, 4) with the positive block e1, e2, e3 first.
"""

import numpy as np

from .errors import InvalidInputError
from .lie_core import MatrixLieAlgebra, numeric_kernel

FANO_LINES = (
    (1, 2, 3),
    (1, 4, 5),
    (1, 7, 6),
    (2, 4, 6),
    (2, 5, 7),
    (3, 4, 7),
    (3, 6, 5),
)

QUATERNION_LINE = (1, 2, 3)
SPLIT_GENERATORS = (4, 5, 6, 7)


def octonion_table(split=False):
    """Structure constants T with e_i e_j = sum_k T[i, j, k] e_k (8 x 8 x 8)."""
    T = np.zeros((8, 8, 8))
    for i in range(8):
        T[0, i, i] = 1.0
        T[i, 0, i] = 1.0
    for i in range(1, 8):
        T[i, i, 0] = -1.0
    for a, b, c in FANO_LINES:
        for i, j, k in ((a, b, c), (b, c, a), (c, a, b)):
            T[i, j, k] = 1.0
            T[j, i, k] = -1.0
    if split:
        for i in SPLIT_GENERATORS:
            for j in SPLIT_GENERATORS:
                T[i, j] *= -1.0
    return T


def quaternion_table():
    T = np.zeros((4, 4, 4))
    for i in range(4):
        T[0, i, i] = T[i, 0, i] = 1.0
    for i in range(1, 4):
        T[i, i, 0] = -1.0
    for i, j, k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        T[i, j, k] = 1.0
        T[j, i, k] = -1.0
    return T


def multiply(T, x, y):
    return np.einsum("i,j,ijk->k", x, y, T)


def norm_form(T):
    """Diagonal of the quadratic form N(e_i) = e_i * conj(e_i) for a table with unit e0."""
    m = T.shape[0]
    out = np.empty(m)
    for i in range(m):
        conj = -np.eye(m)[i] if i else np.eye(m)[0]
        out[i] = multiply(T, np.eye(m)[i], conj)[0]
    return out


def _has_unit(T):
    m = T.shape[0]
    return np.allclose(T[0], np.eye(m)) and np.allclose(T[:, 0, :], np.eye(m))


def derivation_algebra(T, name="der", imaginary_only=None, min_gap=1e3):
    """All linear maps D with D(xy) = D(x)y + xD(y), as a matrix Lie algebra.

    The condition is linear in the m*m entries of D, so the derivations are
    the numerical kernel of an (m^3 x m^2) system.  For a unital table the
    derivations kill e0 and preserve the span of e1..e_{m-1}; by default the
    algebra is then returned acting on that imaginary part.
    """
    T = np.asarray(T, dtype=float)
    if T.ndim != 3 or len(set(T.shape)) != 1:
        raise InvalidInputError("multiplication table must have shape (m, m, m)")
    m = T.shape[0]
    if m > 8:
        raise InvalidInputError("derivation_algebra supports algebras of dimension <= 8")
    # D e_a = sum_b D[b, a] e_b, unknowns vec(D) with index b*m + a
    eye = np.eye(m)
    A = np.zeros((m, m, m, m, m))
    # A[i, j, out, b, a] is the coefficient of D[b, a] in the e_out component
    A += np.einsum("ija,ob->ijoba", T, eye)
    A -= np.einsum("bjo,ia->ijoba", T, eye)
    A -= np.einsum("ibo,ja->ijoba", T, eye)
    A = A.reshape(m ** 3, m * m)
    kr = numeric_kernel(A, min_gap=min_gap)
    mats = kr.basis.T.reshape(-1, m, m)
    if imaginary_only is None:
        imaginary_only = _has_unit(T)
    if imaginary_only:
        if not np.allclose(mats[:, :, 0], 0, atol=1e-10) or not np.allclose(mats[:, 0, :], 0, atol=1e-10):
            raise InvalidInputError("derivations do not preserve the imaginary part")
        mats = mats[:, 1:, 1:]
    # orthonormal in Frobenius norm; sign fix keeps the basis reproducible
    for k, M in enumerate(mats):
        idx = np.argmax(np.abs(M.ravel()) > 1e-8)
        if M.ravel()[idx] < 0:
            mats[k] = -M
    return MatrixLieAlgebra(name, mats)
