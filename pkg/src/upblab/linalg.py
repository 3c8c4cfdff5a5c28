"""Dense linear algebra kernels for small multipartite Hilbert spaces.

Two arithmetic regimes live side by side here. Integer and rational
amplitudes are handled exactly (Python ``int``/``Fraction``), so that
orthogonality and local-span questions about catalog states are decided by
exact zeros. Everything spectral (eigensolves, projectors, normalization)
runs in double precision through numpy.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .exceptions import EmptyComplement, InvalidBipartition, InvalidOperator, InvalidState

DEFAULT_TOL = 1e-9
TOL_ENV_VAR = "UPBLAB_TOL"


def default_tol() -> float:
    """Tolerance used wherever a call does not pass one explicitly.

    ``UPBLAB_TOL`` (a decimal string) overrides the built-in ``1e-9``.
    """
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {raw!r}")
    return value


def resolve_tol(tol: float | None) -> float:
    return default_tol() if tol is None else float(tol)


# ---------------------------------------------------------------------------
# exact arithmetic helpers


def is_exact(values: Iterable) -> bool:
    """True when every value is an int or a Fraction (bools excluded)."""
    return all(isinstance(v, Rational) and not isinstance(v, bool) for v in values)


def exact_array(values: Sequence) -> np.ndarray:
    """Pack amplitudes into the narrowest numpy array that keeps them exact."""
    vals = list(values)
    if all(isinstance(v, int) for v in vals):
        if all(abs(v) < 2**62 for v in vals):
            return np.array(vals, dtype=np.int64)
        return np.array(vals, dtype=object)
    if is_exact(vals):
        return np.array([Fraction(v) for v in vals], dtype=object)
    return np.array(vals, dtype=complex)


def conj(value):
    if isinstance(value, Rational):
        return value
    return complex(value).conjugate()


def exact_inner(u: Sequence, v: Sequence):
    """<u|v> with the first argument conjugated; exact for rational input."""
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
    return sum((conj(a) * b for a, b in zip(u, v)), 0)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals.

    Returns the nonzero reduced rows and the pivot column of each.
    """
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        lead = mat[r][c]
        mat[r] = [x / lead for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def exact_rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def exact_nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0} over the rationals, one vector per free column."""
    reduced, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def primitive_integer(vec: Sequence) -> list[int]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    fr = [Fraction(x) for x in vec]
    den = reduce(math.lcm, (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(math.gcd, (abs(x) for x in ints), 0)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    return [-x for x in ints] if lead < 0 else ints


# ---------------------------------------------------------------------------
# kernels


def kron_flatten(local_vectors: Sequence) -> np.ndarray:
    """Tensor product of local vectors in party order.

    Accepts raw amplitude sequences or anything with an ``amps`` attribute.
    Integer input yields an exact integer array.
    """
    if len(local_vectors) == 0:
        raise InvalidState("kron_flatten needs at least one local vector")
    amps = [list(getattr(v, "amps", v)) for v in local_vectors]
    for a in amps:
        if len(a) == 0 or all(x == 0 for x in a):
            raise InvalidState("local vector is zero")
    flat = reduce(lambda acc, a: [x * y for x in acc for y in a], amps[1:], amps[0])
    return exact_array(flat)


def check_hermitian(M: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidOperator(f"expected a square matrix, got shape {M.shape}")
    M = M.astype(complex)
    if M.size and np.max(np.abs(M - M.conj().T)) > tol:
        raise InvalidOperator("matrix is not Hermitian")
    return M


def hermitian_eigh(M: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
    M = check_hermitian(M, tol)
    return np.linalg.eigh((M + M.conj().T) / 2)


def hermitian_eigs(M: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    return hermitian_eigh(M, tol)[0]


def partial_transpose(rho: np.ndarray, dims: Sequence[int], parties: Iterable[int]) -> np.ndarray:
    """Transpose the tensor factors listed in ``parties`` (0-based)."""
    dims = tuple(int(d) for d in dims)
    m = len(dims)
    parties = sorted(set(int(p) for p in parties))
    if not parties or len(parties) >= m or parties[0] < 0 or parties[-1] >= m:
        raise InvalidBipartition(f"parties {parties} is not a proper nonempty subset of {m} parties")
    rho = np.asarray(rho)
    total = math.prod(dims)
    if rho.shape != (total, total):
        raise InvalidOperator(f"matrix shape {rho.shape} does not match dims {dims}")
    axes = list(range(2 * m))
    for p in parties:
        axes[p], axes[m + p] = axes[m + p], axes[p]
    return rho.reshape(dims + dims).transpose(axes).reshape(total, total)


def gram_rank(vectors: Sequence, tol: float | None = None) -> int:
    """Numerical rank of the Gram matrix of ``vectors``."""
    tol = resolve_tol(tol)
    V = np.array([np.asarray(v, dtype=complex) for v in vectors])
    if V.ndim != 2 or V.shape[0] == 0:
        raise ValueError("gram_rank needs a nonempty list of equal-length vectors")
    G = V.conj() @ V.T
    w = np.linalg.eigvalsh((G + G.conj().T) / 2)
    top = w.max()
    if top <= 0:
        return 0
    return int(np.sum(w > tol * top))


def orthonormalize(vectors: Sequence, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (rows) of the span of ``vectors``."""
    V = np.array([np.asarray(v, dtype=complex) for v in vectors])
    if V.size == 0:
        return V.reshape(0, 0)
    U, s, _ = np.linalg.svd(V.T, full_matrices=False)
    k = int(np.sum(s > tol * max(s.max(), 1.0)))
    return U[:, :k].T.copy()


def complement_basis(vectors: Sequence, total_dim: int, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (rows) of the orthocomplement of span(vectors)."""
    if len(vectors) == 0:
        return np.eye(total_dim, dtype=complex)
    V = np.array([np.asarray(v, dtype=complex) for v in vectors])
    if V.shape[1] != total_dim:
        raise ValueError(f"vectors have length {V.shape[1]}, expected {total_dim}")
    _, s, Vh = np.linalg.svd(V.conj(), full_matrices=True)
    k = int(np.sum(s > tol * max(s.max(), 1.0)))
    if k >= total_dim:
        raise EmptyComplement("input vectors span the full space")
    return Vh[k:].conj().copy()


def span_projector(vectors: Sequence, tol: float = 1e-10) -> np.ndarray:
    Q = orthonormalize(vectors, tol)
    return Q.T @ Q.conj()


def range_projector(M: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Projector onto eigenvectors of a PSD matrix with eigenvalue above ``tol``."""
    w, V = hermitian_eigh(M)
    keep = V[:, w > tol]
    return keep @ keep.conj().T
