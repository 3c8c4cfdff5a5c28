"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .exceptions import InvalidOperator, InvalidState
from .states import DensityMatrix


def check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    try:
        dims = tuple(int(d) for d in dims)
    except (TypeError, ValueError) as exc:
        raise InvalidState(f"dims must be a sequence of integers, got {dims!r}") from exc
    if len(dims) < 2 or any(d < 2 for d in dims):
        raise InvalidState(f"need at least two parties of dimension >= 2, got {dims}")
    return dims


def check_operator(M, dims: Sequence[int] | None = None, hermitian: bool = False, tol: float = 1e-12) -> np.ndarray:
    """Square complex matrix, optionally matched against ``dims`` and checked Hermitian."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidOperator(f"expected a square matrix, got shape {M.shape}")
    if dims is not None and M.shape[0] != math.prod(dims):
        raise InvalidOperator(f"matrix of size {M.shape[0]} does not match dims {tuple(dims)}")
    if hermitian and np.max(np.abs(M - M.conj().T)) > tol:
        raise InvalidOperator("matrix is not Hermitian")
    return M


def check_projector(P, dims: Sequence[int] | None = None, tol: float = 1e-9) -> np.ndarray:
    P = check_operator(P, dims, hermitian=True, tol=tol)
    if np.max(np.abs(P @ P - P)) > tol:
        raise InvalidOperator("operator is not a projector (P @ P != P)")
    return P


def check_density_batch(X, dims: Sequence[int] | None = None) -> np.ndarray:
    """Stack density inputs into an (n, D, D) complex array.

    Accepts a single DensityMatrix or matrix, or a sequence of either.
    """
    if isinstance(X, DensityMatrix):
        X = [X]
    elif isinstance(X, np.ndarray) and X.ndim == 2:
        X = [X]
    mats = [x.matrix if isinstance(x, DensityMatrix) else np.asarray(x, dtype=complex) for x in X]
    if not mats:
        raise InvalidState("empty batch")
    for M in mats:
        check_operator(M, dims, hermitian=True, tol=1e-10)
    return np.stack(mats).astype(complex)
