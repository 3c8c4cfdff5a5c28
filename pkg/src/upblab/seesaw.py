"""Multi-start seesaw maximization of <a1...am|P|a1...am> over product states."""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .states import LocalVector, ProductState

DEFAULT_RESTARTS = 64
DEFAULT_SEED = 1


@dataclass(frozen=True)
class SeesawResult:
    value: float
    locals: tuple[np.ndarray, ...]
    restart_values: tuple[float, ...]

    @property
    def state(self) -> ProductState:
        return ProductState([LocalVector(v) for v in self.locals])


def _environment(T: np.ndarray, vecs: Sequence[np.ndarray], k: int) -> np.ndarray:
    m = len(vecs)
    bra = string.ascii_letters[:m]
    ket = string.ascii_letters[m : 2 * m]
    operands = [T]
    subs = [bra + ket]
    for q in range(m):
        if q == k:
            continue
        operands += [vecs[q].conj(), vecs[q]]
        subs += [bra[q], ket[q]]
    return np.einsum(",".join(subs) + "->" + bra[k] + ket[k], *operands, optimize=True)


def _random_unit(rng: np.random.Generator, d: int, real: bool) -> np.ndarray:
    v = rng.standard_normal(d)
    if not real:
        v = v + 1j * rng.standard_normal(d)
    v = v.astype(complex)
    return v / np.linalg.norm(v)


def seesaw_once(T, dims, start, max_sweeps=500, conv_tol=1e-12, real=False):
    """One seesaw run from ``start``; returns (value, locals)."""
    vecs = [np.asarray(v, dtype=complex) for v in start]
    value = -np.inf
    for _ in range(max_sweeps):
        for k in range(len(dims)):
            M = _environment(T, vecs, k)
            M = (M + M.conj().T) / 2
            if real:
                M = M.real
            w, V = np.linalg.eigh(M)
            vecs[k] = V[:, -1].astype(complex)
            top = float(w[-1])
        if top - value < conv_tol:
            value = max(value, top)
            break
        value = top
    return value, vecs


def max_product_overlap(
    P: np.ndarray,
    dims: Sequence[int],
    restarts: int = DEFAULT_RESTARTS,
    seed: int = DEFAULT_SEED,
    max_sweeps: int = 500,
    conv_tol: float = 1e-12,
    real: bool = False,
) -> SeesawResult:
    """Best product-state expectation of ``P`` found from ``restarts`` random starts.

    Each party is updated in turn to the top eigenvector of ``P`` contracted
    with the other parties' current vectors. The result is a lower bound on
    the true maximum; it is deterministic for fixed ``seed`` and ``restarts``.
    """
    dims = tuple(int(d) for d in dims)
    P = np.asarray(P, dtype=complex)
    D = math.prod(dims)
    if P.shape != (D, D):
        raise ValueError(f"operator shape {P.shape} does not match dims {dims}")
    T = P.reshape(dims + dims)
    rng = np.random.default_rng(seed)
    best_value, best_vecs, values = -np.inf, None, []
    for _ in range(restarts):
        start = [_random_unit(rng, d, real) for d in dims]
        value, vecs = seesaw_once(T, dims, start, max_sweeps, conv_tol, real)
        values.append(value)
        if value > best_value:
            best_value, best_vecs = value, vecs
    return SeesawResult(float(best_value), tuple(best_vecs), tuple(values))
