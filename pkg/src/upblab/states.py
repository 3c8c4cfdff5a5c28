"""Product states, product-state sets and density matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .exceptions import InvalidState, NotOrthogonal
from .linalg import exact_inner, hermitian_eigs, is_exact, kron_flatten, resolve_tol


def _coerce_amp(x):
    if isinstance(x, (bool, np.bool_)):
        raise InvalidState("boolean amplitudes are not allowed")
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, (float, np.floating)):
        return float(x)
    c = complex(x)
    return c.real if c.imag == 0 else c


@dataclass(frozen=True)
class LocalVector:
    """One party's unnormalized state.

    Amplitudes are kept as given: ints and Fractions stay exact, floats and
    complex numbers are carried in double precision.
    """

    amps: tuple

    def __init__(self, amps: Iterable):
        amps = tuple(_coerce_amp(a) for a in amps)
        if not amps:
            raise InvalidState("local vector must have positive dimension")
        if all(a == 0 for a in amps):
            raise InvalidState("local vector is zero")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return len(self.amps)

    @property
    def exact(self) -> bool:
        return is_exact(self.amps)

    def norm2(self):
        return exact_inner(self.amps, self.amps)

    def inner(self, other: "LocalVector"):
        return exact_inner(self.amps, other.amps)

    def array(self, normalize: bool = False) -> np.ndarray:
        v = np.array([complex(a) for a in self.amps])
        if normalize:
            v = v / np.linalg.norm(v)
        return v

    def __len__(self):
        return len(self.amps)

    def __iter__(self):
        return iter(self.amps)


@dataclass(frozen=True)
class ProductState:
    """Ordered tuple of local vectors, one per party."""

    locals: tuple[LocalVector, ...]

    def __init__(self, locals: Iterable):
        vecs = tuple(v if isinstance(v, LocalVector) else LocalVector(v) for v in locals)
        if not vecs:
            raise InvalidState("product state needs at least one party")
        object.__setattr__(self, "locals", vecs)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.dim for v in self.locals)

    @property
    def exact(self) -> bool:
        return all(v.exact for v in self.locals)

    def inner(self, other: "ProductState"):
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch {self.dims} vs {other.dims}")
        return math.prod((a.inner(b) for a, b in zip(self.locals, other.locals)), start=1)

    def vector(self) -> np.ndarray:
        """Flattened unnormalized vector (exact dtype when amplitudes are exact)."""
        return kron_flatten(self.locals)

    def array(self, normalize: bool = True) -> np.ndarray:
        v = np.asarray(self.vector(), dtype=complex)
        if normalize:
            v = v / np.linalg.norm(v)
        return v

    def projector(self) -> np.ndarray:
        v = self.array(normalize=True)
        return np.outer(v, v.conj())

    def conjugate_parties(self, parties: Iterable[int]) -> "ProductState":
        parties = set(parties)
        return ProductState(
            [LocalVector([a.conjugate() if isinstance(a, complex) else a for a in v.amps])
             if i in parties else v
             for i, v in enumerate(self.locals)]
        )

    def __iter__(self):
        return iter(self.locals)


@dataclass(frozen=True)
class ProductBasisSet:
    """Finite list of product states over fixed party dimensions.

    ``stopper`` optionally marks the state whose removal leaves a
    completable set.
    """

    dims: tuple[int, ...]
    states: tuple[ProductState, ...]
    stopper: Optional[int] = None
    name: str = field(default="", compare=False)

    def __init__(self, dims: Sequence[int], states: Iterable, stopper: Optional[int] = None, name: str = ""):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 2 or any(d < 2 for d in dims):
            raise InvalidState(f"need at least two parties of dimension >= 2, got {dims}")
        states = tuple(s if isinstance(s, ProductState) else ProductState(s) for s in states)
        for i, s in enumerate(states):
            if s.dims != dims:
                raise InvalidState(f"state {i} has dims {s.dims}, expected {dims}")
        if stopper is not None and not 0 <= stopper < len(states):
            raise InvalidState(f"stopper index {stopper} out of range")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "stopper", stopper)
        object.__setattr__(self, "name", name)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def exact(self) -> bool:
        return all(s.exact for s in self.states)

    def vectors(self, normalize: bool = True) -> np.ndarray:
        """States as rows of a (N, D) complex array."""
        if not self.states:
            return np.zeros((0, self.total_dim), dtype=complex)
        return np.array([s.array(normalize) for s in self.states])

    def projector(self) -> np.ndarray:
        """Projector onto span of the (assumed orthogonal) states."""
        V = self.vectors()
        return V.T @ V.conj()

    def without(self, indices: Iterable[int]) -> "ProductBasisSet":
        drop = set(indices)
        kept = [s for i, s in enumerate(self.states) if i not in drop]
        stopper = None
        if self.stopper is not None and self.stopper not in drop:
            stopper = self.stopper - sum(1 for i in drop if i < self.stopper)
        return ProductBasisSet(self.dims, kept, stopper, self.name)

    def with_states(self, extra: Iterable[ProductState]) -> "ProductBasisSet":
        return ProductBasisSet(self.dims, self.states + tuple(extra), self.stopper, self.name)

    def require_orthogonal(self, tol: float | None = None) -> None:
        tol = resolve_tol(tol)
        for i in range(len(self.states)):
            for j in range(i + 1, len(self.states)):
                ip = self.states[i].inner(self.states[j])
                zero = ip == 0 if (self.states[i].exact and self.states[j].exact) else abs(ip) <= tol * _norm(self.states[i]) * _norm(self.states[j])
                if not zero:
                    raise NotOrthogonal(f"states {i} and {j} are not orthogonal (overlap {ip})")


def _norm(state: ProductState) -> float:
    return math.sqrt(math.prod(abs(v.norm2()) for v in state.locals))


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace matrix over declared party dimensions."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    declared_rank: Optional[int] = None

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        self.matrix = np.asarray(self.matrix, dtype=complex)
        D = math.prod(self.dims)
        if self.matrix.shape != (D, D):
            raise InvalidState(f"matrix shape {self.matrix.shape} does not match dims {self.dims}")

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigs(self.matrix)

    def rank(self, tol: float = 1e-8) -> int:
        return int(np.sum(self.eigenvalues > tol))

    def validate(self) -> "DensityMatrix":
        """Raise InvalidState unless trace 1, PSD and rank as declared."""
        tr = np.trace(self.matrix)
        if abs(tr - 1) > 1e-10:
            raise InvalidState(f"trace is {tr.real:.3g}, expected 1")
        if self.eigenvalues[0] < -1e-9:
            raise InvalidState(f"negative eigenvalue {self.eigenvalues[0]:.3g}")
        if self.declared_rank is not None and self.rank() != self.declared_rank:
            raise InvalidState(f"rank {self.rank()} differs from declared {self.declared_rank}")
        return self
