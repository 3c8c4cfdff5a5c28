"""First-round orthogonality-preserving measurements on product-state sets.

A party holding local vectors a_i can start with a measurement whose
elements E = M^dagger M keep every pair of post-measurement states
orthogonal. For each pair whose overlap on the other parties is nonzero this
requires <a_i|E|a_j> = 0, a linear condition on the Hermitian matrix E. The
party is trivial when the only solutions are multiples of the identity.

Only a single measurement by a single party is analyzed; multi-round
protocols are not explored.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .exceptions import InvalidMeasurement
from .linalg import exact_nullspace
from .states import LocalVector, ProductBasisSet, ProductState
from .verify import check_orthogonal

NULLSPACE_TOL = 1e-10
MEMBERSHIP_TOL = 1e-9


def hermitian_real_basis(d: int) -> list[np.ndarray]:
    """Real basis of d x d Hermitian matrices: diagonals, symmetric, antisymmetric-imaginary."""
    out = []
    for k in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[k, k] = 1
        out.append(E)
    pairs = list(itertools.combinations(range(d), 2))
    for k, l in pairs:
        E = np.zeros((d, d), dtype=complex)
        E[k, l] = E[l, k] = 1
        out.append(E)
    for k, l in pairs:
        E = np.zeros((d, d), dtype=complex)
        E[k, l], E[l, k] = 1j, -1j
        out.append(E)
    return out


def _exact_rows(u: Sequence, v: Sequence, d: int) -> list[list]:
    """Real and imaginary parts of <u|E|v> = 0 for rational u, v in the real basis."""
    pairs = list(itertools.combinations(range(d), 2))
    re = [u[k] * v[k] for k in range(d)] + [u[k] * v[l] + u[l] * v[k] for k, l in pairs] + [0] * len(pairs)
    im = [0] * (d + len(pairs)) + [u[k] * v[l] - u[l] * v[k] for k, l in pairs]
    return [row for row in (re, im) if any(x != 0 for x in row)]


def _float_rows(u: np.ndarray, v: np.ndarray, basis: list[np.ndarray]) -> list[np.ndarray]:
    c = np.array([u.conj() @ B @ v for B in basis])
    return [c.real, c.imag]


@dataclass
class MeasurementSolutionSpace:
    """Hermitian matrices E allowed as first-round measurement elements.

    ``basis`` is orthonormal in the Hilbert-Schmidt inner product and starts
    with the normalized identity.
    """

    party: int
    dim: int
    basis: list[np.ndarray]
    constrained_pairs: list[tuple[int, int]] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def trivial(self) -> bool:
        return self.dimension == 1

    def residual(self, M: np.ndarray) -> float:
        """Hilbert-Schmidt distance from M to the solution space."""
        M = np.asarray(M, dtype=complex)
        proj = sum((np.real(np.trace(B.conj().T @ M)) * B for B in self.basis), np.zeros_like(M))
        return float(np.linalg.norm(M - proj))

    def contains(self, M: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.residual(M) <= tol * max(1.0, float(np.linalg.norm(M)))


def _other_overlap(a: ProductState, b: ProductState, party: int):
    return math.prod(
        (x.inner(y) for q, (x, y) in enumerate(zip(a.locals, b.locals)) if q != party), start=1
    )


def opm_solution_space(upb: ProductBasisSet, party: int) -> MeasurementSolutionSpace:
    """Solve for every Hermitian E keeping the set orthogonal after party ``party`` measures."""
    d = upb.dims[party]
    herm = hermitian_real_basis(d)
    exact = upb.exact
    rows, constrained = [], []
    for i, j in itertools.combinations(range(len(upb)), 2):
        a, b = upb.states[i], upb.states[j]
        c = _other_overlap(a, b, party)
        if (c == 0) if exact else (abs(c) <= NULLSPACE_TOL):
            continue
        constrained.append((i, j))
        u, v = a.locals[party].amps, b.locals[party].amps
        if exact:
            rows.extend(_exact_rows(u, v, d))
        else:
            rows.extend(_float_rows(np.array(u, dtype=complex), np.array(v, dtype=complex), herm))

    if exact:
        null = [np.array([float(x) for x in vec]) for vec in exact_nullspace(rows, d * d)] if rows else list(np.eye(d * d))
    else:
        null = _float_nullspace(np.array(rows) if rows else np.zeros((0, d * d)), d * d)
    mats = [sum((x * B for x, B in zip(vec, herm)), np.zeros((d, d), dtype=complex)) for vec in null]
    return MeasurementSolutionSpace(party, d, _hs_orthonormalize([np.eye(d, dtype=complex)] + mats), constrained)


def _float_nullspace(A: np.ndarray, n: int) -> list[np.ndarray]:
    if A.shape[0] == 0:
        return list(np.eye(n))
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    k = int(np.sum(s > NULLSPACE_TOL * max(s.max(), 1.0)))
    return list(Vh[k:])


def _hs_orthonormalize(mats: list[np.ndarray], tol: float = NULLSPACE_TOL) -> list[np.ndarray]:
    """Gram-Schmidt in the Hilbert-Schmidt inner product, order preserved."""
    out: list[np.ndarray] = []
    for M in mats:
        R = M.copy()
        for B in out:
            R = R - np.real(np.trace(B.conj().T @ R)) * B
        n = np.linalg.norm(R)
        if n > tol:
            out.append(R / n)
    return out


def is_trivial_party(upb: ProductBasisSet, party: int) -> bool:
    return opm_solution_space(upb, party).trivial


# ---------------------------------------------------------------------------
# eliminating measurements


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1 :]
        yield [[first]] + part


def _spectral_projectors(H: np.ndarray, tol: float = 1e-8) -> list[np.ndarray]:
    w, V = np.linalg.eigh((H + H.conj().T) / 2)
    groups: list[list[int]] = []
    for i, x in enumerate(w):
        if groups and abs(x - w[groups[-1][0]]) <= tol * max(1.0, abs(x)):
            groups[-1].append(i)
        else:
            groups.append([i])
    return [V[:, g] @ V[:, g].conj().T for g in groups]


def _annihilated(upb: ProductBasisSet, party: int, P: np.ndarray, tol: float = MEMBERSHIP_TOL) -> list[int]:
    return [i for i, s in enumerate(upb.states) if np.linalg.norm(P @ s.locals[party].array(normalize=True)) <= tol]


@dataclass
class PartyReducibility:
    party: int
    trivial: bool
    dimension: int
    projectors: Optional[list[np.ndarray]] = None
    eliminated: dict[int, list[int]] = field(default_factory=dict)

    @property
    def eliminating(self) -> bool:
        return any(self.eliminated.values())


@dataclass
class ReducibilityReport:
    parties: list[PartyReducibility]

    @property
    def reducible(self) -> bool:
        return any(p.eliminating for p in self.parties)

    @property
    def verdict(self) -> str:
        if self.reducible:
            return "first-round reducible"
        if all(p.trivial for p in self.parties):
            return "first-round irreducible"
        return "nontrivial but non-eliminating"


def find_eliminating_measurement(upb: ProductBasisSet, space: MeasurementSolutionSpace, seed: int = 0):
    """Projective measurement inside the solution space eliminating the most states.

    Candidate outcomes are the spectral projectors of a generic element of
    the space (its joint eigenspaces when the space is commutative), merged
    in every possible way; a merge is kept when every merged projector lies
    in the space.
    """
    if space.trivial:
        return None, {}
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(space.dimension - 1)
    H = sum((c * B for c, B in zip(coeffs, space.basis[1:])), np.zeros((space.dim, space.dim), dtype=complex))
    spectral = _spectral_projectors(H)
    best, best_elim, best_count = None, {}, -1
    for partition in sorted(_set_partitions(list(range(len(spectral)))), key=len, reverse=True):
        if len(partition) < 2:
            continue
        projectors = [sum(spectral[i] for i in block) for block in partition]
        if not all(space.contains(P) for P in projectors):
            continue
        elim = {k: _annihilated(upb, space.party, P) for k, P in enumerate(projectors)}
        count = sum(len(v) for v in elim.values())
        if count > best_count:
            best, best_elim, best_count = projectors, elim, count
    return best, best_elim


def reducibility_report(upb: ProductBasisSet) -> ReducibilityReport:
    parties = []
    for p in range(upb.n_parties):
        space = opm_solution_space(upb, p)
        projectors, elim = find_eliminating_measurement(upb, space)
        parties.append(PartyReducibility(p, space.trivial, space.dimension, projectors, elim))
    return ReducibilityReport(parties)


def _rationalize(vec: np.ndarray, tol: float = 1e-12, max_den: int = 10**6):
    """Exact Fractions if every entry is (numerically) a small rational."""
    out = []
    for x in vec:
        if abs(x.imag) > tol:
            return [complex(v) for v in vec]
        f = Fraction(float(x.real)).limit_denominator(max_den)
        if abs(float(f) - x.real) > tol:
            return [complex(v) for v in vec]
        out.append(f)
    return out


def eliminate_states(upb: ProductBasisSet, party: int, projectors: Sequence[np.ndarray], tol: float = MEMBERSHIP_TOL) -> list[ProductBasisSet]:
    """Apply a local projective measurement; one surviving set per outcome."""
    d = upb.dims[party]
    Ps = [np.asarray(P, dtype=complex) for P in projectors]
    for P in Ps:
        if P.shape != (d, d):
            raise InvalidMeasurement(f"projector shape {P.shape}, expected ({d}, {d})")
        if np.max(np.abs(P - P.conj().T)) > tol or np.max(np.abs(P @ P - P)) > tol:
            raise InvalidMeasurement("measurement element is not an orthogonal projector")
    if np.max(np.abs(sum(Ps) - np.eye(d))) > tol:
        raise InvalidMeasurement("projectors do not sum to the identity")
    outcomes = []
    for k, P in enumerate(Ps):
        kept, stopper = [], None
        for i, s in enumerate(upb.states):
            local = P @ s.locals[party].array()
            if np.linalg.norm(local) <= tol * math.sqrt(abs(s.locals[party].norm2())):
                continue
            if i == upb.stopper:
                stopper = len(kept)
            locals_ = list(s.locals)
            locals_[party] = LocalVector(_rationalize(local))
            kept.append(ProductState(locals_))
        out = ProductBasisSet(upb.dims, kept, stopper, f"{upb.name}|outcome{k}" if upb.name else "")
        check = check_orthogonal(out)
        if not check:
            raise InvalidMeasurement(f"outcome {k} breaks orthogonality of surviving states {check.pair}")
        outcomes.append(out)
    return outcomes
