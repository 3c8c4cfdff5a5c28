"""Orthogonality, unextendibility and completion of product-state sets.

Unextendibility uses the partition criterion: a product state orthogonal to
every member exists iff the members can be distributed among the parties so
that no party receives local vectors spanning its whole local space. The
search walks assignments depth-first in lexicographic order (state 0 first,
party 0 first) and prunes a branch as soon as one party's span is full.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .exceptions import CompletionFailed, NoStopper, TooLargeForExactCheck
from .linalg import complement_basis, exact_nullspace, primitive_integer, resolve_tol
from .states import LocalVector, ProductBasisSet, ProductState

ENUMERATION_LIMIT = 2**16


@dataclass(frozen=True)
class OrthogonalityCheck:
    ok: bool
    pair: Optional[tuple[int, int]] = None
    overlap: object = 0

    def __bool__(self):
        return self.ok


def _is_zero(value, exact: bool, scale: float, tol: float) -> bool:
    if exact:
        return value == 0
    return abs(value) <= tol * scale


def check_orthogonal(upb: ProductBasisSet, tol: float | None = None) -> OrthogonalityCheck:
    """Pairwise orthogonality; exact for integer/rational amplitudes."""
    tol = resolve_tol(tol)
    norms = [np.sqrt(abs(complex(s.inner(s)))) for s in upb.states]
    for i, j in itertools.combinations(range(len(upb)), 2):
        a, b = upb.states[i], upb.states[j]
        ip = a.inner(b)
        if not _is_zero(ip, a.exact and b.exact, norms[i] * norms[j], tol):
            return OrthogonalityCheck(False, (i, j), ip)
    return OrthogonalityCheck(True)


# ---------------------------------------------------------------------------
# incremental local spans


class _ExactSpan:
    __slots__ = ("dim", "rows")

    def __init__(self, dim: int, rows=()):
        self.dim = dim
        self.rows = rows  # tuple of (pivot, row) with row[pivot] == 1

    @property
    def rank(self) -> int:
        return len(self.rows)

    def add(self, vec: Sequence) -> "_ExactSpan":
        v = [Fraction(x) for x in vec]
        for p, row in self.rows:
            if v[p] != 0:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        pivot = next((i for i, x in enumerate(v) if x != 0), None)
        if pivot is None:
            return self
        lead = v[pivot]
        return _ExactSpan(self.dim, self.rows + ((pivot, [x / lead for x in v]),))

    def orthocomplement(self) -> list[list]:
        rows = [row for _, row in self.rows]
        return [primitive_integer(x) for x in exact_nullspace(rows, self.dim)]


class _FloatSpan:
    __slots__ = ("dim", "basis", "tol")

    def __init__(self, dim: int, tol: float, basis=None):
        self.dim = dim
        self.tol = tol
        self.basis = np.zeros((0, dim), dtype=complex) if basis is None else basis

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    def add(self, vec: Sequence) -> "_FloatSpan":
        v = np.array([complex(x) for x in vec])
        v = v / np.linalg.norm(v)
        r = v - self.basis.T @ (self.basis.conj() @ v)
        n = np.linalg.norm(r)
        if n <= self.tol:
            return self
        return _FloatSpan(self.dim, self.tol, np.vstack([self.basis, r / n]))

    def orthocomplement(self) -> list[list]:
        if self.rank == 0:
            return [list(row) for row in np.eye(self.dim, dtype=complex)]
        return [list(row) for row in complement_basis(list(self.basis), self.dim)]


def _empty_spans(upb: ProductBasisSet, tol: float):
    if upb.exact:
        return [_ExactSpan(d) for d in upb.dims]
    return [_FloatSpan(d, tol) for d in upb.dims]


# ---------------------------------------------------------------------------
# partition search


@dataclass
class PartitionCertificate:
    """Pruned branches of the assignment tree.

    Each entry ``(prefix, party, rank)`` says: once states ``0..len(prefix)-1``
    are assigned as in ``prefix``, ``party`` already spans its full local
    space of dimension ``rank``, so no completion of the prefix yields an
    orthogonal product state. Together the entries cover all m**N assignments.
    """

    n_states: int
    n_parties: int
    pruned: list[tuple[tuple[int, ...], int, int]] = field(default_factory=list)
    nodes_visited: int = 0

    def covered(self) -> int:
        return sum(self.n_parties ** (self.n_states - len(prefix)) for prefix, _, _ in self.pruned)

    @property
    def complete(self) -> bool:
        return self.covered() == self.n_parties**self.n_states


@dataclass(frozen=True)
class ExtensionWitness:
    """Product state orthogonal to every member of a set."""

    state: ProductState
    assignment: tuple[int, ...]
    residual: object


@dataclass
class UnextendibilityResult:
    unextendible: bool
    certificate: Optional[PartitionCertificate] = None
    witness: Optional[ExtensionWitness] = None

    def __bool__(self):
        return self.unextendible


def _assignments(upb: ProductBasisSet, tol: float, certificate: Optional[PartitionCertificate] = None) -> Iterator[tuple[tuple[int, ...], list]]:
    """Yield (assignment, per-party spans) for every non-spanning full assignment."""
    dims = upb.dims
    locals_ = [[s.locals[p].amps for p in range(len(dims))] for s in upb.states]
    N = len(upb)

    def walk(i, prefix, spans):
        if certificate is not None:
            certificate.nodes_visited += 1
        if i == N:
            yield tuple(prefix), spans
            return
        for p, d in enumerate(dims):
            grown = spans[p].add(locals_[i][p])
            if grown.rank == d:
                if certificate is not None:
                    certificate.pruned.append((tuple(prefix) + (p,), p, d))
                continue
            new_spans = list(spans)
            new_spans[p] = grown
            prefix.append(p)
            yield from walk(i + 1, prefix, new_spans)
            prefix.pop()

    yield from walk(0, [], _empty_spans(upb, tol))


def _witness_residual(upb: ProductBasisSet, w: ProductState, tol: float):
    if upb.exact and w.exact:
        return max((abs(w.inner(s)) for s in upb.states), default=0)
    wv = w.array()
    return max((abs(np.vdot(wv, v)) for v in upb.vectors()), default=0.0)


def _witnesses(upb: ProductBasisSet, tol: float) -> Iterator[ExtensionWitness]:
    """All candidate witnesses, assignment-lexicographic, local choices in basis order."""
    seen = set()
    for assignment, spans in _assignments(upb, tol):
        choices = [span.orthocomplement() for span in spans]
        for combo in itertools.product(*choices):
            state = ProductState([LocalVector(v) for v in combo])
            if state in seen:
                continue
            seen.add(state)
            yield ExtensionWitness(state, assignment, _witness_residual(upb, state, tol))


def _check_size(upb: ProductBasisSet, limit: Optional[int]):
    if limit is not None and upb.n_parties ** len(upb) > limit:
        raise TooLargeForExactCheck(
            f"{upb.n_parties}**{len(upb)} assignments exceeds the enumeration limit {limit}"
        )


def find_orthogonal_product_state(upb: ProductBasisSet, tol: float | None = None) -> Optional[ExtensionWitness]:
    """First product state orthogonal to the whole set, or None."""
    return next(_witnesses(upb, resolve_tol(tol)), None)


def is_unextendible(upb: ProductBasisSet, tol: float | None = None, limit: Optional[int] = ENUMERATION_LIMIT) -> UnextendibilityResult:
    """Decide whether no product state is orthogonal to every member.

    A complete orthogonal product basis is reported as unextendible too;
    callers that care should compare ``len(upb)`` with ``upb.total_dim``.
    """
    tol = resolve_tol(tol)
    _check_size(upb, limit)
    cert = PartitionCertificate(len(upb), upb.n_parties)
    for assignment, spans in _assignments(upb, tol, cert):
        local = [LocalVector(span.orthocomplement()[0]) for span in spans]
        state = ProductState(local)
        return UnextendibilityResult(False, witness=ExtensionWitness(state, assignment, _witness_residual(upb, state, tol)))
    return UnextendibilityResult(True, certificate=cert)


def complete_to_full_basis(
    upb: ProductBasisSet,
    tol: float | None = None,
    max_candidates: int = 8,
    max_steps: int = 10_000,
) -> list[ProductState]:
    """Extend an orthogonal product set to a complete orthogonal product basis.

    Witnesses are appended one at a time. If a choice leads to a dead end
    (an unextendible but incomplete set) the search backtracks over up to
    ``max_candidates`` alternative witnesses per step.
    """
    tol = resolve_tol(tol)
    target = upb.total_dim
    base = ProductBasisSet(upb.dims, upb.states)
    steps = 0
    best = [len(base)]

    def extend(current: ProductBasisSet) -> Optional[list[ProductState]]:
        nonlocal steps
        best[0] = max(best[0], len(current))
        if len(current) == target:
            return []
        for k, w in enumerate(_witnesses(current, tol)):
            if k >= max_candidates:
                break
            steps += 1
            if steps > max_steps:
                return None
            rest = extend(current.with_states([w.state]))
            if rest is not None:
                return [w.state] + rest
        return None

    if len(base) > target:
        raise CompletionFailed("more states than the dimension", span=len(base))
    added = extend(base)
    if added is None:
        raise CompletionFailed(f"completion stalled at span {best[0]} of {target}", span=best[0])
    return added


def stopper_removal_completable(upb: ProductBasisSet, tol: float | None = None) -> bool:
    """True iff the set minus its stopper extends to a complete product basis."""
    if upb.stopper is None:
        raise NoStopper(f"set {upb.name or '<unnamed>'} has no stopper")
    try:
        complete_to_full_basis(upb.without([upb.stopper]), tol)
    except CompletionFailed:
        return False
    return True
