"""Bound entangled states from UPBs: construction, PPT, witnesses, range criterion."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .exceptions import BadComplement, CompletionFailed, EmptyComplement, InvalidState, SupportOverlap
from .linalg import gram_rank, hermitian_eigs, partial_transpose, range_projector, resolve_tol
from .seesaw import DEFAULT_RESTARTS, DEFAULT_SEED, max_product_overlap
from .states import DensityMatrix, ProductBasisSet, ProductState
from .verify import check_orthogonal, complete_to_full_basis, is_unextendible

RANK_TOL = 1e-8
RANGE_TOL = 1e-8
NO_PRODUCT_MARGIN = 1e-6


def bipartitions(n_parties: int) -> list[tuple[int, ...]]:
    """Proper party subsets up to complement: those not containing party 0."""
    rest = range(1, n_parties)
    return [c for r in range(1, n_parties) for c in itertools.combinations(rest, r)]


def upb_complement_state(upb: ProductBasisSet) -> DensityMatrix:
    """Normalized projector onto the orthocomplement of span(upb)."""
    orth = check_orthogonal(upb)
    if not orth:
        raise InvalidState(f"states {orth.pair} are not orthogonal")
    D, N = upb.total_dim, len(upb)
    if N >= D:
        raise EmptyComplement(f"{N} orthogonal states already span dimension {D}")
    rho = (np.eye(D) - upb.projector()) / (D - N)
    return DensityMatrix(rho, upb.dims, declared_rank=D - N)


@dataclass
class PPTReport:
    ppt: bool
    min_eigenvalues: dict[tuple[int, ...], float]

    def __bool__(self):
        return self.ppt

    @property
    def min_eigenvalue(self) -> float:
        return min(self.min_eigenvalues.values())


def is_ppt(rho: DensityMatrix, tol: float | None = None) -> PPTReport:
    """Partial transpose across every bipartition; PPT iff every spectrum >= -tol."""
    tol = resolve_tol(tol)
    mins = {}
    for parties in bipartitions(len(rho.dims)):
        pt = partial_transpose(rho.matrix, rho.dims, parties)
        mins[parties] = float(hermitian_eigs(pt)[0])
    return PPTReport(all(v >= -tol for v in mins.values()), mins)


def pt_invariance_error(rho: DensityMatrix) -> float:
    """Largest elementwise change under any partial transpose."""
    return max(
        float(np.max(np.abs(partial_transpose(rho.matrix, rho.dims, s) - rho.matrix)))
        for s in bipartitions(len(rho.dims))
    )


def separable_mixture(upb: ProductBasisSet, weights: Sequence[float]) -> np.ndarray:
    if len(weights) != len(upb):
        raise ValueError(f"expected {len(upb)} weights, got {len(weights)}")
    V = upb.vectors()
    w = np.asarray(weights, dtype=float)
    return (V.T * w) @ V.conj()


def noisy_mix(edge: DensityMatrix, upb: ProductBasisSet, weights: Sequence[float], lam: float) -> DensityMatrix:
    """lam * sum_i w_i |theta_i><theta_i| + (1 - lam) * edge."""
    w = np.asarray(weights, dtype=float)
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise ValueError("weights must be nonnegative and sum to 1")
    if tuple(edge.dims) != upb.dims:
        raise ValueError(f"dims mismatch: state {edge.dims}, set {upb.dims}")
    V = upb.vectors()
    for i in np.flatnonzero(w > 0):
        overlap = float(np.real(V[i].conj() @ edge.matrix @ V[i]))
        if overlap > 1e-10:
            raise SupportOverlap(f"state {i} overlaps the support of the edge state ({overlap:.3g})")
    sep = separable_mixture(upb, w)
    base_rank = edge.declared_rank if edge.declared_rank is not None else edge.rank()
    return DensityMatrix(lam * sep + (1 - lam) * edge.matrix, edge.dims, base_rank + int(np.sum(w > 0)))


def witness_gamma(upb: ProductBasisSet, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED) -> float:
    """Minimum of <Pi> over product states, Pi projecting onto span(upb).

    Computed as 1 - max product overlap with the complement projector.
    """
    complement = np.eye(upb.total_dim) - upb.projector()
    return 1.0 - max_product_overlap(complement, upb.dims, restarts, seed).value


@dataclass
class WitnessReport:
    gamma: float
    witness_value: float
    detected: bool
    lam: Optional[float] = None


def witness_detects(
    upb: ProductBasisSet,
    sigma: DensityMatrix,
    gamma: float | None = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = DEFAULT_SEED,
    tol: float | None = None,
    lam: float | None = None,
) -> WitnessReport:
    """Evaluate Tr[(Pi - gamma) sigma]; negative means entanglement is detected."""
    tol = resolve_tol(tol)
    if tuple(sigma.dims) != upb.dims:
        raise ValueError(f"dims mismatch: state {sigma.dims}, set {upb.dims}")
    if gamma is None:
        gamma = witness_gamma(upb, restarts, seed)
    value = float(np.real(np.trace(upb.projector() @ sigma.matrix))) - gamma
    return WitnessReport(gamma, value, value < -tol, lam)


@dataclass
class RangeReport:
    """Outcome of a range-criterion check.

    ``status`` is ``"satisfied"`` when explicit product states spanning the
    range (and, per bipartition, their partial conjugates spanning the range
    of the partial transpose) were found; ``"violated"`` when the range was
    shown to hold no product state; ``"inconclusive"`` otherwise.
    """

    status: str
    rank: int
    spanning_products: list[ProductState] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    pt_invariant: bool = False
    conjugate_ok: Optional[bool] = None
    max_range_product_overlap: Optional[float] = None
    reason: str = ""

    @property
    def satisfied(self) -> bool:
        return self.status == "satisfied"


def _as_product_set(dims, products) -> ProductBasisSet:
    if isinstance(products, ProductBasisSet):
        if products.dims != tuple(dims):
            raise ValueError(f"dims mismatch: state {tuple(dims)}, complement {products.dims}")
        return ProductBasisSet(products.dims, products.states)
    return ProductBasisSet(dims, list(products))


def _range_residuals(P: np.ndarray, products: Sequence[ProductState]) -> list[float]:
    out = []
    for s in products:
        v = s.array()
        out.append(float(np.linalg.norm(v - P @ v)))
    return out


def verify_range_criterion(
    sigma: DensityMatrix,
    complementary_products: ProductBasisSet | Iterable[ProductState] = (),
    restarts: int = DEFAULT_RESTARTS,
    seed: int = DEFAULT_SEED,
) -> RangeReport:
    """Look for product states spanning range(sigma).

    ``complementary_products`` are orthogonal product states in the kernel of
    sigma (typically the UPB members left out of the noise). When they span
    the whole kernel they are completed to a full product basis; the added
    states then span the range.
    """
    dims = tuple(sigma.dims)
    D = sigma.total_dim
    comp = _as_product_set(dims, complementary_products)
    P = range_projector(sigma.matrix, RANK_TOL)
    rank = int(round(np.real(np.trace(P))))
    for i, s in enumerate(comp.states):
        leak = float(np.linalg.norm(P @ s.array()))
        if leak > RANGE_TOL:
            raise BadComplement(f"complementary product {i} is not in the kernel (leak {leak:.3g})")
    if not check_orthogonal(comp):
        raise BadComplement("complementary products are not pairwise orthogonal")
    pt_inv = pt_invariance_error(sigma) <= 1e-12
    kernel_dim = D - rank
    comp_rank = gram_rank(comp.vectors()) if len(comp) else 0

    if comp_rank == kernel_dim:
        if len(comp) and is_unextendible(comp, limit=None):
            return RangeReport("violated", rank, pt_invariant=pt_inv,
                               reason="kernel is spanned by an unextendible product set; range holds no product state")
        try:
            added = complete_to_full_basis(comp)
        except CompletionFailed as exc:
            return RangeReport("inconclusive", rank, pt_invariant=pt_inv, reason=str(exc))
        residuals = _range_residuals(P, added)
        ok = max(residuals, default=0.0) <= RANGE_TOL and gram_rank([s.array() for s in added]) == rank
        conj_ok = ok and _conjugates_span_pt_ranges(sigma, added)
        status = "satisfied" if ok and conj_ok else "inconclusive"
        return RangeReport(status, rank, added, residuals, pt_inv, conj_ok,
                           reason="" if status == "satisfied" else "completion states do not span the range")

    probe = max_product_overlap(P, dims, restarts, seed).value
    if probe < 1 - NO_PRODUCT_MARGIN:
        return RangeReport("violated", rank, pt_invariant=pt_inv, max_range_product_overlap=probe,
                           reason="seesaw found no product state in the range")
    return RangeReport("inconclusive", rank, pt_invariant=pt_inv, max_range_product_overlap=probe,
                       reason="complementary products do not span the kernel")


def _conjugates_span_pt_ranges(sigma: DensityMatrix, products: Sequence[ProductState]) -> bool:
    """Per bipartition, partial conjugates of ``products`` span range(sigma^T_S)."""
    for parties in bipartitions(len(sigma.dims)):
        pt = partial_transpose(sigma.matrix, sigma.dims, parties)
        Ppt = range_projector(pt, RANK_TOL)
        r = int(round(np.real(np.trace(Ppt))))
        conj = [s.conjugate_parties(parties) for s in products]
        if max(_range_residuals(Ppt, conj), default=0.0) > RANGE_TOL:
            return False
        if gram_rank([s.array() for s in conj]) != r:
            return False
    return True


def is_edge_candidate(rho: DensityMatrix, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED) -> bool:
    """PPT and no product state found in the range."""
    if not is_ppt(rho):
        return False
    P = range_projector(rho.matrix, RANK_TOL)
    return max_product_overlap(P, rho.dims, restarts, seed).value < 1 - NO_PRODUCT_MARGIN


def range_product_overlap(rho: DensityMatrix, restarts: int = DEFAULT_RESTARTS, seed: int = DEFAULT_SEED) -> float:
    P = range_projector(rho.matrix, RANK_TOL)
    return max_product_overlap(P, rho.dims, restarts, seed).value


def subspace_residual(rho: DensityMatrix, projector: np.ndarray) -> float:
    """Frobenius norm of the part of rho outside the subspace of ``projector``."""
    Q = np.eye(rho.total_dim) - projector
    return float(np.linalg.norm(Q @ rho.matrix))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    return 0.5 * float(np.sum(np.abs(hermitian_eigs(a.matrix - b.matrix))))


def mixture_ranks(upb: ProductBasisSet) -> list[int]:
    """Ranks reachable by mixing the complement state with UPB members."""
    base = upb.total_dim - len(upb)
    return [base + k for k in range(1, len(upb) + 1)]


def stopper_first_weights(upb: ProductBasisSet, k: int) -> np.ndarray:
    """Uniform weights on k states, the stopper included first."""
    order = list(range(len(upb)))
    if upb.stopper is not None:
        order.remove(upb.stopper)
        order.insert(0, upb.stopper)
    w = np.zeros(len(upb))
    w[order[:k]] = 1.0 / k
    return w


__all__ = [
    "PPTReport", "RangeReport", "WitnessReport", "bipartitions", "is_edge_candidate", "is_ppt",
    "mixture_ranks", "noisy_mix", "pt_invariance_error", "range_product_overlap", "separable_mixture",
    "stopper_first_weights", "subspace_residual", "trace_distance", "upb_complement_state",
    "verify_range_criterion", "witness_detects", "witness_gamma",
]
