"""Exact constructors for the product bases used throughout the package.

Every amplitude is an integer. Normalization is deferred to the point where
floating-point work starts (projectors, eigensolves).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .exceptions import InvalidTileParams
from .linalg import orthonormalize
from .states import LocalVector, ProductBasisSet, ProductState


def ket(dim: int, *coeffs_by_level: tuple[int, int]) -> LocalVector:
    """Local vector from (level, coefficient) pairs."""
    amps = [0] * dim
    for level, c in coeffs_by_level:
        amps[level] += c
    return LocalVector(amps)


def basis_ket(dim: int, level: int) -> LocalVector:
    return ket(dim, (level, 1))


def _sum(dim, *levels):
    return ket(dim, *((lv, 1) for lv in levels))


def _diff(dim, a, b):
    return ket(dim, (a, 1), (b, -1))


def _ones(dim):
    return LocalVector([1] * dim)


# ---------------------------------------------------------------------------
# two-party sets


def tiles_3x3() -> ProductBasisSet:
    """The five-state Tiles UPB on two qutrits, stopper last."""
    return ProductBasisSet(
        (3, 3),
        [
            (basis_ket(3, 0), _diff(3, 0, 1)),
            (_diff(3, 0, 1), basis_ket(3, 2)),
            (basis_ket(3, 2), _diff(3, 1, 2)),
            (_diff(3, 1, 2), basis_ket(3, 0)),
            (_ones(3), _ones(3)),
        ],
        stopper=4,
        name="tiles3x3",
    )


def reducible_3x4() -> ProductBasisSet:
    """Eight-state UPB on 3x4 from which Bob can eliminate states."""
    A, B = 3, 4
    return ProductBasisSet(
        (A, B),
        [
            (basis_ket(A, 0), _diff(B, 1, 2)),
            (basis_ket(A, 0), ket(B, (0, 2), (1, -1), (2, -1))),
            (basis_ket(A, 1), _diff(B, 1, 2)),
            (basis_ket(A, 2), _diff(B, 1, 2)),
            (basis_ket(A, 2), ket(B, (1, 1), (2, 1), (3, -2))),
            (_diff(A, 1, 2), basis_ket(B, 0)),
            (_diff(A, 0, 1), basis_ket(B, 3)),
            (_ones(A), _ones(B)),
        ],
        stopper=7,
        name="reducible3x4",
    )


def irreducible_3x4() -> ProductBasisSet:
    """Eight-state UPB on 3x4 spanning the same subspace as :func:`reducible_3x4`."""
    A, B = 3, 4
    return ProductBasisSet(
        (A, B),
        [
            (basis_ket(A, 0), _diff(B, 0, 1)),
            (basis_ket(A, 0), ket(B, (0, 1), (1, 1), (2, -2))),
            (basis_ket(A, 1), _diff(B, 1, 2)),
            (basis_ket(A, 2), _diff(B, 2, 3)),
            (basis_ket(A, 2), ket(B, (1, 2), (2, -1), (3, -1))),
            (_diff(A, 1, 2), basis_ket(B, 0)),
            (_diff(A, 0, 1), basis_ket(B, 3)),
            (_ones(A), _ones(B)),
        ],
        stopper=7,
        name="irreducible3x4",
    )


def missing_states_3x4() -> list[ProductState]:
    """Tile states of the 3x4 decomposition that overlap the stopper."""
    A, B = 3, 4
    return [
        ProductState((basis_ket(A, 0), _sum(B, 0, 1, 2))),
        ProductState((_sum(A, 0, 1), basis_ket(B, 3))),
        ProductState((basis_ket(A, 2), _sum(B, 1, 2, 3))),
        ProductState((_sum(A, 1, 2), basis_ket(B, 0))),
        ProductState((basis_ket(A, 1), _sum(B, 1, 2))),
    ]


def _complement_from_missing(missing: list[ProductState]) -> list[np.ndarray]:
    """Four integer vectors in span(missing) orthogonal to the all-ones stopper.

    Relies on the missing states being mutually orthogonal 0/1 indicator
    tiles, so each one's overlap with the stopper equals its squared norm.
    """
    M = [s.vector() for s in missing]
    c = [int(m.sum()) for m in M]
    vecs = [
        c[2] * M[0] - c[0] * M[2],
        c[3] * M[1] - c[1] * M[3],
        (c[1] + c[3]) * (M[0] + M[2]) - (c[0] + c[2]) * (M[1] + M[3]),
        c[4] * (M[0] + M[1] + M[2] + M[3]) - sum(c[:4]) * M[4],
    ]
    out = []
    for v in vecs:
        g = reduce(math.gcd, (abs(int(x)) for x in v), 0)
        out.append(v // g)
    return out


def entangled_complement_3x4() -> list[np.ndarray]:
    """Four pairwise-orthogonal entangled integer vectors completing the 3x4 UPBs."""
    return _complement_from_missing(missing_states_3x4())


# ---------------------------------------------------------------------------
# generalized tiles


@dataclass(frozen=True)
class TileParams:
    """Block boundaries of the d1 x d2 tile structure.

    Alice's levels split into blocks [0..s], [s+1..t], [t+1..d1-1] and Bob's
    into [0..g], [g+1..h], [h+1..d2-1].
    """

    d1: int
    d2: int
    s: int
    t: int
    g: int
    h: int

    def __post_init__(self):
        d1, d2, s, t, g, h = self.d1, self.d2, self.s, self.t, self.g, self.h
        if d1 < 3 or d2 < 3:
            raise InvalidTileParams(f"need d1, d2 >= 3, got ({d1}, {d2})")
        if not 0 <= s < t < d1 - 1:
            raise InvalidTileParams(f"need 0 <= s < t < d1-1, got s={s}, t={t}, d1={d1}")
        if not 0 <= g < h <= d2 - 2:
            raise InvalidTileParams(f"need 0 <= g < h <= d2-2, got g={g}, h={h}, d2={d2}")

    @property
    def blocks_a(self) -> list[range]:
        return [range(0, self.s + 1), range(self.s + 1, self.t + 1), range(self.t + 1, self.d1)]

    @property
    def blocks_b(self) -> list[range]:
        return [range(0, self.g + 1), range(self.g + 1, self.h + 1), range(self.h + 1, self.d2)]


def block_indicators(dim: int, blocks: list[range]) -> list[LocalVector]:
    """Unnormalized block vectors |first + ... + last> for each block."""
    return [_sum(dim, *blk) for blk in blocks]


def _weighted_diff(dim, blk_x: range, blk_y: range) -> LocalVector:
    """Integer vector on blocks x, y orthogonal to all-ones: |y|*1_x - |x|*1_y, reduced."""
    nx, ny = len(blk_x), len(blk_y)
    g = math.gcd(nx, ny)
    return ket(dim, *((i, ny // g) for i in blk_x), *((i, -(nx // g)) for i in blk_y))


def block_fillers(dim: int, blocks: list[range]) -> list[LocalVector]:
    """Integer vectors spanning the orthocomplement of the block indicators.

    Within each block of levels o, o+1, ..., o+n-1 we take
    |o + ... + (o+k-1)> - k|o+k> for k = 1..n-1.
    """
    out = []
    for blk in blocks:
        lv = list(blk)
        for k in range(1, len(lv)):
            out.append(ket(dim, *((i, 1) for i in lv[:k]), (lv[k], -k)))
    return out


def generalized_tiles(p: TileParams) -> ProductBasisSet:
    """Tiles-type UPB of size d1*d2 - 4 built on a two-qutrit block subspace.

    Order: the four tile-difference states, the all-ones stopper (index 4),
    then filler states from the local orthocomplements.
    """
    d1, d2 = p.d1, p.d2
    A, B = p.blocks_a, p.blocks_b
    phi_a, phi_b = block_indicators(d1, A), block_indicators(d2, B)
    states = [
        (phi_a[0], _weighted_diff(d2, B[0], B[1])),
        (_weighted_diff(d1, A[0], A[1]), phi_b[2]),
        (phi_a[2], _weighted_diff(d2, B[1], B[2])),
        (_weighted_diff(d1, A[1], A[2]), phi_b[0]),
        (_ones(d1), _ones(d2)),
    ]
    fill_a, fill_b = block_fillers(d1, A), block_fillers(d2, B)
    states += [(fa, pb) for fa in fill_a for pb in phi_b]
    states += [(pa, fb) for pa in phi_a for fb in fill_b]
    states += [(fa, fb) for fa in fill_a for fb in fill_b]
    return ProductBasisSet((d1, d2), states, stopper=4, name=f"generalized{d1}x{d2}")


def missing_states_generalized(p: TileParams) -> list[ProductState]:
    """The five tile states of the block decomposition that overlap the stopper."""
    d1, d2 = p.d1, p.d2
    A, B = p.blocks_a, p.blocks_b
    return [
        ProductState((_sum(d1, *A[0]), _sum(d2, *B[0], *B[1]))),
        ProductState((_sum(d1, *A[0], *A[1]), _sum(d2, *B[2]))),
        ProductState((_sum(d1, *A[2]), _sum(d2, *B[1], *B[2]))),
        ProductState((_sum(d1, *A[1], *A[2]), _sum(d2, *B[0]))),
        ProductState((_sum(d1, *A[1]), _sum(d2, *B[1]))),
    ]


def entangled_complement_generalized(p: TileParams) -> np.ndarray:
    """Orthonormal rows spanning span(missing states) minus the stopper direction."""
    vecs = _complement_from_missing(missing_states_generalized(p))
    return orthonormalize([np.asarray(v, dtype=float) for v in vecs])


def two_qutrit_subspace_projector(p: TileParams) -> np.ndarray:
    """Projector onto span{block indicators of A} (x) span{block indicators of B}."""
    pa = orthonormalize([v.array() for v in block_indicators(p.d1, p.blocks_a)])
    pb = orthonormalize([v.array() for v in block_indicators(p.d2, p.blocks_b)])
    Pa, Pb = pa.T @ pa.conj(), pb.T @ pb.conj()
    return np.kron(Pa, Pb)


# ---------------------------------------------------------------------------
# three-party sets


def shift_3qubit() -> ProductBasisSet:
    """Shift UPB on three qubits."""
    return ProductBasisSet(
        (2, 2, 2),
        [
            (basis_ket(2, 0), basis_ket(2, 1), _diff(2, 0, 1)),
            (basis_ket(2, 1), _diff(2, 0, 1), basis_ket(2, 0)),
            (_diff(2, 0, 1), basis_ket(2, 0), basis_ket(2, 1)),
            (_ones(2), _ones(2), _ones(2)),
        ],
        stopper=3,
        name="shift",
    )


def reducible_2x2x3() -> ProductBasisSet:
    """Shift UPB extended to 2x2x3; Charlie can split off the |2> states."""
    q0, q1 = basis_ket(2, 0), basis_ket(2, 1)
    plus, minus = _sum(2, 0, 1), _diff(2, 0, 1)
    return ProductBasisSet(
        (2, 2, 3),
        [
            (q0, q1, _diff(3, 0, 1)),
            (q1, minus, basis_ket(3, 0)),
            (minus, q0, basis_ket(3, 1)),
            (q0, plus, basis_ket(3, 2)),
            (q0, minus, basis_ket(3, 2)),
            (q1, plus, basis_ket(3, 2)),
            (q1, minus, basis_ket(3, 2)),
            (plus, plus, _sum(3, 0, 1)),
        ],
        stopper=7,
        name="reducible2x2x3",
    )


def irreducible_2x2x3() -> ProductBasisSet:
    """2x2x3 UPB with the twisted states |1>|0-1>|0+-2>; no party can start."""
    q0, q1 = basis_ket(2, 0), basis_ket(2, 1)
    plus, minus = _sum(2, 0, 1), _diff(2, 0, 1)
    return ProductBasisSet(
        (2, 2, 3),
        [
            (q0, q1, _diff(3, 0, 1)),
            (q1, minus, _sum(3, 0, 2)),
            (q1, minus, _diff(3, 0, 2)),
            (minus, q0, basis_ket(3, 1)),
            (q0, plus, basis_ket(3, 2)),
            (q0, minus, basis_ket(3, 2)),
            (q1, plus, basis_ket(3, 2)),
            (plus, plus, _sum(3, 0, 1)),
        ],
        stopper=7,
        name="irreducible2x2x3",
    )


CATALOG = {
    "tiles3x3": tiles_3x3,
    "reducible3x4": reducible_3x4,
    "irreducible3x4": irreducible_3x4,
    "shift": shift_3qubit,
    "reducible2x2x3": reducible_2x2x3,
    "irreducible2x2x3": irreducible_2x2x3,
}
