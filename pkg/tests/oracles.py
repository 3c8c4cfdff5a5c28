"""Independent reference computations used by the tests.

Nothing here calls the seesaw: the witness offset is recomputed by a dense
grid over real local vectors, with the last party maximized exactly (the
top eigenvalue of the operator contracted with the gridded parties).
"""

import numpy as np

STEP = 0.02


def _angles(stop):
    return np.arange(0.0, stop, STEP)


def sphere_grid_real3():
    """Real unit vectors in R^3 on a (theta, phi) grid; phi over a half turn covers +-v."""
    th = np.append(_angles(np.pi), np.pi)
    ph = _angles(np.pi)
    T, F = np.meshgrid(th, ph, indexing="ij")
    pts = np.stack([np.sin(T) * np.cos(F), np.sin(T) * np.sin(F), np.cos(T)], axis=-1)
    return pts.reshape(-1, 3)


def circle_grid_real2():
    t = _angles(np.pi)
    return np.stack([np.cos(t), np.sin(t)], axis=-1)


def grid_max_overlap_2party(P, dims):
    """max over real a (grid) and real b (exact) of <ab|P|ab> for a 3 x d system."""
    d1, d2 = dims
    assert d1 == 3
    T = np.real(P).reshape(d1, d2, d1, d2)
    best = -np.inf
    A = sphere_grid_real3()
    for chunk in np.array_split(A, 10):
        M = np.einsum("ni,ijkl,nk->njl", chunk, T, chunk)
        best = max(best, float(np.linalg.eigvalsh(M)[:, -1].max()))
    return best


def grid_max_overlap_3qubit(P):
    """max over real a, b (grid) and real c (exact) of <abc|P|abc>."""
    T = np.real(P).reshape((2,) * 6)
    C = circle_grid_real2()
    M = np.einsum("ai,bj,ijkpqr,ap,bq->abkr", C, C, T, C, C, optimize=True)
    return float(np.linalg.eigvalsh(M.reshape(-1, 2, 2))[:, -1].max())


def grid_gamma(upb):
    comp = np.eye(upb.total_dim) - upb.projector()
    if upb.dims == (2, 2, 2):
        return 1.0 - grid_max_overlap_3qubit(comp)
    return 1.0 - grid_max_overlap_2party(comp, upb.dims)
