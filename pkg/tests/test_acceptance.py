"""Acceptance suite: one test per criterion, summarized at the end of the run.

Run alone with ``pytest tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``.
"""

import io
import itertools
import json
import sys
import time

import numpy as np
import pytest

from oracles import grid_gamma
from upblab.bestate import (
    is_edge_candidate,
    is_ppt,
    mixture_ranks,
    noisy_mix,
    pt_invariance_error,
    range_product_overlap,
    stopper_first_weights,
    subspace_residual,
    upb_complement_state,
    verify_range_criterion,
    witness_detects,
    witness_gamma,
)
from upblab.catalog import (
    TileParams,
    generalized_tiles,
    irreducible_2x2x3,
    irreducible_3x4,
    reducible_2x2x3,
    reducible_3x4,
    shift_3qubit,
    tiles_3x3,
    two_qutrit_subspace_projector,
)
from upblab.cli import run
from upblab.io import set_to_dict
from upblab.linalg import gram_rank
from upblab.locc import opm_solution_space, reducibility_report
from upblab.seesaw import max_product_overlap
from upblab.verify import check_orthogonal, complete_to_full_basis, is_unextendible

GENERALIZED = [(3, 3, 0, 1, 0, 1), (3, 4, 0, 1, 0, 2), (3, 5, 0, 1, 1, 3), (4, 4, 0, 2, 0, 2)]


def catalog_sets():
    sets = {
        "tiles3x3": tiles_3x3(),
        "reducible3x4": reducible_3x4(),
        "irreducible3x4": irreducible_3x4(),
        "shift": shift_3qubit(),
        "reducible2x2x3": reducible_2x2x3(),
        "irreducible2x2x3": irreducible_2x2x3(),
    }
    for p in GENERALIZED:
        sets[f"generalized{p}"] = generalized_tiles(TileParams(*p))
    return sets


def ket_projector(v):
    v = np.asarray(v, dtype=float)
    return np.outer(v, v) / (v @ v)


def same_projectors(got, expected):
    return len(got) == len(expected) and all(any(np.allclose(G, E, atol=1e-9) for G in got) for E in expected)


@pytest.mark.criterion(1, "catalog exactness")
def test_catalog_exactness():
    expected = {"tiles3x3": 5, "reducible3x4": 8, "irreducible3x4": 8, "shift": 4,
                "reducible2x2x3": 8, "irreducible2x2x3": 8}
    expected.update({f"generalized{p}": p[0] * p[1] - 4 for p in GENERALIZED})
    for name, upb in catalog_sets().items():
        assert len(upb) == expected[name], name
        assert upb.exact, name
        for a, b in itertools.combinations(upb.states, 2):
            ip = a.inner(b)
            assert isinstance(ip, int) and ip == 0, name


@pytest.mark.criterion(2, "unextendibility and stopper removal")
def test_unextendibility():
    for name, upb in catalog_sets().items():
        res = is_unextendible(upb)
        assert res.unextendible and res.certificate.complete, name
        rest = upb.without([upb.stopper])
        res = is_unextendible(rest)
        assert not res.unextendible, name
        w = res.witness.state
        assert all(w.inner(s) == 0 for s in rest.states), name


@pytest.mark.criterion(3, "BE construction")
def test_be_construction():
    for upb in (tiles_3x3(), shift_3qubit()):
        rho = upb_complement_state(upb)
        assert rho.rank() == 4
        assert abs(np.trace(rho.matrix).real - 1) <= 1e-10
        assert pt_invariance_error(rho) <= 1e-12
        rep = is_ppt(rho)
        assert rep.ppt and rep.min_eigenvalue >= -1e-9
    for p in [(3, 4, 0, 1, 0, 2), (4, 4, 0, 2, 0, 2)]:
        params = TileParams(*p)
        rho = upb_complement_state(generalized_tiles(params))
        assert rho.rank() == 4 and is_ppt(rho)
        assert subspace_residual(rho, two_qutrit_subspace_projector(params)) <= 1e-8


@pytest.mark.criterion(4, "span-equality pairs")
def test_span_equality_pairs():
    for red, irr in ((reducible_3x4(), irreducible_3x4()), (reducible_2x2x3(), irreducible_2x2x3())):
        assert np.max(np.abs(red.projector() - irr.projector())) <= 1e-10
        assert np.max(np.abs(upb_complement_state(red).matrix - upb_complement_state(irr).matrix)) <= 1e-10
        assert reducibility_report(red).reducible
        assert not reducibility_report(irr).reducible
        assert all(p.trivial for p in reducibility_report(irr).parties)


@pytest.mark.criterion(5, "first-round reducibility verdicts")
def test_reducibility_verdicts():
    for upb in (tiles_3x3(), irreducible_3x4(), shift_3qubit(), irreducible_2x2x3()):
        assert all(p.trivial for p in reducibility_report(upb).parties), upb.name

    rep = reducibility_report(reducible_3x4())
    assert rep.parties[0].trivial and not rep.parties[1].trivial
    P1 = ket_projector([0, 1, -1, 0])
    assert opm_solution_space(reducible_3x4(), 1).contains(P1)
    assert same_projectors(rep.parties[1].projectors, [P1, np.eye(4) - P1])

    rep = reducibility_report(reducible_2x2x3())
    assert [p.trivial for p in rep.parties] == [True, True, False]
    P2 = np.diag([0.0, 0.0, 1.0])
    assert same_projectors(rep.parties[2].projectors, [P2, np.eye(3) - P2])


@pytest.mark.criterion(6, "witness gamma vs grid oracle and detection threshold")
def test_witness():
    for upb in (tiles_3x3(), shift_3qubit()):
        g = witness_gamma(upb, restarts=64, seed=1)
        t0 = time.perf_counter()
        ref = grid_gamma(upb)
        assert time.perf_counter() - t0 <= 60
        assert abs(g - ref) <= 1e-3, (upb.name, g, ref)
    upb = shift_3qubit()
    g = witness_gamma(upb, restarts=64, seed=1)
    edge = upb_complement_state(upb)
    uniform = [0.25] * 4
    assert witness_detects(upb, noisy_mix(edge, upb, uniform, g / 2), gamma=g).detected
    assert not witness_detects(upb, noisy_mix(edge, upb, uniform, min(2 * g, 0.99)), gamma=g).detected


@pytest.mark.criterion(7, "range criterion certificates and edge violation")
def test_range_criterion():
    for upb in (tiles_3x3(), shift_3qubit()):
        edge = upb_complement_state(upb)
        for k, rank in enumerate(mixture_ranks(upb), start=1):
            w = stopper_first_weights(upb, k)
            sigma = noisy_mix(edge, upb, w, 0.05)
            assert sigma.rank() == rank
            unchosen = [s for s, x in zip(upb.states, w) if x == 0]
            rep = verify_range_criterion(sigma, unchosen)
            assert rep.satisfied, (upb.name, rank, rep.reason)
            assert gram_rank([s.array() for s in rep.spanning_products]) == rank
            assert max(rep.residuals) <= 1e-8
        assert range_product_overlap(edge, restarts=256, seed=1) < 1 - 1e-6


@pytest.mark.criterion(8, "edge vs noisy boundary")
def test_edge_boundary():
    for name, upb in catalog_sets().items():
        edge = upb_complement_state(upb)
        assert is_edge_candidate(edge), name
        n = len(upb)
        patterns = [stopper_first_weights(upb, 1), np.full(n, 1.0 / n)]
        for lam in (0.01, 0.1, 0.5):
            for w in patterns:
                assert not is_edge_candidate(noisy_mix(edge, upb, w, lam)), (name, lam)


def _cli(argv):
    buf = io.StringIO()
    code = run(argv, out=buf)
    doc = json.loads(buf.getvalue())
    doc.pop("wall_time", None)
    return code, doc


@pytest.mark.criterion(9, "determinism")
def test_determinism(tmp_path):
    sets = catalog_sets()
    for name, upb in sets.items():
        assert json.dumps(set_to_dict(upb)) == json.dumps(set_to_dict(catalog_sets()[name]))
    for upb in (tiles_3x3(), shift_3qubit()):
        assert witness_gamma(upb) == witness_gamma(upb)
        comp = np.eye(upb.total_dim) - upb.projector()
        a, b = (max_product_overlap(comp, upb.dims, 16, 7) for _ in range(2))
        assert a.restart_values == b.restart_values
        assert all(np.array_equal(x, y) for x, y in zip(a.locals, b.locals))
    base = reducible_3x4().without([7])
    assert complete_to_full_basis(base) == complete_to_full_basis(base)
    cert1 = is_unextendible(tiles_3x3()).certificate
    cert2 = is_unextendible(tiles_3x3()).certificate
    assert cert1 == cert2

    s = tmp_path / "shift.json"
    s.write_text(json.dumps(set_to_dict(shift_3qubit())))
    rho = tmp_path / "rho.json"
    runs = [
        ["verify", str(s)],
        ["bestate", str(s), "-o", str(rho)],
        ["mix", str(s), "--lambda", "0.02", "--weights", "0.25", "0.25", "0.25", "0.25"],
        ["witness", str(s), str(rho)],
        ["range", str(rho), "--complement", str(s)],
        ["reduce", str(s)],
    ]
    for argv in runs:
        assert _cli(argv) == _cli(argv), argv[0]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
