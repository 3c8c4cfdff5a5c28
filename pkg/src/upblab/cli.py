"""Command-line front end emitting JSON certification reports.

Exit codes: 0 all checks pass, 1 a certified failure, 2 inconclusive,
64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .bestate import (
    is_ppt,
    noisy_mix,
    pt_invariance_error,
    range_product_overlap,
    upb_complement_state,
    verify_range_criterion,
    witness_detects,
    witness_gamma,
)
from .catalog import CATALOG, TileParams, generalized_tiles
from .exceptions import TooLargeForExactCheck, UPBLabError
from .io import FormatError, density_from_dict, density_to_dict, digest, dumps, load_json, set_from_dict, set_to_dict
from .linalg import default_tol, gram_rank
from .locc import reducibility_report
from .seesaw import DEFAULT_RESTARTS, DEFAULT_SEED
from .states import DensityMatrix, ProductBasisSet
from .verify import check_orthogonal, complete_to_full_basis, is_unextendible, stopper_removal_completable

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _exit_code(checks: dict) -> int:
    values = set(checks.values())
    if FAIL in values:
        return EXIT_FAIL
    if INCONCLUSIVE in values:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _load_set(path: str) -> ProductBasisSet:
    return set_from_dict(load_json(path))


def _load_state(path: str) -> DensityMatrix:
    return density_from_dict(load_json(path))


def _write_state(rho: DensityMatrix, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(dumps(density_to_dict(rho)))


def _spectrum_summary(rho: DensityMatrix) -> dict:
    return {
        "rank": rho.rank(),
        "trace": float(np.real(np.trace(rho.matrix))),
        "min_eigenvalue": float(rho.eigenvalues[0]),
    }


def _product_payload(states) -> list:
    return set_to_dict(ProductBasisSet(states[0].dims, states))["states"] if states else []


# ---------------------------------------------------------------------------
# subcommands; each returns (checks, payload, inputs-for-digest)


def cmd_catalog(args):
    if args.name == "generalized":
        params = (args.d1, args.d2, args.s, args.t, args.g, args.h)
        if any(v is None for v in params):
            raise UsageError("generalized needs --d1 --d2 --s --t --g --h")
        upb = generalized_tiles(TileParams(*params))
    else:
        upb = CATALOG[args.name]()
    return set_to_dict(upb)


def cmd_verify(args):
    upb = _load_set(args.set)
    checks, payload = {}, {"size": len(upb), "dims": list(upb.dims)}
    orth = check_orthogonal(upb)
    checks["orthogonal"] = _status(bool(orth))
    if not orth:
        payload["non_orthogonal_pair"] = list(orth.pair)
        return checks, payload, set_to_dict(upb)
    payload["span"] = gram_rank(upb.vectors()) if len(upb) else 0
    try:
        res = is_unextendible(upb)
    except TooLargeForExactCheck as exc:
        checks["unextendible"] = INCONCLUSIVE
        payload["unextendible_note"] = str(exc)
    else:
        proper = len(upb) < upb.total_dim
        payload["unextendible"] = bool(res) and proper
        checks["unextendible"] = _status(bool(res) and proper)
        if res.witness is not None:
            payload["witness"] = {
                "locals": set_to_dict(ProductBasisSet(upb.dims, [res.witness.state]))["states"][0]["locals"],
                "assignment": list(res.witness.assignment),
                "residual": res.witness.residual,
            }
        if res.certificate is not None:
            payload["certificate"] = {
                "pruned_branches": len(res.certificate.pruned),
                "nodes_visited": res.certificate.nodes_visited,
                "assignments_covered": res.certificate.covered(),
                "complete": res.certificate.complete,
            }
    if upb.stopper is not None:
        ok = stopper_removal_completable(upb)
        checks["stopper_removal_completable"] = _status(ok)
        if ok:
            added = complete_to_full_basis(upb.without([upb.stopper]))
            payload["completion"] = _product_payload(added)
    return checks, payload, set_to_dict(upb)


def cmd_bestate(args):
    upb = _load_set(args.set)
    rho = upb_complement_state(upb)
    ppt = is_ppt(rho)
    overlap = range_product_overlap(rho, args.restarts, args.seed)
    checks = {
        "ppt": _status(bool(ppt)),
        "edge_candidate": _status(bool(ppt) and overlap < 1 - 1e-6),
    }
    payload = {
        **_spectrum_summary(rho),
        "declared_rank": rho.declared_rank,
        "min_pt_eigenvalues": {",".join(map(str, k)): v for k, v in ppt.min_eigenvalues.items()},
        "pt_invariance_error": pt_invariance_error(rho),
        "max_range_product_overlap": overlap,
    }
    _write_state(rho, args.output)
    return checks, payload, set_to_dict(upb)


def cmd_mix(args):
    upb = _load_set(args.set)
    if len(args.weights) != len(upb):
        raise UsageError(f"expected {len(upb)} weights, got {len(args.weights)}")
    edge = upb_complement_state(upb)
    sigma = noisy_mix(edge, upb, args.weights, args.lam)
    ppt = is_ppt(sigma)
    gamma = witness_gamma(upb, args.restarts, args.seed)
    report = witness_detects(upb, sigma, gamma=gamma, lam=args.lam)
    checks = {
        "ppt": _status(bool(ppt)),
        "rank_additive": _status(sigma.rank() == sigma.declared_rank),
        "witness_detected": _status(report.detected),
    }
    payload = {
        **_spectrum_summary(sigma),
        "declared_rank": sigma.declared_rank,
        "lambda": args.lam,
        "weights": list(args.weights),
        "min_pt_eigenvalues": {",".join(map(str, k)): v for k, v in ppt.min_eigenvalues.items()},
        "gamma": gamma,
        "witness_value": report.witness_value,
    }
    _write_state(sigma, args.output)
    return checks, payload, {"set": set_to_dict(upb), "lambda": args.lam, "weights": list(args.weights)}


def cmd_witness(args):
    upb = _load_set(args.set)
    gamma = witness_gamma(upb, args.restarts, args.seed)
    checks = {"gamma_positive": _status(gamma > default_tol())}
    payload = {"gamma": gamma}
    inputs = {"set": set_to_dict(upb)}
    if args.state:
        sigma = _load_state(args.state)
        if tuple(sigma.dims) != upb.dims:
            raise UsageError(f"state dims {sigma.dims} do not match set dims {upb.dims}")
        rep = witness_detects(upb, sigma, gamma=gamma)
        checks["detected"] = _status(rep.detected)
        payload["witness_value"] = rep.witness_value
        inputs["state"] = density_to_dict(sigma)
    return checks, payload, inputs


def cmd_range(args):
    sigma = _load_state(args.state)
    inputs = {"state": density_to_dict(sigma)}
    comp = ()
    if args.complement:
        comp = _load_set(args.complement)
        if comp.dims != tuple(sigma.dims):
            raise UsageError(f"complement dims {comp.dims} do not match state dims {tuple(sigma.dims)}")
        inputs["complement"] = set_to_dict(comp)
    rep = verify_range_criterion(sigma, comp, args.restarts, args.seed)
    status = {"satisfied": PASS, "violated": FAIL, "inconclusive": INCONCLUSIVE}[rep.status]
    checks = {"range_criterion": status}
    payload = {
        "status": rep.status,
        "rank": rep.rank,
        "pt_invariant": rep.pt_invariant,
        "conjugate_condition": rep.conjugate_ok,
        "spanning_products": _product_payload(rep.spanning_products),
        "residuals": rep.residuals,
        "max_range_product_overlap": rep.max_range_product_overlap,
        "reason": rep.reason,
    }
    return checks, payload, inputs


def cmd_reduce(args):
    upb = _load_set(args.set)
    rep = reducibility_report(upb)
    parties = []
    for p in rep.parties:
        entry = {"party": p.party, "trivial": p.trivial, "solution_space_dimension": p.dimension}
        if p.projectors is not None:
            entry["projectors"] = [np.round(P, 12) for P in p.projectors]
            entry["eliminated"] = {str(k): v for k, v in p.eliminated.items()}
        parties.append(entry)
    checks = {"analysis": PASS}
    payload = {"verdict": rep.verdict, "reducible": rep.reducible, "parties": parties}
    return checks, payload, set_to_dict(upb)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="upblab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"upblab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def heuristic(p):
        p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("catalog", help="emit a catalog product set as JSON")
    p.add_argument("name", choices=sorted(CATALOG) + ["generalized"])
    for opt in ("d1", "d2", "s", "t", "g", "h"):
        p.add_argument(f"--{opt}", type=int)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify", help="orthogonality, unextendibility, stopper completability")
    p.add_argument("set")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bestate", help="complement state, PPT and edge checks")
    p.add_argument("set")
    p.add_argument("-o", "--output", help="write the state JSON here")
    heuristic(p)
    p.set_defaults(func=cmd_bestate)

    p = sub.add_parser("mix", help="noisy mixture of the complement state with set members")
    p.add_argument("set")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--weights", type=float, nargs="+", required=True)
    p.add_argument("-o", "--output", help="write the state JSON here")
    heuristic(p)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("witness", help="witness offset gamma and optional detection")
    p.add_argument("set")
    p.add_argument("state", nargs="?")
    heuristic(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("range", help="range-criterion certificate")
    p.add_argument("state")
    p.add_argument("--complement", help="product set spanning the kernel")
    heuristic(p)
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("reduce", help="first-round reducibility report")
    p.add_argument("set")
    p.set_defaults(func=cmd_reduce)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        result = args.func(args)
    except (UsageError, FormatError, json.JSONDecodeError, OSError, UPBLabError) as exc:
        print(f"upblab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(result, dict):
        print(dumps(result), file=out)
        return EXIT_OK
    checks, payload, inputs = result
    options = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    report = {
        "command": args.command,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "input_digest": digest({"inputs": inputs, "options": options}),
        "version": __version__,
        "seed": getattr(args, "seed", None),
        "tolerance": default_tol(),
        "checks": checks,
        "payload": payload,
        "wall_time": time.perf_counter() - start,
    }
    print(dumps(report), file=out)
    return _exit_code(checks)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
