"""Command-line front end.

Every subcommand is a thin adapter over the library: it loads inputs, calls
one operation, and prints a JSON report to stdout.  Exit codes: 0 on success
(including "inequality holds"), 1 when a verified inequality is violated
(a bug sentinel, since these are proved statements), 2 on usage or input
errors.  Randomized commands take an explicit --seed and default to 0; no
entropy is drawn from the environment.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cheeger import (
    DEFAULT_CAP,
    ExactModeInfeasible,
    NoFeasibleSubset,
    cheeger_conductance,
    cheeger_vertex,
)
from .families import (
    GraphFamily,
    RhoTable,
    family_report,
    generalised_certificate,
    generate,
)
from .graphs import GraphFormatError, MeasuredGraph, VertexSubset, dump_graph, load_conductance, load_graph
from .inequalities import (
    distance_gap_bound,
    verify_cheeger_sandwich,
    verify_coarea,
    verify_gap_controls,
    verify_lp_poincare,
    verify_measured_sandwich,
    verify_poincare_to_cheeger,
)
from .poincare import optimal_lp_constant
from .rationals import RationalFormatError, format_rational, parse_rational
from .spectral import EigensolverError, delta_operator, lambda_operator, spectrum
from .walks import WalkError, auxiliary_walk, from_conductance

_USAGE_ERRORS = (
    GraphFormatError,
    RationalFormatError,
    WalkError,
    NoFeasibleSubset,
    ExactModeInfeasible,
    EigensolverError,
    ValueError,
    KeyError,
    IndexError,
    FileNotFoundError,
)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    started = time.monotonic()
    try:
        code, results = args.handler(args)
    except _USAGE_ERRORS as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"mexp: error: {message}", file=sys.stderr)
        return 2
    if args.command == "generate":
        # generate writes a plain graph document, not a report envelope
        print(results)
        return code
    report = {
        "command": ["mexp"] + (argv if argv is not None else sys.argv[1:]),
        "inputs": _inputs_digest(args),
        "results": results,
        "timing": {"seconds": time.monotonic() - started},
        "version": __version__,
        "seed": getattr(args, "seed", None),
    }
    print(json.dumps(_jsonable(report), indent=2))
    return code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mexp",
        description="expansion invariants of finite measured graphs",
    )
    parser.add_argument("--version", action="version", version=f"mexp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="exact-enumeration cap on the vertex count")
        p.add_argument("--tolerance", type=float, default=1e-8, help="float comparison slack")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("cheeger", help="exact Cheeger constant with witness")
    p.add_argument("--input", required=True)
    p.add_argument("--flavor", choices=["vertex", "conductance"], default="vertex")
    common(p)
    p.set_defaults(handler=_cmd_cheeger)

    p = sub.add_parser("spectrum", help="eigenvalues and spectral gap of a graph operator")
    p.add_argument("--input", required=True)
    p.add_argument("--operator", choices=["delta", "lambda"], default="delta")
    common(p)
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("poincare", help="numerical search for the optimal Lp constant")
    p.add_argument("--input", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--restarts", type=int, default=64)
    common(p)
    p.set_defaults(handler=_cmd_poincare)

    p = sub.add_parser("verify", help="check a named expansion inequality")
    p.add_argument("--input", required=True)
    p.add_argument(
        "--theorem",
        required=True,
        choices=[
            "cheeger-sandwich",
            "measured-sandwich",
            "gap-controls",
            "distance-bound",
            "poincare-to-cheeger",
            "coarea",
            "lp-poincare",
        ],
    )
    p.add_argument("--p", type=float, default=2.0, help="exponent for lp-poincare")
    p.add_argument("--trials", type=int, default=200, help="random functions for coarea / lp-poincare")
    p.add_argument("--set-a", default=None, help="comma-separated vertex labels")
    p.add_argument("--set-b", default=None, help="comma-separated vertex labels")
    common(p)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("coarea", help="exact level-set identity on random functions")
    p.add_argument("--input", required=True)
    p.add_argument("--trials", type=int, default=100)
    common(p)
    p.set_defaults(handler=_cmd_coarea)

    p = sub.add_parser("family", help="per-member invariants and family verdicts")
    p.add_argument("--dir", required=True, help="directory of graph JSON files, sorted by name")
    p.add_argument("--threshold", required=True, help="expansion threshold as p/q")
    common(p)
    p.set_defaults(handler=_cmd_family)

    p = sub.add_parser("certify", help="generalised-expander certificate for a family")
    p.add_argument("--dir", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--rho", default=None, help="JSON file with a nondecreasing modulus table")
    p.add_argument("--emit-nu", action="store_true", help="include the full pair measures")
    common(p)
    p.set_defaults(handler=_cmd_certify)

    p = sub.add_parser("generate", help="write a named graph document to stdout")
    p.add_argument("kind", choices=["cycle", "complete", "hypercube", "random_regular"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--measure", choices=["counting", "rationals"], default="counting")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_generate)

    return parser


# -- loading helpers ---------------------------------------------------------


def _read_document(path: str):
    text = Path(path).read_text(encoding="utf-8")
    graph = load_graph(text)
    conductance = load_conductance(text, graph)
    return graph, conductance, text


def _walk_for(graph: MeasuredGraph, conductance):
    """File conductance when present, the auxiliary walk otherwise."""
    if conductance is not None:
        return from_conductance(graph, conductance)
    return auxiliary_walk(graph)


def _resolve_labels(graph: MeasuredGraph, text: str) -> VertexSubset:
    indices = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        candidates = [token]
        try:
            candidates.append(int(token))
        except ValueError:
            pass
        for cand in candidates:
            try:
                indices.append(graph.index_of(cand))
                break
            except KeyError:
                continue
        else:
            raise KeyError(f"unknown vertex label {token!r}")
    return VertexSubset.from_indices(graph.n, indices)


def _inputs_digest(args) -> dict:
    digest = {}
    for attr in ("input", "dir", "rho"):
        path = getattr(args, attr, None)
        if path is None:
            continue
        p = Path(path)
        entry = {"path": str(p)}
        if p.is_file():
            entry["sha256"] = hashlib.sha256(p.read_bytes()).hexdigest()
        digest[attr] = entry
    return digest


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float):
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# -- command handlers ----------------------------------------------------------


def _cmd_cheeger(args):
    graph, conductance, _ = _read_document(args.input)
    if args.flavor == "vertex":
        cert = cheeger_vertex(graph, cap=args.cap)
    else:
        cert = cheeger_conductance(_walk_for(graph, conductance), graph.measure, cap=args.cap)
    return 0, {
        "value": format_rational(cert.value),
        "witness": [graph.labels[v] for v in cert.witness.indices()],
        "flavor": cert.flavor,
    }


def _cmd_spectrum(args):
    graph, conductance, _ = _read_document(args.input)
    if args.operator == "delta":
        op = delta_operator(_walk_for(graph, conductance))
    else:
        op = lambda_operator(graph)
    result = spectrum(op)
    return 0, {
        "operator": args.operator,
        "eigenvalues": list(result.eigenvalues),
        "gap": result.gap,
        "zero_multiplicity": result.zero_multiplicity,
    }


def _cmd_poincare(args):
    graph, conductance, _ = _read_document(args.input)
    walk = _walk_for(graph, conductance)
    est = optimal_lp_constant(walk, args.p, restarts=args.restarts, seed=args.seed)
    return 0, {
        "p": est.p,
        "estimate": est.estimate,
        "restarts": est.restarts,
        "converged": est.converged,
        "gradient_norm": est.gradient_norm,
        "iterations": est.iterations,
        "minimizer": list(est.minimizer),
    }


def _cmd_verify(args):
    graph, conductance, _ = _read_document(args.input)
    theorem = args.theorem
    if theorem == "cheeger-sandwich":
        report = verify_cheeger_sandwich(_walk_for(graph, conductance), cap=args.cap, tol=args.tolerance)
    elif theorem == "measured-sandwich":
        report = verify_measured_sandwich(graph, cap=args.cap, tol=args.tolerance)
    elif theorem == "gap-controls":
        report = verify_gap_controls(graph, tol=args.tolerance)
    elif theorem == "poincare-to-cheeger":
        report = verify_poincare_to_cheeger(graph, cap=args.cap, tol=args.tolerance)
    elif theorem == "distance-bound":
        walk = _walk_for(graph, conductance)
        if args.set_a and args.set_b:
            set_a = _resolve_labels(graph, args.set_a)
            set_b = _resolve_labels(graph, args.set_b)
        else:
            set_a, set_b = _random_disjoint_pair(graph, args.seed)
        report = distance_gap_bound(walk, set_a, set_b, tol=args.tolerance)
    elif theorem == "coarea":
        report = verify_coarea(_walk_for(graph, conductance), trials=args.trials, seed=args.seed)
    else:
        report = verify_lp_poincare(
            _walk_for(graph, conductance),
            args.p,
            trials=args.trials,
            seed=args.seed,
            cap=args.cap,
            tol=args.tolerance,
        )
    return (0 if report.holds else 1), report.as_dict()


def _random_disjoint_pair(graph: MeasuredGraph, seed: int):
    if graph.n < 2:
        raise ValueError("distance bound needs at least two vertices")
    rng = random.Random(seed)
    vertices = list(range(graph.n))
    rng.shuffle(vertices)
    size_a = rng.randrange(1, graph.n)
    size_b = rng.randrange(1, graph.n - size_a + 1)
    set_a = VertexSubset.from_indices(graph.n, vertices[:size_a])
    set_b = VertexSubset.from_indices(graph.n, vertices[size_a : size_a + size_b])
    return set_a, set_b


def _cmd_coarea(args):
    graph, conductance, _ = _read_document(args.input)
    report = verify_coarea(_walk_for(graph, conductance), trials=args.trials, seed=args.seed)
    return (0 if report.holds else 1), report.as_dict()


def _load_family(directory: str) -> GraphFamily:
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"{directory} is not a directory")
    files = sorted(root.glob("*.json"))
    if not files:
        raise FileNotFoundError(f"no *.json graph files in {directory}")
    members = []
    for path in files:
        members.append(load_graph(path.read_text(encoding="utf-8")))
    return GraphFamily(members=tuple(members), provenance={"dir": str(root), "files": [f.name for f in files]})


def _cmd_family(args):
    family = _load_family(args.dir)
    threshold = parse_rational(args.threshold, where="--threshold")
    report = family_report(family, threshold, cap=args.cap)
    rows = [
        {
            "index": r.index,
            "n": r.size,
            "cheeger": None if r.cheeger is None else format_rational(r.cheeger),
            "gap": r.gap,
            "K": r.max_valency,
            "s": None if r.ratio_bound is None else format_rational(r.ratio_bound),
            "gamma": format_rational(r.peak_fraction),
            "error": r.error,
        }
        for r in report.rows
    ]
    return 0, {
        "rows": rows,
        "threshold": format_rational(report.threshold),
        "uniform_valency": report.uniform_valency,
        "ratio_floor": None if report.ratio_floor is None else format_rational(report.ratio_floor),
        "ghostly": report.ghostly_verdict,
        "expander_verdict": report.expander_verdict,
        "partial": report.partial,
    }


def _cmd_certify(args):
    family = _load_family(args.dir)
    rho = None
    if args.rho is not None:
        table = json.loads(Path(args.rho).read_text(encoding="utf-8"))
        rho = RhoTable(tuple(float(x) for x in table))
    cert = generalised_certificate(family, args.p, rho_plus=rho, seed=args.seed, cap=args.cap)
    rows = []
    violated = False
    for r in cert.rows:
        entry = {
            "index": r.index,
            "n": r.size,
            "gamma": format_rational(r.gamma),
            "skipped": r.skipped,
            "cutoff": r.cutoff,
            "off_diagonal_mass": None if r.off_diagonal_mass is None else format_rational(r.off_diagonal_mass),
            "symmetric": r.symmetric,
            "probability": r.probability,
            "supported_off_cutoff": r.supported_off_cutoff,
            "max_tested_energy": r.max_tested_energy,
            "test_maps": [
                {
                    "name": t.name,
                    "accepted": t.accepted,
                    "energy": t.energy,
                    "violating_pair": t.violating_pair,
                }
                for t in r.test_maps
            ],
        }
        if args.emit_nu and r.pair_measure is not None:
            entry["nu"] = {
                f"{x},{y}": format_rational(w) for (x, y), w in sorted(r.pair_measure.items())
            }
        rows.append(entry)
        if r.skipped is None:
            if not (r.symmetric and r.probability and r.supported_off_cutoff):
                violated = True
            if r.max_tested_energy is not None and r.max_tested_energy > cert.energy_bound + 1e-8:
                violated = True
    return (1 if violated else 0), {
        "rows": rows,
        "p": cert.p,
        "kappa": cert.kappa,
        "energy_bound": cert.energy_bound,
        "K": cert.max_valency,
        "ratio_floor": format_rational(cert.ratio_floor),
        "cheeger_floor": cert.cheeger_floor,
        "cheeger_sources": list(cert.cheeger_sources),
    }


def _cmd_generate(args):
    params = {}
    if args.n is not None:
        params["n"] = args.n
    if args.k is not None:
        params["k"] = args.k
    if args.d is not None:
        params["d"] = args.d
    graph = generate(args.kind, measure=args.measure, seed=args.seed, **params)
    return 0, dump_graph(graph)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
