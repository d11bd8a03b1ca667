"""Command line front end.

Reports go to stdout as one JSON document; a short human-readable summary
goes to stderr unless ``--quiet``. Exit codes: 0 success, 1 bad input,
2 numerical non-convergence or bounds gap.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import fileio
from .config import TOL
from .errors import BoundsGap, NotSC, ProtocolImperfect, ScentError, SolverFailure
from .fileio import InputError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _q(value, units: str) -> dict:
    return {"value": value, "units": units}


def _report(command, inputs, results, diagnostics, seed) -> dict:
    return {"command": command, "inputs": inputs, "results": results, "diagnostics": diagnostics, "seed": seed}


def _load_state(path):
    return fileio.parse_state(fileio.load_json(path))


def cmd_realize(args):
    from . import phase_ensemble as pe
    from .states import SchmidtCorrelatedState

    state = _load_state(args.state)
    inputs = {"state": fileio.state_doc(state), "k": args.k, "tol": args.tol, "restarts": args.restarts}
    diag = {}
    code = EXIT_OK
    try:
        if isinstance(state, SchmidtCorrelatedState):
            e = pe.realize_schmidt_correlated(state, K=args.k, seed=args.seed, tol=args.tol, restarts=args.restarts)
        else:
            e = pe.solve_phase_ensemble(state, K=args.k, seed=args.seed, tol=args.tol, restarts=args.restarts)
        diag["converged"] = True
    except SolverFailure as exc:
        e = exc.best
        code = EXIT_NUMERIC
        w = pe.realizability_witness(state, e)
        diag.update(
            converged=False,
            witness_margin=_q(w.margin, "norm"),
            witness_certifies_unrealizable=w.certified,
        )
    diag["restarts_used"] = e.restarts
    results = {
        "count": _q(e.count, "count"),
        "weights": _q(e.weights.tolist(), "probability"),
        "phases": _q(e.phases.tolist(), "radians"),
        "amplitudes": _q(e.amplitudes.tolist(), "amplitude"),
        "residual": _q(e.residual, "norm"),
    }
    summary = f"realize: K={e.count} residual={e.residual:.3e} converged={code == EXIT_OK}"
    return _report("realize", inputs, results, diag, args.seed), summary, code


def cmd_ree(args):
    from . import ree
    from .states import SchmidtCorrelatedState, detect_schmidt_correlated, embed

    state = _load_state(args.state)
    inputs = {"state": fileio.state_doc(state), "oracle": args.oracle}
    results, diag = {}, {}
    if isinstance(state, SchmidtCorrelatedState):
        sc, rho = state, embed(state)
    else:
        rho = state
        try:
            sc = detect_schmidt_correlated(state)
        except NotSC as exc:
            sc = None
            diag["off_subspace_weight"] = _q(exc.weight, "probability")
        except ScentError as exc:
            raise InputError("dims", str(exc)) from exc
    if sc is None and not args.oracle:
        raise InputError("state", "not Schmidt correlated; pass --oracle for a numerical upper bound")
    if sc is not None:
        results["ree_closed_form"] = _q(ree.ree_sc(sc), "bits")
    if args.oracle:
        inputs.update(terms=args.terms, restarts=args.restarts, iters=args.iters)
        approx = ree.ree_oracle(rho, M=args.terms, restarts=args.restarts, seed=args.seed, iters=args.iters)
        results["ree_oracle"] = _q(approx.value, "bits")
        diag["oracle_best_restart"] = approx.restart
        diag["oracle_terms"] = approx.term_count
        if sc is not None:
            results["oracle_gap"] = _q(approx.value - results["ree_closed_form"]["value"], "bits")
    summary = "ree: " + " ".join(f"{k}={v['value']:.12g}" for k, v in results.items())
    return _report("ree", inputs, results, diag, args.seed), summary, EXIT_OK


def _load_sc(path):
    from .states import SchmidtCorrelatedState, detect_schmidt_correlated

    state = _load_state(path)
    if isinstance(state, SchmidtCorrelatedState):
        return state
    try:
        return detect_schmidt_correlated(state)
    except ScentError as exc:
        raise InputError(str(path), str(exc)) from exc


def cmd_additivity(args):
    from . import ree

    sc1, sc2 = _load_sc(args.state1), _load_sc(args.state2)
    lhs, rhs, res = ree.additivity_check(sc1, sc2)
    inputs = {"state1": fileio.state_doc(sc1), "state2": fileio.state_doc(sc2)}
    results = {"lhs": _q(lhs, "bits"), "rhs": _q(rhs, "bits"), "residual": _q(res, "bits")}
    code = EXIT_OK if res <= 1e-9 else EXIT_NUMERIC
    return _report("additivity", inputs, results, {}, args.seed), f"additivity: lhs={lhs:.12g} rhs={rhs:.12g} residual={res:.3e}", code


def cmd_discriminate(args):
    from . import locc

    if args.basis:
        doc = fileio.load_json(args.basis)
        try:
            basis = locc.DiscriminationBasis(fileio.parse_matrix(doc))
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError("re/im", str(exc)) from exc
    elif args.dim:
        basis = locc.DiscriminationBasis.random(args.dim, np.random.default_rng(args.seed))
    else:
        raise InputError("--dim/--basis", "one of --dim or --basis is required")
    prob, transcripts = locc.simulate_discrimination(basis, mode=args.mode, seed=args.seed, trials=args.trials)
    inputs = {"basis": fileio.matrix_doc(basis.u), "mode": args.mode}
    if args.mode == "sampled":
        inputs["trials"] = args.trials
    results = {"success_probability": _q(prob, "probability")}
    diag = {
        "branch_count": len(transcripts),
        "successes": sum(t.success for t in transcripts),
        "max_schmidt_rank_after": max(t.schmidt_rank_after for t in transcripts),
    }
    if args.transcripts:
        with open(args.transcripts, "w", encoding="utf-8") as fh:
            fh.write(locc.format_transcripts(transcripts))
        diag["transcripts_path"] = args.transcripts
    return _report("discriminate", inputs, results, diag, args.seed), f"discriminate: d={basis.dim} success={prob!r}", EXIT_OK


def cmd_distill(args):
    from . import distill, locc

    if args.bell_pair:
        i, j = args.bell_pair
        try:
            fam = distill.bell_pair_example(i, j)
        except (ScentError, ValueError) as exc:
            raise InputError("--bell-pair", str(exc)) from exc
    elif args.family:
        fam = fileio.parse_family(fileio.load_json(args.family))
    else:
        raise InputError("family", "a family file or --bell-pair I J is required")
    inputs = {"family": fileio.family_doc(fam)}
    prob, transcripts = locc.simulate_discrimination(fam.basis, mode="exhaustive")
    diag = {
        "protocol_success_probability": _q(prob, "probability"),
        "branches": [
            {"hidden": t.hidden_index, "alice": t.alice_outcome, "bob": t.bob_outcome,
             "probability": _q(t.probability, "probability"), "success": t.success}
            for t in transcripts
        ],
    }
    try:
        lo, hi, val = distill.distillation_bounds(fam)
    except BoundsGap as exc:
        results = {"lower_bound": _q(exc.lower, "bits"), "upper_bound": _q(exc.upper, "bits")}
        return _report("distill", inputs, results, diag, args.seed), f"distill: bounds gap {exc}", EXIT_NUMERIC
    except ProtocolImperfect as exc:
        return _report("distill", inputs, {}, diag, args.seed), f"distill: {exc}", EXIT_NUMERIC
    results = {"lower_bound": _q(lo, "bits"), "upper_bound": _q(hi, "bits"), "distillable_entanglement": _q(val, "bits")}
    return _report("distill", inputs, results, diag, args.seed), f"distill: E_d={val!r} bits (lower={lo!r}, upper={hi!r})", EXIT_OK


def _default_seed() -> int:
    raw = os.environ.get("SCENT_SEED")
    if raw is None:
        return 0
    try:
        return _seed_type(raw)
    except argparse.ArgumentTypeError as exc:
        raise InputError("SCENT_SEED", str(exc)) from exc


def _seed_type(raw: str) -> int:
    try:
        v = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {raw!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed_type, default=argparse.SUPPRESS, help="RNG seed (env SCENT_SEED, default 0)")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="no summary on stderr")

    p = _Parser(prog="scent", description="Schmidt correlated state toolkit", parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("realize", parents=[common], help="phase-ensemble realization of a state")
    r.add_argument("state")
    r.add_argument("--k", type=int, default=None, help="ensemble size (default 2d)")
    r.add_argument("--tol", type=float, default=TOL.phase_residual)
    r.add_argument("--restarts", type=int, default=32)
    r.set_defaults(func=cmd_realize)

    e = sub.add_parser("ree", parents=[common], help="relative entropy of entanglement")
    e.add_argument("state")
    e.add_argument("--oracle", action="store_true", help="also run the separable-state search")
    e.add_argument("--terms", type=int, default=None, help="product terms (default (d_A d_B)^2)")
    e.add_argument("--restarts", type=int, default=32)
    e.add_argument("--iters", type=int, default=400)
    e.set_defaults(func=cmd_ree)

    a = sub.add_parser("additivity", parents=[common], help="additivity of REE on a tensor product")
    a.add_argument("state1")
    a.add_argument("state2")
    a.set_defaults(func=cmd_additivity)

    d = sub.add_parser("discriminate", parents=[common], help="simulate LOCC discrimination")
    d.add_argument("--dim", type=int, default=None, help="random basis of this dimension from --seed")
    d.add_argument("--basis", default=None, help="unitary matrix file")
    d.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    d.add_argument("--trials", type=int, default=1000)
    d.add_argument("--transcripts", default=None, help="write line records to this path")
    d.set_defaults(func=cmd_discriminate)

    s = sub.add_parser("distill", parents=[common], help="distillable entanglement of a family")
    s.add_argument("family", nargs="?")
    s.add_argument("--bell-pair", type=int, nargs=2, metavar=("I", "J"), help="Bell-pair family instead of a file")
    s.set_defaults(func=cmd_distill)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    quiet = getattr(args, "quiet", False)
    try:
        if not hasattr(args, "seed"):
            args.seed = _default_seed()
        report, summary, code = args.func(args)
    except InputError as exc:
        print(f"scent {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(fileio.dumps(report) + "\n")
    if not quiet:
        print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
