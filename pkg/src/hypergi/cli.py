"""Command-line driver: run, gen-tests, detect, localize, repair.

Exit codes: 0 success, 1 error, 2 nothing to fix (no leak), 64 usage error.
Every stage takes its randomness from a stream derived from ``--seed``, so
running the stages separately and feeding files forward reproduces ``repair``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import report
from .errors import HyperGIError, NoLeak
from .hypergen import GenParams, generate_hypertests, suite_from_json, suite_to_json
from .lang import DEFAULT_STEP_BUDGET, Program, edit_to_json, execute
from .localize import localize
from .qif import suite_leakage
from .repair import EvolveParams, evolve
from .seeding import derive_seed
from .subjects import load_program
from .testgen import FunctionalSuite, generate_functional_tests

log = logging.getLogger("hypergi")

EXIT_OK, EXIT_ERROR, EXIT_NO_LEAK, EXIT_USAGE = 0, 1, 2, 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--subject", required=True, help="corpus name or path to a .hg file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--step-budget", type=_positive, default=DEFAULT_STEP_BUDGET)
    common.add_argument("--jobs", type=_positive, default=1, help="parallel fitness workers (results unaffected)")
    common.add_argument("--out", type=Path, help="output file (stdout when omitted)")
    common.add_argument("-v", "--verbose", action="store_true")

    gen = _Parser(add_help=False)
    gen.add_argument("--samples-per-half", type=_positive, default=8)
    gen.add_argument("--highs-per-test", type=_positive, default=None)
    gen.add_argument("--max-depth", type=_positive, default=12)
    gen.add_argument("--max-suite", type=_positive, default=100)

    feed = _Parser(add_help=False)
    feed.add_argument("--hypertests", type=Path, help="reuse a hypertest suite written by detect")

    parser = _Parser(prog="hypergi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", parents=[common], help="execute a subject on explicit inputs")
    run.add_argument("inputs", nargs="*", metavar="NAME=VALUE")

    gt = sub.add_parser("gen-tests", parents=[common], help="write a functional test suite")
    gt.add_argument("--functional-tests", type=_positive, default=200)

    sub.add_parser("detect", parents=[common, gen], help="search for leaking hypertests")
    sub.add_parser("localize", parents=[common, gen, feed], help="rank statements by leakage reduction")

    rp = sub.add_parser("repair", parents=[common, gen, feed], help="detect, localize and evolve a patch")
    rp.add_argument("--functional-tests", type=_positive, default=200)
    rp.add_argument("--functional-suite", type=Path, help="reuse a suite written by gen-tests")
    rp.add_argument("--epochs", type=_positive, default=25)
    rp.add_argument("--generations", type=_positive, default=50)
    rp.add_argument("--population", type=int, default=32)
    rp.add_argument("--target-fitness", type=float, default=0.0)
    rp.add_argument("--patched", type=Path, help="where to write the patched source")
    return parser


# --- stages ----------------------------------------------------------------


def _detect(p: Program, args) -> tuple[list, object]:
    params = GenParams(
        samples_per_half=args.samples_per_half,
        highs_per_test=args.highs_per_test,
        max_depth=args.max_depth,
        max_suite=args.max_suite,
        step_budget=args.step_budget,
        seed=derive_seed(args.seed, "detect"),
    )
    return generate_hypertests(p, p.policy, params)


def _hypertests(p: Program, args):
    if args.hypertests is not None:
        suite = suite_from_json(report.load(args.hypertests))
        if not suite:
            return suite, None
        return suite, suite_leakage(p, suite, args.step_budget)
    return _detect(p, args)


def _functional(p: Program, args) -> FunctionalSuite:
    if getattr(args, "functional_suite", None) is not None:
        return FunctionalSuite.from_json(report.load(args.functional_suite))
    return generate_functional_tests(
        p, p.policy, args.functional_tests, derive_seed(args.seed, "gen-tests"), args.step_budget
    )


def cmd_run(p: Program, args) -> int:
    binding = {}
    for item in args.inputs:
        name, sep, value = item.partition("=")
        if not sep:
            raise _UsageError(f"expected NAME=VALUE, got {item!r}")
        try:
            binding[name] = int(value)
        except ValueError:
            raise _UsageError(f"not an integer: {item!r}") from None
    unknown = set(binding) - set(p.input_names)
    missing = [n for n in p.input_names if n not in binding]
    if unknown or missing:
        raise _UsageError(f"inputs must be exactly {', '.join(p.input_names)}")
    obs = execute(p, binding, args.step_budget)
    if args.out is None:
        print(obs)
    else:
        report.write({"subject": p.name, "input": binding, "observation": obs.to_json()}, args.out)
    return EXIT_OK


def cmd_gen_tests(p: Program, args) -> int:
    suite = _functional(p, args)
    report.write({**suite.to_json(), "seed": args.seed}, args.out)
    return EXIT_OK


def cmd_detect(p: Program, args) -> int:
    suite, estimate = _detect(p, args)
    log.info("%s: %d leaking hypertests, %.6f bits", p.name, len(suite), estimate.bits)
    report.write({**suite_to_json(suite, p.name, args.seed), "leak": estimate.to_json()}, args.out)
    return EXIT_OK


def cmd_localize(p: Program, args) -> int:
    suite, _ = _hypertests(p, args)
    if not suite:
        raise NoLeak(f"{p.name}: no leaking hypertests")
    loc = localize(p, suite, args.step_budget)
    report.write({"subject": p.name, "seed": args.seed, **loc.to_json()}, args.out)
    return EXIT_OK


def cmd_repair(p: Program, args) -> int:
    suite, estimate = _hypertests(p, args)
    if not suite:
        raise NoLeak(f"{p.name}: no leaking hypertests")
    fsuite = _functional(p, args)
    loc = localize(p, suite, args.step_budget)
    params = EvolveParams(
        epochs=args.epochs,
        generations=args.generations,
        population=args.population,
        target_fitness=args.target_fitness,
        seed=derive_seed(args.seed, "repair"),
        step_budget=args.step_budget,
    )
    result = evolve(p, p.policy, suite, fsuite, loc, params, jobs=args.jobs)
    payload = {
        "subject": p.name,
        "seed": args.seed,
        "params": {
            "epochs": params.epochs,
            "generations": params.generations,
            "population": params.population,
            "target_fitness": params.target_fitness,
            "tournament_size": params.tournament_size,
            "elitism": params.elitism,
            "crossover_rate": params.crossover_rate,
            "max_patch_len": params.max_patch_len,
            "step_budget": params.step_budget,
            "functional_tests": len(fsuite),
            "hypertests": len(suite),
        },
        "l_o": estimate.bits,
        "leak": estimate.to_json(),
        "localization": loc.to_json(),
        "epochs": [
            {
                "epoch": e.epoch,
                "termination": e.termination,
                "best_f_k": e.best_record.f_k,
                "trajectory": [{"f_k": f, "l_k": l, "fr_k": fr} for f, l, fr in e.trajectory],
            }
            for e in result.epochs
        ],
        "best": {
            "epoch": result.epoch,
            "patch": [edit_to_json(e) for e in result.best_patch],
            **result.best_record.to_json(),
        },
        "patched_source": result.patched_source,
        "termination": result.termination,
    }
    report.write(payload, args.out)
    patched = args.patched or (args.out.with_suffix(".patched.hg") if args.out else None)
    if patched is not None:
        patched.write_text(result.patched_source, encoding="utf-8")
    log.info("%s: best f_k %.6f (%s)", p.name, result.best_record.f_k, result.termination)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "gen-tests": cmd_gen_tests,
    "detect": cmd_detect,
    "localize": cmd_localize,
    "repair": cmd_repair,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        p = load_program(args.subject)
        return COMMANDS[args.command](p, args)
    except _UsageError as e:
        print(f"hypergi {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NoLeak as e:
        print(f"no leak: {e}", file=sys.stderr)
        return EXIT_NO_LEAK
    except (HyperGIError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
