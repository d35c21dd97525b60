"""Command-line interface: ``mslh sat|model|member|rrs|approx|ta``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .kernel import Signature, SignatureError, normalize
from .modelbuild import ModelError
from .pipeline import EXIT_CODES, RESOURCE_OUT, SATISFIABLE, PipelineError, run_pipeline, split_predicates
from .saturate import Limits, Refutation, ResourceOut, format_proof
from .syntax import ParseError, format_clauses, parse, parse_atom, parse_term
from .transform import TransformError, approximate, redundancy_cleanup, rrs
from . import treeauto

EXIT_PARSE = 10
EXIT_LIMIT = 11
EXIT_ERROR = 12


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_ERROR):
        super().__init__(message)
        self.code = code


def _strs(clauses) -> list:
    return [str(normalize(c)) for c in clauses]


def _emit(args, human: str, data: dict) -> None:
    if getattr(args, "json", False):
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        sys.stdout.write(human if human.endswith("\n") else human + "\n")


def _limits(args) -> Limits:
    base = Limits.from_env()
    return Limits(
        args.max_clauses if args.max_clauses is not None else base.max_clauses,
        args.max_iterations if args.max_iterations is not None else base.max_iterations,
    )


def _pipeline(args):
    problem = parse(args.file)
    return run_pipeline(problem, args.split or (), args.no_split, not args.no_approx, _limits(args))


def cmd_sat(args) -> int:
    result = _pipeline(args)
    sat = result.saturation
    lines = [result.verdict]
    data = {
        "verdict": result.verdict,
        "exit_code": result.exit_code,
        "split": result.split,
        "ledger": result.ledger.to_dict(),
        "stats": sat.stats.to_dict(),
        "clauses": _strs(result.clauses),
    }
    if isinstance(sat, ResourceOut):
        lines.append(f"limit exceeded: {sat.reason}")
        data["reason"] = sat.reason
    if args.proof and isinstance(sat, Refutation):
        lines.append("proof:")
        lines.append(format_proof(sat).rstrip("\n"))
        data["proof"] = [str(step) for step in sat.proof]
    if args.model and result.verdict == SATISFIABLE:
        model = result.model()
        lines.append(model.format())
        data["model"] = model.to_dict()
    _emit(args, "\n".join(lines), data)
    return result.exit_code


def cmd_model(args) -> int:
    result = _pipeline(args)
    if result.verdict != SATISFIABLE:
        _emit(args, result.verdict, {"verdict": result.verdict})
        return result.exit_code
    model = result.model()
    _emit(args, model.format(), {"verdict": result.verdict, "model": model.to_dict()})
    return 0


def cmd_member(args) -> int:
    result = _pipeline(args)
    if result.verdict != SATISFIABLE:
        raise CliError(f"membership needs a saturated set, verdict is {result.verdict}", EXIT_LIMIT if result.verdict == RESOURCE_OUT else EXIT_ERROR)
    atom = parse_atom(args.atom)
    answer = result.member(atom)
    _emit(args, "true" if answer else "false", {"atom": str(atom), "member": answer})
    return 0 if answer else 1


def cmd_rrs(args) -> int:
    problem = parse(args.file)
    preds = split_predicates(problem, args.split or ())
    clauses, ledger, stats = rrs(problem.clauses, preds)
    if not args.no_cleanup:
        clauses = redundancy_cleanup(clauses)
    data = {
        "clauses": _strs(clauses),
        "ledger": ledger.to_dict(),
        "steps": stats.steps,
        "step_bound": stats.bound,
    }
    _emit(args, format_clauses(clauses), data)
    return 0


def cmd_approx(args) -> int:
    problem = parse(args.file)
    preds = split_predicates(problem, args.split or (), args.no_split)
    clauses = problem.clauses
    ledger = None
    if preds:
        clauses, ledger, _ = rrs(clauses, preds)
        clauses = redundancy_cleanup(clauses)
    out, ledger = approximate(clauses, Signature(problem.signature.functions), ledger)
    _emit(args, format_clauses(out), {"clauses": _strs(out), "ledger": ledger.to_dict()})
    return 0


def _read_automaton(path: str) -> treeauto.TreeAutomaton:
    return treeauto.parse_automaton(Path(path).read_text())


def _parse_ops(text: str) -> dict:
    ops = {}
    for item in text.replace(",", " ").split():
        name, _, n = item.rpartition("/")
        if not name or not n.isdigit():
            raise CliError(f"bad operator {item!r}, expected name/arity", EXIT_PARSE)
        ops[name] = int(n)
    return ops


def cmd_ta(args) -> int:
    op = args.ta_command
    if op == "accepts":
        a = _read_automaton(args.automaton)
        ok = treeauto.accepts(a, parse_term(args.term))
        _emit(args, "true" if ok else "false", {"accepts": ok})
        return 0 if ok else 1
    if op == "empty":
        a = _read_automaton(args.automaton)
        empty = treeauto.is_empty(a)
        _emit(args, "true" if empty else "false", {"empty": empty})
        return 0 if empty else 1
    if op in ("intersect", "union"):
        a, b = _read_automaton(args.first), _read_automaton(args.second)
        out = getattr(treeauto, op)(a, b)
    elif op == "complement":
        out = treeauto.complement(_read_automaton(args.automaton))
    elif op == "atom":
        atom = parse_atom(args.atom)
        ops = _parse_ops(args.ops)
        sig = Signature({f: n for f, n in ops.items() if f != atom.pred})
        out = treeauto.from_linear_atom(atom, sig)
    elif op == "mslh":
        clauses = treeauto.ta_to_mslh(_read_automaton(args.automaton))
        _emit(args, format_clauses(clauses), {"clauses": _strs(clauses)})
        return 0
    else:  # pragma: no cover - argparse rejects unknown commands
        raise CliError(f"unknown ta command {op}")
    _emit(args, treeauto.format_automaton(out), {"automaton": treeauto.format_automaton(out)})
    return 0


def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", help="problem file")
    p.add_argument("--split", action="append", metavar="R", help="split binary predicate R (repeatable)")
    p.add_argument("--no-split", action="store_true", help="ignore #split directives and --split")
    p.add_argument("--no-approx", action="store_true", help="saturate the input without approximation")
    p.add_argument("--max-clauses", type=int, help="clause limit for saturation")
    p.add_argument("--max-iterations", type=int, help="given-clause iteration limit")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mslh", description="Saturation, finite models and tree automata for MSLH clause sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sat", help="decide satisfiability (split, approximate, saturate)")
    _pipeline_flags(p)
    p.add_argument("--model", action="store_true", help="print the finite model when satisfiable")
    p.add_argument("--proof", action="store_true", help="print the refutation when one is found")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("model", help="print the finite model of a satisfiable problem")
    _pipeline_flags(p)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("member", help="ground query over the original signature")
    _pipeline_flags(p)
    p.add_argument("atom", help="ground atom, e.g. 'r(g(c),c)'")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("rrs", help="reflexive relation splitting")
    p.add_argument("file")
    p.add_argument("--split", action="append", metavar="R")
    p.add_argument("--no-cleanup", action="store_true", help="keep redundant clauses")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_rrs)

    p = sub.add_parser("approx", help="print the MSLH approximation")
    p.add_argument("file")
    p.add_argument("--split", action="append", metavar="R")
    p.add_argument("--no-split", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("ta", help="tree automata toolbox")
    tsub = p.add_subparsers(dest="ta_command", required=True)
    for name in ("accepts", "empty", "complement", "mslh"):
        q = tsub.add_parser(name)
        q.add_argument("automaton")
        if name == "accepts":
            q.add_argument("term")
        q.add_argument("--json", action="store_true")
    for name in ("intersect", "union"):
        q = tsub.add_parser(name)
        q.add_argument("first")
        q.add_argument("second")
        q.add_argument("--json", action="store_true")
    q = tsub.add_parser("atom", help="automaton for the ground instances of a linear atom")
    q.add_argument("atom")
    q.add_argument("--ops", required=True, help="function symbols, e.g. 'a/0 b/0 g/2'")
    q.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ta)
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (SignatureError, TransformError, ModelError, PipelineError, treeauto.AutomatonError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())


__all__ = ["EXIT_CODES", "EXIT_ERROR", "EXIT_LIMIT", "EXIT_PARSE", "build_parser", "main"]
