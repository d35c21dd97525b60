"""Split, approximate, saturate: the end-to-end satisfiability check."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Optional

from .kernel import Atom, Signature
from .modelbuild import FiniteStructure, MembershipOracle, build_finite_model, verify_model
from .saturate import Limits, Refutation, ResourceOut, Saturated, SaturationResult, saturate
from .syntax import ProblemFile
from .transform import TransformError, TransformLedger, approximate, back_translate_query, redundancy_cleanup, rrs

SATISFIABLE = "Satisfiable"
UNSATISFIABLE = "Unsatisfiable"
UNKNOWN = "Unknown (approximation refuted)"
RESOURCE_OUT = "ResourceOut"

EXIT_CODES = {SATISFIABLE: 0, UNSATISFIABLE: 1, UNKNOWN: 2, RESOURCE_OUT: 11}


class PipelineError(RuntimeError):
    pass


@dataclass
class PipelineResult:
    verdict: str
    ledger: TransformLedger
    clauses: list  # the set handed to saturation
    saturation: SaturationResult
    signature: Signature
    split: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    @property
    def saturated(self) -> Optional[list]:
        return self.saturation.clauses if isinstance(self.saturation, Saturated) else None

    def model(self) -> FiniteStructure:
        if self.saturated is None:
            raise PipelineError(f"no model: verdict is {self.verdict}")
        model = build_finite_model(self.saturated, self.signature)
        if not verify_model(model, self.saturated):
            # a correct saturation always yields a model
            raise PipelineError("internal saturation error: the constructed structure falsifies the saturated set")
        return model

    def oracle(self) -> MembershipOracle:
        if self.saturated is None:
            raise PipelineError(f"no model: verdict is {self.verdict}")
        return MembershipOracle(self.saturated, self.signature)

    def member(self, atom: Atom) -> bool:
        """Truth of a ground atom over the original signature in the model
        found by saturation."""
        return back_translate_query(self.ledger, atom, self.oracle())


def split_predicates(problem: ProblemFile, extra: Iterable[str] = (), no_split: bool = False) -> list[str]:
    if no_split:
        return []
    return list(dict.fromkeys(list(problem.splits) + list(extra)))


def preprocess(
    problem: ProblemFile,
    split: Iterable[str] = (),
    no_split: bool = False,
    approx: bool = True,
) -> tuple[list, TransformLedger, Signature, list]:
    preds = split_predicates(problem, split, no_split)
    clauses = list(problem.clauses)
    ledger = TransformLedger()
    for p in preds:
        if problem.signature.predicates.get(p, 2) != 2:
            raise TransformError(f"cannot split {p}: it is not binary")
    if preds:
        clauses, ledger, _ = rrs(clauses, preds)
        clauses = redundancy_cleanup(clauses)
    sig = Signature.from_clauses(clauses, _original_functions(problem))
    if approx:
        clauses, ledger = approximate(clauses, sig, ledger)
        # split and original predicates are gone after projection
        sig = Signature.from_clauses(clauses, Signature(sig.functions))
    return clauses, ledger, sig, preds


def _original_functions(problem: ProblemFile) -> Signature:
    # keep the function symbols (and their order) even if splitting drops
    # every clause that mentions one of them
    return Signature(problem.signature.functions)


def run_pipeline(
    problem: ProblemFile,
    split: Iterable[str] = (),
    no_split: bool = False,
    approx: bool = True,
    limits: Optional[Limits] = None,
) -> PipelineResult:
    clauses, ledger, sig, preds = preprocess(problem, split, no_split, approx)
    result = saturate(clauses, limits or Limits.from_env(), sig)
    if isinstance(result, Saturated):
        verdict = SATISFIABLE
    elif isinstance(result, Refutation):
        verdict = UNKNOWN if ledger.lossy else UNSATISFIABLE
    else:
        verdict = RESOURCE_OUT
    return PipelineResult(verdict, ledger, clauses, result, sig, preds)


__all__ = [
    "EXIT_CODES",
    "PipelineError",
    "PipelineResult",
    "RESOURCE_OUT",
    "ResourceOut",
    "SATISFIABLE",
    "UNKNOWN",
    "UNSATISFIABLE",
    "preprocess",
    "run_pipeline",
    "split_predicates",
]
