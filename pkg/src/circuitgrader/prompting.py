"""Prompt assembly for the multi-step assessment.

One prompt per grading aspect plus a closing summary prompt. Every
aspect prompt carries the full problem context (problem summary, general
solution method, reference solution, expected final answers) and the hints
registered for that aspect; the final-answer prompt can additionally carry
the deterministic checker's advisory finding. Building is pure and
deterministic: identical inputs produce byte-identical bundles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import AssessmentCase
from .eqcheck import MatchVerdict

TEMPLATE_VERSION = "v1"

STEP_FINAL_ANSWER = "final-answer-and-arithmetic"
STEP_COMPLETENESS = "completeness"
STEP_METHOD = "method"
STEP_UNITS = "units"
STEP_SUMMARY = "summary"
STEP_UNIFIED = "unified"  # baseline single-prompt mode, not a grading step

ASPECT_STEPS = (STEP_FINAL_ANSWER, STEP_COMPLETENESS, STEP_METHOD, STEP_UNITS)
STEPS = ASPECT_STEPS + (STEP_SUMMARY,)

METRIC_COMPLETENESS = "completeness"
METRIC_METHOD = "method"
METRIC_FINAL_ANSWER = "final-answer"
METRIC_ARITHMETIC = "arithmetic"
METRIC_UNIT = "unit"
METRICS = (METRIC_COMPLETENESS, METRIC_METHOD, METRIC_FINAL_ANSWER, METRIC_ARITHMETIC, METRIC_UNIT)

STEP_METRICS = {
    STEP_FINAL_ANSWER: (METRIC_FINAL_ANSWER, METRIC_ARITHMETIC),
    STEP_COMPLETENESS: (METRIC_COMPLETENESS,),
    STEP_METHOD: (METRIC_METHOD,),
    STEP_UNITS: (METRIC_UNIT,),
}

# verdict-block line key and the decision field it sets, per step
VERDICT_LINES = {
    STEP_FINAL_ANSWER: (
        ("FINAL_ANSWER", "final_answer_correct"),
        ("ARITHMETIC_ERROR", "has_arithmetic_error"),
    ),
    STEP_COMPLETENESS: (("COMPLETE", "complete"),),
    STEP_METHOD: (("METHOD", "method_correct"),),
    STEP_UNITS: (("UNITS", "units_correct"),),
}
VERDICT_LINES[STEP_UNIFIED] = (
    VERDICT_LINES[STEP_COMPLETENESS]
    + VERDICT_LINES[STEP_METHOD]
    + VERDICT_LINES[STEP_FINAL_ANSWER]
    + VERDICT_LINES[STEP_UNITS]
)


class PromptError(Exception):
    pass


class MissingVerdictError(PromptError):
    def __init__(self, step: str):
        self.step = step
        super().__init__(f"no verdict available for step {step!r}")


@dataclass(frozen=True)
class Hint:
    id: str
    step: str
    error_type: str
    text: str

    def __post_init__(self):
        if self.step not in ASPECT_STEPS:
            raise PromptError(f"hint {self.id!r}: step {self.step!r} takes no hints")
        if not self.text.strip():
            raise PromptError(f"hint {self.id!r}: empty text")


@dataclass(frozen=True)
class PromptBundle:
    step: str
    case_id: str
    system_text: str
    user_text: str
    response_schema_id: str
    template_version: str = TEMPLATE_VERSION


def load_hint_registry(path: str | Path) -> list[Hint]:
    data = json.loads(Path(path).read_text())
    return [Hint(**entry) for entry in data["hints"]]


def default_hint_registry() -> list[Hint]:
    """The bundled hint registry, one hint per known grader failure mode."""
    source = resources.files("circuitgrader.data").joinpath("hints.json")
    data = json.loads(source.read_text())
    return [Hint(**entry) for entry in data["hints"]]


def hints_for_step(registry: list[Hint], step: str) -> list[Hint]:
    return [h for h in registry if h.step == step]


_SYSTEM_BASE = (
    "You are a teaching assistant grading one student's circuit-analysis "
    "homework solution against the instructor's reference solution."
)

_STEP_CHARGE = {
    STEP_FINAL_ANSWER: (
        "Judge only the final answer and the arithmetic. Decide whether the "
        "student's final answer agrees with the reference, and whether the "
        "calculations contain arithmetic errors."
    ),
    STEP_COMPLETENESS: (
        "Judge only completeness. Decide whether the student addressed every "
        "part of the problem."
    ),
    STEP_METHOD: (
        "Judge only the solution method. Decide whether the approach the "
        "student used is valid, independent of arithmetic slips or typos."
    ),
    STEP_UNITS: (
        "Judge only the units. Decide whether appropriate units are used for "
        "the quantities in the solution."
    ),
    STEP_UNIFIED: (
        "Assess the student's solution on all five aspects: completeness, "
        "method, final answer, arithmetic accuracy, and units."
    ),
}


def _context_block(case: AssessmentCase, include_augmented: bool) -> list[str]:
    parts = []
    if include_augmented:
        parts += ["## Problem summary", case.context.problem_summary, ""]
        parts += ["## General solution method", case.context.general_method, ""]
    parts += ["## Reference solution", case.context.reference_solution, ""]
    parts += ["## Expected final answers", case.context.final_answer_summary, ""]
    parts += ["## Student solution", case.student_solution, ""]
    return parts


def _response_block(step: str) -> list[str]:
    lines = [key + ": yes|no" for key, _ in VERDICT_LINES[step]]
    return [
        "## Response format",
        "Explain your reasoning first, then end your reply with exactly this block:",
        "```verdict",
        *lines,
        "EXPLANATION: <one or two sentences a student can act on>",
        "```",
    ]


def _schema_id(step: str) -> str:
    return f"verdict/{step}@{TEMPLATE_VERSION}"


def build_prompt(
    step: str,
    case: AssessmentCase,
    registry: list[Hint],
    advisory: MatchVerdict | None = None,
) -> PromptBundle:
    """Assemble the prompt for one grading aspect."""
    if step not in ASPECT_STEPS:
        raise PromptError(f"not an aspect step: {step!r}")
    if advisory is not None and step != STEP_FINAL_ANSWER:
        raise PromptError(f"a checker advisory is only allowed on {STEP_FINAL_ANSWER!r}, not {step!r}")

    parts = [f"# Grading task: {step}", _STEP_CHARGE[step], ""]
    parts += _context_block(case, include_augmented=True)
    hints = hints_for_step(registry, step)
    if hints:
        parts.append("## Hints")
        parts += [f"- {h.text}" for h in hints]
        parts.append("")
    if advisory is not None:
        parts += [
            "## Deterministic checker finding",
            (
                "An automated equivalence checker compared the student's final "
                f"answer with the reference and reports: "
                f"{'MATCHED' if advisory.matched else 'NOT MATCHED'} "
                f"(method: {advisory.method}; {advisory.detail})."
            ),
            "If your own judgment disagrees with this finding, reconcile the two explicitly.",
            "",
        ]
    parts += _response_block(step)
    return PromptBundle(
        step=step,
        case_id=case.case_id,
        system_text=_SYSTEM_BASE + " " + _STEP_CHARGE[step],
        user_text="\n".join(parts),
        response_schema_id=_schema_id(step),
    )


def build_unified_prompt(case: AssessmentCase) -> PromptBundle:
    """Single prompt covering all five aspects (baseline arm).

    The baseline deliberately omits the problem summary, the general
    method, and all hints; its context is the reference solution and the
    expected final answers only.
    """
    parts = ["# Grading task: full assessment", _STEP_CHARGE[STEP_UNIFIED], ""]
    parts += _context_block(case, include_augmented=False)
    parts += _response_block(STEP_UNIFIED)
    return PromptBundle(
        step=STEP_UNIFIED,
        case_id=case.case_id,
        system_text=_SYSTEM_BASE + " " + _STEP_CHARGE[STEP_UNIFIED],
        user_text="\n".join(parts),
        response_schema_id=_schema_id(STEP_UNIFIED),
    )


def build_summary_prompt(case: AssessmentCase, verdicts) -> PromptBundle:
    """Assemble the closing prompt that condenses the four step verdicts.

    ``verdicts`` is any iterable of objects with ``step``, ``decisions``
    and ``explanation`` attributes (one per aspect step).
    """
    by_step = {v.step: v for v in verdicts}
    for step in ASPECT_STEPS:
        if step not in by_step:
            raise MissingVerdictError(step)
    parts = [
        "# Grading task: summary",
        (
            "Write a short, encouraging message to the student that summarizes "
            "the four assessments below. Mention what was done well and what "
            "needs fixing. Do not re-grade; rely on the decisions as given."
        ),
        "",
        "## Student solution",
        case.student_solution,
        "",
        "## Assessments",
    ]
    for step in ASPECT_STEPS:
        v = by_step[step]
        decided = ", ".join(f"{k}={'yes' if b else 'no'}" for k, b in sorted(v.decisions.items()))
        parts.append(f"- {step}: {decided}")
        parts.append(f"  explanation: {v.explanation}")
    parts += ["", "Reply with the summary text only; no verdict block is needed."]
    return PromptBundle(
        step=STEP_SUMMARY,
        case_id=case.case_id,
        system_text=_SYSTEM_BASE + " Write the student-facing summary of the finished assessment.",
        user_text="\n".join(parts),
        response_schema_id=f"summary@{TEMPLATE_VERSION}",
    )
