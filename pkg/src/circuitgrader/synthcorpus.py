"""Deterministic synthetic fixtures: an 87-case corpus with ground truth,
plus replay cassettes for both prompting arms.

The real student dataset is not redistributable, so tests and demos run on
generated cases: 39 on circuit variables and elements, 48 on resistive
circuits. Student solutions exercise the equivalence engine's rules
(unreduced fractions, rounding, unit conversion), and the scripted grader
verdicts are ground truth with a fixed number of planted mistakes per arm:
the baseline arm gets 22 wrong cases (65/87 all-correct), the enhanced arm
2 (85/87).
"""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from .corpus import AssessmentCase, Corpus, GroundTruth, ProblemContext, save_corpus
from .llmclient import RawResponse, cassette_key, write_cassette
from .pipeline import MODE_BASELINE, MODE_ENHANCED, parse_verdict, run_advisory
from .prompting import (
    ASPECT_STEPS,
    STEP_FINAL_ANSWER,
    VERDICT_LINES,
    Hint,
    build_prompt,
    build_summary_prompt,
    build_unified_prompt,
    default_hint_registry,
)
from .eqcheck import DEFAULT_TOLERANCE

DEFAULT_SEED = 1729
VE_COUNT = 39
RC_COUNT = 48
BASELINE_WRONG = 22  # 87 - 65
ENHANCED_WRONG = 2   # 87 - 85

CASSETTE_ENHANCED = "cassette_enhanced.json"
CASSETTE_BASELINE = "cassette_baseline.json"


def _fmt_frac(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    if f < 0:
        return f"-\\frac{{{-f.numerator}}}{{{f.denominator}}}"
    return f"\\frac{{{f.numerator}}}{{{f.denominator}}}"


def _power_case(case_id: str, rng: random.Random, variant: str) -> AssessmentCase:
    v = rng.choice([3, 5, 6, 9, 12])
    i = rng.choice([2, 3, 4])
    p = v * i
    context = ProblemContext(
        problem_summary=(
            f"A two-terminal element has {v} V across it and {i} A through it, "
            "with current entering the positive terminal. Find the power absorbed by the element."
        ),
        general_method="power from the voltage-current product under the passive sign convention",
        final_answer_summary=f"p = {p} W",
        reference_solution=(
            f"p = v \\cdot i\n"
            f"p = {v} \\cdot {i}\n"
            f"p = {p} W"
        ),
    )
    lines = [f"p = v \\cdot i = {v} \\cdot {i}"]
    gt = GroundTruth(True, True, True, False, True)
    if variant == "format":
        lines.append(f"p = {p * 1000} mW")
    elif variant == "wrong-value":
        lines.append(f"p = {p + v} W")
        gt = GroundTruth(True, True, False, True, True, notes="multiplied then added v by mistake")
    elif variant == "missing-unit":
        lines.append(f"p = {p}")
        gt = GroundTruth(True, True, True, False, False, notes="final answer lacks its unit")
    else:
        lines.append(f"p = {p} W")
    return AssessmentCase(case_id, "variables-and-elements", context, "\n".join(lines), gt)


def _cost_case(case_id: str, rng: random.Random, variant: str) -> AssessmentCase:
    p = rng.choice([200, 400, 500, 1000])
    hours = rng.choice([2, 3, 5, 10])
    rate = rng.choice([10, 12, 15])  # cents per kWh
    kwh = Fraction(p * hours, 1000)
    cents = kwh * rate
    context = ProblemContext(
        problem_summary=(
            f"An appliance drawing {p} W runs for {hours} hours. Electricity costs "
            f"{rate} cents per kWh. Find the energy used and its cost."
        ),
        general_method="energy as power times time, then cost from the tariff",
        final_answer_summary=f"cost = {_fmt_frac(cents)} cents",
        reference_solution=(
            f"w = {p} \\cdot {hours} = {p * hours} Wh = {_fmt_frac(kwh)} kWh\n"
            f"cost = {_fmt_frac(kwh)} \\cdot {rate} = {_fmt_frac(cents)} cents"
        ),
    )
    lines = [f"w = {_fmt_frac(kwh)} kWh"]
    gt = GroundTruth(True, True, True, False, True)
    if variant == "unit-convert":
        dollars = cents / 100
        lines.append(f"cost = \\${float(dollars):g}")
    elif variant == "wrong-value":
        wrong = cents + rate
        lines.append(f"cost = {_fmt_frac(wrong)} cents")
        gt = GroundTruth(True, True, False, True, True, notes="used the wrong tariff")
    elif variant == "incomplete":
        lines = [f"w = {_fmt_frac(kwh)} kWh"]
        gt = GroundTruth(False, True, False, False, True, notes="found the energy but never the cost")
    else:
        lines.append(f"cost = {_fmt_frac(cents)} cents")
    return AssessmentCase(case_id, "variables-and-elements", context, "\n".join(lines), gt)


def _parallel_case(case_id: str, rng: random.Random, variant: str) -> AssessmentCase:
    r1 = rng.choice([4, 6, 8, 10, 12])
    r2 = rng.choice([3, 5, 6, 15])
    rt = Fraction(r1 * r2, r1 + r2)
    context = ProblemContext(
        problem_summary=(
            f"Two resistors of {r1} ohm and {r2} ohm are connected in parallel across a source. "
            "Find the equivalent resistance seen by the source."
        ),
        general_method="equivalent resistance reduction of parallel branches",
        final_answer_summary=f"R_t = {_fmt_frac(rt)} \\Omega",
        reference_solution=(
            f"R_t = \\frac{{{r1} \\cdot {r2}}}{{{r1} + {r2}}}\n"
            f"R_t = {_fmt_frac(rt)} \\Omega"
        ),
    )
    unreduced_num = r1 * r2
    unreduced_den = r1 + r2
    lines = [f"\\frac{{1}}{{R_t}} = \\frac{{1}}{{{r1}}} + \\frac{{1}}{{{r2}}}"]
    gt = GroundTruth(True, True, True, False, True)
    if variant == "format":
        lines.append(f"R_t = \\frac{{{unreduced_num}}}{{{unreduced_den}}} \\Omega")
    elif variant == "wrong-value":
        lines.append(f"R_t = {_fmt_frac(Fraction(unreduced_num, max(1, unreduced_den - 2)))} \\Omega")
        gt = GroundTruth(True, True, False, True, True, notes="added the branch conductances wrong")
    elif variant == "bad-method":
        lines = [f"R_t = {r1} + {r2}", f"R_t = {r1 + r2} \\Omega"]
        gt = GroundTruth(True, False, False, False, True, notes="treated the parallel pair as a series pair")
    else:
        lines.append(f"R_t = {_fmt_frac(rt)} \\Omega")
    return AssessmentCase(case_id, "resistive-circuits", context, "\n".join(lines), gt)


def _divider_case(case_id: str, rng: random.Random, variant: str) -> AssessmentCase:
    i = rng.choice([6, 9, 12])
    r1 = rng.choice([8, 10, 16])
    r2 = rng.choice([8, 20, 40])
    i1 = Fraction(i * r2, r1 + r2)
    context = ProblemContext(
        problem_summary=(
            f"A {i} A source feeds two parallel resistors, {r1} ohm and {r2} ohm. "
            f"Find the current i_1 through the {r1} ohm resistor."
        ),
        general_method="current divider between two parallel branches",
        final_answer_summary=f"i_1 = {_fmt_frac(i1)} A",
        reference_solution=(
            f"i_1 = {i} \\cdot \\frac{{{r2}}}{{{r1} + {r2}}}\n"
            f"i_1 = {_fmt_frac(i1)} A"
        ),
    )
    lines = [f"i_1 = {i} \\cdot \\frac{{{r2}}}{{{r1} + {r2}}}"]
    gt = GroundTruth(True, True, True, False, True)
    if variant == "format":
        rounded = round(float(i1), 3)
        lines.append(f"i_1 = {rounded:g} A")
    elif variant == "wrong-value":
        wrong = Fraction(i * r1, r1 + r2)
        if wrong == i1:
            wrong = i1 + 1
        lines.append(f"i_1 = {_fmt_frac(wrong)} A")
        gt = GroundTruth(True, True, False, True, True, notes="used the same-branch resistance in the divider")
    elif variant == "missing-unit":
        lines.append(f"i_1 = {_fmt_frac(i1)}")
        gt = GroundTruth(True, True, True, False, False, notes="no unit on the final current")
    else:
        lines.append(f"i_1 = {_fmt_frac(i1)} A")
    return AssessmentCase(case_id, "resistive-circuits", context, "\n".join(lines), gt)


_VE_BUILDERS = (_power_case, _cost_case)
_RC_BUILDERS = (_parallel_case, _divider_case)

_VARIANTS = (
    ("exact", 40),
    ("format", 20),
    ("unit-convert", 8),
    ("wrong-value", 14),
    ("missing-unit", 8),
    ("bad-method", 5),
    ("incomplete", 5),
)


def _pick_variant(rng: random.Random, builder) -> str:
    names = [n for n, _ in _VARIANTS]
    weights = [w for _, w in _VARIANTS]
    variant = rng.choices(names, weights=weights, k=1)[0]
    # each builder implements a subset; anything else degrades to exact
    supported = {
        _power_case: {"exact", "format", "wrong-value", "missing-unit"},
        _cost_case: {"exact", "unit-convert", "wrong-value", "incomplete"},
        _parallel_case: {"exact", "format", "wrong-value", "bad-method"},
        _divider_case: {"exact", "format", "wrong-value", "missing-unit"},
    }[builder]
    return variant if variant in supported else "exact"


def build_synthetic_corpus(seed: int = DEFAULT_SEED) -> Corpus:
    rng = random.Random(seed)
    cases: list[AssessmentCase] = []
    for k in range(VE_COUNT):
        builder = _VE_BUILDERS[k % len(_VE_BUILDERS)]
        cases.append(builder(f"ve-{k + 1:03d}", rng, _pick_variant(rng, builder)))
    for k in range(RC_COUNT):
        builder = _RC_BUILDERS[k % len(_RC_BUILDERS)]
        cases.append(builder(f"rc-{k + 1:03d}", rng, _pick_variant(rng, builder)))
    return Corpus(cases)


# scripted grader ------------------------------------------------------------


def _decisions_from_truth(gt: GroundTruth) -> dict[str, bool]:
    return {
        "complete": gt.complete,
        "method_correct": gt.method_correct,
        "final_answer_correct": gt.final_answer_correct,
        "has_arithmetic_error": gt.has_arithmetic_error,
        "units_correct": gt.units_correct,
    }


def planted_mistakes(corpus: Corpus, wrong_count: int, seed: int = DEFAULT_SEED) -> dict[str, str]:
    """Choose which cases the scripted grader gets wrong, and on which
    decision field."""
    rng = random.Random(seed + wrong_count)
    ids = [c.case_id for c in corpus]
    chosen = rng.sample(ids, wrong_count)
    fields = ["complete", "method_correct", "final_answer_correct", "has_arithmetic_error", "units_correct"]
    return {case_id: fields[idx % len(fields)] for idx, case_id in enumerate(sorted(chosen))}


def _verdict_text(step: str, decisions: dict[str, bool], explanation: str) -> str:
    lines = [f"{key}: {'yes' if decisions[fld] else 'no'}" for key, fld in VERDICT_LINES[step]]
    body = "\n".join(lines)
    return (
        "I compared the student's work with the reference solution step by step.\n\n"
        f"```verdict\n{body}\nEXPLANATION: {explanation}\n```\n"
    )


def _explanation_for(case: AssessmentCase, decisions: dict[str, bool]) -> str:
    issues = []
    if not decisions.get("complete", True):
        issues.append("part of the problem is unanswered")
    if not decisions.get("method_correct", True):
        issues.append("the chosen method does not apply here")
    if not decisions.get("final_answer_correct", True):
        issues.append("the final answer does not match the reference")
    if decisions.get("has_arithmetic_error", False):
        issues.append("there is an arithmetic slip in the calculation")
    if not decisions.get("units_correct", True):
        issues.append("a unit is missing or wrong")
    if not issues:
        return "Everything checks out against the reference solution."
    return "Found: " + "; ".join(issues) + "."


def build_cassette_entries(
    corpus: Corpus,
    mode: str,
    mistakes: dict[str, str],
    registry: list[Hint] | None = None,
    advisory_enabled: bool = True,
) -> dict[str, dict]:
    """Cassette entries for a whole corpus run under one prompting arm.

    Grader decisions equal ground truth except on the planted-mistake
    cases, where one decision field is flipped.
    """
    registry = registry if registry is not None else default_hint_registry()
    entries: dict[str, dict] = {}
    for case in corpus:
        gt = case.ground_truth
        assert gt is not None, "synthetic cases always carry ground truth"
        decisions = _decisions_from_truth(gt)
        flipped = mistakes.get(case.case_id)
        if flipped:
            decisions[flipped] = not decisions[flipped]
        if mode == MODE_BASELINE:
            bundle = build_unified_prompt(case)
            text = _verdict_text(bundle.step, decisions, _explanation_for(case, decisions))
            entries[cassette_key(bundle)] = {"text": text, "step": bundle.step, "case_id": case.case_id}
            continue
        advisory = run_advisory(case, DEFAULT_TOLERANCE) if advisory_enabled else None
        verdicts = []
        for step in ASPECT_STEPS:
            bundle = build_prompt(
                step, case, registry, advisory=advisory if step == STEP_FINAL_ANSWER else None
            )
            step_decisions = {fld: decisions[fld] for _, fld in VERDICT_LINES[step]}
            text = _verdict_text(step, step_decisions, _explanation_for(case, step_decisions))
            entries[cassette_key(bundle)] = {"text": text, "step": step, "case_id": case.case_id}
            verdicts.append(parse_verdict(RawResponse(text=text), step))
        assert all(v.parse_ok for v in verdicts), f"synthetic verdict failed to parse for {case.case_id}"
        summary_bundle = build_summary_prompt(case, verdicts)
        summary = "Overall: " + _explanation_for(case, decisions)
        entries[cassette_key(summary_bundle)] = {
            "text": summary,
            "step": summary_bundle.step,
            "case_id": case.case_id,
        }
    return entries


def materialize(root: str | Path, seed: int = DEFAULT_SEED) -> Path:
    """Write the corpus and both cassettes under ``root``."""
    root = Path(root)
    corpus = build_synthetic_corpus(seed)
    save_corpus(corpus, root / "corpus")
    enhanced = build_cassette_entries(
        corpus, MODE_ENHANCED, planted_mistakes(corpus, ENHANCED_WRONG, seed)
    )
    baseline = build_cassette_entries(
        corpus, MODE_BASELINE, planted_mistakes(corpus, BASELINE_WRONG, seed)
    )
    write_cassette(enhanced, "scripted-grader", root / CASSETTE_ENHANCED)
    write_cassette(baseline, "scripted-grader", root / CASSETTE_BASELINE)
    return root


def main(argv: list[str] | None = None) -> int:
    import argparse

    ap = argparse.ArgumentParser(description="generate the synthetic fixture corpus and cassettes")
    ap.add_argument("out", help="output directory")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = ap.parse_args(argv)
    root = materialize(args.out, args.seed)
    print(f"wrote corpus and cassettes under {root}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
