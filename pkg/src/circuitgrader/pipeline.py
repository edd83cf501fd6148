"""Per-case assessment flow: aspect prompts, verdict parsing, the optional
deterministic cross-check, and the closing summary.

Cases run concurrently up to the backend's in-flight bound; the steps
within one case run sequentially because the summary consumes the step
verdicts (and stable step order keeps cassette keys stable).
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .corpus import AssessmentCase, Corpus
from .eqcheck import (
    DEFAULT_TOLERANCE,
    EqcheckError,
    MatchVerdict,
    Tolerance,
    answers_match,
    parse_answer,
)
from .llmclient import CompletionClient, RawResponse
from .prompting import (
    ASPECT_STEPS,
    STEP_FINAL_ANSWER,
    STEP_UNIFIED,
    TEMPLATE_VERSION,
    VERDICT_LINES,
    Hint,
    PromptBundle,
    build_prompt,
    build_summary_prompt,
    build_unified_prompt,
)

MODE_ENHANCED = "enhanced"
MODE_BASELINE = "unified-baseline"

RETRY_ADDENDUM = (
    "\n\nREMINDER: your previous reply could not be parsed. "
    "End your reply with the required verdict block exactly as specified."
)

# decisions that signal a problem and therefore demand an explanation
_NEGATIVE_WHEN = {
    "complete": False,
    "method_correct": False,
    "final_answer_correct": False,
    "units_correct": False,
    "has_arithmetic_error": True,
}


class PipelineError(Exception):
    pass


class ConfigurationError(PipelineError):
    pass


@dataclass(frozen=True)
class StepVerdict:
    step: str
    decisions: dict[str, bool]
    explanation: str
    parse_ok: bool = True
    parse_error: str = ""


@dataclass(frozen=True)
class DisagreementFlag:
    metric: str
    engine_says: bool
    llm_says: bool


@dataclass
class CaseAssessment:
    case_id: str
    mode: str
    verdicts: dict[str, StepVerdict]
    summary_text: str | None = None
    advisory: MatchVerdict | None = None
    disagreement_flags: list[DisagreementFlag] = field(default_factory=list)

    def all_parsed(self) -> bool:
        return all(self.verdicts[s].parse_ok for s in ASPECT_STEPS)


@dataclass(frozen=True)
class CaseFailure:
    case_id: str
    error: str


@dataclass
class RunResult:
    assessments: list[CaseAssessment]
    failures: list[CaseFailure] = field(default_factory=list)


@dataclass(frozen=True)
class AssessOptions:
    mode: str = MODE_ENHANCED
    advisory_enabled: bool = True
    tolerance: Tolerance = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.mode not in (MODE_ENHANCED, MODE_BASELINE):
            raise ConfigurationError(f"unknown mode {self.mode!r}")


_VERDICT_FENCE_RE = re.compile(r"```verdict\s*\n(.*?)```", re.DOTALL)


def parse_verdict(raw: RawResponse, step: str) -> StepVerdict:
    """Extract the trailing verdict block for ``step`` from a reply.

    Parse failure is data (``parse_ok=False`` with a reason), never an
    exception.
    """
    fields = VERDICT_LINES[step]
    blocks = _VERDICT_FENCE_RE.findall(raw.text)
    scope = blocks[-1] if blocks else raw.text
    decisions: dict[str, bool] = {}
    missing: list[str] = []
    for key, decision_field in fields:
        m = None
        for m in re.finditer(rf"^\s*{key}\s*:\s*(yes|no)\b", scope, re.IGNORECASE | re.MULTILINE):
            pass
        if m is None:
            missing.append(key)
        else:
            decisions[decision_field] = m.group(1).lower() == "yes"
    explanation = ""
    m = None
    for m in re.finditer(r"^\s*EXPLANATION\s*:\s*(.*)$", scope, re.IGNORECASE | re.MULTILINE):
        pass
    if m is not None:
        tail = scope[m.end(1):].strip()
        explanation = (m.group(1) + ("\n" + tail if tail else "")).strip()
    if missing:
        return StepVerdict(
            step, decisions, explanation, parse_ok=False,
            parse_error=f"missing verdict line(s): {', '.join(missing)}",
        )
    negative = any(decisions[f] == _NEGATIVE_WHEN[f] for f in decisions)
    if negative and not explanation:
        return StepVerdict(
            step, decisions, explanation, parse_ok=False,
            parse_error="negative decision without an explanation",
        )
    return StepVerdict(step, decisions, explanation)


def extract_final_answer(text: str) -> str | None:
    """Best-effort final answer: the last line that parses as math.

    Lines wrapped in ``$...$`` math-mode delimiters are unwrapped first.
    """
    for line in reversed(text.splitlines()):
        line = line.strip()
        if not line:
            continue
        if line.startswith("$") and line.endswith("$") and len(line) > 2:
            line = line[1:-1].strip()
        try:
            parse_answer(line)
        except EqcheckError:
            continue
        return line
    return None


def run_advisory(case: AssessmentCase, tol: Tolerance) -> MatchVerdict | None:
    """Deterministic final-answer cross-check, or None when either side
    does not parse as a final answer."""
    student = extract_final_answer(case.student_solution)
    reference = extract_final_answer(case.context.final_answer_summary)
    if student is None or reference is None:
        return None
    try:
        return answers_match(student, reference, tol)
    except EqcheckError:
        return None


def _complete_step(client: CompletionClient, bundle: PromptBundle, step: str) -> StepVerdict:
    verdict = parse_verdict(client.complete(bundle), step)
    if verdict.parse_ok:
        return verdict
    retry_bundle = replace(bundle, user_text=bundle.user_text + RETRY_ADDENDUM)
    return parse_verdict(client.complete(retry_bundle), step)


def assess_case(
    case: AssessmentCase,
    registry: list[Hint],
    client: CompletionClient,
    options: AssessOptions = AssessOptions(),
) -> CaseAssessment:
    """Run the full assessment flow for one case.

    Backend errors propagate to the caller; verdict-parse failures are
    recorded on the verdict and suppress the summary step.
    """
    if options.mode == MODE_BASELINE:
        return _assess_unified(case, client)

    advisory = run_advisory(case, options.tolerance) if options.advisory_enabled else None
    verdicts: dict[str, StepVerdict] = {}
    for step in ASPECT_STEPS:
        bundle = build_prompt(
            step,
            case,
            registry,
            advisory=advisory if step == STEP_FINAL_ANSWER else None,
        )
        verdicts[step] = _complete_step(client, bundle, step)

    flags: list[DisagreementFlag] = []
    final = verdicts[STEP_FINAL_ANSWER]
    if advisory is not None and final.parse_ok:
        llm_says = final.decisions["final_answer_correct"]
        if llm_says != advisory.matched:
            flags.append(DisagreementFlag("final-answer", advisory.matched, llm_says))

    summary_text = None
    if all(v.parse_ok for v in verdicts.values()):
        summary_bundle = build_summary_prompt(case, verdicts.values())
        summary_text = client.complete(summary_bundle).text

    return CaseAssessment(
        case_id=case.case_id,
        mode=options.mode,
        verdicts=verdicts,
        summary_text=summary_text,
        advisory=advisory,
        disagreement_flags=flags,
    )


def _assess_unified(case: AssessmentCase, client: CompletionClient) -> CaseAssessment:
    bundle = build_unified_prompt(case)
    unified = _complete_step(client, bundle, STEP_UNIFIED)
    verdicts: dict[str, StepVerdict] = {}
    for step in ASPECT_STEPS:
        decisions = {
            f: unified.decisions[f]
            for _, f in VERDICT_LINES[step]
            if f in unified.decisions
        }
        verdicts[step] = StepVerdict(
            step=step,
            decisions=decisions,
            explanation=unified.explanation,
            parse_ok=unified.parse_ok,
            parse_error=unified.parse_error,
        )
    # the single reply doubles as the student-facing summary
    summary_text = unified.explanation if unified.parse_ok else None
    return CaseAssessment(
        case_id=case.case_id,
        mode=MODE_BASELINE,
        verdicts=verdicts,
        summary_text=summary_text,
    )


def run_corpus(
    corpus: Corpus,
    registry: list[Hint],
    client: CompletionClient,
    options: AssessOptions = AssessOptions(),
) -> RunResult:
    """Assess every case; output order always equals corpus order."""
    if len(corpus) == 0:
        raise ConfigurationError("corpus is empty")
    assessments: list[CaseAssessment] = []
    failures: list[CaseFailure] = []
    with ThreadPoolExecutor(max_workers=client.cfg.max_in_flight) as pool:
        futures = [
            (case.case_id, pool.submit(assess_case, case, registry, client, options))
            for case in corpus
        ]
        for case_id, future in futures:
            try:
                assessments.append(future.result())
            except Exception as exc:  # noqa: BLE001 - per-case isolation
                failures.append(CaseFailure(case_id, f"{type(exc).__name__}: {exc}"))
    return RunResult(assessments, failures)


# run-directory serialization ----------------------------------------------


def assessment_to_dict(a: CaseAssessment) -> dict:
    return {
        "case_id": a.case_id,
        "mode": a.mode,
        "verdicts": {
            step: {
                "decisions": v.decisions,
                "explanation": v.explanation,
                "parse_ok": v.parse_ok,
                "parse_error": v.parse_error,
            }
            for step, v in a.verdicts.items()
        },
        "summary_text": a.summary_text,
        "advisory": None
        if a.advisory is None
        else {"matched": a.advisory.matched, "method": a.advisory.method, "detail": a.advisory.detail},
        "disagreement_flags": [
            {"metric": f.metric, "engine_says": f.engine_says, "llm_says": f.llm_says}
            for f in a.disagreement_flags
        ],
    }


def assessment_from_dict(data: dict) -> CaseAssessment:
    verdicts = {
        step: StepVerdict(
            step=step,
            decisions={k: bool(b) for k, b in v["decisions"].items()},
            explanation=v["explanation"],
            parse_ok=bool(v["parse_ok"]),
            parse_error=v.get("parse_error", ""),
        )
        for step, v in data["verdicts"].items()
    }
    advisory = None
    if data.get("advisory") is not None:
        adv = data["advisory"]
        advisory = MatchVerdict(bool(adv["matched"]), adv["method"], adv.get("detail", ""))
    return CaseAssessment(
        case_id=data["case_id"],
        mode=data.get("mode", MODE_ENHANCED),
        verdicts=verdicts,
        summary_text=data.get("summary_text"),
        advisory=advisory,
        disagreement_flags=[
            DisagreementFlag(f["metric"], bool(f["engine_says"]), bool(f["llm_says"]))
            for f in data.get("disagreement_flags", [])
        ],
    )


ASSESSMENTS_FILE = "assessments.jsonl"
FAILURES_FILE = "failures.jsonl"
RUN_CONFIG_FILE = "config.json"


def write_run(run_dir: str | Path, result: RunResult, config: dict) -> Path:
    """Write a self-describing run directory (records + config snapshot)."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    snapshot = dict(config)
    snapshot.setdefault("template_version", TEMPLATE_VERSION)
    (run_dir / RUN_CONFIG_FILE).write_text(json.dumps(snapshot, indent=2, sort_keys=True) + "\n")
    with (run_dir / ASSESSMENTS_FILE).open("w") as fh:
        for a in result.assessments:
            fh.write(json.dumps(assessment_to_dict(a), sort_keys=True) + "\n")
    if result.failures:
        with (run_dir / FAILURES_FILE).open("w") as fh:
            for f in result.failures:
                fh.write(json.dumps({"case_id": f.case_id, "error": f.error}, sort_keys=True) + "\n")
    return run_dir


def read_run(run_dir: str | Path) -> tuple[list[CaseAssessment], dict]:
    run_dir = Path(run_dir)
    records = run_dir / ASSESSMENTS_FILE
    config = run_dir / RUN_CONFIG_FILE
    if not records.is_file() or not config.is_file():
        raise PipelineError(f"run directory {run_dir} is missing run artifacts")
    assessments = [
        assessment_from_dict(json.loads(line))
        for line in records.read_text().splitlines()
        if line.strip()
    ]
    return assessments, json.loads(config.read_text())
