"""On-disk corpus of assessment cases.

Layout: a root directory with ``manifest.json`` naming each topic and its
case count, one subdirectory per topic, and one JSON file per case. Case
files carry the exact field names of the types below so fixtures stay
diffable and hand-editable. Solutions are stored verbatim; no
normalization happens at ingest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

TOPICS = (
    "variables-and-elements",
    "resistive-circuits",
    "op-amp",
    "complete-response",
    "sinusoidal-steady-state",
    "frequency-response",
)

MANIFEST_NAME = "manifest.json"


class CorpusError(Exception):
    pass


class MissingManifestError(CorpusError):
    def __init__(self, root: Path):
        super().__init__(f"no {MANIFEST_NAME} under {root}")


@dataclass(frozen=True)
class ProblemContext:
    problem_summary: str
    general_method: str
    final_answer_summary: str
    reference_solution: str


@dataclass(frozen=True)
class GroundTruth:
    complete: bool
    method_correct: bool
    final_answer_correct: bool
    has_arithmetic_error: bool
    units_correct: bool
    notes: str = ""


@dataclass(frozen=True)
class AssessmentCase:
    case_id: str
    topic: str
    context: ProblemContext
    student_solution: str
    ground_truth: GroundTruth | None = None


@dataclass(frozen=True)
class Violation:
    field: str
    message: str
    severity: str = "error"  # "error" | "warning"


@dataclass
class Corpus:
    cases: list[AssessmentCase] = field(default_factory=list)

    def __iter__(self):
        return iter(self.cases)

    def __len__(self):
        return len(self.cases)

    def get(self, case_id: str) -> AssessmentCase | None:
        return next((c for c in self.cases if c.case_id == case_id), None)

    def topic_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.cases:
            counts[c.topic] = counts.get(c.topic, 0) + 1
        return counts


def validate_case(case: AssessmentCase) -> list[Violation]:
    """Check type invariants; violations are data, not exceptions."""
    out: list[Violation] = []
    if not case.case_id.strip():
        out.append(Violation("case_id", "case_id empty"))
    if case.topic not in TOPICS:
        out.append(
            Violation(
                "topic",
                f"topic {case.topic!r} is not one of the six allowed labels: {', '.join(TOPICS)}",
            )
        )
    if not case.context.problem_summary.strip():
        out.append(Violation("context.problem_summary", "problem_summary empty"))
    if not case.context.reference_solution.strip():
        out.append(Violation("context.reference_solution", "reference_solution empty"))
    if not case.context.final_answer_summary.strip():
        out.append(Violation("context.final_answer_summary", "final_answer_summary empty"))
    if not case.context.general_method.strip():
        out.append(Violation("context.general_method", "general_method empty"))
    if not case.student_solution.strip():
        out.append(Violation("student_solution", "student_solution empty"))
    gt = case.ground_truth
    if gt is not None and gt.final_answer_correct and gt.has_arithmetic_error and not gt.notes.strip():
        out.append(
            Violation(
                "ground_truth",
                "final answer marked correct alongside an arithmetic error; "
                "add a note explaining the canceling error",
                severity="warning",
            )
        )
    return out


def case_to_dict(case: AssessmentCase) -> dict:
    data = {
        "case_id": case.case_id,
        "topic": case.topic,
        "context": {
            "problem_summary": case.context.problem_summary,
            "general_method": case.context.general_method,
            "final_answer_summary": case.context.final_answer_summary,
            "reference_solution": case.context.reference_solution,
        },
        "student_solution": case.student_solution,
        "ground_truth": None,
    }
    if case.ground_truth is not None:
        gt = case.ground_truth
        data["ground_truth"] = {
            "complete": gt.complete,
            "method_correct": gt.method_correct,
            "final_answer_correct": gt.final_answer_correct,
            "has_arithmetic_error": gt.has_arithmetic_error,
            "units_correct": gt.units_correct,
            "notes": gt.notes,
        }
    return data


def case_from_dict(data: dict) -> AssessmentCase:
    try:
        ctx = data["context"]
        context = ProblemContext(
            problem_summary=str(ctx["problem_summary"]),
            general_method=str(ctx["general_method"]),
            final_answer_summary=str(ctx["final_answer_summary"]),
            reference_solution=str(ctx["reference_solution"]),
        )
        gt_data = data.get("ground_truth")
        truth = None
        if gt_data is not None:
            truth = GroundTruth(
                complete=bool(gt_data["complete"]),
                method_correct=bool(gt_data["method_correct"]),
                final_answer_correct=bool(gt_data["final_answer_correct"]),
                has_arithmetic_error=bool(gt_data["has_arithmetic_error"]),
                units_correct=bool(gt_data["units_correct"]),
                notes=str(gt_data.get("notes", "")),
            )
        return AssessmentCase(
            case_id=str(data["case_id"]),
            topic=str(data["topic"]),
            context=context,
            student_solution=str(data["student_solution"]),
            ground_truth=truth,
        )
    except KeyError as exc:
        raise CorpusError(f"missing field {exc.args[0]!r}") from None


def load_corpus(root: str | Path) -> Corpus:
    """Load and validate every case under ``root``.

    Aborts with one error listing every offending case when any case is
    malformed or fails validation; warnings do not block loading.
    """
    root = Path(root)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise MissingManifestError(root)
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed manifest {manifest_path}: {exc}") from None
    topics = manifest.get("topics", {})

    problems: list[str] = []
    cases: list[AssessmentCase] = []
    seen: dict[str, str] = {}
    for topic in topics:
        topic_dir = root / topic
        files = sorted(topic_dir.glob("*.json")) if topic_dir.is_dir() else []
        if len(files) != int(topics[topic]):
            problems.append(
                f"{topic}: manifest says {topics[topic]} cases, found {len(files)} files"
            )
        for path in files:
            try:
                case = case_from_dict(json.loads(path.read_text()))
            except (json.JSONDecodeError, CorpusError) as exc:
                problems.append(f"malformed case {path.name}: {exc}")
                continue
            if case.topic != topic:
                problems.append(
                    f"malformed case {path.name}: topic {case.topic!r} does not match directory {topic!r}"
                )
                continue
            if case.case_id in seen:
                problems.append(
                    f"duplicate case id {case.case_id!r} in {path.name} (first seen in {seen[case.case_id]})"
                )
                continue
            seen[case.case_id] = path.name
            errors = [v for v in validate_case(case) if v.severity == "error"]
            if errors:
                detail = "; ".join(f"{v.field}: {v.message}" for v in errors)
                problems.append(f"invalid case {case.case_id}: {detail}")
                continue
            cases.append(case)
    if problems:
        raise CorpusError(
            f"corpus load failed with {len(problems)} problem(s):\n  " + "\n  ".join(problems)
        )
    return Corpus(cases)


def save_corpus(corpus: Corpus, root: str | Path) -> None:
    """Write ``corpus`` in the on-disk layout; inverse of load_corpus."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    counts = corpus.topic_counts()
    (root / MANIFEST_NAME).write_text(
        json.dumps({"version": 1, "topics": counts}, indent=2, sort_keys=True) + "\n"
    )
    for case in corpus:
        topic_dir = root / case.topic
        topic_dir.mkdir(exist_ok=True)
        path = topic_dir / f"{case.case_id}.json"
        path.write_text(json.dumps(case_to_dict(case), indent=2, sort_keys=True) + "\n")
