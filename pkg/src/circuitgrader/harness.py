"""Scores assessments against human ground truth and aggregates the
per-topic, per-metric correct-response tables.

A case counts toward the all-aspects column only when the grader's
decision equals the human label on every one of the five metrics.
Percentages are half-up rounded to two decimals everywhere.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .corpus import TOPICS, Corpus, GroundTruth
from .pipeline import CaseAssessment
from .prompting import (
    METRIC_ARITHMETIC,
    METRIC_COMPLETENESS,
    METRIC_FINAL_ANSWER,
    METRIC_METHOD,
    METRIC_UNIT,
    METRICS,
    STEP_COMPLETENESS,
    STEP_FINAL_ANSWER,
    STEP_METHOD,
    STEP_UNITS,
)

AVERAGE = "Average"
ALL_ASPECTS = "AllAspects"
COLUMNS = METRICS + (AVERAGE, ALL_ASPECTS)

# metric -> (step that decides it, decision field, ground-truth attribute)
_METRIC_SOURCE = {
    METRIC_COMPLETENESS: (STEP_COMPLETENESS, "complete", "complete"),
    METRIC_METHOD: (STEP_METHOD, "method_correct", "method_correct"),
    METRIC_FINAL_ANSWER: (STEP_FINAL_ANSWER, "final_answer_correct", "final_answer_correct"),
    METRIC_ARITHMETIC: (STEP_FINAL_ANSWER, "has_arithmetic_error", "has_arithmetic_error"),
    METRIC_UNIT: (STEP_UNITS, "units_correct", "units_correct"),
}


class HarnessError(Exception):
    pass


class MissingGroundTruthError(HarnessError):
    def __init__(self, case_id: str):
        super().__init__(f"case {case_id!r} has no ground truth")


@dataclass(frozen=True)
class CaseScore:
    case_id: str
    per_metric: dict[str, bool]
    all_correct: bool


@dataclass(frozen=True)
class Cell:
    count: int
    total: int
    percentage: float

    @staticmethod
    def of(count: int, total: int) -> "Cell":
        return Cell(count, total, percent(count, total))


@dataclass
class EvaluationReport:
    rows: list[str]
    cells: dict[tuple[str, str], Cell] = field(default_factory=dict)
    unscored: int = 0


def percent(count: int, total: int) -> float:
    """100·count/total, two decimals, half-up — the printed convention."""
    if total == 0:
        return 0.0
    ratio = (Decimal(count) * 100) / Decimal(total)
    return float(ratio.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def score_case(assessment: CaseAssessment, truth: GroundTruth) -> CaseScore:
    """Per-metric equality of the grader's decision and the human label.

    A step that failed to parse scores its metrics incorrect.
    """
    if truth is None:
        raise MissingGroundTruthError(assessment.case_id)
    per_metric: dict[str, bool] = {}
    for metric, (step, decision_field, truth_attr) in _METRIC_SOURCE.items():
        verdict = assessment.verdicts.get(step)
        if verdict is None or not verdict.parse_ok or decision_field not in verdict.decisions:
            per_metric[metric] = False
            continue
        per_metric[metric] = verdict.decisions[decision_field] == getattr(truth, truth_attr)
    return CaseScore(
        case_id=assessment.case_id,
        per_metric=per_metric,
        all_correct=all(per_metric.values()),
    )


def aggregate(scores: list[CaseScore], corpus: Corpus) -> EvaluationReport:
    """Fold case scores into the per-topic/per-metric count table.

    The Average row sums counts over topics, so it is weighted by case
    counts; the Average column sums a row's five metric counts. Corpus
    cases without a score are tallied as unscored and excluded.
    """
    topic_of: dict[str, str] = {c.case_id: c.topic for c in corpus}
    for s in scores:
        if s.case_id not in topic_of:
            raise HarnessError(f"score for unknown case {s.case_id!r}")
    if not scores:
        return EvaluationReport(rows=[], unscored=len(corpus))

    by_topic: dict[str, list[CaseScore]] = {}
    for s in scores:
        by_topic.setdefault(topic_of[s.case_id], []).append(s)
    canonical = {t: i for i, t in enumerate(TOPICS)}
    topics = sorted(by_topic, key=lambda t: (canonical.get(t, len(canonical)), t))

    report = EvaluationReport(rows=topics + [AVERAGE], unscored=len(corpus) - len(scores))
    totals = {col: [0, 0] for col in COLUMNS}
    for topic in topics:
        group = by_topic[topic]
        n = len(group)
        metric_counts = {m: sum(1 for s in group if s.per_metric[m]) for m in METRICS}
        for m in METRICS:
            report.cells[(topic, m)] = Cell.of(metric_counts[m], n)
            totals[m][0] += metric_counts[m]
            totals[m][1] += n
        avg_count = sum(metric_counts.values())
        report.cells[(topic, AVERAGE)] = Cell.of(avg_count, 5 * n)
        totals[AVERAGE][0] += avg_count
        totals[AVERAGE][1] += 5 * n
        all_count = sum(1 for s in group if s.all_correct)
        report.cells[(topic, ALL_ASPECTS)] = Cell.of(all_count, n)
        totals[ALL_ASPECTS][0] += all_count
        totals[ALL_ASPECTS][1] += n
    for col in COLUMNS:
        report.cells[(AVERAGE, col)] = Cell.of(totals[col][0], totals[col][1])
    return report


_HEADINGS = {
    METRIC_COMPLETENESS: "Completeness",
    METRIC_METHOD: "Method",
    METRIC_FINAL_ANSWER: "Final Answer",
    METRIC_ARITHMETIC: "Arithmetic",
    METRIC_UNIT: "Unit",
    AVERAGE: "Average",
    ALL_ASPECTS: "AllAspects",
}


def render_report(report: EvaluationReport, fmt: str = "plain") -> str:
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "plain":
        return _render_plain(report)
    raise ValueError(f"unknown report format {fmt!r}")


def _render_plain(report: EvaluationReport) -> str:
    headers = ["Topic", "N"] + [_HEADINGS[c] for c in COLUMNS]
    table = [headers]
    for row in report.rows:
        n = report.cells[(row, ALL_ASPECTS)].total
        line = [row, str(n)]
        for col in COLUMNS:
            line.append(f"{report.cells[(row, col)].percentage:.2f}%")
        table.append(line)
    widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in table]
    if report.unscored:
        lines.append(f"Unscored cases: {report.unscored}")
    return "\n".join(lines) + "\n"


def _render_csv(report: EvaluationReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row", "column", "count", "total", "percentage"])
    for row in report.rows:
        for col in COLUMNS:
            cell = report.cells[(row, col)]
            writer.writerow([row, col, cell.count, cell.total, f"{cell.percentage:.2f}"])
    writer.writerow(["unscored", "", report.unscored, "", ""])
    return buf.getvalue()


def parse_report_csv(text: str) -> EvaluationReport:
    """Inverse of the CSV rendering."""
    rows: list[str] = []
    cells: dict[tuple[str, str], Cell] = {}
    unscored = 0
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["row", "column", "count", "total", "percentage"]:
        raise HarnessError("not a report CSV: bad header")
    for record in reader:
        if not record:
            continue
        row, col, count, total, pct = record
        if row == "unscored":
            unscored = int(count)
            continue
        if row not in rows:
            rows.append(row)
        cells[(row, col)] = Cell(int(count), int(total), float(pct))
    return EvaluationReport(rows=rows, cells=cells, unscored=unscored)


def render_comparison(arms: list[tuple[str, EvaluationReport]]) -> str:
    """The two-arm correct-response table (one row per prompting arm)."""
    table = [["Prompt", "Correct response number", "Correct response ratio"]]
    for label, report in arms:
        cell = report.cells[(AVERAGE, ALL_ASPECTS)]
        table.append([label, f"{cell.count} / {cell.total}", f"{cell.percentage:.2f}%"])
    widths = [max(len(r[i]) for r in table) for i in range(3)]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in table]
    return "\n".join(lines) + "\n"
