"""Operator entry point.

Subcommands: ingest-validate, assess, evaluate, report, check-answer,
record-cassette. Exit codes are stable: 0 success, 1 negative verdict,
2 usage or parse error, 3 backend error, 4 data error.

Configuration precedence for backend settings: command-line flags beat the
--config file, which beats CIRCUITGRADER_* environment variables, which
beat built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import harness, llmclient, pipeline, prompting
from .eqcheck import (
    EqcheckError,
    IncomparableError,
    ParseError,
    Tolerance,
    answers_match,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BACKEND = 3
EXIT_DATA = 4

_ENV_PREFIX = "CIRCUITGRADER_"
_ARM_LABELS = {
    pipeline.MODE_BASELINE: "w/o enhancement",
    pipeline.MODE_ENHANCED: "w/ enhancement",
}

REPORT_TXT = "report.txt"
REPORT_CSV = "report.csv"
COMPARISON_TXT = "comparison.txt"


def _resolve(flag, config: dict, key: str, default):
    """flags > config file > environment > defaults."""
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    env = os.environ.get(_ENV_PREFIX + key.upper().replace("-", "_"))
    if env is not None:
        return env
    return default


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"cannot read config file {path}: {exc}")


def _backend_config(args, config: dict) -> llmclient.BackendConfig:
    return llmclient.BackendConfig(
        kind=_resolve(args.backend, config, "backend", "live"),
        endpoint=_resolve(args.endpoint, config, "endpoint", "https://api.openai.com/v1/chat/completions"),
        model=_resolve(args.model, config, "model", llmclient.DEFAULT_MODEL),
        temperature=float(_resolve(args.temperature, config, "temperature", 0.0)),
        max_in_flight=int(_resolve(args.max_in_flight, config, "max_in_flight", 4)),
        timeout=float(_resolve(args.timeout, config, "timeout", 60.0)),
        retries=int(_resolve(args.retries, config, "retries", 2)),
        cassette_path=_resolve(args.cassette, config, "cassette", None),
    )


def _registry(args, config: dict) -> list[prompting.Hint]:
    path = _resolve(getattr(args, "registry", None), config, "registry", None)
    if path:
        return prompting.load_hint_registry(path)
    return prompting.default_hint_registry()


def _tolerance(args, config: dict) -> Tolerance:
    return Tolerance(
        rel=float(_resolve(args.rel_tol, config, "rel_tol", 0.01)),
        abs=float(_resolve(args.abs_tol, config, "abs_tol", 0.01)),
    )


def cmd_ingest_validate(args) -> int:
    try:
        loaded = corpus_mod.load_corpus(args.corpus)
    except corpus_mod.CorpusError as exc:
        print(exc, file=sys.stderr)
        return EXIT_DATA
    counts = loaded.topic_counts()
    print(f"{len(loaded)} cases OK")
    for topic in sorted(counts):
        print(f"  {topic}: {counts[topic]}")
    warnings = [
        (case.case_id, v)
        for case in loaded
        for v in corpus_mod.validate_case(case)
        if v.severity == "warning"
    ]
    for case_id, v in warnings:
        print(f"warning: {case_id}: {v.field}: {v.message}")
    return EXIT_OK


def cmd_assess(args) -> int:
    config = _load_config_file(args.config)
    try:
        cfg = _backend_config(args, config)
        options = pipeline.AssessOptions(
            mode=_resolve(args.mode, config, "mode", pipeline.MODE_ENHANCED),
            advisory_enabled=not args.no_advisory,
            tolerance=_tolerance(args, config),
        )
        registry = _registry(args, config)
    except (ValueError, pipeline.ConfigurationError, prompting.PromptError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        loaded = corpus_mod.load_corpus(args.corpus)
    except corpus_mod.CorpusError as exc:
        print(exc, file=sys.stderr)
        return EXIT_DATA
    try:
        client = llmclient.CompletionClient(cfg)
        result = pipeline.run_corpus(loaded, registry, client, options)
    except pipeline.ConfigurationError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except llmclient.BackendError as exc:
        print(exc, file=sys.stderr)
        return EXIT_BACKEND
    pipeline.write_run(
        args.run,
        result,
        {
            "corpus": str(Path(args.corpus).resolve()),
            "mode": options.mode,
            "advisory": options.advisory_enabled,
            "tolerance": {"rel": options.tolerance.rel, "abs": options.tolerance.abs},
            "backend": cfg.kind,
            "model": cfg.model,
        },
    )
    print(f"{len(result.assessments)} assessed, {len(result.failures)} failed -> {args.run}")
    if result.failures:
        for f in result.failures:
            print(f"  failed {f.case_id}: {f.error}", file=sys.stderr)
        return EXIT_BACKEND
    return EXIT_OK


def _evaluate_run(run_dir: Path, corpus_root: str | None):
    assessments, config = pipeline.read_run(run_dir)
    root = corpus_root or config.get("corpus")
    if not root:
        raise pipeline.PipelineError(f"run {run_dir} does not record its corpus; pass --corpus")
    loaded = corpus_mod.load_corpus(root)
    scores = []
    for a in assessments:
        case = loaded.get(a.case_id)
        if case is None:
            raise harness.HarnessError(f"assessed case {a.case_id!r} not in corpus")
        if case.ground_truth is None:
            continue
        scores.append(harness.score_case(a, case.ground_truth))
    report = harness.aggregate(scores, loaded)
    mode = config.get("mode", pipeline.MODE_ENHANCED)
    return report, mode


def cmd_evaluate(args) -> int:
    arms = []
    try:
        for run in args.run:
            run_dir = Path(run)
            report, mode = _evaluate_run(run_dir, args.corpus)
            (run_dir / REPORT_TXT).write_text(harness.render_report(report, "plain"))
            (run_dir / REPORT_CSV).write_text(harness.render_report(report, "csv"))
            arms.append((_ARM_LABELS.get(mode, mode), report))
            print(f"wrote {run_dir / REPORT_TXT} and {run_dir / REPORT_CSV}")
    except (pipeline.PipelineError, corpus_mod.CorpusError, harness.HarnessError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_DATA
    if len(arms) > 1:
        comparison = harness.render_comparison(arms)
        out = Path(args.run[0]) / COMPARISON_TXT
        out.write_text(comparison)
        print(comparison, end="")
        print(f"wrote {out}")
    else:
        print(harness.render_report(arms[0][1], "plain"), end="")
    return EXIT_OK


def cmd_report(args) -> int:
    path = Path(args.run) / REPORT_CSV
    if not path.is_file():
        print(f"no {REPORT_CSV} under {args.run}; run `evaluate` first", file=sys.stderr)
        return EXIT_DATA
    try:
        report = harness.parse_report_csv(path.read_text())
    except harness.HarnessError as exc:
        print(exc, file=sys.stderr)
        return EXIT_DATA
    print(harness.render_report(report, args.format), end="")
    return EXIT_OK


def cmd_check_answer(args) -> int:
    tol = Tolerance(rel=args.rel_tol, abs=args.abs_tol)
    try:
        verdict = answers_match(args.student, args.reference, tol)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IncomparableError as exc:
        print(f"not matched (incomparable: {exc})")
        return EXIT_NEGATIVE
    except EqcheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    state = "matched" if verdict.matched else "not matched"
    print(f"{state} ({verdict.method}): {verdict.detail}")
    return EXIT_OK if verdict.matched else EXIT_NEGATIVE


def cmd_record_cassette(args) -> int:
    config = _load_config_file(args.config)
    try:
        cfg = _backend_config(args, config)
        if cfg.kind != "live":
            cfg = llmclient.BackendConfig(
                kind="live",
                endpoint=cfg.endpoint,
                model=cfg.model,
                temperature=cfg.temperature,
                max_in_flight=cfg.max_in_flight,
                timeout=cfg.timeout,
                retries=cfg.retries,
            )
        options = pipeline.AssessOptions(
            mode=_resolve(args.mode, config, "mode", pipeline.MODE_ENHANCED),
            advisory_enabled=not args.no_advisory,
            tolerance=_tolerance(args, config),
        )
        registry = _registry(args, config)
    except (ValueError, pipeline.ConfigurationError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        loaded = corpus_mod.load_corpus(args.corpus)
    except corpus_mod.CorpusError as exc:
        print(exc, file=sys.stderr)
        return EXIT_DATA
    try:
        client = RecordingClient(cfg)
        result = pipeline.run_corpus(loaded, registry, client, options)
        llmclient.write_cassette(client.entries, cfg.model, args.out)
    except llmclient.BackendError as exc:
        print(exc, file=sys.stderr)
        return EXIT_BACKEND
    for f in result.failures:
        print(f"  failed {f.case_id}: {f.error}", file=sys.stderr)
    print(f"recorded {len(client.entries)} responses -> {args.out}")
    return EXIT_OK if not result.failures else EXIT_BACKEND


class RecordingClient(llmclient.CompletionClient):
    """Live client that tees every response into cassette entries."""

    def __init__(self, cfg: llmclient.BackendConfig, backend=None):
        super().__init__(cfg, backend=backend)
        self.entries: dict[str, dict] = {}

    def complete(self, bundle: prompting.PromptBundle) -> llmclient.RawResponse:
        response = super().complete(bundle)
        self.entries[llmclient.cassette_key(bundle)] = {
            "text": response.text,
            "usage": response.usage,
            "step": bundle.step,
            "case_id": bundle.case_id,
        }
        return response


def _add_backend_flags(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--backend", choices=["live", "replay", "scripted"], default=None)
    ap.add_argument("--endpoint", default=None, help="chat-completions URL")
    ap.add_argument("--model", default=None)
    ap.add_argument("--temperature", type=float, default=None)
    ap.add_argument("--max-in-flight", type=int, default=None)
    ap.add_argument("--timeout", type=float, default=None)
    ap.add_argument("--retries", type=int, default=None)
    ap.add_argument("--cassette", default=None, help="cassette path (replay/record)")
    ap.add_argument("--config", default=None, help="JSON config file")
    ap.add_argument("--registry", default=None, help="hint registry JSON (default: bundled)")
    ap.add_argument("--mode", choices=[pipeline.MODE_ENHANCED, pipeline.MODE_BASELINE], default=None)
    ap.add_argument("--no-advisory", action="store_true", help="skip the deterministic final-answer cross-check")
    ap.add_argument("--rel-tol", type=float, default=None)
    ap.add_argument("--abs-tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="circuitgrader", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-validate", help="load a corpus and report problems")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_ingest_validate)

    p = sub.add_parser("assess", help="run the assessment pipeline over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--run", required=True, help="output run directory")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("evaluate", help="score run(s) against ground truth and write reports")
    p.add_argument("--run", action="append", required=True, help="run directory (repeat to compare arms)")
    p.add_argument("--corpus", default=None, help="corpus root (default: recorded in the run)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="print a previously written report")
    p.add_argument("--run", required=True)
    p.add_argument("--format", choices=["plain", "csv"], default="plain")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser(
        "check-answer",
        help="deterministic answer equivalence check",
        epilog="answers starting with '-' need the equals form: --student='-\\frac{8}{3}'",
    )
    p.add_argument("--student", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--rel-tol", type=float, default=0.01)
    p.add_argument("--abs-tol", type=float, default=0.01)
    p.set_defaults(func=cmd_check_answer)

    p = sub.add_parser("record-cassette", help="run live and record responses for replay")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output cassette path")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_record_cassette)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
