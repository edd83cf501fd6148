import json

import pytest

from circuitgrader.corpus import Corpus, load_corpus
from circuitgrader.llmclient import BackendConfig, CompletionClient, ScriptedBackend, TransportError
from circuitgrader.pipeline import (
    AssessOptions,
    ConfigurationError,
    MODE_BASELINE,
    MODE_ENHANCED,
    RETRY_ADDENDUM,
    assess_case,
    assessment_from_dict,
    assessment_to_dict,
    parse_verdict,
    read_run,
    run_corpus,
    write_run,
)
from circuitgrader.llmclient import RawResponse
from circuitgrader.prompting import (
    STEP_COMPLETENESS,
    STEP_FINAL_ANSWER,
    STEP_METHOD,
    STEP_UNITS,
)
from circuitgrader.synthcorpus import CASSETTE_ENHANCED, ENHANCED_WRONG, planted_mistakes

ALL_GOOD_FINAL = (
    "analysis...\n```verdict\nFINAL_ANSWER: yes\nARITHMETIC_ERROR: no\n"
    "EXPLANATION: matches reference\n```\n"
)
GOOD_STEP = {
    STEP_FINAL_ANSWER: ALL_GOOD_FINAL,
    STEP_COMPLETENESS: "```verdict\nCOMPLETE: yes\nEXPLANATION: all parts\n```",
    STEP_METHOD: "```verdict\nMETHOD: yes\nEXPLANATION: fine\n```",
    STEP_UNITS: "```verdict\nUNITS: yes\nEXPLANATION: ohms present\n```",
}
SUMMARY_TEXT = "Nice work overall."


def scripted(responses, max_in_flight=4):
    cfg = BackendConfig(kind="scripted", max_in_flight=max_in_flight)
    backend = ScriptedBackend(responses)
    return CompletionClient(cfg, backend=backend), backend


def responder(case_overrides=None):
    """Reply per step, regardless of call order."""
    overrides = case_overrides or {}

    def reply(bundle):
        if bundle.step == "summary":
            return SUMMARY_TEXT
        return overrides.get(bundle.step, GOOD_STEP.get(bundle.step, ALL_GOOD_FINAL))

    return reply


# parse_verdict ---------------------------------------------------------------


def test_parse_final_answer_verdict():
    raw = RawResponse(text="FINAL_ANSWER: yes\nARITHMETIC_ERROR: no\nEXPLANATION: matches reference")
    v = parse_verdict(raw, STEP_FINAL_ANSWER)
    assert v.parse_ok
    assert v.decisions == {"final_answer_correct": True, "has_arithmetic_error": False}
    assert v.explanation == "matches reference"


def test_parse_completeness_verdict():
    v = parse_verdict(RawResponse(text="COMPLETE: yes\nEXPLANATION: ok"), STEP_COMPLETENESS)
    assert v.parse_ok and v.decisions == {"complete": True}


def test_parse_missing_block():
    v = parse_verdict(RawResponse(text="free prose with no block"), STEP_UNITS)
    assert not v.parse_ok
    assert "missing verdict line" in v.parse_error


def test_parse_negative_needs_explanation():
    v = parse_verdict(RawResponse(text="COMPLETE: no\nEXPLANATION:"), STEP_COMPLETENESS)
    assert not v.parse_ok
    assert "explanation" in v.parse_error


def test_parse_uses_last_fenced_block():
    text = (
        "```verdict\nMETHOD: no\nEXPLANATION: draft\n```\n"
        "revised:\n```verdict\nMETHOD: yes\nEXPLANATION: final\n```"
    )
    v = parse_verdict(RawResponse(text=text), STEP_METHOD)
    assert v.parse_ok and v.decisions == {"method_correct": True}
    assert v.explanation == "final"


# assess_case ------------------------------------------------------------------


def test_assess_case_all_correct(demo_case, registry):
    client, backend = scripted([responder()] * 5)
    assessment = assess_case(demo_case, registry, client)
    assert assessment.all_parsed()
    assert assessment.summary_text == SUMMARY_TEXT
    decisions = {k: v for verdict in assessment.verdicts.values() for k, v in verdict.decisions.items()}
    assert decisions == {
        "final_answer_correct": True,
        "has_arithmetic_error": False,
        "complete": True,
        "method_correct": True,
        "units_correct": True,
    }
    steps = [b.step for b in backend.calls]
    assert steps == [STEP_FINAL_ANSWER, STEP_COMPLETENESS, STEP_METHOD, STEP_UNITS, "summary"]


def test_advisory_and_agreeing_llm_no_flags(demo_case, registry):
    client, _ = scripted([responder()] * 5)
    assessment = assess_case(demo_case, registry, client)
    assert assessment.advisory is not None
    assert assessment.advisory.matched  # 48/16 ohm vs 3 ohm
    assert assessment.disagreement_flags == []


def test_advisory_disagreement_flag(demo_case, registry):
    wrong_final = (
        "```verdict\nFINAL_ANSWER: no\nARITHMETIC_ERROR: no\n"
        "EXPLANATION: looks off to me\n```"
    )
    client, _ = scripted([responder({STEP_FINAL_ANSWER: wrong_final})] * 5)
    assessment = assess_case(demo_case, registry, client)
    assert len(assessment.disagreement_flags) == 1
    flag = assessment.disagreement_flags[0]
    assert flag.metric == "final-answer"
    assert flag.engine_says is True and flag.llm_says is False


def test_flags_only_on_actual_mismatch(demo_case, registry):
    client, _ = scripted([responder()] * 5)
    assessment = assess_case(demo_case, registry, client)
    for flag in assessment.disagreement_flags:
        assert flag.engine_says != flag.llm_says


def test_advisory_disabled(demo_case, registry):
    client, backend = scripted([responder()] * 5)
    assessment = assess_case(demo_case, registry, client, AssessOptions(advisory_enabled=False))
    assert assessment.advisory is None
    final_bundle = backend.calls[0]
    assert "Deterministic checker finding" not in final_bundle.user_text


def test_step_prompts_never_contain_other_steps_verdicts(demo_case, registry):
    client, backend = scripted([responder()] * 5)
    assess_case(demo_case, registry, client)
    for b in backend.calls[:4]:
        assert "matches reference" not in b.user_text
        assert SUMMARY_TEXT not in b.user_text
    assert "matches reference" in backend.calls[4].user_text  # summary sees verdicts


def test_parse_failure_retries_once_with_addendum(demo_case, registry):
    client, backend = scripted(["garbled", responder()] + [responder()] * 4)
    assessment = assess_case(demo_case, registry, client)
    assert assessment.all_parsed()
    assert backend.calls[1].user_text.endswith(RETRY_ADDENDUM)
    assert backend.calls[1].step == backend.calls[0].step == STEP_FINAL_ANSWER


def test_double_parse_failure_fails_closed_and_suppresses_summary(demo_case, registry):
    client, backend = scripted(["garbled", "still garbled"] + [responder()] * 3)
    assessment = assess_case(demo_case, registry, client)
    assert not assessment.verdicts[STEP_FINAL_ANSWER].parse_ok
    assert assessment.summary_text is None
    assert len(backend.calls) == 5  # 2 final-answer attempts + 3 other steps, no summary


def test_unified_mode_single_call(demo_case, registry):
    unified_reply = (
        "```verdict\nCOMPLETE: yes\nMETHOD: yes\nFINAL_ANSWER: yes\n"
        "ARITHMETIC_ERROR: no\nUNITS: yes\nEXPLANATION: all good\n```"
    )
    client, backend = scripted([unified_reply])
    assessment = assess_case(demo_case, registry, client, AssessOptions(mode=MODE_BASELINE))
    assert len(backend.calls) == 1
    assert backend.calls[0].step == "unified"
    assert assessment.all_parsed()
    assert assessment.mode == MODE_BASELINE
    assert assessment.summary_text == "all good"
    assert assessment.verdicts[STEP_UNITS].decisions == {"units_correct": True}


# run_corpus -------------------------------------------------------------------


def test_run_corpus_preserves_order(mini_corpus_cases, registry):
    client, _ = scripted([responder()] * (5 * len(mini_corpus_cases)))
    result = run_corpus(Corpus(mini_corpus_cases), registry, client)
    assert [a.case_id for a in result.assessments] == [c.case_id for c in mini_corpus_cases]
    assert result.failures == []


def test_run_corpus_empty_is_configuration_error(registry):
    client, _ = scripted([])
    with pytest.raises(ConfigurationError):
        run_corpus(Corpus([]), registry, client)


def test_run_corpus_isolates_backend_failures(mini_corpus_cases, registry):
    # first case's first call explodes; the other two cases succeed
    client, _ = scripted(
        [TransportError("socket reset")] + [responder()] * (5 * 2),
        max_in_flight=1,
    )
    result = run_corpus(Corpus(mini_corpus_cases), registry, client)
    assert len(result.assessments) == 2
    assert len(result.failures) == 1
    assert result.failures[0].case_id == mini_corpus_cases[0].case_id
    assert "TransportError" in result.failures[0].error


def test_assessment_serialization_round_trip(demo_case, registry):
    client, _ = scripted([responder()] * 5)
    assessment = assess_case(demo_case, registry, client)
    data = json.loads(json.dumps(assessment_to_dict(assessment)))
    assert assessment_from_dict(data) == assessment


def test_write_read_run(tmp_path, demo_case, registry):
    client, _ = scripted([responder()] * 5)
    result = run_corpus(Corpus([demo_case]), registry, client)
    run_dir = write_run(tmp_path / "run", result, {"mode": MODE_ENHANCED})
    assessments, config = read_run(run_dir)
    assert assessments == result.assessments
    assert config["mode"] == MODE_ENHANCED
    assert config["template_version"]


def test_replay_idempotence(synth_root, registry):
    corpus = load_corpus(synth_root / "corpus")
    cfg = BackendConfig(kind="replay", cassette_path=str(synth_root / CASSETTE_ENHANCED))
    first = run_corpus(corpus, registry, CompletionClient(cfg))
    second = run_corpus(corpus, registry, CompletionClient(cfg))
    assert first.assessments == second.assessments
    assert not first.failures


def test_table_style_unit_conversion_case_assessed_correct(registry, synth_root):
    """A cents-vs-dollars case replayed through the enhanced arm ends with a
    correct final-answer verdict and an advisory that agrees."""
    corpus = load_corpus(synth_root / "corpus")
    target = next(
        c for c in corpus
        if "cents per kWh" in c.context.problem_summary and "\\$" in c.student_solution
    )
    mistakes = planted_mistakes(corpus, ENHANCED_WRONG)
    assert target.case_id not in mistakes, "pick an unflipped case for this check"
    cfg = BackendConfig(kind="replay", cassette_path=str(synth_root / CASSETTE_ENHANCED))
    assessment = assess_case(target, registry, CompletionClient(cfg))
    assert assessment.verdicts[STEP_FINAL_ANSWER].decisions["final_answer_correct"]
    assert assessment.advisory is not None and assessment.advisory.matched
    assert assessment.disagreement_flags == []
