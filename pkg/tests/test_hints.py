from circuitgrader.prompting import (
    ASPECT_STEPS,
    STEP_COMPLETENESS,
    STEP_FINAL_ANSWER,
    STEP_METHOD,
    STEP_SUMMARY,
    STEP_UNITS,
    hints_for_step,
)


def test_registry_size(registry):
    assert len(registry) == 18


def test_hint_counts_per_step(registry):
    counts = {step: len(hints_for_step(registry, step)) for step in ASPECT_STEPS}
    assert counts == {
        STEP_FINAL_ANSWER: 11,
        STEP_COMPLETENESS: 1,
        STEP_METHOD: 2,
        STEP_UNITS: 4,
    }


def test_completeness_hint_text(registry):
    (hint,) = hints_for_step(registry, STEP_COMPLETENESS)
    assert "complete as long as it answers the question" in hint.text


def test_method_hints_text(registry):
    texts = [h.text for h in hints_for_step(registry, STEP_METHOD)]
    assert len(texts) == 2
    assert any("generally correct" in t for t in texts)
    assert any("assume the method used was valid" in t for t in texts)


def test_rounding_hint_text(registry):
    texts = [h.text for h in hints_for_step(registry, STEP_FINAL_ANSWER)]
    assert (
        "Rounding errors in the calculation process should not be treated as calculation errors."
        in texts
    )


def test_unit_conversion_hint_text(registry):
    texts = [h.text for h in hints_for_step(registry, STEP_UNITS)]
    assert any("26.4 cents equals 0.264 dollars" in t for t in texts)


def test_summary_takes_no_hints(registry):
    assert hints_for_step(registry, STEP_SUMMARY) == []


def test_every_hint_belongs_to_exactly_one_step(registry):
    for hint in registry:
        owners = [step for step in ASPECT_STEPS if hint in hints_for_step(registry, step)]
        assert owners == [hint.step]


def test_error_types_cover_known_failure_modes(registry):
    error_types = {h.error_type for h in registry}
    assert {
        "arithmetic",
        "rounding-errors",
        "number-format",
        "term-order-in-equations",
        "false-incompleteness",
        "general",
        "alternative-method",
        "unit-conversion",
    } == error_types
