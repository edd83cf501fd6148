import pytest

from circuitgrader.corpus import AssessmentCase, Corpus, GroundTruth, ProblemContext, save_corpus
from circuitgrader.prompting import default_hint_registry
from circuitgrader.synthcorpus import materialize


@pytest.fixture(scope="session")
def registry():
    return default_hint_registry()


@pytest.fixture
def demo_case():
    return AssessmentCase(
        case_id="demo-001",
        topic="resistive-circuits",
        context=ProblemContext(
            problem_summary=(
                "Two resistors of 4 ohm and 12 ohm are connected in parallel across a source. "
                "Find the equivalent resistance R_t."
            ),
            general_method="equivalent resistance reduction of parallel branches",
            final_answer_summary="R_t = 3 \\Omega",
            reference_solution=(
                "R_t = \\frac{4 \\cdot 12}{4 + 12}\n"
                "R_t = \\frac{48}{16}\n"
                "R_t = 3 \\Omega"
            ),
        ),
        student_solution=(
            "\\frac{1}{R_t} = \\frac{1}{4} + \\frac{1}{12}\n"
            "R_t = \\frac{48}{16} \\Omega"
        ),
        ground_truth=GroundTruth(
            complete=True,
            method_correct=True,
            final_answer_correct=True,
            has_arithmetic_error=False,
            units_correct=True,
        ),
    )


@pytest.fixture
def mini_corpus_cases(demo_case):
    second = AssessmentCase(
        case_id="demo-002",
        topic="variables-and-elements",
        context=ProblemContext(
            problem_summary="An element absorbs energy at 6 V and 2 A. Find the power p.",
            general_method="power from the voltage-current product",
            final_answer_summary="p = 12 W",
            reference_solution="p = v \\cdot i = 6 \\cdot 2 = 12 W",
        ),
        student_solution="p = 6 \\cdot 2\np = 12000 mW",
        ground_truth=GroundTruth(True, True, True, False, True),
    )
    third = AssessmentCase(
        case_id="demo-003",
        topic="variables-and-elements",
        context=ProblemContext(
            problem_summary="A source delivers 9 V at 3 A. Find the delivered power.",
            general_method="power from the voltage-current product",
            final_answer_summary="p = 27 W",
            reference_solution="p = 9 \\cdot 3 = 27 W",
        ),
        student_solution="p = 9 \\cdot 3 = 29 W",
        ground_truth=GroundTruth(True, True, False, True, True, notes="9*3 miscomputed"),
    )
    return [demo_case, second, third]


@pytest.fixture
def mini_corpus_root(tmp_path, mini_corpus_cases):
    root = tmp_path / "minicorpus"
    save_corpus(Corpus(mini_corpus_cases), root)
    return root


@pytest.fixture(scope="session")
def synth_root(tmp_path_factory):
    """The 87-case synthetic corpus plus both cassettes, built once."""
    root = tmp_path_factory.mktemp("synth")
    return materialize(root)
