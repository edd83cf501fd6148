import json

import pytest

from circuitgrader.corpus import (
    AssessmentCase,
    Corpus,
    CorpusError,
    GroundTruth,
    MissingManifestError,
    TOPICS,
    case_from_dict,
    case_to_dict,
    load_corpus,
    save_corpus,
    validate_case,
)
from circuitgrader.synthcorpus import build_synthetic_corpus


def test_well_formed_case_has_no_violations(demo_case):
    assert validate_case(demo_case) == []


def test_empty_student_solution_flagged(demo_case):
    broken = AssessmentCase(
        case_id=demo_case.case_id,
        topic=demo_case.topic,
        context=demo_case.context,
        student_solution="   ",
        ground_truth=demo_case.ground_truth,
    )
    violations = validate_case(broken)
    assert len(violations) == 1
    assert "student_solution empty" in violations[0].message


def test_unknown_topic_names_all_six_labels(demo_case):
    broken = AssessmentCase(
        case_id=demo_case.case_id,
        topic="thermodynamics",
        context=demo_case.context,
        student_solution=demo_case.student_solution,
    )
    violations = validate_case(broken)
    assert len(violations) == 1
    for topic in TOPICS:
        assert topic in violations[0].message


def test_canceling_error_without_note_is_warning(demo_case):
    odd = AssessmentCase(
        case_id="w-1",
        topic=demo_case.topic,
        context=demo_case.context,
        student_solution="x = 1",
        ground_truth=GroundTruth(True, True, True, True, True, notes=""),
    )
    violations = validate_case(odd)
    assert [v.severity for v in violations] == ["warning"]


def test_round_trip(tmp_path, mini_corpus_cases):
    root = tmp_path / "corpus"
    original = Corpus(mini_corpus_cases)
    save_corpus(original, root)
    loaded = load_corpus(root)
    assert loaded.cases == original.cases


def test_empty_manifest_gives_empty_corpus(tmp_path):
    (tmp_path / "manifest.json").write_text(json.dumps({"version": 1, "topics": {}}))
    assert len(load_corpus(tmp_path)) == 0


def test_missing_manifest(tmp_path):
    with pytest.raises(MissingManifestError):
        load_corpus(tmp_path)


def test_malformed_case_file_aborts_load(tmp_path, mini_corpus_cases):
    root = tmp_path / "corpus"
    save_corpus(Corpus(mini_corpus_cases), root)
    bad = root / "variables-and-elements" / "demo-002.json"
    data = json.loads(bad.read_text())
    del data["student_solution"]
    bad.write_text(json.dumps(data))
    with pytest.raises(CorpusError) as err:
        load_corpus(root)
    assert "demo-002" in str(err.value)


def test_unknown_topic_label_in_file_aborts_load(tmp_path, mini_corpus_cases):
    root = tmp_path / "corpus"
    save_corpus(Corpus(mini_corpus_cases), root)
    bad = root / "resistive-circuits" / "demo-001.json"
    data = json.loads(bad.read_text())
    data["topic"] = "resistive-circuit"  # not one of the six
    bad.write_text(json.dumps(data))
    with pytest.raises(CorpusError) as err:
        load_corpus(root)
    assert "resistive-circuit" in str(err.value)


def test_duplicate_id_aborts_load(tmp_path, mini_corpus_cases):
    root = tmp_path / "corpus"
    save_corpus(Corpus(mini_corpus_cases), root)
    src = root / "variables-and-elements" / "demo-002.json"
    dup = json.loads(src.read_text())
    (root / "variables-and-elements" / "demo-xtra.json").write_text(json.dumps(dup))
    manifest = json.loads((root / "manifest.json").read_text())
    manifest["topics"]["variables-and-elements"] += 1
    (root / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(CorpusError) as err:
        load_corpus(root)
    assert "duplicate" in str(err.value)


def test_manifest_count_mismatch_aborts_load(tmp_path, mini_corpus_cases):
    root = tmp_path / "corpus"
    save_corpus(Corpus(mini_corpus_cases), root)
    manifest = json.loads((root / "manifest.json").read_text())
    manifest["topics"]["variables-and-elements"] = 99
    (root / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(CorpusError):
        load_corpus(root)


def test_case_dict_round_trip(demo_case):
    assert case_from_dict(case_to_dict(demo_case)) == demo_case


def test_ground_truth_optional(demo_case):
    data = case_to_dict(demo_case)
    data["ground_truth"] = None
    loaded = case_from_dict(data)
    assert loaded.ground_truth is None
    assert validate_case(loaded) == []


def test_fixture_corpus_counts(synth_root):
    corpus = load_corpus(synth_root / "corpus")
    counts = corpus.topic_counts()
    assert len(corpus) == 87
    assert counts["variables-and-elements"] == 39
    assert counts["resistive-circuits"] == 48


def test_loader_counts_equal_files_per_topic_dir(synth_root):
    corpus = load_corpus(synth_root / "corpus")
    for topic, count in corpus.topic_counts().items():
        files = list((synth_root / "corpus" / topic).glob("*.json"))
        assert len(files) == count


def test_synthetic_corpus_is_deterministic():
    assert build_synthetic_corpus().cases == build_synthetic_corpus().cases
