"""Batch assessment of circuit-analysis homework with an LLM grader and a
deterministic answer-equivalence engine."""

__version__ = "0.1.0"
