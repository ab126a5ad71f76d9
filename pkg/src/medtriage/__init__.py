"""medtriage: disease-symptom corpus building, lexical ranking, and triage chat."""

__version__ = "0.1.0"
