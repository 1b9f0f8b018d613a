"""Negation taxonomy toolkit for information retrieval.

Parses typed λ-calculus analyses, classifies negation into fine-grained
types via a four-step cascade, generates taxonomy-driven contrastive
datasets through an LLM oracle, and evaluates retrieval scorers with
pairwise accuracy.
"""

from .taxonomy import NegationLabel, ScopeLevel, TAXONOMY_LEAVES

__version__ = "0.1.0"

__all__ = ["NegationLabel", "ScopeLevel", "TAXONOMY_LEAVES", "__version__"]
