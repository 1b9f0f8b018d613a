"""Negation taxonomy: labels, scope levels, and cue lexicons.

The taxonomy tree has ten leaf types. ``Other`` is not part of the tree;
it marks instances where no negation was found.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum


class NegationLabel(Enum):
    SENTENTIAL = "sentential"
    EXCEPTOR = "exceptor"
    CONTRADICTION = "contradiction"
    CONTRARY = "contrary"
    SUBCONTRADICTION = "subcontradiction"
    AFFIXAL = "affixal"
    IMPLICIT = "implicit"
    IMMEDIATE_ANTONYM = "immediate_antonym"
    MID_ANTONYM = "mid_antonym"
    POLAR_ANTONYM = "polar_antonym"
    OTHER = "other"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_string(cls, s: str) -> "NegationLabel":
        try:
            return cls(s.strip().lower())
        except ValueError:
            raise UnknownLabel(f"unknown negation label: {s!r}") from None


#: The ten leaves of the taxonomy tree (everything except Other).
TAXONOMY_LEAVES = tuple(l for l in NegationLabel if l is not NegationLabel.OTHER)


class ScopeLevel(Enum):
    SENTENCE = "sentence"
    PAIR = "pair"


class CueKind(Enum):
    WORD = "word"
    PREFIX = "prefix"
    SUFFIX = "suffix"


class TaxonomyError(Exception):
    pass


class UnknownLabel(TaxonomyError):
    pass


class NoCueLexicon(TaxonomyError):
    """Raised for labels without an operator-based cue set."""


class NoScope(TaxonomyError):
    """Raised when asking the scope level of Other."""


class InvalidExclusion(TaxonomyError):
    """Raised when the excluded set is not a subset of the domain."""


@dataclass(frozen=True)
class CueLexicon:
    label: NegationLabel
    cues: frozenset[str]
    cue_kind: CueKind

    def __post_init__(self):
        object.__setattr__(self, "cues", frozenset(c.lower() for c in self.cues))


_SENTENCE_LEVEL = {
    NegationLabel.SENTENTIAL,
    NegationLabel.EXCEPTOR,
    NegationLabel.AFFIXAL,
    NegationLabel.IMPLICIT,
}

_PAIR_LEVEL = {
    NegationLabel.CONTRADICTION,
    NegationLabel.CONTRARY,
    NegationLabel.SUBCONTRADICTION,
    NegationLabel.IMMEDIATE_ANTONYM,
    NegationLabel.MID_ANTONYM,
    NegationLabel.POLAR_ANTONYM,
}

SENTENTIAL_CUES = frozenset({"no", "not", "none", "never", "cannot"})
EXCEPTOR_CUES = frozenset({"others", "other", "besides", "but", "except"})
AFFIXAL_PREFIXES = frozenset(
    {"un-", "in-", "im-", "il-", "ir-", "dis-", "non-", "mis-", "ill-"}
)
AFFIXAL_SUFFIXES = frozenset({"-less", "-free"})
IMPLICIT_CUES = frozenset(
    {"refuse", "deny", "exclude", "reject", "avoid", "lack", "fail", "ignore"}
)

_DEFAULT_LEXICONS: dict[NegationLabel, tuple[CueLexicon, ...]] = {
    NegationLabel.SENTENTIAL: (
        CueLexicon(NegationLabel.SENTENTIAL, SENTENTIAL_CUES, CueKind.WORD),
    ),
    NegationLabel.EXCEPTOR: (
        CueLexicon(NegationLabel.EXCEPTOR, EXCEPTOR_CUES, CueKind.WORD),
    ),
    NegationLabel.AFFIXAL: (
        CueLexicon(NegationLabel.AFFIXAL, AFFIXAL_PREFIXES, CueKind.PREFIX),
        CueLexicon(NegationLabel.AFFIXAL, AFFIXAL_SUFFIXES, CueKind.SUFFIX),
    ),
    NegationLabel.IMPLICIT: (
        CueLexicon(NegationLabel.IMPLICIT, IMPLICIT_CUES, CueKind.WORD),
    ),
}


def scope_level(label: NegationLabel) -> ScopeLevel:
    """Granularity at which a label is detectable: single sentence or pair."""
    if label is NegationLabel.OTHER:
        raise NoScope("Other has no scope level")
    return ScopeLevel.SENTENCE if label in _SENTENCE_LEVEL else ScopeLevel.PAIR


def cue_lexicon(label: NegationLabel) -> tuple[CueLexicon, ...]:
    """Cue sets for operator-based labels.

    Affixal returns two lexicons (prefixes and suffixes); the other
    operator labels return one word lexicon.
    """
    try:
        return _DEFAULT_LEXICONS[label]
    except KeyError:
        raise NoCueLexicon(
            f"{label} has no cue lexicon (pattern- or antonym-based)"
        ) from None


def exceptor_semantics(domain: set, excluded: set) -> set:
    """Exceptor meaning as set subtraction: answers are domain minus excluded.

    The result is always a subset of the domain, which is why a document
    satisfying the exclusionary query also satisfies the unrestricted one.
    """
    domain, excluded = set(domain), set(excluded)
    if not excluded <= domain:
        raise InvalidExclusion(
            f"excluded items not in domain: {sorted(map(repr, excluded - domain))}"
        )
    return domain - excluded


# --- cue matching -----------------------------------------------------------

_TOKEN_RE = re.compile(r"[a-z0-9][a-z0-9'_-]*")


def tokenize(text: str) -> list[str]:
    """Lowercase tokens with punctuation stripped."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class CueMatch:
    label: NegationLabel
    cue: str
    token: str
    position: int


class CueMatcher:
    """Matches a text's tokens against the operator cue lexicons.

    Affixal cues match by prefix/suffix only on tokens at least two
    characters longer than the morpheme, so "in" never matches "in-".
    The exceptor "but" is skipped sentence-initially and after a comma,
    approximating its exceptive (vs contrastive) use; this heuristic is a
    guess and matches are flagged in traces downstream.
    """

    def __init__(self, lexicons: dict[NegationLabel, tuple[CueLexicon, ...]] | None = None):
        self._lexicons = dict(lexicons or _DEFAULT_LEXICONS)

    def match(self, text: str) -> list[CueMatch]:
        lowered = text.lower()
        matches: list[CueMatch] = []
        for pos, m in enumerate(_TOKEN_RE.finditer(lowered)):
            tok = m.group(0)
            for label, lexicons in self._lexicons.items():
                for lex in lexicons:
                    hit = self._match_token(lex, tok)
                    if hit is None:
                        continue
                    if label is NegationLabel.EXCEPTOR and hit == "but":
                        before = lowered[: m.start()].rstrip()
                        if not before or before.endswith(","):
                            continue
                    matches.append(CueMatch(label, hit, tok, pos))
        return matches

    @staticmethod
    def _match_token(lex: CueLexicon, token: str) -> str | None:
        if lex.cue_kind is CueKind.WORD:
            return token if token in lex.cues else None
        for cue in lex.cues:
            stem = cue.strip("-")
            if len(token) < len(stem) + 2:
                continue
            if lex.cue_kind is CueKind.PREFIX and token.startswith(stem):
                return cue
            if lex.cue_kind is CueKind.SUFFIX and token.endswith(stem):
                return cue
        return None


def load_lexicons(path) -> dict[NegationLabel, tuple[CueLexicon, ...]]:
    """Load cue lexicon overrides from a text file.

    One cue per line; sections headed by ``[label]``. Cues ending in ``-``
    are prefixes, cues starting with ``-`` are suffixes, the rest are
    words. Labels present in the file fully replace the defaults.
    """
    overrides: dict[NegationLabel, dict[CueKind, set[str]]] = {}
    current: NegationLabel | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                current = NegationLabel.from_string(line[1:-1])
                overrides.setdefault(current, {})
                continue
            if current is None:
                raise TaxonomyError(f"{path}:{lineno}: cue before any [label] section")
            cue = line.lower()
            if cue.endswith("-"):
                kind = CueKind.PREFIX
            elif cue.startswith("-"):
                kind = CueKind.SUFFIX
            else:
                kind = CueKind.WORD
            overrides[current].setdefault(kind, set()).add(cue)

    result = dict(_DEFAULT_LEXICONS)
    for label, by_kind in overrides.items():
        result[label] = tuple(
            CueLexicon(label, frozenset(cues), kind) for kind, cues in sorted(
                by_kind.items(), key=lambda kv: kv[0].value
            )
        )
    return result
