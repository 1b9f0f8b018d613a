"""Antonym lookup over WordNet 3.x database files.

Reads the Princeton ``data.{noun,verb,adj,adv}`` files directly and
indexes the ``!`` (antonym) and ``&`` (similar-to) pointers. Antonymy is
stored symmetrically. Adjective gradability is approximated by a
nonempty similar-to neighborhood, which drives the immediate / polar /
mid antonym split.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .taxonomy import NegationLabel

_DATA_FILES = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}
_REQUIRED = [f"data.{s}" for s in _DATA_FILES] + [f"index.{s}" for s in _DATA_FILES]

# adjective syntactic markers appended to lemmas, e.g. "fast(a)"
_MARKER_RE = re.compile(r"\((a|p|ip)\)$")


class ResourceError(Exception):
    pass


class NotAntonyms(Exception):
    pass


class AntonymEvidence(Enum):
    DIRECT = "direct"
    VIA_SIMILAR = "via_similar"
    NO = "no"


def normalize_lemma(text: str) -> str:
    """Lowercase, multiword phrases joined with underscores."""
    return "_".join(text.lower().split())


@dataclass
class AntonymIndex:
    # (lemma, pos) -> antonym lemmas; pos in {n, v, a, r}
    entries: dict[tuple[str, str], set[str]] = field(default_factory=dict)
    # adjective lemma -> near-synonym lemmas (one similar-to hop)
    similar_to: dict[str, set[str]] = field(default_factory=dict)

    def antonyms(self, lemma: str, pos: str | None = None) -> set[str]:
        lemma = normalize_lemma(lemma)
        if pos is not None:
            return set(self.entries.get((lemma, pos), ()))
        out: set[str] = set()
        for p in "nvar":
            out |= self.entries.get((lemma, p), set())
        return out

    def are_antonyms(self, w1: str, w2: str) -> AntonymEvidence:
        w1, w2 = normalize_lemma(w1), normalize_lemma(w2)
        if w2 in self.antonyms(w1):
            return AntonymEvidence.DIRECT
        # one hop through adjective near-synonyms, either side
        for a, b in ((w1, w2), (w2, w1)):
            for similar in self.similar_to.get(a, ()):
                if b in self.antonyms(similar, "a"):
                    return AntonymEvidence.VIA_SIMILAR
        return AntonymEvidence.NO

    def antonym_subtype(self, w1: str, w2: str) -> NegationLabel:
        """Split a detected antonym pair into immediate / polar / mid.

        Gradability proxy: both lemmas having similar-to neighbors makes
        the pair polar; a similar-to hop in the evidence makes it mid.
        """
        w1, w2 = normalize_lemma(w1), normalize_lemma(w2)
        evidence = self.are_antonyms(w1, w2)
        if evidence is AntonymEvidence.NO:
            raise NotAntonyms(f"{w1!r} and {w2!r} are not antonyms in the index")
        if evidence is AntonymEvidence.VIA_SIMILAR:
            return NegationLabel.MID_ANTONYM
        if self.similar_to.get(w1) and self.similar_to.get(w2):
            return NegationLabel.POLAR_ANTONYM
        return NegationLabel.IMMEDIATE_ANTONYM


def _clean_lemma(raw: str) -> str:
    return _MARKER_RE.sub("", raw).lower()


def _parse_data_file(path: Path, pos: str, synsets, antonym_links, similar_links):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if line.startswith(" ") or not line.strip():
                continue  # license header
            body = line.split(" | ", 1)[0]
            fields = body.split()
            try:
                offset = fields[0]
                w_cnt = int(fields[3], 16)
                words = [_clean_lemma(fields[4 + 2 * i]) for i in range(w_cnt)]
                p_base = 4 + 2 * w_cnt
                p_cnt = int(fields[p_base])
                pointers = [
                    tuple(fields[p_base + 1 + 4 * i : p_base + 5 + 4 * i])
                    for i in range(p_cnt)
                ]
                if any(len(p) != 4 for p in pointers):
                    raise IndexError("truncated pointer")
            except (IndexError, ValueError) as exc:
                raise ResourceError(f"{path}:{line_no}: malformed synset line ({exc})")
            synsets[(pos, offset)] = words
            for symbol, tgt_offset, tgt_pos_char, st in pointers:
                tgt_pos = "a" if tgt_pos_char == "s" else tgt_pos_char
                if symbol == "!":
                    src_no = int(st[:2], 16)
                    tgt_no = int(st[2:], 16)
                    antonym_links.append(
                        ((pos, offset, src_no), (tgt_pos, tgt_offset, tgt_no))
                    )
                elif symbol == "&" and pos == "a":
                    similar_links.append(((pos, offset), (tgt_pos, tgt_offset)))


def load(wordnet_dir) -> AntonymIndex:
    """Build the antonym index from a WordNet 3.x database directory."""
    root = Path(wordnet_dir)
    missing = [name for name in _REQUIRED if not (root / name).is_file()]
    if missing:
        raise ResourceError(f"{root}: missing WordNet files: {', '.join(missing)}")

    synsets: dict[tuple[str, str], list[str]] = {}
    antonym_links: list = []
    similar_links: list = []
    for suffix, pos in _DATA_FILES.items():
        _parse_data_file(root / f"data.{suffix}", pos, synsets, antonym_links, similar_links)

    index = AntonymIndex()

    def _lemma(pos: str, offset: str, word_no: int) -> list[str]:
        words = synsets.get((pos, offset))
        if words is None:
            return []
        if 1 <= word_no <= len(words):
            return [words[word_no - 1]]
        return words  # 00 means the whole synset

    for (src_pos, src_off, src_no), (tgt_pos, tgt_off, tgt_no) in antonym_links:
        for a in _lemma(src_pos, src_off, src_no):
            for b in _lemma(tgt_pos, tgt_off, tgt_no):
                index.entries.setdefault((a, src_pos), set()).add(b)
                index.entries.setdefault((b, tgt_pos), set()).add(a)

    for (_, src_off), (tgt_pos, tgt_off) in similar_links:
        src_words = synsets.get(("a", src_off), [])
        tgt_words = synsets.get((tgt_pos, tgt_off), [])
        for a in src_words:
            for b in tgt_words:
                if a != b:
                    index.similar_to.setdefault(a, set()).add(b)
                    index.similar_to.setdefault(b, set()).add(a)
    return index
