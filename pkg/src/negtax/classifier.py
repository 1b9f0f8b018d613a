"""Four-step cascade assigning a negation label to a contrastive instance.

Step 1 inspects the λ-proof negation buckets of the two queries;
Step 2 matches Aristotelian quantifier patterns across query-document
orderings; Step 3 looks for antonym pairs in the token diff of the two
queries (and the two documents); Step 4 concludes no negation is present.
The cascade short-circuits at the first step that fires.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from . import logic
from .data import Instance
from .lexnet import AntonymIndex, AntonymEvidence, NotAntonyms
from .oracle import LambdaProof, OracleClient, OracleError
from .taxonomy import NegationLabel, tokenize


class ClassifierError(Exception):
    pass


class ProofMissing(ClassifierError):
    pass


class ShapeError(ClassifierError):
    pass


class Step(Enum):
    PREDICATE_S1 = "predicate_s1"
    QUANTIFIER_S2 = "quantifier_s2"
    ANTONYM_S3 = "antonym_s3"
    OTHER_S4 = "other_s4"


@dataclass
class ClassificationTrace:
    instance_id: str
    step_fired: Step
    label: NegationLabel
    evidence: list[str] = field(default_factory=list)
    proofs_used: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "step_fired": self.step_fired.value,
            "label": str(self.label),
            "evidence": self.evidence,
            "proofs_used": self.proofs_used,
        }


# Step-1 bucket precedence mirrors the taxonomy tree's left-to-right leaves.
_BUCKET_ORDER = (
    ("sentential", NegationLabel.SENTENTIAL),
    ("exclusionary", NegationLabel.EXCEPTOR),
    ("affixal", NegationLabel.AFFIXAL),
    ("implicit", NegationLabel.IMPLICIT),
)

_PATTERN_LABELS = {
    logic.PairPattern.FORALL_EXISTS_NOT: NegationLabel.CONTRADICTION,
    logic.PairPattern.FORALL_NOT_EXISTS: NegationLabel.CONTRARY,
    logic.PairPattern.EXISTS_EXISTS_NOT: NegationLabel.SUBCONTRADICTION,
}

_STOPWORDS = frozenset(
    """a an the is are was were be been this that these those of in on at to
    for with and or very s it its their his her they he she i you we do does
    did have has had will would there here what which who where when how""".split()
)


@dataclass
class Proofs:
    q1: LambdaProof
    d1: LambdaProof
    q2: LambdaProof
    d2: LambdaProof

    def get(self, name: str) -> LambdaProof:
        return getattr(self, name)


def _diff_candidates(text_a: str, text_b: str) -> list[tuple[str, str]]:
    """Content-word pairs from the token diff of two near-identical texts."""
    tokens_a = [t for t in tokenize(text_a) if t not in _STOPWORDS]
    tokens_b = [t for t in tokenize(text_b) if t not in _STOPWORDS]
    only_a = [t for t in tokens_a if t not in set(tokens_b)]
    only_b = [t for t in tokens_b if t not in set(tokens_a)]

    def with_bigrams(tokens: list[str], changed: list[str]) -> list[str]:
        out = list(dict.fromkeys(changed))
        changed_set = set(changed)
        for t1, t2 in zip(tokens, tokens[1:]):
            if t1 in changed_set and t2 in changed_set:
                out.append(f"{t1}_{t2}")
        return out

    cand_a = with_bigrams(tokens_a, only_a)
    cand_b = with_bigrams(tokens_b, only_b)
    return [(a, b) for a in cand_a for b in cand_b]


def classify(
    instance: Instance, proofs: Proofs, antonyms: AntonymIndex
) -> tuple[NegationLabel, ClassificationTrace]:
    trace = ClassificationTrace(instance.id, Step.OTHER_S4, NegationLabel.OTHER)

    # Step 1: sentence-level buckets, queries only
    for which in ("q1", "q2"):
        proof = proofs.get(which)
        trace.proofs_used.append(which)
        for disagreement in proof.disagreements:
            trace.evidence.append(f"{which} proof disagreement: {disagreement}")
    matched: list[tuple[NegationLabel, str]] = []
    for bucket, label in _BUCKET_ORDER:
        for which in ("q1", "q2"):
            entries = proofs.get(which).negation_analysis.get(bucket, [])
            for entry in entries:
                matched.append((label, f"{which} {bucket} bucket: {entry}"))
    if matched:
        label = matched[0][0]
        trace.step_fired = Step.PREDICATE_S1
        trace.label = label
        trace.evidence.extend(note for _, note in matched)
        return label, trace

    # Step 2: quantifier pattern matching across both pair orderings
    trace.proofs_used.extend(["d1", "d2"])
    formulas = {name: proofs.get(name).formula for name in ("q1", "d1", "q2", "d2")}
    for name, formula in formulas.items():
        shape = logic.local_shape(formula)
        if shape in (logic.LocalShape.EXISTS_NEG, logic.LocalShape.NEG_EXISTS):
            trace.evidence.append(f"single-formula shape in {name}: {shape.value}")
    for first, second in (("q1", "d2"), ("q2", "d1"), ("d2", "q1"), ("d1", "q2")):
        pattern = logic.match_pair_pattern(formulas[first], formulas[second])
        if pattern is not None:
            label = _PATTERN_LABELS[pattern]
            trace.step_fired = Step.QUANTIFIER_S2
            trace.label = label
            trace.evidence.append(f"pattern {pattern.value} on ({first}, {second})")
            return label, trace

    # Step 3: antonyms in the diffs of (q1, q2) and (d1, d2)
    for pair_name, (a, b) in (("queries", (instance.q1, instance.q2)),
                              ("documents", (instance.d1, instance.d2))):
        for w1, w2 in _diff_candidates(a, b):
            evidence = antonyms.are_antonyms(w1, w2)
            if evidence is AntonymEvidence.NO:
                continue
            label = antonyms.antonym_subtype(w1, w2)
            trace.step_fired = Step.ANTONYM_S3
            trace.label = label
            trace.evidence.append(
                f"antonym pair ({w1}, {w2}) in {pair_name}, evidence {evidence.value}"
            )
            return label, trace

    # Step 4: no negation found
    trace.step_fired = Step.OTHER_S4
    trace.label = NegationLabel.OTHER
    return NegationLabel.OTHER, trace


# --- proof sources -----------------------------------------------------------


class ProofSource:
    def proof(self, text: str) -> LambdaProof:
        raise NotImplementedError


class OracleProofSource(ProofSource):
    def __init__(self, client: OracleClient):
        self.client = client

    def proof(self, text: str) -> LambdaProof:
        try:
            return self.client.lambda_proof(text)
        except OracleError as exc:
            raise ProofMissing(f"no proof for text: {exc}") from exc


class FixtureProofSource(ProofSource):
    """Canned proofs keyed by exact text, loaded from a JSON file or dict."""

    def __init__(self, proofs_by_text: dict[str, dict]):
        self._proofs = {
            text: LambdaProof.from_json(obj) for text, obj in proofs_by_text.items()
        }

    @classmethod
    def from_file(cls, path) -> "FixtureProofSource":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def proof(self, text: str) -> LambdaProof:
        try:
            return self._proofs[text]
        except KeyError:
            raise ProofMissing(f"no canned proof for text: {text[:80]!r}") from None


# --- dataset-level classification and evaluation -----------------------------


@dataclass
class ClassifierReport:
    distribution: dict[NegationLabel, int]
    skipped: int = 0
    confusion: dict | None = None
    balanced_accuracy: float | None = None
    macro_f1: float | None = None
    undefined_classes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "distribution": {
                str(l): n for l, n in sorted(self.distribution.items(), key=lambda kv: kv[0].value)
            },
            "skipped": self.skipped,
        }
        if self.confusion is not None:
            out["confusion"] = {
                str(g): {str(p): n for p, n in row.items()} for g, row in self.confusion.items()
            }
            out["balanced_accuracy"] = self.balanced_accuracy
            out["macro_f1"] = self.macro_f1
            out["undefined_classes"] = self.undefined_classes
        return out

    def to_markdown(self) -> str:
        lines = ["| label | count |", "|---|---|"]
        for label, n in sorted(self.distribution.items(), key=lambda kv: kv[0].value):
            lines.append(f"| {label} | {n} |")
        if self.balanced_accuracy is not None:
            lines.append("")
            lines.append(f"balanced accuracy: {self.balanced_accuracy:.4f}")
            lines.append(f"macro F1: {self.macro_f1:.4f}")
        return "\n".join(lines) + "\n"


def classify_dataset(
    instances: list[Instance], proof_source: ProofSource, antonyms: AntonymIndex
) -> tuple[ClassifierReport, list[ClassificationTrace]]:
    traces: list[ClassificationTrace] = []
    labels: list[NegationLabel] = []
    golds: list[NegationLabel] = []
    skipped = 0
    for inst in instances:
        try:
            proofs = Proofs(
                q1=proof_source.proof(inst.q1),
                d1=proof_source.proof(inst.d1),
                q2=proof_source.proof(inst.q2),
                d2=proof_source.proof(inst.d2),
            )
        except ProofMissing:
            skipped += 1
            continue
        label, trace = classify(inst, proofs, antonyms)
        traces.append(trace)
        labels.append(label)
        if inst.gold is not None:
            golds.append(inst.gold)

    distribution: dict[NegationLabel, int] = {}
    for label in labels:
        distribution[label] = distribution.get(label, 0) + 1
    report = ClassifierReport(distribution=distribution, skipped=skipped)

    if golds and len(golds) == len(labels):
        metrics = evaluate_classifier(labels, golds)
        report.confusion = metrics["confusion"]
        report.balanced_accuracy = metrics["balanced_accuracy"]
        report.macro_f1 = metrics["macro_f1"]
        report.undefined_classes = metrics["undefined_classes"]
    return report, traces


def evaluate_classifier(pred: list[NegationLabel], gold: list[NegationLabel]) -> dict:
    """Balanced accuracy, macro F1 and the confusion matrix.

    Balanced accuracy is the unweighted mean of per-class recall over
    classes present in gold; gold-empty classes are reported as undefined
    and excluded from both means.
    """
    if len(pred) != len(gold):
        raise ShapeError(f"length mismatch: {len(pred)} vs {len(gold)}")
    if not gold:
        raise ShapeError("empty label lists")

    classes = sorted({*gold, *pred}, key=lambda l: l.value)
    confusion: dict[NegationLabel, dict[NegationLabel, int]] = {
        g: {p: 0 for p in classes} for g in classes
    }
    for p, g in zip(pred, gold):
        confusion[g][p] += 1

    recalls = []
    f1s = []
    undefined = []
    for cls in classes:
        support = sum(confusion[cls].values())
        if support == 0:
            undefined.append(str(cls))
            continue
        tp = confusion[cls][cls]
        recall = tp / support
        predicted = sum(confusion[g][cls] for g in classes)
        precision = tp / predicted if predicted else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        recalls.append(recall)
        f1s.append(f1)

    return {
        "balanced_accuracy": sum(recalls) / len(recalls),
        "macro_f1": sum(f1s) / len(f1s),
        "confusion": confusion,
        "undefined_classes": undefined,
    }
