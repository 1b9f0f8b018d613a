"""Shared fixture builders: canned λ-proofs and the 40-case cascade suite."""
from dataclasses import dataclass

from negtax.classifier import Step
from negtax.data import Instance
from negtax.oracle import LambdaProof
from negtax.taxonomy import NegationLabel


def make_proof_json(
    final_formula: str,
    sentential=(),
    exclusionary=(),
    affixal=(),
    implicit=(),
    predicates=("Movie",),
    quantifiers=(),
) -> dict:
    """A minimal well-formed λ-proof response body."""
    bucket_words = [*sentential, *exclusionary, *affixal, *implicit]
    return {
        "lexicon": [
            {"symbol": w, "lambda_term": f"λx:e. {w.capitalize()}(x)"}
            for w in bucket_words
        ],
        "predicates": list(predicates),
        "quantifiers": list(quantifiers),
        "negation_analysis": {
            "sentential": list(sentential),
            "exclusionary": list(exclusionary),
            "affixal": list(affixal),
            "implicit": list(implicit),
        },
        "final_formula": final_formula,
    }


def make_proof(*args, **kwargs) -> LambdaProof:
    return LambdaProof.from_json(make_proof_json(*args, **kwargs))


PLAIN = "λx:e. Movie(x)"
FORALL = "∀x. Movie(x) → Feature(x)"
EXISTS = "∃x. Movie(x) ∧ Feature(x)"
EXISTS_NEG = "∃x. Movie(x) ∧ ¬Feature(x)"
NEG_EXISTS = "¬∃x. Movie(x) ∧ Feature(x)"


@dataclass
class CascadeCase:
    instance: Instance
    proofs_by_text: dict[str, dict]
    expected_label: NegationLabel
    expected_step: Step


def _case(idx, label, step, q1, d1, q2, d2, proofs):
    return CascadeCase(
        Instance(id=f"fx-{label.value}-{idx}", q1=q1, d1=d1, q2=q2, d2=d2, gold=label),
        proofs,
        label,
        step,
    )


_OPERATOR_SPECS = {
    # label -> (bucket kwarg, cue word per case)
    NegationLabel.SENTENTIAL: ("sentential", ["not", "no", "none", "never"]),
    NegationLabel.EXCEPTOR: ("exclusionary", ["besides", "except", "others", "but"]),
    NegationLabel.AFFIXAL: ("affixal", ["unhappy", "incomplete", "harmless", "nonstop"]),
    NegationLabel.IMPLICIT: ("implicit", ["refuse", "deny", "avoid", "fail"]),
}

_TOPICS = ["rivers", "bridges", "planets", "museums"]

_QUANT_FORMULAS = {
    NegationLabel.CONTRADICTION: (FORALL, EXISTS_NEG),
    NegationLabel.CONTRARY: (FORALL, NEG_EXISTS),
    NegationLabel.SUBCONTRADICTION: (EXISTS, EXISTS_NEG),
}

_ANTONYM_SPECS = {
    NegationLabel.IMMEDIATE_ANTONYM: [
        ("professional", "casual"),
        ("north", "south"),
        ("male", "female"),
        ("entrance", "exit"),
    ],
    NegationLabel.POLAR_ANTONYM: [
        ("fast", "slow"),
        ("hot", "cold"),
        ("big", "small"),
        ("happy", "sad"),
    ],
    NegationLabel.MID_ANTONYM: [
        ("fast", "moderately paced"),
        ("rapid", "slow"),
        ("fiery", "cold"),
        ("immense", "small"),
    ],
}


def build_cascade_cases() -> list[CascadeCase]:
    cases: list[CascadeCase] = []

    for label, (bucket, cues) in _OPERATOR_SPECS.items():
        for i, (cue, topic) in enumerate(zip(cues, _TOPICS)):
            q1 = f"which {topic} {cue} cross the border"
            d1 = f"a passage about {topic} where {cue} applies"
            q2 = f"which {topic} cross the border"
            d2 = f"a passage about {topic} plainly"
            proofs = {
                q1: make_proof_json(PLAIN, **{bucket: [cue]}),
                d1: make_proof_json(PLAIN, **{bucket: [cue]}),
                q2: make_proof_json(PLAIN),
                d2: make_proof_json(PLAIN),
            }
            cases.append(_case(i, label, Step.PREDICATE_S1, q1, d1, q2, d2, proofs))

    for label, (first, second) in _QUANT_FORMULAS.items():
        for i, topic in enumerate(_TOPICS):
            q1 = f"do all {topic} in the {label.value} set share the feature"
            d1 = f"every one of the {topic} in the {label.value} set shares the feature"
            q2 = f"do some {topic} in the {label.value} set miss the feature"
            d2 = f"some of the {topic} in the {label.value} set miss the feature"
            proofs = {
                q1: make_proof_json(first),
                d1: make_proof_json(first),
                q2: make_proof_json(second),
                d2: make_proof_json(second),
            }
            cases.append(_case(i, label, Step.QUANTIFIER_S2, q1, d1, q2, d2, proofs))

    for label, pairs in _ANTONYM_SPECS.items():
        for i, (w1, w2) in enumerate(pairs):
            q1 = f"find one {w1} item listing"
            d1 = f"this item listing looks {w1} overall"
            q2 = f"find one {w2} item listing"
            d2 = f"this item listing looks {w2} overall"
            proofs = {t: make_proof_json(PLAIN) for t in (q1, d1, q2, d2)}
            cases.append(_case(i, label, Step.ANTONYM_S3, q1, d1, q2, d2, proofs))

    assert len(cases) == 40
    return cases


def build_other_cases() -> list[CascadeCase]:
    """Negation-free instances that must fall through to step 4."""
    cases = []
    for i, (y1, y2) in enumerate([("1994", "1995"), ("red", "blue"), ("jazz", "folk"),
                                  ("york", "leeds")]):
        q1 = f"list events from {y1} archives"
        d1 = f"events from {y1} are archived"
        q2 = f"list events from {y2} archives"
        d2 = f"events from {y2} are archived"
        proofs = {t: make_proof_json(PLAIN) for t in (q1, d1, q2, d2)}
        cases.append(
            _case(i, NegationLabel.OTHER, Step.OTHER_S4, q1, d1, q2, d2, proofs)
        )
    return cases


def merged_proofs(cases) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for case in cases:
        out.update(case.proofs_by_text)
    return out
