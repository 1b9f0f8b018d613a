"""Taxonomy-driven synthetic dataset generation.

Pipeline: topic list from the oracle, grounding of each topic in an
existing Wikipedia page, a per-negation-type generation prompt producing
the contrastive quadruple, an oracle relevance self-check, and JSONL
output. Free mode obtains d2 by answering the positive query; controlled
mode obtains d2 by removing the negation from d1.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from enum import Enum

from .data import EmptyDataset, Instance
from .oracle import OracleClient, OracleError, OracleParams, DEFAULT_GENERATE_TEMPERATURE
from .taxonomy import NegationLabel, TAXONOMY_LEAVES

log = logging.getLogger(__name__)

DEFAULT_WIKIPEDIA_ENDPOINT = "https://en.wikipedia.org/w/api.php"


class DatagenError(Exception):
    pass


class GenerationRejected(DatagenError):
    pass


class GroundingError(DatagenError):
    pass


class Mode(Enum):
    FREE = "free"
    CONTROLLED = "controlled"


@dataclass
class GenerationJob:
    mode: Mode
    types: list[NegationLabel]
    topics_n: int = 100
    per_topic_instances: int = 1
    seed: int = 0

    def __post_init__(self):
        bad = [t for t in self.types if t not in TAXONOMY_LEAVES]
        if bad:
            raise DatagenError(f"not taxonomy leaves: {[str(b) for b in bad]}")
        if self.topics_n < 1:
            raise DatagenError("topics_n must be >= 1")


@dataclass
class DatasetStats:
    size: int
    mean_len_q1: float
    mean_len_q2: float
    mean_len_d1: float
    mean_len_d2: float
    per_type: dict[NegationLabel, int]

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "mean_len_q1": self.mean_len_q1,
            "mean_len_q2": self.mean_len_q2,
            "mean_len_d1": self.mean_len_d1,
            "mean_len_d2": self.mean_len_d2,
            "per_type": {
                str(l): n for l, n in sorted(self.per_type.items(), key=lambda kv: kv[0].value)
            },
        }


def dataset_stats(instances: list[Instance]) -> DatasetStats:
    """Counts and mean whitespace-token lengths."""
    if not instances:
        raise EmptyDataset("cannot compute stats of an empty dataset")
    n = len(instances)
    per_type: dict[NegationLabel, int] = {}
    for inst in instances:
        key = inst.gold or NegationLabel.OTHER
        per_type[key] = per_type.get(key, 0) + 1
    mean = lambda attr: sum(len(getattr(i, attr).split()) for i in instances) / n
    return DatasetStats(
        size=n,
        mean_len_q1=mean("q1"),
        mean_len_q2=mean("q2"),
        mean_len_d1=mean("d1"),
        mean_len_d2=mean("d2"),
        per_type=per_type,
    )


# --- prompts -----------------------------------------------------------------

_QUERY_CONSTRAINTS = (
    "The query must be well-defined and have a finite, verifiable answer even "
    "outside the document. Avoid queries that could have an infinite, unbounded "
    "or exhaustive number of answers. Avoid queries that have the answer 'yes' "
    "or 'no'. The query must be specific, and sound like something someone "
    "would type into a search engine."
)

_STEPS_12 = {
    NegationLabel.SENTENTIAL: (
        "1. Generate a search query that contains exactly one negation word "
        "('no', 'not', or 'none'). It should not be accompanied by a quantifier. "
        + _QUERY_CONSTRAINTS + "\n"
        "2. Extract a short retrieval-style passage that contains exactly one "
        "negation word ('no', 'not', or 'none'). If the passage does not contain "
        "a negation, add exactly one negation word ('no', 'not', or 'none')."
    ),
    NegationLabel.EXCEPTOR: (
        "1. Generate a search query that contains exactly one exclusionary word "
        "such as ('others', 'besides', 'but', or 'except'). " + _QUERY_CONSTRAINTS + "\n"
        "2. Extract a short retrieval-style passage that answers the query. Make "
        "sure the passage does not contain an exclusionary word such as "
        "('others', 'besides', 'but', or 'except'). Make sure the passage also "
        "contains the excluded part from the query."
    ),
    NegationLabel.AFFIXAL: (
        "1. Generate a search query that contains exactly one affixal negation "
        "such as ('un-', 'in-', 'im-', 'il-', 'ir-', 'dis-', 'non-', 'mis-', "
        "'ill-'). An affixal negation adds a prefix or suffix to reverse the "
        "meaning of a word. The query should not contain any other negation. "
        + _QUERY_CONSTRAINTS + "\n"
        "2. Extract a short retrieval-style passage that answers the query. In "
        "answering the query, the passage must contain exactly the same affixal "
        "negation as in the query. If the passage does not contain an affixal "
        "word, add exactly the same one as in the query. The passage should not "
        "contain any other negation."
    ),
    NegationLabel.IMPLICIT: (
        "1. Generate a search query that contains exactly one implicit negation. "
        "An implicit negation is one that does not contain a negation operator. "
        "The word itself has negative semantics. Examples are ('avoid', "
        "'refuse', 'deny', 'ignore'). It does not include affixal negations. "
        "The query should not contain any other negation. " + _QUERY_CONSTRAINTS + "\n"
        "2. Extract a short retrieval-style passage that answers the query. In "
        "answering the query, the passage must contain exactly the same implicit "
        "negation as in the query. If the passage does not contain the implicit "
        "negation, add it yourself. The passage should not contain any other "
        "negation."
    ),
}

_ANTONYM_DEFS = (
    "Given the following definitions of types of antonyms:\n"
    "- Polar antonyms: Words with absolute, direct opposite meaning with no "
    "other words between them.\n"
    "- Mid antonyms: Words differing slightly, not completely opposed.\n"
    "- Immediate antonyms: Words with absolute, direct opposite meanings, with "
    "mid antonyms between them.\n"
)

_ANTONYM_KIND = {
    NegationLabel.IMMEDIATE_ANTONYM: "immediate antonyms",
    NegationLabel.MID_ANTONYM: "mid antonyms",
    NegationLabel.POLAR_ANTONYM: "polar antonyms",
}

QUANTIFIER_LABELS = (
    NegationLabel.CONTRADICTION,
    NegationLabel.CONTRARY,
    NegationLabel.SUBCONTRADICTION,
)


def _step_34(mode: Mode) -> str:
    if mode is Mode.FREE:
        return (
            "3. Generate the positive version of the search query by removing "
            "the negation.\n"
            "4. Generate a positive passage by answering the positive query."
        )
    return (
        "3. Generate the positive version of the search query by removing the "
        "negation.\n"
        "4. Generate the positive version of the passage by removing the "
        "negation. Keep the other words intact."
    )


def generation_prompt(page: str, label: NegationLabel, mode: Mode) -> tuple[str, str]:
    """(prompt, schema_id) for one page and negation type."""
    if label in _STEPS_12:
        body = (
            "You are a system that receives a document. I want you to follow "
            "the next four steps:\n"
            + _STEPS_12[label] + "\n" + _step_34(mode) + "\n"
            "Respond in JSON format with keys q1 (negated query), d1 (negated "
            "passage), q2 (positive query), d2 (positive passage).\n"
            f"Document: the Wikipedia article titled '{page}'."
        )
        return body, "generation"
    if label in _ANTONYM_KIND:
        kind = _ANTONYM_KIND[label]
        step4 = (
            "4. Generate a positive passage by answering the second query."
            if mode is Mode.FREE
            else "4. Generate the positive version of the passage by switching "
                 "word1 with word2."
        )
        body = (
            "You are a system that receives a document. I want you to follow "
            "the next four steps.\n" + _ANTONYM_DEFS +
            f"Pick a pair of {kind} that match this document. Name them word1 "
            "and word2. Avoid antonyms that have a prefix.\n"
            "1. Generate a search query that contains word1. " + _QUERY_CONSTRAINTS + "\n"
            "2. Extract a short retrieval-style passage that answers the query "
            "and must contain word1.\n"
            "3. Generate the second version of the search query by switching "
            "word1 with word2.\n"
            + step4 + "\n"
            "Respond in JSON format with keys q1, d1, q2, d2.\n"
            f"Document: the Wikipedia article titled '{page}'."
        )
        return body, "generation"
    if label in QUANTIFIER_LABELS:
        body = (
            "You are a system that receives a document. Generate one query, "
            "then re-write it in the following styles; make sure all queries "
            "have exactly the same content:\n"
            "1. The first search query must use exactly one universal "
            "quantifier (such as 'all' or 'every').\n"
            "2. The second search query must use exactly one existential "
            "quantifier, followed by a negation inside its scope (some ... "
            "not). Do not use the word 'false'.\n"
            "3. The third search query must use exactly one negation, followed "
            "by an existential quantifier (no ... exist). Do not use the word "
            "'false'.\n"
            "4. The fourth search query must use exactly one existential "
            "quantifier, such as 'some'. All queries must be well-defined and "
            "have a finite, verifiable answer. Do not use any symbols.\n"
            "Extract a short retrieval-style passage that answers the first "
            "query, then re-write it in the same four styles.\n"
            "Respond in JSON format with keys 'queries' (list of 4 strings, in "
            "style order) and 'passages' (list of 4 strings, in style order).\n"
            f"Document: the Wikipedia article titled '{page}'."
        )
        return body, "quantifier_generation"
    raise DatagenError(f"{label} has no generation prompt template")


# --- operations --------------------------------------------------------------


def generate_topics(client: OracleClient, n: int, params: OracleParams | None = None) -> list[str]:
    """Distinct general-knowledge topics; duplicate-heavy oracles get up to
    3 extra rounds, then the shortfall is reported and the deduplicated
    list returned."""
    params = params or OracleParams(temperature=DEFAULT_GENERATE_TEMPERATURE)
    topics: list[str] = []
    seen: set[str] = set()
    for round_no in range(4):
        missing = n - len(topics)
        if missing <= 0:
            break
        prompt = (
            f"Generate {missing} distinct topics of general knowledge. Choose "
            "well-known subjects, avoid long-tail or obscure knowledge. "
            "Respond in JSON format with a key 'topics' holding a list of "
            f"{missing} topic strings."
        )
        if round_no > 0:
            prompt += " Do not repeat any of these topics: " + ", ".join(sorted(seen)) + "."
        obj = client.complete_json(prompt, "topics", params=params)
        for topic in obj["topics"]:
            key = topic.strip().lower()
            if key and key not in seen:
                seen.add(key)
                topics.append(topic.strip())
    if len(topics) < n:
        log.warning("topic generation shortfall: %d of %d after 3 retry rounds", len(topics), n)
    return topics[:n]


@dataclass
class GroundedPage:
    title: str
    exists: bool


def check_page_exists(title: str, endpoint: str = DEFAULT_WIKIPEDIA_ENDPOINT,
                      session=None, retries: int = 3) -> bool:
    import requests

    session = session or requests.Session()
    last_exc = None
    for _ in range(retries):
        try:
            resp = session.get(
                endpoint,
                params={"action": "query", "titles": title, "format": "json"},
                timeout=30,
            )
            if resp.status_code != 200:
                last_exc = GroundingError(f"HTTP {resp.status_code} from wiki endpoint")
                continue
            pages = resp.json()["query"]["pages"]
            return all("missing" not in page for page in pages.values())
        except (requests.RequestException, KeyError, ValueError) as exc:
            last_exc = exc
    raise GroundingError(f"wiki existence check failed for {title!r}: {last_exc}")


def ground_page(client: OracleClient, topic: str,
                endpoint: str = DEFAULT_WIKIPEDIA_ENDPOINT, session=None) -> GroundedPage:
    """Ask the oracle for a page title and verify it exists.

    A nonexistent title triggers one re-ask before the topic is dropped.
    """
    prompt = (
        f"Return the exact title of one existing English Wikipedia page about "
        f"the topic '{topic}'. Respond in JSON format with a key 'page'."
    )
    obj = client.complete_json(prompt, "page")
    title = obj["page"].strip()
    if check_page_exists(title, endpoint, session):
        return GroundedPage(title, True)
    obj = client.complete_json(
        prompt + " The previous title did not exist; give a different title.", "page"
    )
    title = obj["page"].strip()
    return GroundedPage(title, check_page_exists(title, endpoint, session))


# quantifier style indices within the 4-variant generation
_Q_UNIVERSAL, _Q_EXISTS_NEG, _Q_NEG_EXISTS, _Q_EXISTS_PLAIN = range(4)

_QUANT_ASSEMBLY = {
    NegationLabel.CONTRADICTION: (_Q_UNIVERSAL, _Q_EXISTS_NEG),
    NegationLabel.CONTRARY: (_Q_UNIVERSAL, _Q_NEG_EXISTS),
    NegationLabel.SUBCONTRADICTION: (_Q_EXISTS_PLAIN, _Q_EXISTS_NEG),
}


def generate_instance(
    client: OracleClient,
    page: str,
    label: NegationLabel,
    mode: Mode,
    instance_id: str,
    topic: str | None = None,
    params: OracleParams | None = None,
) -> Instance:
    params = params or OracleParams(temperature=DEFAULT_GENERATE_TEMPERATURE)
    prompt, schema_id = generation_prompt(page, label, mode)
    obj = client.complete_json(prompt, schema_id, params=params)
    try:
        if schema_id == "quantifier_generation":
            first, second = _QUANT_ASSEMBLY[label]
            inst = Instance(
                id=instance_id,
                q1=obj["queries"][first],
                d1=obj["passages"][first],
                q2=obj["queries"][second],
                d2=obj["passages"][second],
                gold=label,
                topic=topic,
                source_page=page,
            )
        else:
            inst = Instance(
                id=instance_id,
                q1=obj["q1"],
                d1=obj["d1"],
                q2=obj["q2"],
                d2=obj["d2"],
                gold=label,
                topic=topic,
                source_page=page,
            )
    except Exception as exc:
        raise GenerationRejected(f"invalid generation for {page!r}/{label}: {exc}") from exc
    return inst


def verify_relevance(client: OracleClient, instance: Instance) -> bool:
    """Oracle self-check; keep the instance only if both pairs pass."""
    prompt = (
        "Judge the relevance of two query-document pairs. For each pair, "
        "answer whether the document is relevant to the query.\n"
        f"Pair 1 query: {instance.q1}\nPair 1 document: {instance.d1}\n"
        f"Pair 2 query: {instance.q2}\nPair 2 document: {instance.d2}\n"
        "Respond in JSON format with boolean keys 'pair1_relevant' and "
        "'pair2_relevant'."
    )
    obj = client.complete_json(prompt, "relevance")
    return bool(obj["pair1_relevant"]) and bool(obj["pair2_relevant"])


def run_generation(
    job: GenerationJob,
    client: OracleClient,
    endpoint: str = DEFAULT_WIKIPEDIA_ENDPOINT,
    session=None,
    verify: bool = True,
) -> list[Instance]:
    """Full pipeline for one job; deterministic given a replay transport."""
    rng = random.Random(job.seed)
    topics = generate_topics(client, job.topics_n)
    instances: list[Instance] = []
    counter = 0
    for topic in topics:
        try:
            page = ground_page(client, topic, endpoint, session)
        except GroundingError as exc:
            log.warning("dropping topic %r: %s", topic, exc)
            continue
        if not page.exists:
            log.warning("dropping topic %r: page %r not found", topic, page.title)
            continue
        types = list(job.types)
        rng.shuffle(types)
        for label in types:
            for _ in range(job.per_topic_instances):
                counter += 1
                try:
                    inst = generate_instance(
                        client, page.title, label, job.mode,
                        instance_id=f"{job.mode.value}-{counter:05d}", topic=topic,
                    )
                except (GenerationRejected, OracleError) as exc:
                    log.warning("generation failed for %r/%s: %s", page.title, label, exc)
                    continue
                if verify and not verify_relevance(client, inst):
                    continue
                instances.append(inst)
    return instances
