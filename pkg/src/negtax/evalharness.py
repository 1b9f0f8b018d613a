"""Pairwise-accuracy evaluation with pluggable scorers.

An instance counts as correct only when the scorer places d1 above d2
for q1 and d2 above d1 for q2; ties are incorrect (random chance is 25%).
Scorers are either the native BM25 index or external bridges speaking a
line-delimited JSON protocol over stdin/stdout (or HTTP POST /score).
"""
from __future__ import annotations

import json
import math
import shlex
import string
import subprocess
from collections import Counter
from dataclasses import dataclass, field

from .data import Instance
from .taxonomy import NegationLabel

PROTOCOL_VERSION = 1


class EvalError(Exception):
    pass


class NotIndexed(EvalError):
    pass


class MissingQrels(EvalError):
    pass


class BridgeProtocolError(EvalError):
    pass


# --- BM25 -------------------------------------------------------------------


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if self.k1 <= 0:
            raise EvalError(f"k1 must be positive, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise EvalError(f"b must be in [0,1], got {self.b}")


_PUNCT_TABLE = str.maketrans({c: " " for c in string.punctuation})


def bm25_tokenize(text: str) -> list[str]:
    return text.lower().translate(_PUNCT_TABLE).split()


class Bm25Index:
    """Okapi BM25 over a fixed document pool.

    IDF uses the +1 smoothing ``ln((N - df + 0.5)/(df + 0.5) + 1)`` so
    scores stay nonnegative even for terms present in every document.
    """

    def __init__(self, docs: dict[str, str], params: Bm25Params = Bm25Params()):
        if not docs:
            raise EvalError("empty document pool")
        self.params = params
        self._tf = {did: Counter(bm25_tokenize(text)) for did, text in docs.items()}
        self._len = {did: sum(tf.values()) for did, tf in self._tf.items()}
        self._n = len(docs)
        self._avgdl = sum(self._len.values()) / self._n
        df: Counter = Counter()
        for tf in self._tf.values():
            df.update(tf.keys())
        self._idf = {
            t: math.log((self._n - n + 0.5) / (n + 0.5) + 1.0) for t, n in df.items()
        }

    def score(self, query: str, doc_id: str) -> float:
        if doc_id not in self._tf:
            raise NotIndexed(f"unknown doc_id: {doc_id}")
        tf = self._tf[doc_id]
        k1, b = self.params.k1, self.params.b
        norm = k1 * (1.0 - b + b * self._len[doc_id] / self._avgdl)
        score = 0.0
        for term in bm25_tokenize(query):
            f = tf.get(term, 0)
            if f == 0:
                continue
            score += self._idf[term] * f * (k1 + 1.0) / (f + norm)
        return score


# --- scorers ----------------------------------------------------------------


@dataclass(frozen=True)
class ScorePair:
    query_id: str
    doc_id: str
    query: str
    doc: str


class Scorer:
    """Scores batches of (query, document) pairs."""

    name = "scorer"

    def score_batch(self, pairs: list[ScorePair]) -> list[float]:
        raise NotImplementedError

    def close(self) -> None:
        pass


class FunctionScorer(Scorer):
    def __init__(self, fn, name="function"):
        self._fn = fn
        self.name = name

    def score_batch(self, pairs):
        return [float(self._fn(p.query, p.doc)) for p in pairs]


class Bm25Scorer(Scorer):
    name = "bm25"

    def __init__(self, index: Bm25Index):
        self.index = index

    @classmethod
    def over_dataset(cls, instances: list[Instance], params: Bm25Params = Bm25Params()):
        """Index every d1/d2 in the dataset as the document pool."""
        docs = {}
        for inst in instances:
            docs[f"{inst.id}:d1"] = inst.d1
            docs[f"{inst.id}:d2"] = inst.d2
        return cls(Bm25Index(docs, params))

    def score_batch(self, pairs):
        return [self.index.score(p.query, p.doc_id) for p in pairs]


# --- external scorer bridges -------------------------------------------------


def _validate_scores(request_batch, reply, context: str) -> list[float]:
    if not isinstance(reply, dict) or reply.get("op") != "scores":
        raise BridgeProtocolError(f"{context}: expected scores op, got {reply!r}")
    rows = reply.get("batch")
    if not isinstance(rows, list) or len(rows) != len(request_batch):
        raise BridgeProtocolError(
            f"{context}: expected {len(request_batch)} scores, got "
            f"{len(rows) if isinstance(rows, list) else type(rows).__name__}"
        )
    by_id: dict[tuple[str, str], float] = {}
    for row in rows:
        try:
            key = (row["qid"], row["did"])
            score = row["score"]
        except (TypeError, KeyError) as exc:
            raise BridgeProtocolError(f"{context}: malformed score row {row!r}") from exc
        if not isinstance(score, (int, float)) or isinstance(score, bool) or not math.isfinite(score):
            raise BridgeProtocolError(f"{context}: non-finite score for {key}: {score!r}")
        by_id[key] = float(score)
    out = []
    for p in request_batch:
        key = (p.query_id, p.doc_id)
        if key not in by_id:
            raise BridgeProtocolError(f"{context}: missing score for {key}")
        out.append(by_id[key])
    return out


class SubprocessBridge(Scorer):
    """Line-delimited JSON scorer over a child process's stdin/stdout."""

    def __init__(self, command: str | list[str], batch_size: int = 64, timeout_s: float = 120.0):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.batch_size = batch_size
        self.timeout_s = timeout_s
        self._proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        reply = self._roundtrip({"op": "hello", "protocol": PROTOCOL_VERSION})
        if reply.get("op") != "hello" or reply.get("protocol") != PROTOCOL_VERSION:
            raise BridgeProtocolError(f"handshake failed: {reply!r}")
        self.name = str(reply.get("name", "bridge"))

    def _roundtrip(self, msg: dict) -> dict:
        assert self._proc.stdin and self._proc.stdout
        try:
            self._proc.stdin.write(json.dumps(msg) + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise BridgeProtocolError(f"bridge process died: {exc}") from exc
        if not line:
            raise BridgeProtocolError("bridge closed its stdout")
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise BridgeProtocolError(f"invalid JSON from bridge: {line!r}") from exc

    def score_batch(self, pairs):
        scores: list[float] = []
        for start in range(0, len(pairs), self.batch_size):
            chunk = pairs[start : start + self.batch_size]
            reply = self._roundtrip(
                {
                    "op": "score",
                    "batch": [
                        {"qid": p.query_id, "did": p.doc_id, "query": p.query, "doc": p.doc}
                        for p in chunk
                    ],
                }
            )
            scores.extend(_validate_scores(chunk, reply, "bridge"))
        return scores

    def close(self):
        if self._proc.poll() is None:
            try:
                assert self._proc.stdin
                self._proc.stdin.write(json.dumps({"op": "bye"}) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError):
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()


class HttpBridge(Scorer):
    """Same protocol bodies as the subprocess bridge, POSTed to /score."""

    def __init__(self, base_url: str, batch_size: int = 64, timeout_s: float = 120.0, session=None):
        import requests

        self.base_url = base_url.rstrip("/")
        self.batch_size = batch_size
        self.timeout_s = timeout_s
        self._session = session or requests.Session()
        reply = self._post({"op": "hello", "protocol": PROTOCOL_VERSION})
        if reply.get("op") != "hello" or reply.get("protocol") != PROTOCOL_VERSION:
            raise BridgeProtocolError(f"handshake failed: {reply!r}")
        self.name = str(reply.get("name", "http-bridge"))

    def _post(self, body: dict) -> dict:
        resp = self._session.post(
            self.base_url + "/score", json=body, timeout=self.timeout_s
        )
        if resp.status_code != 200:
            raise BridgeProtocolError(f"HTTP {resp.status_code} from bridge")
        return resp.json()

    def score_batch(self, pairs):
        scores: list[float] = []
        for start in range(0, len(pairs), self.batch_size):
            chunk = pairs[start : start + self.batch_size]
            reply = self._post(
                {
                    "op": "score",
                    "batch": [
                        {"qid": p.query_id, "did": p.doc_id, "query": p.query, "doc": p.doc}
                        for p in chunk
                    ],
                }
            )
            scores.extend(_validate_scores(chunk, reply, "http bridge"))
        return scores

    def close(self):
        try:
            self._post({"op": "bye"})
        except (BridgeProtocolError, Exception):
            pass


def external_scorer(spec: str, batch_size: int = 64, timeout_s: float = 120.0) -> Scorer:
    """Build a bridge scorer from ``cmd:<argv>`` or ``http:<url>``."""
    if spec.startswith("cmd:"):
        return SubprocessBridge(spec[4:], batch_size, timeout_s)
    if spec.startswith("http:"):
        url = spec[5:] if spec[5:].startswith(("http://", "https://")) else spec
        return HttpBridge(url, batch_size, timeout_s)
    raise EvalError(f"unknown scorer spec: {spec!r} (expected cmd:<argv> or http:<url>)")


# --- pairwise accuracy -------------------------------------------------------


@dataclass
class InstanceResult:
    id: str
    correct: bool
    scores: tuple[float, float, float, float]  # (q1d1, q1d2, q2d1, q2d2)
    tied: bool = False
    gold: NegationLabel | None = None


@dataclass
class EvalReport:
    scorer: str
    overall_pairwise_acc: float
    per_type: dict[NegationLabel, dict]
    ties: int
    errors: int
    per_instance: list[InstanceResult] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "scorer": self.scorer,
            "overall_pairwise_acc": self.overall_pairwise_acc,
            "per_type": {
                str(label): stats for label, stats in sorted(
                    self.per_type.items(), key=lambda kv: kv[0].value
                )
            },
            "ties": self.ties,
            "errors": self.errors,
            "per_instance": [
                {
                    "id": r.id,
                    "correct": r.correct,
                    "tied": r.tied,
                    "scores": list(r.scores),
                    "type": str(r.gold) if r.gold else None,
                }
                for r in self.per_instance
            ],
        }

    def to_markdown(self) -> str:
        """One row per scorer; first column full dataset, then one per type."""
        labels = [l for l in NegationLabel if l in self.per_type]
        header = ["scorer", "full"] + [str(l) for l in labels]
        row = [self.scorer, f"{self.overall_pairwise_acc:.3f}"] + [
            f"{self.per_type[l]['pairwise_acc']:.3f}" for l in labels
        ]
        lines = [
            "| " + " | ".join(header) + " |",
            "|" + "|".join("---" for _ in header) + "|",
            "| " + " | ".join(row) + " |",
        ]
        return "\n".join(lines) + "\n"


def pairwise_accuracy(instances: list[Instance], scorer: Scorer) -> EvalReport:
    """Evaluate a scorer on a contrastive dataset, instance order preserved."""
    results: list[InstanceResult] = []
    errors = 0
    for inst in instances:
        pairs = [
            ScorePair(f"{inst.id}:q1", f"{inst.id}:d1", inst.q1, inst.d1),
            ScorePair(f"{inst.id}:q1", f"{inst.id}:d2", inst.q1, inst.d2),
            ScorePair(f"{inst.id}:q2", f"{inst.id}:d1", inst.q2, inst.d1),
            ScorePair(f"{inst.id}:q2", f"{inst.id}:d2", inst.q2, inst.d2),
        ]
        try:
            q1d1, q1d2, q2d1, q2d2 = scorer.score_batch(pairs)
        except BridgeProtocolError:
            raise
        except Exception:
            errors += 1
            continue
        tied = q1d1 == q1d2 or q2d1 == q2d2
        correct = q1d1 > q1d2 and q2d2 > q2d1
        results.append(
            InstanceResult(inst.id, correct, (q1d1, q1d2, q2d1, q2d2), tied, inst.gold)
        )

    per_type: dict[NegationLabel, dict] = {}
    for label in {r.gold for r in results if r.gold is not None}:
        subset = [r for r in results if r.gold is label]
        per_type[label] = {
            "n": len(subset),
            "pairwise_acc": sum(r.correct for r in subset) / len(subset),
        }
    overall = sum(r.correct for r in results) / len(results) if results else 0.0
    return EvalReport(
        scorer=scorer.name,
        overall_pairwise_acc=overall,
        per_type=per_type,
        ties=sum(r.tied for r in results),
        errors=errors,
        per_instance=results,
    )


# --- MRR@k -------------------------------------------------------------------


def mrr_at_k(rankings: dict[str, list[str]], qrels: dict[str, set[str]], k: int = 10) -> float:
    """Mean reciprocal rank of the first relevant doc within the top k."""
    if not rankings:
        raise EvalError("no ranked queries")
    total = 0.0
    for qid, ranked in rankings.items():
        if qid not in qrels:
            raise MissingQrels(f"query {qid!r} missing from qrels")
        relevant = qrels[qid]
        for rank, did in enumerate(ranked[:k], 1):
            if did in relevant:
                total += 1.0 / rank
                break
    return total / len(rankings)
