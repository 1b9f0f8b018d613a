"""LLM oracle client with record/replay transcripts.

The client produces structured λ-calculus analyses for classification and
generation outputs for dataset construction. Every request is keyed by a
content hash of (prompt, params); in record mode responses are persisted
to a content-addressed directory so downstream runs and CI replay them
byte-identically without network access.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import logic

API_KEY_ENV = "NEGTAX_API_KEY"

DEFAULT_CLASSIFY_TEMPERATURE = 0.0
DEFAULT_GENERATE_TEMPERATURE = 0.7

JSON_REMINDER = "Respond in JSON format."


class OracleError(Exception):
    def __init__(self, message: str, last_raw: str = ""):
        super().__init__(message)
        self.last_raw = last_raw


class ReplayMiss(OracleError):
    def __init__(self, request_hash: str):
        super().__init__(f"no recorded transcript for request {request_hash}")
        self.request_hash = request_hash


class ProofRejected(OracleError):
    pass


# --- request hashing and transcript store -----------------------------------


def request_hash(prompt: str, system: str | None, params: dict) -> str:
    payload = json.dumps(
        {"prompt": prompt, "system": system, "params": params},
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class TranscriptStore:
    """Content-addressed directory of recorded responses.

    Existing entries are never overwritten, so a replay store is stable.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> str | None:
        path = self._path(key)
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))["response"]

    def put(self, key: str, response: str) -> None:
        path = self._path(key)
        with self._lock:
            if path.exists():
                return
            tmp = path.with_suffix(".tmp")
            tmp.write_text(
                json.dumps(
                    {"request_hash": key, "response": response, "timestamp": time.time()},
                    ensure_ascii=False,
                ),
                encoding="utf-8",
            )
            tmp.replace(path)


# --- transports -------------------------------------------------------------


class Transport:
    """Returns the raw model output for a prompt."""

    def complete(self, prompt: str, system: str | None, params: dict) -> str:
        raise NotImplementedError


class HttpTransport(Transport):
    """Chat-completions-compatible HTTP endpoint."""

    def __init__(self, endpoint: str, api_key: str | None = None, session=None):
        import requests

        self.endpoint = endpoint
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self._session = session or requests.Session()

    def complete(self, prompt, system, params):
        messages = []
        if system:
            messages.append({"role": "system", "content": system})
        messages.append({"role": "user", "content": prompt})
        body = {
            "model": params.get("model"),
            "temperature": params.get("temperature", 0.0),
            "messages": messages,
            "response_format": {"type": "json_object"},
        }
        resp = self._session.post(
            self.endpoint,
            json=body,
            headers={"Authorization": f"Bearer {self.api_key}"},
            timeout=params.get("timeout_s", 120),
        )
        if resp.status_code != 200:
            raise OracleError(f"HTTP {resp.status_code} from oracle endpoint", resp.text)
        return resp.json()["choices"][0]["message"]["content"]


class ScriptedTransport(Transport):
    """Canned responses for tests and offline fixture construction.

    Responses are consumed in order per prompt-substring key; a ``None``
    default falls back to raising.
    """

    def __init__(self, responses: list[str] | None = None):
        self.responses = list(responses or [])
        self.requests: list[tuple[str, str | None, dict]] = []

    def complete(self, prompt, system, params):
        self.requests.append((prompt, system, params))
        if not self.responses:
            raise OracleError("scripted transport has no responses left")
        return self.responses.pop(0)


# --- rate limiting -----------------------------------------------------------


class RateLimiter:
    """Simple sliding-window limiter on requests per minute."""

    def __init__(self, requests_per_minute: int | None, clock=time.monotonic, sleep=time.sleep):
        self.rpm = requests_per_minute
        self._clock = clock
        self._sleep = sleep
        self._stamps: list[float] = []
        self._lock = threading.Lock()

    def acquire(self):
        if not self.rpm:
            return
        with self._lock:
            now = self._clock()
            self._stamps = [t for t in self._stamps if now - t < 60.0]
            if len(self._stamps) >= self.rpm:
                wait = 60.0 - (now - self._stamps[0])
                if wait > 0:
                    self._sleep(wait)
                now = self._clock()
                self._stamps = [t for t in self._stamps if now - t < 60.0]
            self._stamps.append(self._clock())


# --- response schemas --------------------------------------------------------

_STRING_LIST = {"type": "array", "items": {"type": "string"}}

SCHEMAS: dict[str, dict] = {
    "lambda_proof": {
        "type": "object",
        "required": ["lexicon", "predicates", "quantifiers", "negation_analysis", "final_formula"],
        "properties": {
            "lexicon": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["symbol", "lambda_term"],
                    "properties": {
                        "symbol": {"type": "string"},
                        "lambda_term": {"type": "string"},
                        "type_tag": {"type": "string"},
                    },
                },
            },
            "predicates": _STRING_LIST,
            "quantifiers": _STRING_LIST,
            "negation_analysis": {
                "type": "object",
                "required": ["sentential", "exclusionary", "affixal", "implicit"],
                "properties": {
                    "sentential": _STRING_LIST,
                    "exclusionary": _STRING_LIST,
                    "affixal": _STRING_LIST,
                    "implicit": _STRING_LIST,
                },
            },
            "final_formula": {"type": "string"},
        },
    },
    "topics": {
        "type": "object",
        "required": ["topics"],
        "properties": {"topics": _STRING_LIST},
    },
    "page": {
        "type": "object",
        "required": ["page"],
        "properties": {"page": {"type": "string"}},
    },
    "generation": {
        "type": "object",
        "required": ["q1", "d1", "q2", "d2"],
        "properties": {
            "q1": {"type": "string"},
            "d1": {"type": "string"},
            "q2": {"type": "string"},
            "d2": {"type": "string"},
        },
    },
    "quantifier_generation": {
        "type": "object",
        "required": ["queries", "passages"],
        "properties": {
            "queries": {"type": "array", "items": {"type": "string"}, "minItems": 4, "maxItems": 4},
            "passages": {"type": "array", "items": {"type": "string"}, "minItems": 4, "maxItems": 4},
        },
    },
    "relevance": {
        "type": "object",
        "required": ["pair1_relevant", "pair2_relevant"],
        "properties": {
            "pair1_relevant": {"type": "boolean"},
            "pair2_relevant": {"type": "boolean"},
        },
    },
}


# --- the λ-proof system prompt -----------------------------------------------

LAMBDA_PROOF_SYSTEM_PROMPT = """\
You are a Montagovian semanticist working in a typed lambda-calculus framework.
For each input query, follow the next four steps:
1. LEXICON: List every predicate and quantifier as a lambda-term with an explicit Church type annotation.
2. SEMANTIC INVENTORY: Output two comma-separated lists:
   - Predicates: []
   - Quantifiers: [exists, forall]
3. NEGATION ANALYSIS: For each predicate, indicate whether it matches one of the following categories:
   - Sentential (e.g. no, not, none, never, cannot)
   - Exclusionary (e.g. besides, except, but)
   - Affixal (e.g. bound morphemes im-, in-, un-, -less, etc.)
   - Implicit (e.g. verbs such as deny, refuse, avoid, fail)
4. FINAL FORMULA: Present the fully reduced lambda-term for S, or an equivalent first- or higher-order logic formula.
Respond in JSON format with keys: lexicon (list of {symbol, lambda_term, type_tag}), predicates, quantifiers, negation_analysis ({sentential, exclusionary, affixal, implicit}), final_formula.
Example:
Query: What organisms besides cyanobacteria perform anoxygenic photosynthesis?
LEXICON: organism: λx:e. Organism(x), cyanobacteria: λx. Cyanobacteria(x), perform_anoxygenic_photosynthesis: λx. PerformAnoxygenicPhotosynthesis(x), besides: λP Q x. Q(x) ∧ ¬P(x)
SEMANTIC INVENTORY: Predicates: [Organism, Cyanobacteria, PerformAnoxygenicPhotosynthesis], Quantifiers: [exists]
NEGATION ANALYSIS: Sentential: [], Exclusionary: [besides], Affixal: [], Implicit: []
FINAL FORMULA: λx:e. Organism(x) ∧ PerformAnoxygenicPhotosynthesis(x) ∧ ¬Cyanobacteria(x)
"""


# --- proofs ------------------------------------------------------------------


@dataclass
class LambdaProof:
    lexicon: list[dict]
    predicates: list[str]
    quantifiers: list[str]
    negation_analysis: dict[str, list[str]]
    final_formula: str
    formula: logic.Formula = field(repr=False, default=None)  # parsed final_formula
    disagreements: list[str] = field(default_factory=list)

    @classmethod
    def from_json(cls, obj: dict) -> "LambdaProof":
        jsonschema.validate(obj, SCHEMAS["lambda_proof"])
        try:
            formula = logic.parse_formula(obj["final_formula"])
        except logic.LogicError as exc:
            raise ProofRejected(f"final formula does not parse: {exc}", obj["final_formula"])
        proof = cls(
            lexicon=obj["lexicon"],
            predicates=list(obj["predicates"]),
            quantifiers=list(obj["quantifiers"]),
            negation_analysis={k: list(v) for k, v in obj["negation_analysis"].items()},
            final_formula=obj["final_formula"],
            formula=formula,
        )
        known = {p.lower() for p in proof.predicates}
        known |= {entry["symbol"].lower() for entry in proof.lexicon}
        for bucket, items in proof.negation_analysis.items():
            for item in items:
                if item.lower() not in known:
                    proof.disagreements.append(
                        f"{bucket} entry {item!r} not in predicates or lexicon"
                    )
        return proof

    def to_json(self) -> dict:
        return {
            "lexicon": self.lexicon,
            "predicates": self.predicates,
            "quantifiers": self.quantifiers,
            "negation_analysis": self.negation_analysis,
            "final_formula": self.final_formula,
        }


# --- client ------------------------------------------------------------------


@dataclass
class OracleParams:
    model: str = "gpt-4o-mini"
    temperature: float = DEFAULT_CLASSIFY_TEMPERATURE
    max_retries: int = 2

    def key(self) -> dict:
        return {"model": self.model, "temperature": self.temperature}


class OracleClient:
    """JSON-completions client with retry, rate limiting, and record/replay.

    mode: "live" (network only), "record" (network, persist transcripts),
    or "replay" (transcripts only, no network).
    """

    def __init__(
        self,
        transport: Transport | None = None,
        mode: str = "replay",
        store: TranscriptStore | None = None,
        params: OracleParams | None = None,
        rate_limiter: RateLimiter | None = None,
        sleep=time.sleep,
        backoff_base: float = 1.0,
        backoff_factor: float = 2.0,
        max_concurrency: int = 4,
    ):
        if mode not in ("live", "record", "replay"):
            raise OracleError(f"unknown oracle mode: {mode!r}")
        if mode in ("record", "replay") and store is None:
            raise OracleError(f"{mode} mode requires a transcript store")
        if mode in ("live", "record") and transport is None:
            raise OracleError(f"{mode} mode requires a transport")
        self.transport = transport
        self.mode = mode
        self.store = store
        self.params = params or OracleParams()
        self.rate_limiter = rate_limiter or RateLimiter(None)
        self._sleep = sleep
        self.backoff_base = backoff_base
        self.backoff_factor = backoff_factor
        self._sem = threading.Semaphore(max_concurrency)

    def complete_json(
        self,
        prompt: str,
        schema_id: str,
        system: str | None = None,
        params: OracleParams | None = None,
    ) -> dict:
        params = params or self.params
        schema = SCHEMAS[schema_id]
        key = request_hash(prompt, system, params.key())

        if self.mode == "replay":
            raw = self.store.get(key)
            if raw is None:
                raise ReplayMiss(key)
            obj = json.loads(raw)
            jsonschema.validate(obj, schema)
            return obj

        last_raw = ""
        attempt_prompt = prompt
        for attempt in range(params.max_retries + 1):
            if attempt > 0:
                self._sleep(self.backoff_base * self.backoff_factor ** (attempt - 1))
                if JSON_REMINDER not in attempt_prompt:
                    attempt_prompt = attempt_prompt + "\n" + JSON_REMINDER
            self.rate_limiter.acquire()
            with self._sem:
                last_raw = self.transport.complete(attempt_prompt, system, params.key())
            try:
                obj = json.loads(last_raw)
                jsonschema.validate(obj, schema)
            except (json.JSONDecodeError, jsonschema.ValidationError):
                continue
            if self.mode == "record":
                self.store.put(key, last_raw)
            return obj
        raise OracleError(
            f"oracle output failed {schema_id} validation after "
            f"{params.max_retries + 1} attempts",
            last_raw,
        )

    def lambda_proof(self, text: str, params: OracleParams | None = None) -> LambdaProof:
        """Typed λ-calculus analysis of one text."""
        if not text.strip():
            raise ValueError("text must be nonempty")
        params = params or self.params
        prompt = f"Query: {text}"
        last_error: ProofRejected | None = None
        for attempt in range(params.max_retries + 1):
            obj = self.complete_json(
                prompt, "lambda_proof", system=LAMBDA_PROOF_SYSTEM_PROMPT, params=params
            )
            try:
                return LambdaProof.from_json(obj)
            except ProofRejected as exc:
                last_error = exc
                if self.mode == "replay":
                    break  # the stored response will not change
                prompt = f"Query: {text}\nThe FINAL FORMULA must be a well-formed logic formula."
        raise last_error
