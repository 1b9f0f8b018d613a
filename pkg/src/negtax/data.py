"""Contrastive instances and the dataset JSONL format.

One instance per line: ``{"id","type","q1","d1","q2","d2","topic","page"}``.
``type`` uses the taxonomy's snake_case names. NevIR and ExcluIR exports
are mapped onto the same shape via column mappings.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict

from .taxonomy import NegationLabel


class DataError(Exception):
    pass


class EmptyDataset(DataError):
    pass


@dataclass
class Instance:
    id: str
    q1: str
    d1: str
    q2: str
    d2: str
    gold: NegationLabel | None = None
    topic: str | None = None
    source_page: str | None = None

    def __post_init__(self):
        for name in ("q1", "d1", "q2", "d2"):
            if not getattr(self, name).strip():
                raise DataError(f"instance {self.id}: {name} is empty")
        if self.q1 == self.q2:
            raise DataError(f"instance {self.id}: q1 == q2")
        if self.d1 == self.d2:
            raise DataError(f"instance {self.id}: d1 == d2")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "type": str(self.gold) if self.gold else None,
            "q1": self.q1,
            "d1": self.d1,
            "q2": self.q2,
            "d2": self.d2,
            "topic": self.topic,
            "page": self.source_page,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Instance":
        gold = obj.get("type")
        return cls(
            id=str(obj["id"]),
            q1=obj["q1"],
            d1=obj["d1"],
            q2=obj["q2"],
            d2=obj["d2"],
            gold=NegationLabel.from_string(gold) if gold else None,
            topic=obj.get("topic"),
            source_page=obj.get("page"),
        )


# Column mappings for external dataset exports. NevIR places negation in
# the first pair, ExcluIR in the second; the classifier checks both
# orderings, so only the field names differ here.
_FORMAT_COLUMNS = {
    "native": {"q1": "q1", "d1": "d1", "q2": "q2", "d2": "d2"},
    "nevir": {"q1": "q1", "d1": "doc1", "q2": "q2", "d2": "doc2"},
    "excluir": {"q1": "query1", "d1": "doc1", "q2": "query2", "d2": "doc2"},
}


def parse_line(line: str, fmt: str = "native", line_no: int = 0) -> Instance:
    obj = json.loads(line)
    if fmt == "native":
        return Instance.from_json(obj)
    try:
        cols = _FORMAT_COLUMNS[fmt]
    except KeyError:
        raise DataError(f"unknown format {fmt!r}") from None
    return Instance(
        id=str(obj.get("id", line_no)),
        q1=obj[cols["q1"]],
        d1=obj[cols["d1"]],
        q2=obj[cols["q2"]],
        d2=obj[cols["d2"]],
    )


def read_jsonl(path, fmt: str = "native", max_bad_fraction: float = 0.1):
    """Read a dataset; malformed lines are skipped and reported.

    Returns (instances, skipped line numbers). Raises DataError when more
    than ``max_bad_fraction`` of lines are malformed, or on an empty file.
    """
    instances: list[Instance] = []
    skipped: list[int] = []
    total = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            total += 1
            try:
                instances.append(parse_line(line, fmt, line_no))
            except (json.JSONDecodeError, KeyError, DataError):
                skipped.append(line_no)
    if total == 0:
        raise EmptyDataset(f"{path}: no instances")
    if skipped and len(skipped) / total > max_bad_fraction:
        raise DataError(
            f"{path}: {len(skipped)}/{total} malformed lines (limit {max_bad_fraction:.0%})"
        )
    return instances, skipped


def write_jsonl(path, instances) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
