import json

import pytest

from negtax import data
from negtax.data import DataError, EmptyDataset, Instance, read_jsonl, write_jsonl
from negtax.taxonomy import NegationLabel


def inst(i="a", **kwargs):
    base = dict(
        id=i,
        q1="movies that do not feature tom hanks",
        d1="cast away does not feature tom hanks",
        q2="movies that feature tom hanks",
        d2="forrest gump features tom hanks",
        gold=NegationLabel.SENTENTIAL,
    )
    base.update(kwargs)
    return Instance(**base)


class TestInstance:
    def test_identical_queries_rejected(self):
        with pytest.raises(DataError):
            inst(q1="same", q2="same")

    def test_identical_docs_rejected(self):
        with pytest.raises(DataError):
            inst(d1="same", d2="same")

    def test_empty_field_rejected(self):
        with pytest.raises(DataError):
            inst(q1="   ")

    def test_json_round_trip(self):
        instance = inst(topic="movies", source_page="Tom Hanks")
        restored = Instance.from_json(instance.to_json())
        assert restored == instance

    def test_missing_gold_is_allowed(self):
        instance = inst(gold=None)
        assert Instance.from_json(instance.to_json()).gold is None


class TestReadJsonl:
    def test_native_round_trip(self, tmp_path):
        path = tmp_path / "ds.jsonl"
        originals = [inst("a"), inst("b", gold=NegationLabel.AFFIXAL)]
        write_jsonl(path, originals)
        instances, skipped = read_jsonl(path)
        assert instances == originals
        assert skipped == []

    def test_nevir_columns(self, write_jsonl_file):
        path = write_jsonl_file(
            "nevir.jsonl",
            [{"id": "n1", "q1": "q neg", "doc1": "d neg", "q2": "q pos", "doc2": "d pos"}],
        )
        instances, _ = read_jsonl(path, "nevir")
        assert instances[0].d1 == "d neg"
        assert instances[0].gold is None

    def test_excluir_columns(self, write_jsonl_file):
        path = write_jsonl_file(
            "excluir.jsonl",
            [{"query1": "plain q", "doc1": "plain d", "query2": "q besides x", "doc2": "d2"}],
        )
        instances, _ = read_jsonl(path, "excluir")
        assert instances[0].q2 == "q besides x"
        assert instances[0].id == "1"  # falls back to the line number

    def test_unknown_format(self):
        with pytest.raises(DataError):
            data.parse_line("{}", "mystery")

    def test_skips_malformed_lines_below_threshold(self, tmp_path):
        path = tmp_path / "ds.jsonl"
        rows = [json.dumps(inst(f"i{k}").to_json()) for k in range(20)]
        rows.insert(3, "{not json")
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        instances, skipped = read_jsonl(path)
        assert len(instances) == 20
        assert skipped == [4]

    def test_aborts_when_too_many_malformed(self, tmp_path):
        path = tmp_path / "ds.jsonl"
        path.write_text(
            json.dumps(inst().to_json()) + "\n{broken\n{also broken\n", encoding="utf-8"
        )
        with pytest.raises(DataError):
            read_jsonl(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(EmptyDataset):
            read_jsonl(path)

    def test_written_lines_are_sorted_and_stable(self, tmp_path):
        path = tmp_path / "ds.jsonl"
        write_jsonl(path, [inst()])
        line = path.read_text(encoding="utf-8").strip()
        keys = list(json.loads(line))
        assert keys == sorted(keys)
