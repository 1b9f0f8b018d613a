import json
from pathlib import Path

import pytest

from negtax import lexnet

FIXTURES = Path(__file__).parent / "fixtures"
WORDNET_DIR = FIXTURES / "wordnet"
BRIDGES_DIR = FIXTURES / "bridges"


@pytest.fixture(scope="session")
def antonym_index():
    return lexnet.load(WORDNET_DIR)


@pytest.fixture()
def write_jsonl_file(tmp_path):
    def _write(name, rows):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
        return path

    return _write
