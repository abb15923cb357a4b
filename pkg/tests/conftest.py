import csv
import pathlib

import pytest

GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden():
    """Oracle values from golden/values.csv keyed by (name, params)."""
    with (GOLDEN_DIR / "values.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    return {(r["name"], r["params"]): float(r["value"]) for r in rows}


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN_DIR
