from __future__ import annotations

import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

CORPUS = REPO / "corpus"
MANIFEST = CORPUS / "manifest.json"
GOLDEN_MATRIX = CORPUS / "golden" / "matrix.json"
SEEDING_DEMO = CORPUS / "seeding_demo"


@pytest.fixture(scope="session")
def corpus():
    from npefix.harness import load_manifest
    return load_manifest(MANIFEST)


@pytest.fixture(scope="session")
def crash_cases(corpus):
    return [c for c in corpus.cases if c.expect_kind == "crash"]


@pytest.fixture(scope="session")
def output_cases(corpus):
    return [c for c in corpus.cases if c.expect_kind == "output"]
