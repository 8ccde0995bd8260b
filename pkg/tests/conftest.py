import json
from pathlib import Path

import pytest

from fixture_repo import build_fixture


@pytest.fixture(scope="session")
def fixture_repo_path(tmp_path_factory) -> Path:
    repo = tmp_path_factory.mktemp("fixture") / "town"
    build_fixture(repo)
    return repo


@pytest.fixture(scope="session")
def oracle() -> dict:
    raw = (Path(__file__).parent / "fixtures" / "oracle.json").read_text()
    return json.loads(raw)


@pytest.fixture(scope="session")
def fixture_deltas(fixture_repo_path):
    from evocity import ingest

    return ingest.walk_history(fixture_repo_path, "master")


@pytest.fixture(scope="session")
def analysis(fixture_repo_path, tmp_path_factory):
    """Full pipeline run over the fixture, shared across test modules."""
    from evocity.pipeline import run_analysis
    from evocity.store import Store

    store = Store(tmp_path_factory.mktemp("store"))
    result = run_analysis(str(fixture_repo_path), store)
    return store, result
