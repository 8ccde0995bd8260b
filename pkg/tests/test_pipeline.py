import hashlib
from collections import Counter
from pathlib import Path

import pytest

from evocity.pipeline import PipelineOptions, run_analysis
from evocity.scene import ProjectNorms
from evocity.store import Store, project_id_for
from tests.fixture_repo import BASE_TIMESTAMP, DAY, build_fixture


def test_record_fields(analysis, fixture_deltas, fixture_repo_path):
    _, result = analysis
    record = result.record
    assert record.num_commits == 12
    assert record.branch == "master"
    assert record.head == fixture_deltas[-1].commit.sha
    assert record.analysis_timestamp == BASE_TIMESTAMP + 11 * DAY
    assert record.status == "done"
    assert record.project_id == project_id_for(str(fixture_repo_path), None)


def test_timeline_document(analysis, oracle, fixture_deltas):
    store, result = analysis
    doc = store.load_document(result.record.project_id, "timeline")
    rows = doc["commits"]
    assert len(rows) == 12
    assert [r["counts"] for r in rows] == oracle["timeline_counts"]
    first = rows[0]
    assert first["sha"] == fixture_deltas[0].commit.sha
    assert first["author"] == "Fixture Author"
    assert first["message"] == "add core model and seed data"
    assert rows[5]["counts"] == {"added": 0, "modified": 0, "deleted": 0, "moved": 3}


def test_entities_document_covers_every_history(analysis, oracle):
    store, result = analysis
    doc = store.load_document(result.record.project_id, "entities")
    by_artifact = {e["artifact"]: e for e in doc["entities"]}
    assert len(by_artifact) == len(oracle["files"]) + len(oracle["folders"])

    arts = [e["artifact"] for e in doc["entities"]]
    assert arts == sorted(arts)

    for key, expected in oracle["files"].items():
        entry = by_artifact[expected["artifact"]]
        assert entry["first_path"] == key.split(":", 1)[1]
        assert entry["kind"] == expected["kind"]
        assert entry["intervals"] == expected["intervals"]


def test_entities_document_account_lifecycle(analysis, oracle):
    store, result = analysis
    doc = store.load_document(result.record.project_id, "entities")
    expected = oracle["files"]["0:src/Account.java"]
    entry = next(e for e in doc["entities"] if e["artifact"] == expected["artifact"])

    assert entry["birth"] == 0
    assert entry["moves"] == [{"ordinal": 5, "from": "src/Account.java", "to": "app/Account.java"}]
    assert [ep["path"] for ep in entry["episodes"]] == ["src/Account.java", "app/Account.java"]

    versions = {str(v["ordinal"]): v for v in entry["versions"]}
    assert set(versions) == set(expected["versions"])
    for ordinal, want in expected["versions"].items():
        got = versions[ordinal]
        assert got["change"] == want["change"]
        assert got["path"] == want["path"]
        assert got["metrics"] == want["metrics"]
        assert got["degraded"] is False


def test_schema_document_matches_oracle(analysis, oracle):
    store, result = analysis
    doc = store.load_document(result.record.project_id, "schema")
    assert [t["name"] for t in doc["tables"]] == sorted(oracle["schema"])
    for table in doc["tables"]:
        want = oracle["schema"][table["name"]]
        assert table["intervals"] == want["intervals"], table["name"]
        assert table["columns_by_ordinal"] == want["columns_by_ordinal"], table["name"]
        assert table["inferred_by_use"] == want["inferred_by_use"], table["name"]


def test_per_commit_access_counts(analysis, oracle):
    _, result = analysis
    for ordinal, expected in enumerate(oracle["accesses_by_ordinal"]):
        got = Counter(a.table for a in result.per_commit[ordinal].accesses)
        assert dict(got) == expected, f"ordinal {ordinal}"


def test_per_commit_warnings(analysis, oracle):
    _, result = analysis
    for ordinal, expected in enumerate(oracle["warnings_by_ordinal"]):
        assert result.per_commit[ordinal].warnings == expected, f"ordinal {ordinal}"


def test_norms_hand_computed(analysis):
    _, result = analysis
    assert result.norms == ProjectNorms(26.0, 4.0, 2.0)


def test_layout_document(analysis, oracle):
    store, result = analysis
    doc = store.load_document(result.record.project_id, "layout")
    assert list(doc["sky_slots"]) == oracle["sky_slot_order"]
    for index, name in enumerate(oracle["sky_slot_order"]):
        assert doc["sky_slots"][name] == [index * 44.0, 0.0]
    keys = [(l["artifact"], l["episode"]) for l in doc["lots"]]
    assert keys == sorted(keys)
    x, z, w, d = doc["bounds"]
    assert w > 0 and d > 0


def test_all_documents_present_and_versioned(analysis):
    store, result = analysis
    pid = result.record.project_id
    for name in ("timeline", "entities", "schema", "layout"):
        assert store.load_document(pid, name)["schema_version"] == 1
    assert store.scene_count(pid) == 12


def _tree_digest(root: Path) -> dict[str, str]:
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = hashlib.sha256(path.read_bytes()).hexdigest()
    return out


def test_two_runs_are_byte_identical(tmp_path, fixture_repo_path):
    digests = []
    for name in ("one", "two"):
        store = Store(tmp_path / name)
        result = run_analysis(str(fixture_repo_path), store)
        digests.append(_tree_digest(store.project_dir(result.record.project_id)))
    assert digests[0] == digests[1]


def test_until_timestamp_truncates_run(tmp_path, fixture_repo_path):
    store = Store(tmp_path / "data")
    options = PipelineOptions(until_timestamp=BASE_TIMESTAMP + 5 * DAY)
    result = run_analysis(str(fixture_repo_path), store, options)
    assert result.record.num_commits == 6
    assert store.scene_count(result.record.project_id) == 6
    doc = store.load_document(result.record.project_id, "schema")
    entries = next(t for t in doc["tables"] if t["name"] == "entries")
    assert entries["intervals"] == [[3, None]]


def test_progress_callback_receives_messages(tmp_path, fixture_repo_path):
    store = Store(tmp_path / "data")
    seen: list[str] = []
    options = PipelineOptions(progress=seen.append)
    run_analysis(str(fixture_repo_path), store, options)
    assert any("12" in msg for msg in seen)
    assert len(seen) >= 4
