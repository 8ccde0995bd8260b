import json
import subprocess
import sys
from datetime import datetime, timezone

import pytest

from evocity import canonical
from evocity.cli import _parse_until, main
from tests.fixture_repo import BASE_TIMESTAMP, DAY


@pytest.fixture(scope="module")
def cli_ctx(tmp_path_factory, fixture_repo_path):
    from evocity.store import Store, project_id_for

    data_dir = tmp_path_factory.mktemp("cli-data")
    code = main(["--data-dir", str(data_dir), "analyze", str(fixture_repo_path), "--quiet"])
    assert code == 0
    pid = project_id_for(str(fixture_repo_path), None)
    return str(data_dir), pid, Store(data_dir)


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_until_bare_date_is_end_of_day_utc():
    assert _parse_until("2020-12-02") == int(
        datetime(2020, 12, 2, 23, 59, 59, tzinfo=timezone.utc).timestamp()
    )
    assert _parse_until("2020-12-02T00:00:00") < _parse_until("2020-12-02")


def test_analyze_prints_project_id(cli_ctx, capsys, fixture_repo_path):
    data_dir, pid, _ = cli_ctx
    code, out, _ = run_cli(
        capsys, "--data-dir", data_dir, "analyze", str(fixture_repo_path), "--quiet"
    )
    assert code == 0
    assert out.strip() == pid


def test_analyze_json_output(cli_ctx, capsys, fixture_repo_path):
    data_dir, pid, _ = cli_ctx
    code, out, _ = run_cli(
        capsys, "--data-dir", data_dir, "analyze", str(fixture_repo_path),
        "--quiet", "--json",
    )
    assert code == 0
    body = json.loads(out)
    assert body["project_id"] == pid
    assert body["num_commits"] == 12
    assert body["status"] == "done"


def test_analyze_bad_path_exits_2(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "--data-dir", str(tmp_path), "analyze", "/no/such/repo", "--quiet"
    )
    assert code == 2
    assert "error" in err


def test_analyze_until_truncates(tmp_path, fixture_repo_path, capsys):
    until = datetime.fromtimestamp(
        BASE_TIMESTAMP + 5 * DAY, tz=timezone.utc).strftime("%Y-%m-%d")
    code, out, _ = run_cli(
        capsys, "--data-dir", str(tmp_path), "analyze", str(fixture_repo_path),
        "--quiet", "--json", "--until", until,
    )
    assert code == 0
    assert json.loads(out)["num_commits"] == 6


def test_export_scene_to_stdout(cli_ctx, capsysbinary):
    data_dir, pid, store = cli_ctx
    code = main(["--data-dir", data_dir, "export-scene", pid, "0"])
    out = capsysbinary.readouterr().out
    assert code == 0
    assert out == store.load_scene_bytes(pid, 0)
    assert canonical.loads(out)["commit"]["ordinal"] == 0


def test_export_scene_to_file(cli_ctx, tmp_path, capsys):
    data_dir, pid, store = cli_ctx
    target = tmp_path / "scene.json"
    code, _, _ = run_cli(
        capsys, "--data-dir", data_dir, "export-scene", pid, "5", "-o", str(target)
    )
    assert code == 0
    assert target.read_bytes() == store.load_scene_bytes(pid, 5)


def test_export_scene_out_of_range_exits_2(cli_ctx, capsys):
    data_dir, pid, _ = cli_ctx
    code, _, err = run_cli(capsys, "--data-dir", data_dir, "export-scene", pid, "99")
    assert code == 2
    assert "out of range" in err


def test_export_scene_unknown_project_exits_2(cli_ctx, capsys):
    data_dir, _, _ = cli_ctx
    code, _, _ = run_cli(
        capsys, "--data-dir", data_dir, "export-scene", "0" * 16, "0")
    assert code == 2


def test_stats_at_head(cli_ctx, oracle, capsys):
    data_dir, pid, _ = cli_ctx
    code, out, _ = run_cli(capsys, "--data-dir", data_dir, "stats", pid, "--json")
    assert code == 0
    body = json.loads(out)
    assert body == {"ordinal": 11, **oracle["stats_at_head"]}


def test_stats_at_earlier_ordinal(cli_ctx, oracle, capsys):
    data_dir, pid, _ = cli_ctx
    code, out, _ = run_cli(
        capsys, "--data-dir", data_dir, "stats", pid, "--ordinal", "4", "--json")
    assert code == 0
    assert json.loads(out) == {"ordinal": 4, **oracle["stats_at_4"]}


def test_stats_plain_output_is_aligned_table(cli_ctx, oracle, capsys):
    data_dir, pid, _ = cli_ctx
    code, out, _ = run_cli(capsys, "--data-dir", data_dir, "stats", pid)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("commit ordinal")
    assert any(l.startswith("class files") and l.endswith(
        str(oracle["stats_at_head"]["class_files"])) for l in lines)
    assert any(l.startswith("tables") for l in lines)


def test_stats_bad_ordinal_exits_2(cli_ctx, capsys):
    data_dir, pid, _ = cli_ctx
    code, _, _ = run_cli(
        capsys, "--data-dir", data_dir, "stats", pid, "--ordinal", "42")
    assert code == 2


def test_bad_usage_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_console_script_runs():
    result = subprocess.run(
        [sys.executable, "-m", "evocity.cli", "--help"],
        capture_output=True, text=True, timeout=30,
    )
    assert result.returncode == 0
    for command in ("analyze", "export-scene", "stats", "serve"):
        assert command in result.stdout
