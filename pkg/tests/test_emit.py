import csv
import io
import json
import re

import pytest

from qutrit_anneal.cli import main
from qutrit_anneal.emit import emit, partition_id_map, render_csv, render_svg, render_table


def test_table_reports_match_and_costs(tiny_result):
    table = render_table(tiny_result)
    assert "match" in table
    assert "true" in table
    assert f"{tiny_result.oracle_min_cost:.6f}" in table
    assert f"{tiny_result.top_cost:.6f}" in table


def test_csv_structure_and_normalization(tiny_result):
    text = render_csv(tiny_result)
    rows = list(csv.DictReader(io.StringIO(text)))
    n = tiny_result.spec.register_qutrits
    assert len(rows) == 3**n
    total = sum(float(r["probability"]) for r in rows)
    assert total == pytest.approx(1.0, abs=1e-9)
    ids = partition_id_map(tiny_result)
    assert ids[tiny_result.top_partition] == 0
    top_rows = [r for r in rows if r["partition_id"] == "0"]
    top_p = sum(float(r["probability"]) for r in top_rows)
    assert top_p == pytest.approx(tiny_result.top_probability, abs=1e-12)
    assert all(len(r["digits"].split()) == n for r in rows)


def test_csv_marks_invalid_states(preset_result):
    result = preset_result("fig4")
    rows = list(csv.DictReader(io.StringIO(render_csv(result))))
    invalid_p = sum(float(r["probability"]) for r in rows if r["partition_id"] == "-1")
    assert invalid_p == pytest.approx(result.invalid_probability, abs=1e-12)
    assert invalid_p > 0.0


def test_svg_has_marker_group_sizes_3_2_1(preset_result):
    svg = render_svg(preset_result("fig1"))
    data_markers = re.findall(r'<(circle|rect|polygon|path) class="pt"', svg)
    counts = {
        "circle": data_markers.count("circle"),
        "rect": data_markers.count("rect"),
        "polygon": data_markers.count("polygon"),
    }
    assert counts == {"circle": 3, "rect": 2, "polygon": 1}
    assert svg.startswith("<svg")
    assert 'version="1.1"' in svg


def test_emit_writes_requested_files(tmp_path, tiny_result):
    paths = emit(tiny_result, ["table", "csv", "svg"], tmp_path)
    names = {p.name for p in paths}
    assert names == {"tiny.txt", "tiny.csv", "tiny.svg"}
    for p in paths:
        assert p.exists() and p.stat().st_size > 0


def test_emit_unknown_format(tmp_path, tiny_result):
    with pytest.raises(ValueError):
        emit(tiny_result, ["pdf"], tmp_path)


# ------------------------------------------------------------ CLI plumbing


def test_cli_run_tiny_spec(tmp_path, tiny_spec_dict, capsys):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(tiny_spec_dict))
    code = main(["run", str(path), "--emit", "table,csv,svg", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "match" in out
    assert (tmp_path / "tiny.csv").exists()
    assert (tmp_path / "tiny.svg").exists()
    assert (tmp_path / "tiny.txt").exists()


def test_cli_missing_spec_is_input_error(tmp_path, capsys):
    code = main(["run", str(tmp_path / "absent.json")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_cli_bad_emit_format_is_input_error(tmp_path, tiny_spec_dict, capsys):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(tiny_spec_dict))
    assert main(["run", str(path), "--emit", "pdf"]) == 2


def test_cli_uses_spec_output_targets(tmp_path, tiny_spec_dict):
    tiny_spec_dict["emit"] = ["csv"]
    tiny_spec_dict["out"] = str(tmp_path / "nested")
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(tiny_spec_dict))
    assert main(["run", str(path)]) == 0
    assert (tmp_path / "nested" / "tiny.csv").exists()
    assert not (tmp_path / "nested" / "tiny.txt").exists()


def test_cli_size_guard_exit_code(tmp_path, capsys):
    spec = {
        "points": [[i, i] for i in range(9)],
        "method": "one-hot-K3",
        "anneal": {"M": 5, "h": 2.0},
    }
    path = tmp_path / "big.json"
    path.write_text(json.dumps(spec))
    assert main(["run", str(path)]) == 3


def test_cli_mismatch_exit_code(monkeypatch, tmp_path, tiny_spec_dict, tiny_result):
    import dataclasses

    import qutrit_anneal.cli as cli

    mismatched = dataclasses.replace(tiny_result, match=False)
    monkeypatch.setattr(cli, "run", lambda spec: mismatched)
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(tiny_spec_dict))
    assert main(["run", str(path), "--out", str(tmp_path)]) == 1


def test_cli_generate_deterministic_json(capsys):
    assert main(["generate", "--n", "5", "--seed", "9"]) == 0
    first = capsys.readouterr().out
    assert main(["generate", "--n", "5", "--seed", "9"]) == 0
    second = capsys.readouterr().out
    assert first == second
    data = json.loads(first)
    assert len(data["points"]) == 5
    assert all(-10 <= x <= 10 and -10 <= y <= 10 for x, y in data["points"])


def test_cli_generate_writes_file(tmp_path):
    assert main(["generate", "--n", "4", "--seed", "2", "--out", str(tmp_path)]) == 0
    files = list(tmp_path.glob("*.json"))
    assert len(files) == 1
    data = json.loads(files[0].read_text())
    assert data["method"] == "one-hot-K3-pinned"


def test_cli_preset_with_split_mode_runs_fast(tmp_path, capsys):
    # split mode keeps the preset answer and finishes quickly
    code = main(
        ["preset", "fig3", "--mode", "split", "--emit", "table", "--out", str(tmp_path)]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "match" in out and "true" in out
