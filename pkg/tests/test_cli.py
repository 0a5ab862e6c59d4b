from __future__ import annotations

import json
import pathlib

import pytest
from click.testing import CliRunner

from leanprose.cli import cli

from conftest import FIXTURES


@pytest.fixture()
def runner():
    return CliRunner()


def _translate_args(out_dir, extra=()):
    # Echo-mode explanations are whole prompts, so give the child-text
    # budget generous headroom in CLI tests.
    return [
        "translate",
        "--trace", str(FIXTURES / "even_add_even.trace"),
        "--library", str(FIXTURES / "premise_library.jsonl"),
        "--out", str(out_dir),
        "--max-child-chars", "500000",
        *extra,
    ]


def _dir_bytes(path: pathlib.Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(path)): p.read_bytes()
        for p in sorted(path.rglob("*"))
        if p.is_file()
    }


def test_translate_record_then_replay_identical(runner, tmp_path):
    session = tmp_path / "session.jsonl"
    out_record = tmp_path / "out-record"
    result = runner.invoke(
        cli, _translate_args(out_record, ["--backend", "echo", "--record", str(session)])
    )
    assert result.exit_code == 0, result.output
    assert (out_record / "even_add_even.proof.txt").exists()

    out_a, out_b = tmp_path / "out-a", tmp_path / "out-b"
    for out in (out_a, out_b):
        result = runner.invoke(cli, _translate_args(out, ["--replay", str(session)]))
        assert result.exit_code == 0, result.output
    assert _dir_bytes(out_a) == _dir_bytes(out_b)
    assert _dir_bytes(out_a) == _dir_bytes(out_record)


def test_translate_missing_catalog_exits_1(runner, tmp_path):
    result = runner.invoke(
        cli,
        _translate_args(tmp_path / "out", ["--backend", "echo", "--catalog", "/no/such/catalog.json"]),
    )
    assert result.exit_code == 1
    assert "/no/such/catalog.json" in result.output


def test_translate_invalid_trace_exits_3(runner, tmp_path):
    bad = tmp_path / "bad.trace"
    doc = json.loads((FIXTURES / "even_add_even.trace").read_text("utf-8"))
    doc["steps"][0]["id"] = doc["steps"][1]["id"]
    bad.write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
    result = runner.invoke(
        cli,
        [
            "translate",
            "--trace", str(bad),
            "--library", str(FIXTURES / "premise_library.jsonl"),
            "--out", str(tmp_path / "out"),
            "--backend", "echo",
        ],
    )
    assert result.exit_code == 3


def test_translate_replay_miss_exits_2(runner, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    result = runner.invoke(cli, _translate_args(tmp_path / "out", ["--replay", str(empty)]))
    assert result.exit_code == 2


def test_dry_run_writes_prompts_without_backend(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(cli, _translate_args(out, ["--dry-run"]))
    assert result.exit_code == 0, result.output
    prompts = sorted(p.name for p in (out / "prompts").iterdir())
    assert "even_add_even.s1.prompt.txt" in prompts
    assert "even_add_even.statement.prompt.txt" in prompts
    assert (out / "even_add_even.tree.txt").exists()
    # No proof artifact: no backend was constructed.
    assert not (out / "even_add_even.proof.txt").exists()


def test_dry_run_step_prompt_matches_golden(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(cli, _translate_args(out, ["--dry-run"]))
    assert result.exit_code == 0, result.output
    golden = (pathlib.Path(FIXTURES).parent / "prompts" / "rw_theorems.golden").read_text("utf-8")
    assert (out / "prompts" / "even_add_even.s3.prompt.txt").read_text("utf-8") == golden


def test_flat_mode_single_summarize_call(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(
        cli, _translate_args(out, ["--backend", "echo", "--mode", "flat"])
    )
    assert result.exit_code == 0, result.output
    assert (out / "even_add_even.proof.txt").exists()


def test_translate_emits_subproofs(runner, tmp_path):
    out = tmp_path / "out"
    subdir = tmp_path / "subproofs"
    result = runner.invoke(
        cli,
        _translate_args(out, ["--backend", "echo", "--emit-subproofs", str(subdir)]),
    )
    assert result.exit_code == 0, result.output
    names = sorted(p.name for p in subdir.iterdir())
    assert names == ["even_add_even.root.subproof.txt", "even_add_even.s2.subproof.txt"]


def test_tree_command(runner, tmp_path):
    out = tmp_path / "trees"
    result = runner.invoke(
        cli, ["tree", "--trace", str(FIXTURES / "even_add_even.trace"), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    text = (out / "even_add_even.tree.txt").read_text("utf-8")
    assert text == (FIXTURES / "even_add_even.tree.txt").read_text("utf-8")
    assert (out / "even_add_even.tree.dot").read_text("utf-8").startswith("digraph proof {")


def test_informalize_command_writes_steps_json(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(
        cli,
        [
            "informalize",
            "--trace", str(FIXTURES / "even_add_even.trace"),
            "--library", str(FIXTURES / "premise_library.jsonl"),
            "--out", str(out),
            "--backend", "echo",
        ],
    )
    assert result.exit_code == 0, result.output
    doc = json.loads((out / "even_add_even.steps.json").read_text("utf-8"))
    assert len(doc["steps"]) == 6
    assert {s["step_id"] for s in doc["steps"]} == {f"s{i}" for i in range(1, 7)}
    assert all(s["template_id"] for s in doc["steps"])


def test_library_build_command(runner, tmp_path):
    records = tmp_path / "records.jsonl"
    lines = []
    for i in range(3):
        lines.append(json.dumps({
            "name": f"Base.t{i}", "kind": "theorem", "type": f"T{i}",
            "module": "Base", "fields": ["algebra"], "depends_on": [],
        }))
    records.write_text("\n".join(lines) + "\n", encoding="utf-8")
    modules = tmp_path / "modules.json"
    modules.write_text('{"Base": []}', encoding="utf-8")
    out = tmp_path / "library.jsonl"
    result = runner.invoke(
        cli,
        [
            "library", "build",
            "--records", str(records),
            "--modules", str(modules),
            "--library", str(out),
            "--seed", "7",
            "--backend", "echo",
        ],
    )
    assert result.exit_code == 0, result.output
    built = [json.loads(line) for line in out.read_text("utf-8").splitlines()]
    assert len(built) == 3
    assert all(rec["explanation"] for rec in built)


def test_eval_mcnemar_prints_table_row(runner, tmp_path):
    pairs = tmp_path / "pairs.jsonl"
    rows = []
    for i in range(51):
        rows.append({"item_id": f"a{i}", "correct_under_a": True, "correct_under_b": False})
    for i in range(123):
        rows.append({"item_id": f"b{i}", "correct_under_a": False, "correct_under_b": True})
    for i in range(400):
        rows.append({"item_id": f"c{i}", "correct_under_a": True, "correct_under_b": True})
    pairs.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    result = runner.invoke(cli, ["eval", "mcnemar", "--pairs", str(pairs)])
    assert result.exit_code == 0, result.output
    assert result.output.strip() == "χ²=28.9713 p=7.3460e-08"
    as_json = runner.invoke(cli, ["eval", "mcnemar", "--pairs", str(pairs), "--report", "json"])
    doc = json.loads(as_json.output)
    assert doc["a_only"] == 51 and doc["b_only"] == 123


def test_eval_score_command(runner, tmp_path):
    criteria = tmp_path / "criteria.jsonl"
    rows = []
    for i, verdict in enumerate(["captured"] * 87 + ["partial"] * 11 + ["missed"] * 10):
        rows.append({
            "proof_id": "all", "criterion_id": f"c{i}",
            "category": "proof_method", "verdict": verdict,
        })
    criteria.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    result = runner.invoke(cli, ["eval", "score", "--criteria", str(criteria)])
    assert result.exit_code == 0, result.output
    assert "score=0.857" in result.output


def test_eval_tally_command(runner, tmp_path):
    judgments = tmp_path / "judgments.jsonl"
    rows = []
    for i in range(9):
        rows.append({"step_id": f"s{i}", "config_id": "both", "flags": {}})
    rows.append({"step_id": "s9", "config_id": "both", "flags": {"misinformation": True}})
    judgments.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    result = runner.invoke(cli, ["eval", "tally", "--judgments", str(judgments), "--config-id", "both"])
    assert result.exit_code == 0, result.output
    assert "Correct" in result.output and "90.00" in result.output
    missing = runner.invoke(cli, ["eval", "tally", "--judgments", str(judgments), "--config-id", "nope"])
    assert missing.exit_code == 3


def test_translate_multiple_traces(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(
        cli,
        [
            "translate",
            "--trace", str(FIXTURES / "even_add_even.trace"),
            "--trace", str(FIXTURES / "inf_pos_zero.trace"),
            "--library", str(FIXTURES / "premise_library.jsonl"),
            "--out", str(out),
            "--backend", "echo",
            "--max-child-chars", "500000",
        ],
    )
    assert result.exit_code == 0, result.output
    assert (out / "even_add_even.proof.txt").exists()
    assert (out / "inf_pos_zero.proof.txt").exists()


def test_config_file_supplies_defaults(runner, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps({
            "library": str(FIXTURES / "premise_library.jsonl"),
            "backend": "echo",
        }),
        encoding="utf-8",
    )
    out = tmp_path / "out"
    result = runner.invoke(
        cli,
        [
            "--config", str(config),
            "translate",
            "--trace", str(FIXTURES / "even_add_even.trace"),
            "--out", str(out),
            "--max-child-chars", "500000",
        ],
    )
    assert result.exit_code == 0, result.output
    assert (out / "even_add_even.proof.txt").exists()
