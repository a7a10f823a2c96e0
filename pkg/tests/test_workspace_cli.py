"""The workspace format and the `dlie` command line driver."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from dliecalc.cli import main
from dliecalc.workspace import WorkspaceError, parse_workspace

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
GOLDEN = str(SAMPLES / "dual_numbers.json")
CORPUS = str(SAMPLES / "corpus.json")

GOLDEN_COMMANDS = [
    ["validate"],
    ["derivations", "--name", "dual"],
    ["principal-parts", "--name", "dual"],
    ["cocycle-check", "--name", "zero"],
    ["class-equal", "--name", "zero,zero"],
    ["build-d1", "--name", "dual"],
    ["build-dlie", "--name", "der"],
    ["quotient", "--name", "F:der"],
    ["reconstruct", "--name", "F:free"],
    ["classify-map", "--name", "zero,zero"],
    ["diff1", "--name", "reg"],
    ["check-connection", "--name", "conn"],
    ["curvature", "--name", "conn"],
    ["c-functor", "--name", "conn"],
    ["r-functor", "--name", "conn"],
    ["curvature-identity", "--name", "conn"],
    ["end-extension", "--name", "conn"],
    ["split", "--name", "conn"],
    ["annihilator", "--name", "conn"],
]


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_every_subcommand_passes_on_the_golden_file(capsys):
    for cmd in GOLDEN_COMMANDS:
        code, out, err = run_cli(cmd + ["--workspace", GOLDEN], capsys)
        assert code == 0, (cmd, out, err)
        assert "status = ok" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dliecalc.cli", "validate",
         "--workspace", GOLDEN],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "status = ok" in proc.stdout


def test_runs_are_byte_identical(capsys):
    outputs = []
    for _ in range(2):
        chunks = []
        for cmd in GOLDEN_COMMANDS:
            for flag in ([], ["--json"]):
                code, out, _ = run_cli(cmd + flag + ["--workspace", GOLDEN],
                                       capsys)
                chunks.append(out)
        outputs.append("".join(chunks).encode())
    assert outputs[0] == outputs[1]


def _human_to_facts(out):
    facts = {}
    for line in out.strip().splitlines():
        key, _, value = line.partition(" = ")
        facts[key] = value
    return facts


def _json_to_str_facts(out):
    raw = json.loads(out)
    facts = {}
    for k, v in raw.items():
        if isinstance(v, bool):
            facts[k] = "true" if v else "false"
        else:
            facts[k] = str(v)
    return facts


def test_json_and_human_reports_carry_the_same_facts(capsys):
    for cmd in GOLDEN_COMMANDS:
        _, human, _ = run_cli(cmd + ["--workspace", GOLDEN], capsys)
        _, machine, _ = run_cli(cmd + ["--json", "--workspace", GOLDEN],
                                capsys)
        assert _human_to_facts(human) == _json_to_str_facts(machine), cmd


def test_math_failures_exit_1_with_witness(capsys, tmp_path):
    # an unequal pair of classes
    code, out, _ = run_cli(["class-equal", "--name", "zero_dual,class_dual",
                            "--workspace", CORPUS], capsys)
    assert code == 1 and "equal = false" in out
    code, out, _ = run_cli(["class-equal", "--name", "zero_dual,class_dual",
                            "--widen-class-test", "--workspace", CORPUS],
                           capsys)
    assert code == 1 and "mode = wide" in out
    # a cochain that is not A-bilinear, rejected with a witness
    doc = json.loads(Path(CORPUS).read_text())
    doc["cocycles"]["bad"] = {
        "on": "derivations:trunc3",
        "values": {"0,1": ["1", "0", "0"]},
    }
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, out, _ = run_cli(["cocycle-check", "--name", "bad",
                            "--workspace", str(bad)], capsys)
    assert code == 1 and "witness" in out
    # reconstruction over a non-free quotient is a reported failure
    code, out, _ = run_cli(["reconstruct", "--name", "d1:trunc3",
                            "--workspace", CORPUS], capsys)
    assert code == 1 and "status = fail" in out


BAD_DOCUMENTS = [
    ("not json at all", "invalid JSON"),
    ('{"algebras": {"A": {"dim": 1, "basis": ["1"], "unit": ["1"],'
     ' "mul": [[["1"]]], "extra": 1}}}', "unknown field"),
    ('{"somewhere": {}}', "unknown section"),
    ('{"algebras": {"A": {"dim": 1, "basis": ["1"], "unit": [0.5],'
     ' "mul": [[["1"]]]}}}', "expected an integer or a 'p/q' string"),
    ('{"lie_rinehart": {"L": {"algebra": "missing", "dim": 0, "bracket": [],'
     ' "anchor": [], "a_action": []}}}', "undefined algebra"),
    ('{"algebras": {"A": {"dim": 2, "basis": ["1", "x"], "unit": ["1", "0"],'
     ' "mul": [[["1", "0"]]]}}}', "mul"),
]


def test_malformed_documents_are_rejected_with_location():
    for text, needle in BAD_DOCUMENTS:
        with pytest.raises(WorkspaceError) as exc:
            parse_workspace(text)
        assert needle in str(exc.value), text


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text('{"algebras": 3}')
    code, out, err = run_cli(["validate", "--workspace", str(bad)], capsys)
    assert code == 2 and "input error" in err
    code, _, err = run_cli(["derivations", "--workspace", GOLDEN], capsys)
    assert code == 2 and "--name" in err
    code, _, err = run_cli(["derivations", "--name", "nosuch",
                            "--workspace", GOLDEN], capsys)
    assert code == 2
    code, _, err = run_cli(["validate", "--workspace",
                            str(tmp_path / "missing.json")], capsys)
    assert code == 2
    code, _, err = run_cli(["reconstruct", "--name", "F:free", "--section",
                            "weird", "--workspace", GOLDEN], capsys)
    assert code == 2


def test_empty_document_is_an_empty_workspace(capsys, tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    code, out, _ = run_cli(["validate", "--workspace", str(empty)], capsys)
    assert code == 0 and "checked = 0" in out
