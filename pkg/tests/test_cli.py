import json

import pytest

from zeno.cli import count, main
from zeno.gallery import text


def call(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def record(out):
    return json.loads(out.splitlines()[0])


def test_counts():
    assert count("5e6") == 5_000_000 and count("12") == 12
    for bad in ("0", "-3", "1.5", "x"):
        with pytest.raises(Exception):
            count(bad)


def test_run_and_zeno(capsys):
    status, out, _ = call(capsys, "run", "@increment", "--input", "0111")
    assert status == 0
    assert record(out)["verdict"] == "HaltedWithOutput" and record(out)["output"] == "1000"
    status, out, _ = call(capsys, "zeno", "@flip")
    assert status == 0 and record(out)["verdict"] == "FirstCellOscillates"
    status, out, _ = call(capsys, "zeno", "@output-marcher", "--max-steps", "1e3")
    assert record(out)["verdict"] == "Undetermined"


def test_trace_file(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    status, out, _ = call(capsys, "run", "@copy", "--input", "01", "--trace", str(trace),
                          "--sample-every", "1", "--radius", "1")
    lines = [json.loads(l) for l in trace.read_text().splitlines()]
    assert status == 0 and record(out)["verdict"] == "HaltedWithOutput"
    assert [r["step"] for r in lines] == [0, 1, 2, 3]
    assert lines[-1]["state"] == "done" and lines[-1]["heads"] == [3, 1, 3]


def test_machine_files(capsys, tmp_path):
    path = tmp_path / "m.tm"
    path.write_text(text("parity"))
    status, out, _ = call(capsys, "validate", str(path))
    assert status == 0 and record(out)["ok"]
    path.write_text(text("parity").replace("start even", "start nowhere"))
    status, out, _ = call(capsys, "validate", str(path))
    assert status == 2 and record(out)["issues"][0]["kind"] == "BAD_START"
    path.write_text("garbage\n")
    status, _, err = call(capsys, "run", str(path))
    assert status == 1 and "1:1" in err


@pytest.mark.parametrize("argv, status", [
    ([], 1),
    (["run"], 1),
    (["run", "@no-such-machine"], 1),
    (["run", "@copy", "--input", "012"], 1),
    (["run", "@copy", "--max-steps", "0"], 1),
    (["ittm", "@parity"], 2),
    (["corpus", "run", "nope"], 1),
    (["corpus", "run"], 1),
    (["corpus", "run", "digit-search", "--digits", "/no/such/file"], 1),
    (["compile", "@no-such-program"], 1),
])
def test_exit_statuses(capsys, argv, status):
    assert call(capsys, *argv)[0] == status


def test_diagonalize_writes_a_machine(capsys, tmp_path):
    out_path = tmp_path / "x.tm"
    status, _, _ = call(capsys, "diagonalize", "@constant-1", "-o", str(out_path))
    assert status == 0
    status, out, _ = call(capsys, "zeno", str(out_path), "--input", "01")
    assert status == 0 and record(out)["verdict"] == "FirstCellOscillates"


def test_contradict(capsys):
    status, out, _ = call(capsys, "contradict", "--bounded", "100")
    r = record(out)
    assert status == 0 and r["case"] == "ZeroCase" and r["consistent"] is False


def test_corpus_and_programs(capsys, tmp_path):
    status, out, _ = call(capsys, "corpus", "list")
    assert status == 0 and "twin-prime" in out
    status, out, _ = call(capsys, "corpus", "run", "twin-prime", "--windows", "10")
    assert record(out)["sieve_agrees"] is True
    digits = tmp_path / "pi.txt"
    assert call(capsys, "digits", "2000", "-o", str(digits))[0] == 0
    status, out, _ = call(capsys, "corpus", "run", "digit-search", "--digits", str(digits))
    assert status == 0 and record(out)["position"] == 1592
    status, out, _ = call(capsys, "interpret", "@counter")
    assert record(out)["registers"] == {"i": 10}
    status, out, _ = call(capsys, "compile", "@write-one")
    assert status == 0 and out.startswith("machine write-one\n")


def test_ittm(capsys):
    status, out, _ = call(capsys, "ittm", "@two-phase", "--limit-stages", "2")
    assert status == 0 and record(out)["clock"] == "ω+1"
