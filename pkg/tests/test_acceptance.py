"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
from __future__ import annotations

import os
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

import _certwatch
from oracles import HAND, mpmath_pi_digits, summarize, twin_window_bits
from zeno import gallery
from zeno.codec import D_LOOP, canonical, decode, encode, print_canonical
from zeno.core import initial_configuration, step, validate
from zeno.diag import (ONE_CASE, ZERO_CASE, BoundedHaltingSolver, boundary_cell_one_sequence,
                       demonstrate_contradiction, restrict_to_zero, semantic_cell_one_sequence,
                       subclass_solver_demo, zeno_diagonalize_semantic, zeno_diagonalize_syntactic)
from zeno.digits import first_match_end, pi_digits
from zeno.engine import (CycleCertified, DivergesCertified, HaltedWithOutput, Halts, RunBudget,
                         TuringMachine, halting_oracle_small, run, words)
from zeno.limits import (ClassicallyHalted, FirstCellOscillates, HaltedAtOrdinal, LimitStabilized,
                         OrdinalBudgetExhausted, OrdinalClock, OutputStableCertified, Undetermined,
                         inductive_run, ittm_run, zeno_run)
from zeno.tmc import MacroMachine, corpus_halting_probe, probe_inputs
from zeno.tmc.corpus import run_digit_search, run_twin_prime, sieve

RESULTS: list[str] = []
GOLDEN = Path(__file__).parent / "golden"


def verdict(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_core_semantics_hand_oracles():
    t = time.perf_counter()
    pairs, wrong = 0, []
    for name, oracle in HAND.items():
        desc = gallery.load(name)
        tm = TuringMachine(desc)
        for w in words(sorted(desc.input_alphabet - {"_"}), 8):
            pairs += 1
            got = summarize(run(tm, w, RunBudget(2000, 2000)))
            if got != oracle(w):
                wrong.append((name, w, got, oracle(w)))
    dt = time.perf_counter() - t
    verdict(1, not wrong and len(HAND) == 20 and dt < 5,
            f"{pairs - len(wrong)}/{pairs} (machine, input) pairs over {len(HAND)} machines "
            f"match hand analysis in {dt:.2f}s (limit 5s); first mismatch {wrong[:1]}")


def test_criterion_02_codec_roundtrip_and_total_decode():
    t = time.perf_counter()
    rng = random.Random(2)
    bad_roundtrip = 0
    for k in range(100):
        m = gallery.random_machine(rng, name=f"m{k}")
        assert validate(m).ok
        back = decode(encode(m))
        if back != canonical(m) or print_canonical(back) != print_canonical(m):
            bad_roundtrip += 1
    bad_decode = 0
    for _ in range(1000):
        n = rng.choice([rng.randrange(0, 64), 8 * rng.randrange(1, 40)])
        bits = "".join(rng.choice("01") for _ in range(n))
        d = decode(bits)
        if not (d is D_LOOP or validate(d).ok):
            bad_decode += 1
    dt = time.perf_counter() - t
    verdict(2, bad_roundtrip == 0 and bad_decode == 0 and dt < 5,
            f"roundtrip failures {bad_roundtrip}/100, invalid decodes {bad_decode}/1000, {dt:.2f}s (limit 5s)")


@pytest.mark.suite_end
def test_criterion_03_certificate_soundness():
    # runs last: every certificate the session issued has been replayed by
    # tests/_certwatch.py with plain core.step configurations
    rng = random.Random(3)
    for _ in range(200):
        m = gallery.random_machine(rng, max_states=3, density=0.9)
        w = [rng.choice(sorted(m.input_alphabet - {"_"})) for _ in range(rng.randint(0, 4))]
        run(TuringMachine(m), w, RunBudget(5000, rng.choice([4, 64, 5000])))
    for k in range(100):
        y = gallery.random_solver(rng, name=f"solver{k}")
        w = "".join(rng.choice("01") for _ in range(rng.randint(0, 8)))
        cap = rng.choice([1, 3, 50, 5000])
        run(TuringMachine(y), w, RunBudget(5000, cap))
        zeno_run(zeno_diagonalize_semantic(y), w, RunBudget(5000, cap))
    n = _certwatch.checked()
    verdict(3, n > 0 and not _certwatch.FORGED,
            f"{n} certificates issued this session re-verified by replay, "
            f"{len(_certwatch.FORGED)} forged")


def test_criterion_04_zeno_semantics_and_budget_monotonicity():
    t = time.perf_counter()
    budgets = (10**4, 10**5, 10**6)
    verdicts = {}
    for name in ("flip", "write0-park-loop", "output-marcher", "write1-march", "work-marcher"):
        tm = TuringMachine(gallery.load(name))
        verdicts[name] = [zeno_run(tm, "", RunBudget(b, 10**5)) for b in budgets]
    ok = all(isinstance(v, FirstCellOscillates) for v in verdicts["flip"])
    ok &= all(isinstance(v, LimitStabilized) and v.bit == "0" for v in verdicts["write0-park-loop"])
    for name in ("output-marcher", "write1-march", "work-marcher"):
        ok &= all(isinstance(v, Undetermined) for v in verdicts[name])
    # a verdict certified at a smaller budget is reproduced at every larger one
    monotone = all(a == b for vs in verdicts.values() for a, b in zip(vs, vs[1:])
                   if not isinstance(a, Undetermined))
    dt = time.perf_counter() - t
    verdict(4, ok and monotone and dt < 10,
            f"flip oscillates, write0-park-loop stabilizes on 0, marchers undetermined at "
            f"1e4/1e5/1e6, monotone={monotone}, {dt:.2f}s (limit 10s)")


PROBE_CASES = [
    ("busy-beaver-2", ""), ("constant-0", "1"), ("constant-1", ""), ("copy", "101"),
    ("copy", ""), ("echo-first", "0"), ("halt-now", ""), ("increment", "11"),
    ("parity", "110"), ("reverse", "10"), ("zeros-only", "00"),
    ("bounce", ""), ("flip", "1"), ("looper", ""), ("scan-then-loop", "01"),
    ("write0-park-loop", ""), ("write1-park-loop", "0"), ("input-left", ""),
    ("output-left", "1"), ("zeros-only", "1"),
]


def test_criterion_05_inductive_and_halting_probe():
    t = time.perf_counter()
    ind = inductive_run(TuringMachine(gallery.load("write1-park-loop")), "", RunBudget(10**4, 10**4))
    ok = isinstance(ind, OutputStableCertified) and ind.word == "1"
    probe = MacroMachine(corpus_halting_probe(dovetail_forever=False))
    wrong = []
    halting = 0
    for name, w in PROBE_CASES:
        desc = gallery.load(name)
        o = halting_oracle_small(desc, w, RunBudget(10**4, 10**4))
        assert isinstance(o, (Halts, DivergesCertified)), (name, w, o)
        halts = isinstance(o, Halts)
        halting += halts
        v = zeno_run(probe, probe_inputs(desc, w), RunBudget(10**6, 10**5))
        says_one = v.bit == "1"
        if says_one != halts or (halts and not isinstance(v, ClassicallyHalted)):
            wrong.append((name, w, type(v).__name__, v.bit))
    ok &= not wrong and len(PROBE_CASES) == 20
    dt = time.perf_counter() - t
    verdict(5, ok, f"write-then-loop output stable certified; probe-halt bit 1 exactly on "
                   f"{halting}/20 halting cases at budget 1e6, disagreements {wrong}, {dt:.1f}s")


def _limsup_by_replay(desc, cert):
    table = desc.table()
    c = initial_configuration(desc, "")
    for _ in range(cert.mu):
        c, _ = step(desc, c, table)
    out: dict[int, str] = {}
    for _ in range(cert.lam):
        for cell, sym in c.output_tape.items():
            if sym == "1":
                out[cell] = "1"
        c, _ = step(desc, c, table)
    return out


def test_criterion_06_ittm_limit_stages():
    t = time.perf_counter()
    flip = gallery.load("flip")
    v = ittm_run(flip, "", limit_stages=1)
    ok = isinstance(v, OrdinalBudgetExhausted) and len(v.stages) == 1
    stage = v.stages[0]
    ok &= stage.output_tape.get(1) == "1" and stage.heads == (1, 1, 1) and stage.state == flip.start
    ok &= stage.output_tape == _limsup_by_replay(flip, stage.certificate)
    two = ittm_run(gallery.load("two-phase"), "", limit_stages=3)
    ok &= isinstance(two, HaltedAtOrdinal) and two.clock == OrdinalClock(1, 1) and str(two.clock) == "ω+1"
    dt = time.perf_counter() - t
    verdict(6, ok and dt < 5, f"flip stage omega: cell 1 = {stage.output_tape.get(1)}, heads "
                              f"{stage.heads}, state {stage.state}; two-phase halts at "
                              f"{getattr(two, 'clock', None)}; {dt:.2f}s (limit 5s)")


def test_criterion_07_semantic_and_syntactic_diagonalizers_agree():
    t = time.perf_counter()
    rng = random.Random(7)
    differ, hyper, encoded = [], 0, 0
    for k in range(10):
        y = gallery.random_solver(rng, name=f"solver{k}")
        w = "".join(rng.choice("01") for _ in range(rng.randint(0, 10)))
        x = zeno_diagonalize_syntactic(y)
        encoded += bool(encode(x)) and decode(encode(x)) == canonical(x)
        a = semantic_cell_one_sequence(zeno_diagonalize_semantic(y), w, 10**5)
        b = boundary_cell_one_sequence(x, w, 10**5)
        if a != b:
            differ.append(y.name)
        hyper += len(set(a[-4:])) == 2
    dt = time.perf_counter() - t
    verdict(7, not differ and encoded == 10 and dt < 60,
            f"10 solvers x 1e5 steps: sequences differ for {differ}, {hyper} end in eternal "
            f"flipping, {encoded}/10 diagonal machines encode and decode; {dt:.1f}s (limit 60s)")


def test_criterion_08_contradiction_for_bundled_solvers():
    t = time.perf_counter()
    expected = {"constant-0": ZERO_CASE, "constant-1": ONE_CASE, "halts-within-1000": ZERO_CASE}
    got = {}
    for solver in (gallery.load("constant-0"), gallery.load("constant-1"), BoundedHaltingSolver(1000)):
        r = demonstrate_contradiction(solver)
        got[r.solver] = (r.case, r.consistent)
    ok = all(got.get(name) == (case, False) for name, case in expected.items())
    dt = time.perf_counter() - t
    verdict(8, ok and dt < 60, f"(case, consistent) per solver {got}; {dt:.2f}s (limit 60s)")


def test_criterion_09_restrict_to_zero():
    t = time.perf_counter()
    rng = random.Random(9)
    budget = RunBudget(10**4, 10**4)
    counts = {"zero": 0, "one": 0, "other": 0}
    wrong = []
    for k in range(10):
        y = gallery.random_solver(rng, name=f"solver{k}")
        rz = TuringMachine(restrict_to_zero(y))
        inputs = sorted({"".join(rng.choice("01") for _ in range(rng.randint(0, 9))) for _ in range(200)})[:50]
        assert len(inputs) == 50
        for w in inputs:
            vy = run(TuringMachine(y), w, budget)
            vz = run(rz, w, budget)
            if isinstance(vy, HaltedWithOutput) and vy.cell_one == "0":
                counts["zero"] += 1
                good = isinstance(vz, HaltedWithOutput) and vz.cell_one == "0" and vz.output_head == 2
            elif isinstance(vy, HaltedWithOutput):
                counts["one" if vy.cell_one == "1" else "other"] += 1
                good = isinstance(vz, CycleCertified)
            else:
                counts["other"] += 1
                good = not isinstance(vz, HaltedWithOutput)
            if not good:
                wrong.append((y.name, w))
    dt = time.perf_counter() - t
    verdict(9, not wrong and counts["zero"] and counts["one"] and dt < 30,
            f"500 (solver, input) pairs {counts}, violations {wrong[:3]}; {dt:.2f}s (limit 30s)")


def test_criterion_10_corpus_programs_match_oracles():
    t = time.perf_counter()
    windows = (10**4 - 100 - 1) // 100 + 1          # every i = 1 + 100k with i + 100 <= 10^4
    tp = run_twin_prime(max_steps=10**7, windows=windows)
    oracle = twin_window_bits(windows)
    flags = sieve(10**4 + 2)
    by_sieve = "".join("1" if any(flags[n] and flags[n + 2] for n in range(i, i + 101)) else "0"
                       for i in range(1, 10**4 - 99, 100))
    ok = tp["bits"] == oracle == by_sieve and len(oracle) == windows
    count = 2500
    digits = mpmath_pi_digits(count)
    ok &= pi_digits(count) == digits
    want = first_match_end(digits, "777")
    ds = run_digit_search("777", digits, RunBudget(10**7, 10**5))
    ok &= isinstance(ds["verdict"], ClassicallyHalted) and ds["verdict"].bit == "1" and ds["position"] == want
    dt = time.perf_counter() - t
    verdict(10, ok and dt < 120,
            f"twin-prime bits match trial-division and sieve oracles on {windows} windows; "
            f"digit-search 777 halts at {ds['position']} (oracle {want}) over {count} digits; "
            f"{dt:.1f}s (limit 120s)")


def test_criterion_11_subclass_demo():
    description, solver, report = subclass_solver_demo()
    ok = report.verified and not report.mismatches and len(report.checks) > 0
    verdict(11, ok, f"{solver.name} on '{description}' {report.family}: {len(report.checks)} "
                    f"checks, {len(report.mismatches)} mismatches")


SCRIPT = [
    ["validate", "@copy"],
    ["run", "@increment", "--input", "1011", "--trace", "{dir}/increment.jsonl"],
    ["zeno", "@flip", "--max-steps", "1000", "--trace", "{dir}/flip.jsonl"],
    ["zeno", "@write0-park-loop"],
    ["inductive", "@write1-park-loop"],
    ["ittm", "@two-phase", "--limit-stages", "2"],
    ["contradict", "@constant-1"],
    ["corpus", "run", "twin-prime", "--windows", "20"],
    ["corpus", "run", "digit-search", "--count", "2000"],
    ["interpret", "@prime-check", "--trace", "{dir}/prime-check.jsonl"],
]


def _run_script(directory: Path) -> bytes:
    chunks = []
    for cmd in SCRIPT:
        args = [a.format(dir=directory) for a in cmd]
        r = subprocess.run([sys.executable, "-m", "zeno", *args], capture_output=True,
                           env={**os.environ, "PYTHONHASHSEED": "random"})
        chunks.append(f"$ zeno {' '.join(cmd)}\n[exit {r.returncode}]\n".encode() + r.stdout)
    for trace in sorted(directory.glob("*.jsonl")):
        chunks.append(f"--- {trace.name}\n".encode() + trace.read_bytes())
    return b"".join(chunks)


def test_criterion_12_cli_golden_script(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    first.mkdir()
    second.mkdir()
    out1, out2 = _run_script(first), _run_script(second)
    golden = GOLDEN / "script.out"
    if os.environ.get("ZENO_REGEN_GOLDEN"):
        golden.write_bytes(out1)
    ok = out1 == out2 and out1 == golden.read_bytes() and b"[exit 0]" in out1
    verdict(12, ok, f"10-command script: runs identical={out1 == out2}, "
                    f"matches checked-in golden={out1 == golden.read_bytes()}, {len(out1)} bytes")
