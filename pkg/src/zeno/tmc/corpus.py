"""Bundled corpus programs and their runners."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..codec import encode
from ..core import MachineDescription
from ..engine import RunBudget
from ..limits import ClassicallyHalted, zeno_run
from .interp import MacroMachine, tag_samples
from .ir import (TRUE, AddConst, BoundedSimulate, Cond, Copy, DoWhile, Halt, If, IsPrime,
                 ParkOutput, Program, Read, Set, Skip, While, WriteCellOne, bits_to_int)

DIGITS = tuple("0123456789")
TWIN_WINDOW = 100


def corpus_halting_probe(dovetail_forever: bool = True) -> Program:
    """Dovetail: run machine ``m`` on ``n`` for i = 1, 2, 3, ... steps and
    write 1 on cell 1 once it has halted.  With ``dovetail_forever`` the loop
    never stops; otherwise it halts right after writing 1."""
    found = (WriteCellOne("1"),) if dovetail_forever else (WriteCellOne("1"), Halt())
    body = (
        WriteCellOne("0"),
        ParkOutput(),
        Set("i", 1),
        DoWhile((BoundedSimulate("h", "m", "n", "i"),
                 If(Cond("h", "==", 1), found),
                 AddConst("i", 1)),
                Cond("i", ">", 0), tag="round"),
    )
    name = "halting-probe" if dovetail_forever else "probe-halt"
    return Program(name, ("m", "n", "i", "h"), body, inputs=("m", "n"))


def probe_inputs(machine: MachineDescription, word: str) -> dict[str, int]:
    """Register values for running the probe on ``machine`` and ``word``
    (a word over the symbols '0' and '1')."""
    if set(word) - {"0", "1"}:
        raise ValueError("probe words are bit strings")
    return {"m": bits_to_int(encode(machine)), "n": bits_to_int(word)}


def corpus_twin_prime() -> Program:
    """Window by window from i = 1: write 0, look for a twin pair (n, n+2)
    with i <= n <= i+100, write 1 if one was found, move on by 100."""
    body = (
        Set("i", 1),
        DoWhile((
            WriteCellOne("0"),
            Set("found", 0),
            Copy("n", "i"),
            Copy("top", "i"),
            AddConst("top", TWIN_WINDOW),
            While(Cond("n", "<=", "top"), (
                IsPrime("p", "n"),
                If(Cond("p", "==", 1), (
                    Copy("q", "n"),
                    AddConst("q", 2),
                    IsPrime("q", "q"),
                    If(Cond("q", "==", 1), (Set("found", 1),)),
                )),
                AddConst("n", 1),
            )),
            If(Cond("found", "==", 1), (WriteCellOne("1"),)),
            AddConst("i", TWIN_WINDOW),
        ), Cond("i", ">", 0), tag="round"),
    )
    return Program("twin-prime", ("i", "n", "top", "p", "q", "found"), body)


def _kmp_table(pattern: str) -> list[dict[str, int]]:
    """Matcher state after reading each digit from each state."""
    fail = [0] * (len(pattern) + 1)
    k = 0
    for i in range(1, len(pattern)):
        while k and pattern[i] != pattern[k]:
            k = fail[k]
        if pattern[i] == pattern[k]:
            k += 1
        fail[i + 1] = k
    table = []
    for s in range(len(pattern)):
        row = {}
        for d in DIGITS:
            k = s
            while k and pattern[k] != d:
                k = fail[k]
            row[d] = k + 1 if pattern[k] == d else 0
        table.append(row)
    return table


def _chain(tests: list[tuple[Cond, tuple]], default: tuple) -> tuple:
    """if/else-if chain."""
    out = default
    for cond, then in reversed(tests):
        out = (If(cond, then, out),)
    return out


def corpus_digit_search(pattern: str = "777") -> Program:
    """Scan the input digit stream; write 1 and halt at the end of the first
    occurrence of ``pattern``.  Register ``pos`` counts digits read.  When
    the stream runs out, loop in place with cell 1 showing 0."""
    if not pattern or not pattern.isdigit():
        raise ValueError("pattern must be a non-empty digit string")
    code = {d: k + 1 for k, d in enumerate(DIGITS)}
    rows = []
    for s, row in enumerate(_kmp_table(pattern)):
        moves = [(Cond("d", "==", code[d]), (Set("s", nxt),)) for d, nxt in sorted(row.items()) if nxt]
        rows.append((Cond("s", "==", s), _chain(moves, (Set("s", 0),))))
    body = (
        WriteCellOne("0"),
        ParkOutput(),
        DoWhile((
            Read("d"),
            If(Cond("d", "==", 0), (While(TRUE, (Skip(),)),)),
            AddConst("pos", 1),
            *_chain(rows, ()),
            If(Cond("s", "==", len(pattern)), (WriteCellOne("1"), Halt())),
        ), TRUE, tag="scan"),
    )
    return Program(f"digit-search-{pattern}", ("d", "s", "pos"), body, DIGITS)


# --------------------------------------------------------------------------
# runners used by the command line

def sieve(limit: int) -> bytearray:
    flags = bytearray([1]) * (limit + 1)
    flags[:2] = b"\x00\x00"
    for k in range(2, int(limit ** 0.5) + 1):
        if flags[k]:
            flags[k * k::k] = bytearray(len(flags[k * k::k]))
    return flags


def run_twin_prime(max_steps: int = 5_000_000, windows: int | None = None) -> dict:
    """Iteration bits of the twin-prime program, read at each return to the
    loop head, until ``windows`` iterations or ``max_steps`` macro steps."""
    m = MacroMachine(corpus_twin_prime())
    want = windows + 1 if windows is not None else 10**9
    samples = tag_samples(m, "", "round", want, max_steps)
    bits = "".join(samples[1:])
    return {"iterations": len(bits), "bits": bits, "ones": bits.count("1"),
            "zeros": bits.count("0"), "cell_one_changes": sum(a != b for a, b in zip(bits, bits[1:]))}


def run_digit_search(pattern: str, stream: str, budget: RunBudget = RunBudget(10**7)) -> dict:
    m = MacroMachine(corpus_digit_search(pattern))
    verdict = zeno_run(m, stream, budget)
    p = m.start(stream)
    position = None
    if isinstance(verdict, ClassicallyHalted):
        while not p.halted:
            p.advance()
        position = p.register_values()["pos"]
    return {"pattern": pattern, "digits": len(stream), "verdict": verdict, "position": position}


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    summary: str
    build: Callable[..., Program] | None


ENTRIES = {
    "halting-probe": CorpusEntry("halting-probe", "dovetailing probe; writes 1 when m halts on n, never stops",
                                 lambda: corpus_halting_probe(True)),
    "probe-halt": CorpusEntry("probe-halt", "dovetailing probe that halts after writing 1",
                              lambda: corpus_halting_probe(False)),
    "twin-prime": CorpusEntry("twin-prime", "twin-pair search over windows of width 100",
                              corpus_twin_prime),
    "digit-search": CorpusEntry("digit-search", "scan a digit stream for a pattern",
                                corpus_digit_search),
    "subclass-demo": CorpusEntry("subclass-demo", "constant-1 decides halting on an always-halting family",
                                 None),
}


__all__ = ["corpus_halting_probe", "corpus_twin_prime", "corpus_digit_search", "probe_inputs",
           "run_twin_prime", "run_digit_search", "sieve", "ENTRIES", "CorpusEntry"]
