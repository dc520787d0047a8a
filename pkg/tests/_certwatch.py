"""Independent re-verification of every cycle certificate the suite issues.

Syntactic runs are replayed with ``core.step`` on plain configurations; the
engine's own process objects are not used.  Other machine kinds (macro
programs, diagonal wrappers) are replayed through fresh process copies.
"""
from __future__ import annotations

from collections import Counter

from zeno.core import displayed, step, tape_word
from zeno.engine import TMProcess

TALLY: Counter = Counter()
FORGED: list[str] = []


def _observed(config) -> tuple[str, int, str]:
    shown = {c: displayed(s) for c, s in config.output_tape.items()}
    return displayed(config.output_tape.get(1, "_")), config.output_head, tape_word(shown)


def _replay_syntactic(origin: TMProcess, cert) -> str | None:
    desc = origin.machine.desc
    table = desc.table()
    c = origin.config.copy()
    for _ in range(cert.mu):
        c, _ = step(desc, c, table)
    anchor = c
    cells, heads, words = [], [], []
    for _ in range(cert.lam):
        cell, head, word = _observed(c)
        cells.append(cell)
        heads.append(head)
        words.append(word)
        c, _ = step(desc, c, table)
    if not c.same_as(anchor):
        return "configuration at mu+lam differs from configuration at mu"
    if tuple(cells) != cert.cell_one_values:
        return f"cell-one values {cells} != {cert.cell_one_values}"
    if tuple(heads) != cert.output_head_positions:
        return f"output head positions {heads} != {cert.output_head_positions}"
    if (len(set(words)) == 1) != cert.output_constant:
        return "output constancy flag disagrees with replay"
    return None


def _replay_generic(origin, cert) -> str | None:
    p = origin.copy()
    for _ in range(cert.mu):
        p.advance()
    anchor = p.copy()
    cells, heads = [], []
    for _ in range(cert.lam):
        cells.append(p.cell_one)
        heads.append(p.output_head)
        p.advance()
    if not p.same(anchor):
        return "configuration at mu+lam differs from configuration at mu"
    if tuple(cells) != cert.cell_one_values or tuple(heads) != cert.output_head_positions:
        return "observables over the period disagree with replay"
    return None


def check(origin, cert) -> None:
    if isinstance(origin, TMProcess):
        problem = _replay_syntactic(origin, cert)
        TALLY["syntactic"] += 1
    else:
        problem = _replay_generic(origin, cert)
        TALLY[type(origin).__name__] += 1
    if problem:
        FORGED.append(f"{type(origin).__name__} mu={cert.mu} lam={cert.lam}: {problem}")
        raise AssertionError(f"forged certificate: {FORGED[-1]}")


def checked() -> int:
    return sum(TALLY.values())
