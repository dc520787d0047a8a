"""Deterministic small-step semantics for 3-tape Turing machines.

A machine has a read-only input tape, a two-way infinite work tape and an
output tape.  Input and output tapes are one-way infinite with cells
numbered from 1; the work tape is indexed by all integers.  Tapes are sparse
dicts: unmapped cells hold ``BLANK`` and blanks are never stored.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

BLANK = "_"

# A symbol spelled ``internal^shown`` is observed as ``shown``.  Generated
# machines use this to stamp bookkeeping marks onto output cells without
# changing what an observer reads off the tape.
DISPLAY_SEP = "^"


def displayed(symbol: str) -> str:
    """Observable value of a tape symbol."""
    if DISPLAY_SEP in symbol:
        return symbol.rsplit(DISPLAY_SEP, 1)[1]
    return symbol


class Move(enum.IntEnum):
    LEFT = -1
    STAY = 0
    RIGHT = 1

    @property
    def letter(self) -> str:
        return "LSR"[self.value + 1]

    @classmethod
    def parse(cls, letter: str) -> "Move":
        try:
            return {"L": cls.LEFT, "S": cls.STAY, "R": cls.RIGHT}[letter]
        except KeyError:
            raise ValueError(f"unknown move {letter!r}") from None


L, S, R = Move.LEFT, Move.STAY, Move.RIGHT


@dataclass(frozen=True, order=True)
class TransitionRule:
    state: str
    read_input: str
    read_work: str
    read_output: str
    next_state: str
    write_work: str
    write_output: str
    move_input: Move
    move_work: Move
    move_output: Move

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.state, self.read_input, self.read_work, self.read_output)

    @property
    def action(self) -> tuple:
        return (self.next_state, self.write_work, self.write_output,
                self.move_input, self.move_work, self.move_output)


def rule(state, read, nxt, write, moves) -> TransitionRule:
    """Compact constructor: ``rule('q', ('1', '_', '_'), 'q', ('_', '1'), 'RSR')``."""
    ri, rw, ro = read
    ww, wo = write
    mi, mw, mo = (Move.parse(c) for c in moves)
    return TransitionRule(state, ri, rw, ro, nxt, ww, wo, mi, mw, mo)


def rule_order(r: TransitionRule) -> tuple:
    # field order, as the dataclass ordering would compare, without its overhead
    return (r.state, r.read_input, r.read_work, r.read_output, r.next_state, r.write_work,
            r.write_output, r.move_input, r.move_work, r.move_output)


@dataclass(frozen=True)
class MachineDescription:
    name: str
    input_alphabet: frozenset[str]
    work_alphabet: frozenset[str]
    output_alphabet: frozenset[str]
    states: frozenset[str]
    start: str
    halting: frozenset[str]
    rules: tuple[TransitionRule, ...]

    def __post_init__(self):
        # Normalize so that equality is equality of canonical forms.
        for f in ("input_alphabet", "work_alphabet", "output_alphabet", "states", "halting"):
            object.__setattr__(self, f, frozenset(getattr(self, f)))
        object.__setattr__(self, "rules", tuple(sorted(self.rules, key=rule_order)))

    @classmethod
    def build(cls, name: str, *, input_alphabet: Iterable[str],
              work_alphabet: Iterable[str], output_alphabet: Iterable[str],
              states: Iterable[str] | None = None, start: str,
              halting: Iterable[str], rules: Iterable[TransitionRule]) -> "MachineDescription":
        """Convenience constructor.  Adds ``BLANK`` to every alphabet and,
        when ``states`` is omitted, collects states from the rules."""
        rules = tuple(set(rules))
        halting = frozenset(halting)
        if states is None:
            states = {start, *halting}
            for r in rules:
                states.update((r.state, r.next_state))
        return cls(
            name=name,
            input_alphabet=frozenset(input_alphabet) | {BLANK},
            work_alphabet=frozenset(work_alphabet) | {BLANK},
            output_alphabet=frozenset(output_alphabet) | {BLANK},
            states=frozenset(states),
            start=start,
            halting=halting,
            rules=rules,
        )

    def table(self) -> dict[tuple[str, str, str, str], tuple]:
        """Rule key -> action.  Assumes the description validates."""
        return {r.key: r.action for r in self.rules}


class IssueKind(enum.Enum):
    UNDECLARED_STATE = "UndeclaredState"
    UNDECLARED_SYMBOL = "UndeclaredSymbol"
    NONDETERMINISM = "NondeterminismViolation"
    RULE_ON_HALT_STATE = "RuleOnHaltState"
    MISSING_BLANK = "MissingBlank"
    BAD_START = "StartNotDeclared"
    BAD_HALT = "HaltNotDeclared"
    BAD_NAME = "InvalidName"


@dataclass(frozen=True)
class ValidationIssue:
    kind: IssueKind
    message: str

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> list[IssueKind]:
        return [i.kind for i in self.issues]

    def add(self, kind: IssueKind, message: str) -> None:
        self.issues.append(ValidationIssue(kind, message))


def validate(desc: MachineDescription) -> ValidationReport:
    report = ValidationReport()
    if not desc.name or any(c.isspace() for c in desc.name):
        report.add(IssueKind.BAD_NAME, f"machine name {desc.name!r} must be a non-empty token")
    for label, alphabet in (("input", desc.input_alphabet), ("work", desc.work_alphabet),
                            ("output", desc.output_alphabet)):
        if BLANK not in alphabet:
            report.add(IssueKind.MISSING_BLANK, f"{label} alphabet lacks blank {BLANK!r}")
    if desc.start not in desc.states:
        report.add(IssueKind.BAD_START, f"start state {desc.start!r} is not declared")
    for h in sorted(desc.halting - desc.states):
        report.add(IssueKind.BAD_HALT, f"halt state {h!r} is not declared")

    seen: dict[tuple, TransitionRule] = {}
    flagged: set[tuple] = set()
    for r in desc.rules:
        where = f"rule {format_rule(r)}"
        for s in (r.state, r.next_state):
            if s not in desc.states:
                report.add(IssueKind.UNDECLARED_STATE, f"{where}: state {s!r} is not declared")
        for sym, alphabet, label in ((r.read_input, desc.input_alphabet, "input"),
                                     (r.read_work, desc.work_alphabet, "work"),
                                     (r.write_work, desc.work_alphabet, "work"),
                                     (r.read_output, desc.output_alphabet, "output"),
                                     (r.write_output, desc.output_alphabet, "output")):
            if sym not in alphabet:
                report.add(IssueKind.UNDECLARED_SYMBOL,
                           f"{where}: symbol {sym!r} not in {label} alphabet")
        if r.state in desc.halting:
            report.add(IssueKind.RULE_ON_HALT_STATE, f"{where}: keyed on halt state {r.state!r}")
        prior = seen.setdefault(r.key, r)
        if prior is not r and prior != r and r.key not in flagged:
            flagged.add(r.key)
            report.add(IssueKind.NONDETERMINISM, f"two rules share key {' '.join(r.key)}")
    return report


def format_rule(r: TransitionRule) -> str:
    return (f"{r.state} {r.read_input} {r.read_work} {r.read_output} -> {r.next_state} "
            f"{r.write_work} {r.write_output} "
            f"{r.move_input.letter}{r.move_work.letter}{r.move_output.letter}")


class InvalidInputSymbol(ValueError):
    pass


@dataclass
class Configuration:
    state: str
    input_tape: dict[int, str]
    work_tape: dict[int, str]
    output_tape: dict[int, str]
    input_head: int = 1
    work_head: int = 1
    output_head: int = 1
    step_count: int = 0

    def copy(self) -> "Configuration":
        return Configuration(self.state, self.input_tape, dict(self.work_tape),
                             dict(self.output_tape), self.input_head, self.work_head,
                             self.output_head, self.step_count)

    def same_as(self, other: "Configuration") -> bool:
        """Equality of everything except the step counter."""
        return (self.state == other.state
                and self.input_head == other.input_head
                and self.work_head == other.work_head
                and self.output_head == other.output_head
                and self.work_tape == other.work_tape
                and self.output_tape == other.output_tape
                and self.input_tape == other.input_tape)

    def output_word(self) -> str:
        return tape_word(self.output_tape)


def tape_word(tape: Mapping[int, str], start: int = 1) -> str:
    """Displayed content from ``start`` to the last non-blank cell."""
    shown = {c: displayed(s) for c, s in tape.items() if c >= start}
    shown = {c: s for c, s in shown.items() if s != BLANK}
    if not shown:
        return ""
    return "".join(shown.get(c, BLANK) for c in range(start, max(shown) + 1))


def as_word(word: str | Sequence[str]) -> tuple[str, ...]:
    """Strings are split into one-character symbols; sequences are taken as-is."""
    return tuple(word)


def initial_configuration(desc: MachineDescription, word: str | Sequence[str] = "") -> Configuration:
    symbols = as_word(word)
    for pos, sym in enumerate(symbols, 1):
        if sym == BLANK or sym not in desc.input_alphabet:
            raise InvalidInputSymbol(f"input symbol {sym!r} at position {pos} "
                                     f"is not in the input alphabet of {desc.name}")
    tape = {i: s for i, s in enumerate(symbols, 1)}
    return Configuration(desc.start, tape, {}, {})


class Stuck(enum.Enum):
    MISSING_RULE = "MissingRule"
    BOUNDARY = "BoundaryViolation"


class Outcome(enum.Enum):
    STEPPED = "Stepped"
    HALTED = "Halted"
    STUCK_MISSING = "Stuck(MissingRule)"
    STUCK_BOUNDARY = "Stuck(BoundaryViolation)"

    @property
    def stuck(self) -> bool:
        return self in (Outcome.STUCK_MISSING, Outcome.STUCK_BOUNDARY)

    @property
    def final(self) -> bool:
        return self is not Outcome.STEPPED

    @property
    def reason(self) -> Stuck | None:
        return {Outcome.STUCK_MISSING: Stuck.MISSING_RULE,
                Outcome.STUCK_BOUNDARY: Stuck.BOUNDARY}.get(self)


def _write(tape: dict[int, str], cell: int, sym: str) -> None:
    if sym == BLANK:
        tape.pop(cell, None)
    else:
        tape[cell] = sym


def step(desc: MachineDescription, config: Configuration,
         table: Mapping | None = None) -> tuple[Configuration, Outcome]:
    """One transition.  Pure: ``config`` is never mutated.

    Pass a precomputed ``desc.table()`` as ``table`` when stepping in a loop.
    """
    if config.state in desc.halting:
        return config, Outcome.HALTED
    if table is None:
        table = desc.table()
    key = (config.state, config.input_tape.get(config.input_head, BLANK),
           config.work_tape.get(config.work_head, BLANK),
           config.output_tape.get(config.output_head, BLANK))
    action = table.get(key)
    if action is None:
        return config, Outcome.STUCK_MISSING
    nxt, ww, wo, mi, mw, mo = action
    if (mi < 0 and config.input_head == 1) or (mo < 0 and config.output_head == 1):
        return config, Outcome.STUCK_BOUNDARY
    new = config.copy()
    _write(new.work_tape, new.work_head, ww)
    _write(new.output_tape, new.output_head, wo)
    new.state = nxt
    new.input_head += mi
    new.work_head += mw
    new.output_head += mo
    new.step_count += 1
    return new, Outcome.STEPPED


def first_output_cell(config: Configuration, raw: bool = False) -> str:
    sym = config.output_tape.get(1, BLANK)
    return sym if raw else displayed(sym)
