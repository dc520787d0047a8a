"""Machine description text format and the bit-string encoding of machines.

Grammar (one directive per line, tokens separated by whitespace)::

    machine <name>
    input-alphabet <sym> ...
    work-alphabet <sym> ...
    output-alphabet <sym> ...
    states <state> ...
    start <state>
    halt <state> ...
    <state> <in> <work> <out> -> <state> <write-work> <write-out> <moves>

``_`` is the blank, ``<moves>`` is three letters from ``L S R`` (input, work,
output) and ``#`` starts a comment.  A token that has to contain ``#`` or
``\\`` escapes it with a backslash (``\\#``).  Directives other than the
header may appear in any order; rules may span the whole file.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import (BLANK, MachineDescription, Move, TransitionRule, ValidationReport,
                   rule, rule_order, validate)

MAGIC = "machine "

_DIRECTIVES = ("input-alphabet", "work-alphabet", "output-alphabet", "states", "start", "halt")


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class ParseErrors(ValueError):
    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("; ".join(map(str, errors)))


class ValidationErrors(ValueError):
    def __init__(self, report: ValidationReport, desc: MachineDescription):
        self.report = report
        self.description = desc
        super().__init__("; ".join(map(str, report.issues)))


def _tokenize(line: str) -> list[tuple[int, str]]:
    """Split one line into (column, token) pairs, honouring escapes and comments."""
    tokens: list[tuple[int, str]] = []
    buf: list[str] = []
    start = 0
    i = 0
    while i < len(line):
        ch = line[i]
        if ch == "\\" and i + 1 < len(line):
            if not buf:
                start = i
            buf.append(line[i + 1])
            i += 2
            continue
        if ch == "#":
            break
        if ch.isspace():
            if buf:
                tokens.append((start + 1, "".join(buf)))
                buf = []
        else:
            if not buf:
                start = i
            buf.append(ch)
        i += 1
    if buf:
        tokens.append((start + 1, "".join(buf)))
    return tokens


def _escape(token: str) -> str:
    return token.replace("\\", "\\\\").replace("#", "\\#")


def parse_description(text: str, *, check: bool = True) -> MachineDescription:
    """Parse description text.

    Raises :class:`ParseErrors` on malformed syntax and, when ``check`` is
    set, :class:`ValidationErrors` for a well-formed but invalid machine.
    """
    errors: list[ParseError] = []
    name = None
    fields: dict[str, list[str]] = {}
    rules: list[TransitionRule] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokenize(raw)
        if not toks:
            continue
        col, head = toks[0]
        words = [t for _, t in toks]
        if name is None:
            if head != "machine":
                errors.append(ParseError(lineno, col, "MissingHeader: expected 'machine <name>'"))
                break
            if len(words) != 2:
                errors.append(ParseError(lineno, col, "header takes exactly one name"))
                break
            name = words[1]
            continue
        if head == "machine":
            errors.append(ParseError(lineno, col, "duplicate header"))
        elif head in _DIRECTIVES:
            if head in fields:
                errors.append(ParseError(lineno, col, f"duplicate directive {head!r}"))
            elif head == "start" and len(words) != 2:
                errors.append(ParseError(lineno, col, "'start' takes exactly one state"))
            else:
                fields[head] = words[1:]
        elif len(words) == 9 and words[4] == "->":
            moves = words[8]
            if len(moves) != 3 or any(c not in "LSR" for c in moves):
                errors.append(ParseError(lineno, toks[8][0], f"bad moves {moves!r}: need three of L/S/R"))
                continue
            rules.append(rule(words[0], words[1:4], words[5], words[6:8], moves))
        else:
            errors.append(ParseError(lineno, col, f"unrecognized line starting with {head!r}"))
    if name is None and not errors:
        errors.append(ParseError(1, 1, "MissingHeader: empty description"))
    for d in _DIRECTIVES:
        if name is not None and d not in fields and not errors:
            errors.append(ParseError(len(text.splitlines()) or 1, 1, f"missing directive {d!r}"))
    if errors:
        raise ParseErrors(errors)
    desc = MachineDescription(
        name=name,
        input_alphabet=frozenset(fields["input-alphabet"]),
        work_alphabet=frozenset(fields["work-alphabet"]),
        output_alphabet=frozenset(fields["output-alphabet"]),
        states=frozenset(fields["states"]),
        start=fields["start"][0],
        halting=frozenset(fields["halt"]),
        rules=tuple(rules),
    )
    if check:
        report = validate(desc)
        if not report.ok:
            raise ValidationErrors(report, desc)
    return desc


def print_canonical(desc: MachineDescription) -> str:
    def syms(xs):
        return " ".join(_escape(x) for x in sorted(xs))

    lines = [
        f"machine {_escape(desc.name)}",
        f"input-alphabet {syms(desc.input_alphabet)}",
        f"work-alphabet {syms(desc.work_alphabet)}",
        f"output-alphabet {syms(desc.output_alphabet)}",
        f"states {syms(desc.states)}",
        f"start {_escape(desc.start)}",
        f"halt {syms(desc.halting)}".rstrip(),
    ]
    for r in sorted(desc.rules, key=rule_order):
        lines.append(" ".join(_escape(t) for t in (
            r.state, r.read_input, r.read_work, r.read_output, "->", r.next_state,
            r.write_work, r.write_output))
            + " " + r.move_input.letter + r.move_work.letter + r.move_output.letter)
    return "\n".join(lines) + "\n"


def canonical(desc: MachineDescription) -> MachineDescription:
    return parse_description(print_canonical(desc), check=False)


def encode(desc: MachineDescription) -> str:
    """Bits of the UTF-8 canonical text, most significant bit first."""
    data = print_canonical(desc).encode("utf-8")
    return "".join(format(b, "08b") for b in data)


D_LOOP = MachineDescription.build(
    "D_loop",
    input_alphabet={"0", "1"},
    work_alphabet=(),
    output_alphabet=(),
    start="run",
    halting=(),
    states={"run"},
    rules=[rule("run", (i, BLANK, BLANK), "run", (BLANK, BLANK), "SRS") for i in (BLANK, "0", "1")],
)
"""Decoding target for every bit string that is not a valid encoding: moves
its work head right forever and never touches the output tape."""


def decode(bits: str) -> MachineDescription:
    """Total inverse of :func:`encode`."""
    if not bits or len(bits) % 8 or any(b not in "01" for b in bits):
        return D_LOOP
    data = bytes(int(bits[i:i + 8], 2) for i in range(0, len(bits), 8))
    if not data.startswith(MAGIC.encode()):
        return D_LOOP
    try:
        return parse_description(data.decode("utf-8"))
    except (UnicodeDecodeError, ValueError):
        return D_LOOP


def load(path) -> MachineDescription:
    with open(path, encoding="utf-8") as fh:
        return parse_description(fh.read())


__all__ = ["parse_description", "print_canonical", "canonical", "encode", "decode", "D_LOOP",
           "ParseError", "ParseErrors", "ValidationErrors", "MAGIC", "load", "Move"]
