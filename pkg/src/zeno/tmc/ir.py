"""Program IR: non-negative integer registers, structured control flow and
output primitives.  All nodes are immutable."""
from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Iterator, Union

OPS = {"==": operator.eq, "!=": operator.ne, "<": operator.lt,
       "<=": operator.le, ">": operator.gt, ">=": operator.ge}


@dataclass(frozen=True)
class Cond:
    """``left op right`` where ``right`` is a register name or a constant.
    ``Cond()`` is the constant ``true``."""
    left: str | None = None
    op: str = "=="
    right: str | int = 0

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown comparison {self.op!r}")

    @property
    def always(self) -> bool:
        return self.left is None

    def evaluate(self, regs) -> bool:
        if self.left is None:
            return True
        rhs = regs[self.right] if isinstance(self.right, str) else self.right
        return OPS[self.op](regs[self.left], rhs)

    def registers(self) -> set[str]:
        out = set()
        if self.left is not None:
            out.add(self.left)
        if isinstance(self.right, str):
            out.add(self.right)
        return out


TRUE = Cond()


@dataclass(frozen=True)
class Set:
    reg: str
    value: int


@dataclass(frozen=True)
class AddConst:
    reg: str
    value: int


@dataclass(frozen=True)
class SubConst:
    """Saturating at 0."""
    reg: str
    value: int


@dataclass(frozen=True)
class Copy:
    dst: str
    src: str


@dataclass(frozen=True)
class AddReg:
    dst: str
    src: str


@dataclass(frozen=True)
class SubReg:
    """Saturating at 0."""
    dst: str
    src: str


@dataclass(frozen=True)
class IsPrime:
    dst: str
    src: str


@dataclass(frozen=True)
class BoundedSimulate:
    """``dst <- 1`` if the machine coded by register ``machine`` halts on the
    word coded by register ``word`` within ``steps`` steps, else 0.  Registers
    hold bit strings through :func:`int_to_bits`."""
    dst: str
    machine: str
    word: str
    steps: str


@dataclass(frozen=True)
class Read:
    """Read the input symbol under the head and move right.  The code is 1 +
    its index in the declared input alphabet; blank reads as 0."""
    dst: str


@dataclass(frozen=True)
class WriteCellOne:
    symbol: str


@dataclass(frozen=True)
class AdvanceOutput:
    pass


@dataclass(frozen=True)
class ParkOutput:
    """Move the output head to cell 2."""


@dataclass(frozen=True)
class Halt:
    pass


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class If:
    cond: Cond
    then: tuple = ()
    orelse: tuple = ()


@dataclass(frozen=True)
class While:
    cond: Cond
    body: tuple = ()
    tag: str | None = None


@dataclass(frozen=True)
class DoWhile:
    body: tuple
    cond: Cond
    tag: str | None = None


Simple = Union[Set, AddConst, SubConst, Copy, AddReg, SubReg, IsPrime, BoundedSimulate, Read,
               WriteCellOne, AdvanceOutput, ParkOutput, Halt, Skip]
Stmt = Union[Simple, If, While, DoWhile]
SIMPLE_TYPES = (Set, AddConst, SubConst, Copy, AddReg, SubReg, IsPrime, BoundedSimulate, Read,
                WriteCellOne, AdvanceOutput, ParkOutput, Halt, Skip)


class UnclosedProgram(ValueError):
    pass


@dataclass(frozen=True)
class Program:
    name: str
    registers: tuple[str, ...]
    body: tuple
    input_alphabet: tuple[str, ...] = ()
    inputs: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "registers", tuple(self.registers))
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        missing = used_registers(self.body) - set(self.registers)
        missing |= set(self.inputs) - set(self.registers)
        if missing:
            raise UnclosedProgram(f"undeclared registers: {sorted(missing)}")


def stmt_registers(s) -> set[str]:
    if isinstance(s, (Set, AddConst, SubConst, Read)):
        return {s.reg} if not isinstance(s, Read) else {s.dst}
    if isinstance(s, (Copy, AddReg, SubReg, IsPrime)):
        return {s.dst, s.src}
    if isinstance(s, BoundedSimulate):
        return {s.dst, s.machine, s.word, s.steps}
    if isinstance(s, If):
        return s.cond.registers() | used_registers(s.then) | used_registers(s.orelse)
    if isinstance(s, (While, DoWhile)):
        return s.cond.registers() | used_registers(s.body)
    return set()


def used_registers(body) -> set[str]:
    out: set[str] = set()
    for s in body:
        out |= stmt_registers(s)
    return out


def walk(body) -> Iterator:
    """All statements in pre-order."""
    for s in body:
        yield s
        if isinstance(s, If):
            yield from walk(s.then)
            yield from walk(s.orelse)
        elif isinstance(s, (While, DoWhile)):
            yield from walk(s.body)


def bits_to_int(bits: str) -> int:
    """Bit string -> register value, bijectively: ``int('1' + bits, 2)``."""
    return int("1" + bits, 2)


def int_to_bits(value: int) -> str:
    """Inverse of :func:`bits_to_int`; 0 also decodes to the empty string."""
    return bin(value)[3:] if value > 0 else ""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True
