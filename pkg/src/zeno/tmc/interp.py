"""Executing programs: a macro-step machine and a reference interpreter.

:class:`MacroMachine` flattens a program into jump code and executes one
instruction per step; it plugs into every semantics in :mod:`zeno.limits`.
:func:`reference_interpret` walks the syntax tree directly and is kept free
of the flattening so that it can serve as an oracle for both the macro
machine and the compiler.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..core import BLANK, InvalidInputSymbol, Outcome, displayed, tape_word
from ..engine import Halted, IncrementalSimulation, Process, SteppableMachine
from .ir import (AddConst, AddReg, AdvanceOutput, BoundedSimulate, Cond, Copy, DoWhile, Halt,
                 If, IsPrime, ParkOutput, Program, Read, Set, Skip, SubConst, SubReg, While,
                 WriteCellOne, int_to_bits, is_prime)
from .irtext import _cond_text, _simple_text

# opcodes of the flattened form
(OP_SET, OP_ADDC, OP_SUBC, OP_COPY, OP_ADDR, OP_SUBR, OP_PRIME, OP_SIM, OP_READ, OP_WRITE,
 OP_ADVANCE, OP_PARK, OP_HALT, OP_SKIP, OP_JUMP, OP_TEST_FALSE, OP_TEST_TRUE) = range(17)

HALT_PC = -1


@dataclass(frozen=True)
class Instruction:
    op: int
    args: tuple
    source: object          # the statement or condition this came from


def flatten(p: Program) -> tuple[list[Instruction], dict[str, int]]:
    """Jump code for ``p`` and the loop-head address of every tag."""
    code: list[Instruction] = []
    tags: dict[str, int] = {}
    ridx = {r: k for k, r in enumerate(p.registers)}

    def cond_args(c: Cond):
        if c.always:
            return (None, c.op, 0, False)
        rhs = c.right
        return (ridx[c.left], c.op, ridx[rhs] if isinstance(rhs, str) else rhs, isinstance(rhs, str))

    def emit(op, args, source) -> int:
        code.append(Instruction(op, args, source))
        return len(code) - 1

    def patch(at: int, target: int) -> None:
        ins = code[at]
        code[at] = Instruction(ins.op, ins.args[:-1] + (target,), ins.source)

    def block(body):
        for s in body:
            if isinstance(s, If):
                t = emit(OP_TEST_FALSE, cond_args(s.cond) + (None,), s.cond)
                block(s.then)
                if s.orelse:
                    j = emit(OP_JUMP, (None,), None)
                    patch(t, len(code))
                    block(s.orelse)
                    patch(j, len(code))
                else:
                    patch(t, len(code))
            elif isinstance(s, While):
                head = len(code)
                if s.tag:
                    tags[s.tag] = head
                t = emit(OP_TEST_FALSE, cond_args(s.cond) + (None,), s.cond)
                block(s.body)
                emit(OP_JUMP, (head,), None)
                patch(t, len(code))
            elif isinstance(s, DoWhile):
                top = len(code)
                if s.tag:
                    tags[s.tag] = top
                block(s.body)
                emit(OP_TEST_TRUE, cond_args(s.cond) + (top,), s.cond)
            elif isinstance(s, Set):
                emit(OP_SET, (ridx[s.reg], s.value), s)
            elif isinstance(s, AddConst):
                emit(OP_ADDC, (ridx[s.reg], s.value), s)
            elif isinstance(s, SubConst):
                emit(OP_SUBC, (ridx[s.reg], s.value), s)
            elif isinstance(s, Copy):
                emit(OP_COPY, (ridx[s.dst], ridx[s.src]), s)
            elif isinstance(s, AddReg):
                emit(OP_ADDR, (ridx[s.dst], ridx[s.src]), s)
            elif isinstance(s, SubReg):
                emit(OP_SUBR, (ridx[s.dst], ridx[s.src]), s)
            elif isinstance(s, IsPrime):
                emit(OP_PRIME, (ridx[s.dst], ridx[s.src]), s)
            elif isinstance(s, BoundedSimulate):
                emit(OP_SIM, (ridx[s.dst], ridx[s.machine], ridx[s.word], ridx[s.steps]), s)
            elif isinstance(s, Read):
                emit(OP_READ, (ridx[s.dst],), s)
            elif isinstance(s, WriteCellOne):
                emit(OP_WRITE, (s.symbol,), s)
            elif isinstance(s, AdvanceOutput):
                emit(OP_ADVANCE, (), s)
            elif isinstance(s, ParkOutput):
                emit(OP_PARK, (), s)
            elif isinstance(s, Halt):
                emit(OP_HALT, (), s)
            elif isinstance(s, Skip):
                emit(OP_SKIP, (), s)
            else:
                raise TypeError(f"not a statement: {s!r}")

    block(p.body)
    return code, tags


_CMP = {"==": lambda a, b: a == b, "!=": lambda a, b: a != b, "<": lambda a, b: a < b,
        "<=": lambda a, b: a <= b, ">": lambda a, b: a > b, ">=": lambda a, b: a >= b}


def _holds(regs, left, op, right, right_is_reg) -> bool:
    if left is None:
        return True
    return _CMP[op](regs[left], regs[right] if right_is_reg else right)


class _SimulationCache:
    """Memo for the bounded-simulation primitive.  Its answers are a pure
    function of (machine, word, steps), so sharing it between copies of a
    process cannot change behavior."""

    def __init__(self):
        self.table: dict[tuple[int, int], IncrementalSimulation] = {}

    def halted_within(self, m_value: int, n_value: int, steps: int) -> bool:
        if steps <= 0:
            return False
        sim = self.table.get((m_value, n_value))
        if sim is None:
            sim = IncrementalSimulation(int_to_bits(m_value), int_to_bits(n_value))
            self.table[(m_value, n_value)] = sim
        return isinstance(sim.query(steps), Halted)


class MacroProcess(Process):
    __slots__ = ("machine", "pc", "regs", "out", "oh", "inp", "ih", "ohash", "steps",
                 "last_output_change", "last_cell_one_change")

    def __init__(self, machine: "MacroMachine", inp: tuple, regs: list[int]):
        self.machine = machine
        self.pc = 0 if machine.code else HALT_PC
        self.regs = regs
        self.out: dict[int, str] = {}
        self.oh = 1
        self.inp = inp
        self.ih = 1
        self.ohash = 0
        self.steps = 0
        self.last_output_change = 0
        self.last_cell_one_change = 0

    def _set_cell(self, cell: int, sym: str) -> None:
        old = self.out.get(cell, BLANK)
        if old == sym:
            return
        if old != BLANK:
            self.ohash ^= hash((cell, old))
            del self.out[cell]
        if sym != BLANK:
            self.ohash ^= hash((cell, sym))
            self.out[cell] = sym
        if displayed(old) != displayed(sym):
            self.last_output_change = self.steps + 1
            if cell == 1:
                self.last_cell_one_change = self.steps + 1

    def advance(self) -> Outcome:
        pc = self.pc
        if pc == HALT_PC:
            return Outcome.HALTED
        m = self.machine
        ins = m.code[pc]
        op, a = ins.op, ins.args
        regs = self.regs
        nxt = pc + 1
        if op == OP_TEST_FALSE:
            if not _holds(regs, *a[:4]):
                nxt = a[4]
        elif op == OP_TEST_TRUE:
            if _holds(regs, *a[:4]):
                nxt = a[4]
        elif op == OP_JUMP:
            nxt = a[0]
        elif op == OP_ADDC:
            regs[a[0]] += a[1]
        elif op == OP_SUBC:
            regs[a[0]] = max(regs[a[0]] - a[1], 0)
        elif op == OP_SET:
            regs[a[0]] = a[1]
        elif op == OP_PRIME:
            regs[a[0]] = 1 if is_prime(regs[a[1]]) else 0
        elif op == OP_COPY:
            regs[a[0]] = regs[a[1]]
        elif op == OP_ADDR:
            regs[a[0]] += regs[a[1]]
        elif op == OP_SUBR:
            regs[a[0]] = max(regs[a[0]] - regs[a[1]], 0)
        elif op == OP_SIM:
            halted = m.sims.halted_within(regs[a[1]], regs[a[2]], regs[a[3]])
            regs[a[0]] = 1 if halted else 0
        elif op == OP_READ:
            sym = self.inp[self.ih - 1] if self.ih <= len(self.inp) else BLANK
            regs[a[0]] = 0 if sym == BLANK else m.symbol_code[sym]
            self.ih += 1
        elif op == OP_WRITE:
            self._set_cell(1, a[0])
        elif op == OP_ADVANCE:
            self.oh += 1
        elif op == OP_PARK:
            self.oh = 2
        elif op == OP_HALT:
            nxt = HALT_PC
        if nxt == len(m.code):
            nxt = HALT_PC
        self.pc = nxt
        self.steps += 1
        return Outcome.STEPPED

    @property
    def halted(self) -> bool:
        return self.pc == HALT_PC

    def fingerprint(self):
        return (self.pc, tuple(self.regs), self.ohash, self.oh, self.ih)

    def same(self, other: "MacroProcess") -> bool:
        return (self.pc == other.pc and self.regs == other.regs and self.out == other.out
                and self.oh == other.oh and self.ih == other.ih and self.inp == other.inp)

    def copy(self) -> "MacroProcess":
        p = MacroProcess.__new__(MacroProcess)
        for k in MacroProcess.__slots__:
            setattr(p, k, getattr(self, k))
        p.regs = list(self.regs)
        p.out = dict(self.out)
        return p

    @property
    def cell_one(self) -> str:
        return displayed(self.out.get(1, BLANK))

    @property
    def output_head(self) -> int:
        return self.oh

    def output_word(self) -> str:
        return tape_word(self.out)

    @property
    def state_name(self) -> str:
        return "halt" if self.pc == HALT_PC else f"pc{self.pc}"

    def register_values(self) -> dict[str, int]:
        return dict(zip(self.machine.program.registers, self.regs))

    def trace_fields(self, radius: int) -> dict:
        return {"pc": self.pc, "registers": self.register_values(),
                "heads": [self.ih, self.oh]}


class MacroMachine(SteppableMachine):
    """One program statement (or loop test, or jump) per step."""

    def __init__(self, program: Program):
        self.program = program
        self.name = program.name
        self.code, self.tags = flatten(program)
        self.symbol_code = {s: k + 1 for k, s in enumerate(program.input_alphabet)}
        self.sims = _SimulationCache()

    def start(self, word="") -> MacroProcess:
        """``word`` is the input tape, or a mapping of register values."""
        regs = [0] * len(self.program.registers)
        inp: tuple = ()
        if isinstance(word, Mapping):
            idx = {r: k for k, r in enumerate(self.program.registers)}
            for r, v in word.items():
                if r not in idx or not isinstance(v, int) or v < 0:
                    raise InvalidInputSymbol(f"bad register input {r}={v!r}")
                regs[idx[r]] = v
        else:
            inp = tuple(word)
            for pos, s in enumerate(inp, 1):
                if s not in self.symbol_code:
                    raise InvalidInputSymbol(f"input symbol {s!r} at position {pos} not in "
                                             f"the input alphabet of {self.name}")
        return MacroProcess(self, inp, regs)


def tag_samples(program: Program | MacroMachine, word, tag: str, arrivals: int,
                max_steps: int = 10**8) -> list[str]:
    """Displayed cell 1 at each of the first ``arrivals`` visits to the loop
    head labelled ``tag``."""
    m = program if isinstance(program, MacroMachine) else MacroMachine(program)
    head = m.tags[tag]
    p = m.start(word)
    out: list[str] = []
    while len(out) < arrivals and p.steps < max_steps:
        if p.pc == head:
            out.append(p.cell_one)
        if p.advance().final:
            break
    return out


# --------------------------------------------------------------------------
# reference interpreter

@dataclass(frozen=True)
class TraceRecord:
    step: int
    kind: str               # "stmt" or "test"
    label: str
    registers: tuple[tuple[str, int], ...]
    output: str
    cell_one: str
    output_head: int


@dataclass(frozen=True)
class StepCapExceeded:
    cap: int


@dataclass(frozen=True)
class Trace:
    records: tuple[TraceRecord, ...]
    halted: bool
    stopped: StepCapExceeded | None
    output: str
    output_head: int
    registers: tuple[tuple[str, int], ...]

    @property
    def final(self) -> TraceRecord | None:
        return self.records[-1] if self.records else None

    def cell_one_changes(self) -> list[str]:
        """Displayed cell-1 values, consecutive repeats collapsed, starting
        from the blank initial tape."""
        out = [BLANK]
        for r in self.records:
            if r.cell_one != out[-1]:
                out.append(r.cell_one)
        return out

    def statements(self) -> list[TraceRecord]:
        return [r for r in self.records if r.kind == "stmt"]


class _Stop(Exception):
    pass


def reference_interpret(p: Program, word="", step_cap: int = 100_000,
                        registers: Mapping[str, int] | None = None) -> Trace:
    """Tree-walking interpreter.  One record per executed simple statement
    and per evaluated loop or branch condition."""
    regs = {r: 0 for r in p.registers}
    if registers:
        regs.update(registers)
    if isinstance(word, Mapping):
        regs.update(word)
        word = ""
    inp = list(word)
    codes = {s: k + 1 for k, s in enumerate(p.input_alphabet)}
    for s in inp:
        if s not in codes:
            raise InvalidInputSymbol(f"input symbol {s!r} not in the input alphabet")
    out: dict[int, str] = {}
    st = {"ih": 0, "oh": 1, "steps": 0, "halted": False}
    records: list[TraceRecord] = []
    sims: dict = {}

    def record(kind: str, label: str) -> None:
        st["steps"] += 1
        shown = {c: displayed(s) for c, s in out.items()}
        records.append(TraceRecord(st["steps"], kind, label, tuple(regs.items()),
                                   tape_word(shown), shown.get(1, BLANK), st["oh"]))
        if st["steps"] >= step_cap:
            raise _Stop

    def test(c: Cond) -> bool:
        value = c.evaluate(regs)
        record("test", _cond_text(c))
        return value

    def simple(s) -> None:
        if isinstance(s, Set):
            regs[s.reg] = s.value
        elif isinstance(s, AddConst):
            regs[s.reg] += s.value
        elif isinstance(s, SubConst):
            regs[s.reg] = max(0, regs[s.reg] - s.value)
        elif isinstance(s, Copy):
            regs[s.dst] = regs[s.src]
        elif isinstance(s, AddReg):
            regs[s.dst] = regs[s.dst] + regs[s.src]
        elif isinstance(s, SubReg):
            regs[s.dst] = max(0, regs[s.dst] - regs[s.src])
        elif isinstance(s, IsPrime):
            n = regs[s.src]
            regs[s.dst] = int(n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1)))
        elif isinstance(s, BoundedSimulate):
            key = (int_to_bits(regs[s.machine]), int_to_bits(regs[s.word]))
            if key not in sims:
                sims[key] = IncrementalSimulation(*key)
            k = regs[s.steps]
            regs[s.dst] = int(k > 0 and isinstance(sims[key].query(k), Halted))
        elif isinstance(s, Read):
            i = st["ih"]
            regs[s.dst] = codes[inp[i]] if i < len(inp) else 0
            st["ih"] = i + 1
        elif isinstance(s, WriteCellOne):
            if s.symbol == BLANK:
                out.pop(1, None)
            else:
                out[1] = s.symbol
        elif isinstance(s, AdvanceOutput):
            st["oh"] += 1
        elif isinstance(s, ParkOutput):
            st["oh"] = 2
        elif isinstance(s, Skip):
            pass
        elif isinstance(s, Halt):
            st["halted"] = True
        record("stmt", _simple_text(s))
        if st["halted"]:
            raise _Stop

    def run_block(body) -> None:
        for s in body:
            if isinstance(s, If):
                run_block(s.then if test(s.cond) else s.orelse)
            elif isinstance(s, While):
                while test(s.cond):
                    run_block(s.body)
            elif isinstance(s, DoWhile):
                run_block(s.body)
                while test(s.cond):
                    run_block(s.body)
            else:
                simple(s)

    try:
        run_block(p.body)
        st["halted"] = True
    except _Stop:
        pass
    stopped = None if st["halted"] else StepCapExceeded(step_cap)
    shown = {c: displayed(s) for c, s in out.items()}
    return Trace(tuple(records), st["halted"], stopped, tape_word(shown), st["oh"],
                 tuple(regs.items()))
