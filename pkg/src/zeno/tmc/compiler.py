"""Compiling programs to 3-tape transition tables.

Work tape layout: ``$`` in cell 1, then every register in declaration order
followed by ``#``.  Registers are binary, most significant bit first, with
zero as the empty string, so ``r0=5, r1=0`` reads ``$101##``.  Between
statements the work head rests on ``$`` ("home").

The program only ever writes output cell 1, so every other output cell stays
blank.  Cell 1 carries a mark ``[s]^s`` (displayed ``s``) that lets the
machine find it; writing from elsewhere leaves a here-mark ``{_}^_`` on the
head's cell, walks left to cell 1 and comes back.

The entry state of the k-th compiled statement is ``stmt_k``; loop and
branch tests enter at ``test_k``.
"""
from __future__ import annotations

from itertools import product

from ..core import BLANK, MachineDescription, Move, TransitionRule
from .ir import (AddConst, AdvanceOutput, Cond, DoWhile, Halt, If, ParkOutput, Program, Read,
                 Set, Skip, SubConst, While, WriteCellOne, walk)
from .lower import UncompilablePrimitive, lower

HOME = "$"
SEP = "#"
GONE = "!"      # cell being deleted
BITS = ("0", "1")
WORK = (BLANK, HOME, SEP, "0", "1", GONE)
HERE = "{_}^_"
HALT_STATE = "halt"

_MOVE = {"L": Move.LEFT, "S": Move.STAY, "R": Move.RIGHT}


def cell_one_mark(symbol: str) -> str:
    return f"[{symbol}]^{symbol}"


class _Tables:
    """Rule accumulator with wildcard expansion over the tapes a state ignores."""

    def __init__(self, input_symbols, written):
        self.inputs = (BLANK,) + tuple(input_symbols)
        self.marks = {s: cell_one_mark(s) for s in sorted({BLANK, *written})}
        self.outputs = (BLANK,) + tuple(self.marks.values())
        self.rules: dict[tuple, TransitionRule] = {}
        self.states: set[str] = {HALT_STATE}
        self.homes: dict[str, str] = {}

    def on(self, state: str, work, nxt: str, *, write_work=None, moves: str = "SSS",
           inputs=None, outputs=None, write_output=None) -> None:
        works = (work,) if isinstance(work, str) else tuple(work)
        ins = self.inputs if inputs is None else ((inputs,) if isinstance(inputs, str) else inputs)
        outs = self.outputs if outputs is None else ((outputs,) if isinstance(outputs, str) else outputs)
        mi, mw, mo = (_MOVE[c] for c in moves)
        self.states.update((state, nxt))
        for i, w, o in product(ins, works, outs):
            key = (state, i, w, o)
            if key in self.rules:
                raise AssertionError(f"compiler emitted two rules for {key}")
            self.rules[key] = TransitionRule(state, i, w, o, nxt,
                                             w if write_work is None else write_work,
                                             o if write_output is None else write_output,
                                             mi, mw, mo)

    def home(self, cont: str) -> str:
        """State that walks the work head back to ``$`` and enters ``cont``."""
        name = self.homes.get(cont)
        if name is None:
            name = self.homes[cont] = f"{cont}.home"
            self.on(name, (SEP, "0", "1"), name, moves="SLS")
            self.on(name, HOME, cont)
        return name


class _Compiler:
    def __init__(self, p: Program):
        self.p = p
        self.reg = {r: k for k, r in enumerate(p.registers)}
        self.codes = {s: k + 1 for k, s in enumerate(p.input_alphabet)}
        written = {s.symbol for s in walk(p.body) if isinstance(s, WriteCellOne)}
        self.t = _Tables(p.input_alphabet, written)
        self.count = 0
        self.names: dict[tuple, str] = {}

    def number(self, body, path: tuple = ()) -> None:
        """Name statements ``stmt_k`` / ``test_k`` in program order."""
        for i, s in enumerate(body):
            here = path + (i,)
            kind = "test" if isinstance(s, (If, While, DoWhile)) else "stmt"
            self.count += 1
            self.names[here] = f"{kind}_{self.count}"
            if isinstance(s, If):
                self.number(s.then, here + ("then",))
                self.number(s.orelse, here + ("else",))
            elif isinstance(s, (While, DoWhile)):
                self.number(s.body, here + ("body",))

    # -- work tape routines (all start and end at home) --------------------

    def nav(self, name: str, j: int, target: str) -> None:
        """From home, put the work head on the first cell of register j."""
        t = self.t
        first = target if j == 0 else f"{name}.nav0"
        t.on(name, HOME, first, moves="SRS")
        for c in range(j):
            here = f"{name}.nav{c}"
            t.on(here, BITS, here, moves="SRS")
            t.on(here, SEP, target if c == j - 1 else f"{name}.nav{c + 1}", moves="SRS")

    def delete(self, name: str, cont: str, bits=BITS) -> None:
        """State ``name`` sits on one of ``bits``: remove it, shifting the
        tape left, then go home into ``cont``."""
        t = self.t
        t.on(name, bits, f"{name}.end", write_work=GONE, moves="SRS")
        t.on(f"{name}.end", (SEP, "0", "1"), f"{name}.end", moves="SRS")
        t.on(f"{name}.end", BLANK, f"{name}.pull_", moves="SLS")
        back = t.home(cont)
        for carry in (BLANK, SEP, "0", "1"):
            here = f"{name}.pull{carry}"
            for sym in (SEP, "0", "1"):
                t.on(here, sym, f"{name}.pull{sym}", write_work=carry, moves="SLS")
            t.on(here, GONE, back, write_work=carry)

    def insert(self, name: str, bit: str, cont: str) -> None:
        """Insert ``bit`` under the head, shifting the rest right."""
        t = self.t
        back = t.home(cont)
        for here, carry in [(name, bit)] + [(f"{name}.shift{c}", c) for c in (SEP, "0", "1")]:
            for sym in (SEP, "0", "1"):
                t.on(here, sym, f"{name}.shift{sym}", write_work=carry, moves="SRS")
            t.on(here, BLANK, back, write_work=carry)

    def clear(self, name: str, j: int, exit: str) -> None:
        t = self.t
        at = f"{name}.at"
        self.nav(name, j, at)
        self.delete(at, name)
        t.on(at, SEP, t.home(exit))

    def set_const(self, name: str, j: int, value: int, exit: str) -> None:
        bits = bin(value)[2:] if value else ""
        # insert least significant bit first, always at the register start
        nxt = exit
        for k, bit in enumerate(bits):
            stage = f"{name}.put{k}"
            self.nav(stage, j, f"{stage}.at")
            self.insert(f"{stage}.at", bit, nxt)
            nxt = stage
        self.clear(name, j, nxt)

    def inc(self, name: str, j: int, exit: str) -> None:
        t = self.t
        seek, carry = f"{name}.seek", f"{name}.carry"
        self.nav(name, j, seek)
        t.on(seek, BITS, seek, moves="SRS")
        t.on(seek, SEP, carry, moves="SLS")
        t.on(carry, "1", carry, write_work="0", moves="SLS")
        t.on(carry, "0", t.home(exit), write_work="1")
        t.on(carry, (SEP, HOME), f"{name}.grow", moves="SRS")
        self.insert(f"{name}.grow", "1", exit)

    def dec(self, name: str, j: int, exit: str) -> None:
        t = self.t
        at, seek, borrow, norm = f"{name}.at", f"{name}.seek", f"{name}.borrow", f"{name}.norm"
        self.nav(name, j, at)
        t.on(at, SEP, t.home(exit))
        t.on(at, BITS, seek, moves="SRS")
        t.on(seek, BITS, seek, moves="SRS")
        t.on(seek, SEP, borrow, moves="SLS")
        t.on(borrow, "0", borrow, write_work="1", moves="SLS")
        t.on(borrow, "1", t.home(norm), write_work="0")
        # strip leading zeros
        lead = f"{norm}.at"
        self.nav(norm, j, lead)
        self.delete(lead, norm, bits="0")
        t.on(lead, ("1", SEP), t.home(exit))

    def compare(self, name: str, j: int, op: str, value: int, yes: str, no: str) -> None:
        t = self.t
        target = f"{bin(value)[2:] if value else ''}"
        n = len(target)
        truth = {rel: Cond("x", op, 0).evaluate({"x": {"lt": -1, "eq": 0, "gt": 1}[rel]})
                 for rel in ("lt", "eq", "gt")}

        def done(rel: str) -> str:
            return t.home(yes if truth[rel] else no)

        def st(k: int, rel: str) -> str:
            return f"{name}.cmp{k}{rel}"

        self.nav(name, j, st(0, "eq"))
        for k in range(n + 1):
            for rel in ("lt", "eq", "gt"):
                if k == 0 and rel != "eq":
                    continue
                here = st(k, rel)
                if k == n:
                    t.on(here, SEP, done(rel))
                    t.on(here, BITS, done("gt"))
                    continue
                t.on(here, SEP, done("lt"))
                for bit in BITS:
                    new = rel if rel != "eq" else ("eq" if bit == target[k] else
                                                   "lt" if bit < target[k] else "gt")
                    t.on(here, bit, st(k + 1, new), moves="SRS")

    # -- output tape routines (work head stays home) ---------------------

    def write(self, name: str, symbol: str, exit: str) -> None:
        t = self.t
        mark = t.marks[symbol]
        left, back = f"{name}.left", f"{name}.back"
        t.on(name, HOME, exit, outputs=tuple(t.marks.values()), write_output=mark)
        t.on(name, HOME, left, outputs=BLANK, write_output=HERE, moves="SSL")
        t.on(left, HOME, left, outputs=BLANK, moves="SSL")
        t.on(left, HOME, back, outputs=tuple(t.marks.values()), write_output=mark, moves="SSR")
        t.on(back, HOME, back, outputs=BLANK, moves="SSR")
        t.on(back, HOME, exit, outputs=HERE, write_output=BLANK)

    def park(self, name: str, exit: str) -> None:
        t = self.t
        left = f"{name}.left"
        t.on(name, HOME, exit, outputs=tuple(t.marks.values()), moves="SSR")
        t.on(name, HOME, left, outputs=BLANK, moves="SSL")
        t.on(left, HOME, left, outputs=BLANK, moves="SSL")
        t.on(left, HOME, exit, outputs=tuple(t.marks.values()), moves="SSR")

    def read(self, name: str, j: int, exit: str) -> None:
        for sym in self.t.inputs:
            code = self.codes.get(sym, 0)
            chain = f"{name}.got{code}"
            if chain not in self.t.states:
                self.set_const(chain, j, code, exit)
            self.t.on(name, HOME, chain, inputs=sym, moves="RSS")

    # -- statements --------------------------------------------------------

    def simple(self, s, name: str, exit: str) -> None:
        t = self.t
        if isinstance(s, Set):
            self.set_const(name, self.reg[s.reg], s.value, exit)
        elif isinstance(s, (AddConst, SubConst)):
            op = self.inc if isinstance(s, AddConst) else self.dec
            nxt = exit
            for k in range(s.value - 1, 0, -1):
                stage = f"{name}.{k}"
                op(stage, self.reg[s.reg], nxt)
                nxt = stage
            if s.value:
                op(name, self.reg[s.reg], nxt)
            else:
                t.on(name, HOME, exit)
        elif isinstance(s, Read):
            self.read(name, self.reg[s.dst], exit)
        elif isinstance(s, WriteCellOne):
            self.write(name, s.symbol, exit)
        elif isinstance(s, AdvanceOutput):
            t.on(name, HOME, exit, moves="SSR")
        elif isinstance(s, ParkOutput):
            self.park(name, exit)
        elif isinstance(s, Halt):
            t.on(name, HOME, HALT_STATE)
        elif isinstance(s, Skip):
            t.on(name, HOME, exit)
        else:
            raise UncompilablePrimitive(f"{type(s).__name__} survived lowering")

    def test(self, name: str, cond: Cond, yes: str, no: str) -> None:
        if cond.always:
            self.t.on(name, HOME, yes)
        else:
            self.compare(name, self.reg[cond.left], cond.op, cond.right, yes, no)

    def block(self, body, exit: str, path: tuple = ()) -> str:
        entry = exit
        for i in reversed(range(len(body))):
            entry = self.stmt(body[i], entry, path + (i,))
        return entry

    def stmt(self, s, exit: str, path: tuple) -> str:
        name = self.names[path]
        if isinstance(s, If):
            self.test(name, s.cond, self.block(s.then, exit, path + ("then",)),
                      self.block(s.orelse, exit, path + ("else",)))
            return name
        if isinstance(s, While):
            self.test(name, s.cond, self.block(s.body, name, path + ("body",)), exit)
            return name
        if isinstance(s, DoWhile):
            top = self.block(s.body, name, path + ("body",))
            self.test(name, s.cond, top, exit)
            return top
        self.simple(s, name, exit)
        return name

    def build(self) -> MachineDescription:
        t = self.t
        self.number(self.p.body)
        entry = self.block(self.p.body, HALT_STATE)
        # lay out "$" and one "#" per register, mark output cell 1, go home
        lay = [f"init{k}" for k in range(len(self.p.registers))]
        first = lay[0] if lay else entry
        t.on("init", BLANK, first, write_work=HOME, outputs=BLANK,
             write_output=t.marks[BLANK], moves="SRS" if lay else "SSS")
        for k, st in enumerate(lay):
            if k + 1 < len(lay):
                t.on(st, BLANK, lay[k + 1], write_work=SEP, outputs=t.marks[BLANK], moves="SRS")
            else:
                t.on(st, BLANK, t.home(entry), write_work=SEP, outputs=t.marks[BLANK])
        outputs = set(t.outputs) | {HERE}
        return MachineDescription(self.p.name, frozenset(t.inputs), frozenset(WORK),
                                  frozenset(outputs), frozenset(t.states), "init",
                                  frozenset({HALT_STATE}), tuple(t.rules.values()))


def compile_program(p: Program) -> MachineDescription:
    """Transition table whose runs reproduce ``p``'s cell-one history and,
    on halting, its output tape."""
    return _Compiler(lower(p)).build()


__all__ = ["compile_program", "UncompilablePrimitive", "cell_one_mark", "lower"]
