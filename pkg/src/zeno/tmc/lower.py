"""Lowering to the compiler's core language.

The core language keeps only constant operands: ``r = c``, ``r += c`` and
``r -= c`` for small ``c``, comparisons against constants, input reads,
output primitives and structured control flow.  Register-register
arithmetic, register comparisons and primality tests become unary loops
over temporary registers named ``%tN``.  Temporaries are reused once their
value is dead, and every use initializes its temporary first.
"""
from __future__ import annotations

from .ir import (AddConst, AddReg, AdvanceOutput, BoundedSimulate, Cond, Copy, DoWhile, Halt,
                 If, IsPrime, ParkOutput, Program, Read, Set, Skip, SubConst, SubReg, While,
                 WriteCellOne)

# constants above this are added by a loop rather than a chain of increments
UNROLL_LIMIT = 16


class UncompilablePrimitive(ValueError):
    pass


class _Temps:
    def __init__(self):
        self.names: list[str] = []
        self.free: list[str] = []

    def take(self) -> str:
        if self.free:
            return self.free.pop()
        name = f"%t{len(self.names)}"
        self.names.append(name)
        return name

    def give(self, *names: str) -> None:
        self.free.extend(reversed(names))


class _Lowering:
    def __init__(self):
        self.temps = _Temps()

    # -- arithmetic ------------------------------------------------------

    def _add_const(self, reg: str, value: int, sign: int) -> list:
        op = AddConst if sign > 0 else SubConst
        if value <= UNROLL_LIMIT:
            return [op(reg, value)] if value else []
        t = self.temps.take()
        out = [Set(t, value), While(Cond(t, ">", 0), (SubConst(t, 1), op(reg, 1)))]
        self.temps.give(t)
        return out

    def _transfer(self, dst: str, src: str, sign: int) -> list:
        """``dst += src`` (or ``-=``) for distinct registers, restoring src."""
        t = self.temps.take()
        step = AddConst(dst, 1) if sign > 0 else SubConst(dst, 1)
        out = [Set(t, 0),
               While(Cond(src, ">", 0), (SubConst(src, 1), step, AddConst(t, 1))),
               While(Cond(t, ">", 0), (SubConst(t, 1), AddConst(src, 1)))]
        self.temps.give(t)
        return out

    def _copy(self, dst: str, src: str) -> list:
        if dst == src:
            return []
        return [Set(dst, 0)] + self._transfer(dst, src, +1)

    def _add_reg(self, dst: str, src: str, sign: int) -> list:
        if dst != src:
            return self._transfer(dst, src, sign)
        if sign < 0:
            return [Set(dst, 0)]
        t = self.temps.take()
        out = self._copy(t, src) + self._transfer(dst, t, +1)
        self.temps.give(t)
        return out

    def _flag(self, f: str, cond: Cond) -> list:
        """``f = 1 if cond else 0`` using constant comparisons only."""
        if cond.always:
            return [Set(f, 1)]
        a, op, b = cond.left, cond.op, cond.right
        if not isinstance(b, str):
            return [Set(f, 0), If(Cond(a, op, b), (Set(f, 1),))]
        x, y = self.temps.take(), self.temps.take()
        out = self._copy(x, a) + self._transfer(x, b, -1)    # x = a - b, saturating
        out += self._copy(y, b) + self._transfer(y, a, -1)   # y = b - a, saturating
        both_zero = If(Cond(x, "==", 0), (If(Cond(y, "==", 0), (Set(f, 1),)),))
        table = {
            "==": [Set(f, 0), both_zero],
            "!=": [Set(f, 1), If(Cond(x, "==", 0), (If(Cond(y, "==", 0), (Set(f, 0),)),))],
            "<": [Set(f, 0), If(Cond(y, ">", 0), (Set(f, 1),))],
            "<=": [Set(f, 0), If(Cond(x, "==", 0), (Set(f, 1),))],
            ">": [Set(f, 0), If(Cond(x, ">", 0), (Set(f, 1),))],
            ">=": [Set(f, 0), If(Cond(y, "==", 0), (Set(f, 1),))],
        }
        self.temps.give(x, y)
        return out + table[op]

    def _is_prime(self, dst: str, src: str) -> list:
        a, k, r, c, g = (self.temps.take() for _ in range(5))
        reduce = [*self._flag(g, Cond(r, ">=", k)),
                  While(Cond(g, "==", 1),
                        tuple(self._add_reg(r, k, -1) + self._flag(g, Cond(r, ">=", k))))]
        trial = [*self._copy(r, a), *reduce,
                 If(Cond(r, "==", 0), (Set(dst, 0),)),
                 AddConst(k, 1), *self._flag(c, Cond(k, "<", a))]
        out = [*self._copy(a, src), Set(dst, 0),
               If(Cond(a, ">=", 2), (Set(dst, 1), Set(k, 2), *self._flag(c, Cond(k, "<", a)),
                                     While(Cond(c, "==", 1), tuple(trial))))]
        self.temps.give(a, k, r, c, g)
        return out

    # -- statements ------------------------------------------------------

    def _test(self, cond: Cond) -> tuple[list, Cond, str | None]:
        """Prelude computing ``cond``, the constant test to branch on, and the
        flag register to release afterwards."""
        if cond.always or not isinstance(cond.right, str):
            return [], cond, None
        f = self.temps.take()
        return self._flag(f, cond), Cond(f, "==", 1), f

    def block(self, body) -> tuple:
        out: list = []
        for s in body:
            out += self.stmt(s)
        return tuple(out)

    def stmt(self, s) -> list:
        if isinstance(s, (Set, Read, WriteCellOne, AdvanceOutput, ParkOutput, Halt, Skip)):
            return [s]
        if isinstance(s, AddConst):
            return self._add_const(s.reg, s.value, +1)
        if isinstance(s, SubConst):
            return self._add_const(s.reg, s.value, -1)
        if isinstance(s, Copy):
            return self._copy(s.dst, s.src) or [Skip()]
        if isinstance(s, AddReg):
            return self._add_reg(s.dst, s.src, +1)
        if isinstance(s, SubReg):
            return self._add_reg(s.dst, s.src, -1)
        if isinstance(s, IsPrime):
            return self._is_prime(s.dst, s.src)
        if isinstance(s, BoundedSimulate):
            raise UncompilablePrimitive("bounded simulation has no compiled form; "
                                        "run the program as a MacroMachine")
        if isinstance(s, If):
            pre, test, f = self._test(s.cond)
            if f:
                self.temps.give(f)
            return pre + [If(test, self.block(s.then), self.block(s.orelse))]
        if isinstance(s, While):
            pre, test, f = self._test(s.cond)
            body = self.block(s.body) + tuple(pre)
            if f:
                self.temps.give(f)
            return pre + [While(test, body, s.tag)]
        if isinstance(s, DoWhile):
            pre, test, f = self._test(s.cond)
            body = self.block(s.body) + tuple(pre)
            if f:
                self.temps.give(f)
            return [DoWhile(body, test, s.tag)]
        raise TypeError(f"not a statement: {s!r}")


def lower(p: Program) -> Program:
    """Equivalent program over the core language (plus temporaries)."""
    if p.inputs:
        raise UncompilablePrimitive("register inputs have no compiled form; "
                                    "compiled machines take their input on the input tape")
    lw = _Lowering()
    body = lw.block(p.body)
    return Program(p.name, p.registers + tuple(lw.temps.names), body, p.input_alphabet)
