"""Line-oriented text syntax for programs.

::

    program twin-prime
    registers i n found
    input-alphabet 0 1          # optional, for programs that read input
    inputs m n                  # optional, registers set by the caller
    i = 1
    do @round
      write 0
      ...
    while i > 0

Statements: ``r = 5``, ``r = s``, ``r += 5``, ``r += s``, ``r -= ...``,
``r = prime s``, ``r = simulate m n k``, ``r = read``, ``write <symbol>``,
``advance``, ``park``, ``halt``, ``skip``.  Blocks: ``if <cond> then`` ...
[``else`` ...] ``end``; ``while <cond> do`` ... ``end``; ``do`` ...
``while <cond>``.  A loop header may end with ``@tag``.  Conditions are
``true`` or ``<register> <op> <register|number>`` with op one of
``== != < <= > >=``.  ``#`` starts a comment.
"""
from __future__ import annotations

import re

from .ir import (OPS, AddConst, AddReg, AdvanceOutput, BoundedSimulate, Cond, Copy, DoWhile,
                 Halt, If, IsPrime, ParkOutput, Program, Read, Set, Skip, SubConst, SubReg,
                 While, WriteCellOne)

_NAME = re.compile(r"[A-Za-z_%][\w%.\-]*$")
_KEYWORDS = {"if", "then", "else", "end", "while", "do", "true", "prime", "simulate", "read",
             "write", "advance", "park", "halt", "skip", "program", "registers", "inputs",
             "input-alphabet"}


class IRSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _operand(tok: str, line: int) -> str | int:
    if tok.isdigit():
        return int(tok)
    if _NAME.match(tok) and tok not in _KEYWORDS:
        return tok
    raise IRSyntaxError(line, f"bad operand {tok!r}")


def _register(tok: str, line: int) -> str:
    v = _operand(tok, line)
    if not isinstance(v, str):
        raise IRSyntaxError(line, f"expected a register, got {tok!r}")
    return v


def _cond(toks: list[str], line: int) -> Cond:
    if toks == ["true"]:
        return Cond()
    if len(toks) != 3 or toks[1] not in OPS:
        raise IRSyntaxError(line, f"bad condition {' '.join(toks)!r}")
    return Cond(_register(toks[0], line), toks[1], _operand(toks[2], line))


def _tag(toks: list[str], line: int) -> tuple[list[str], str | None]:
    if toks and toks[-1].startswith("@"):
        if len(toks[-1]) == 1:
            raise IRSyntaxError(line, "empty tag")
        return toks[:-1], toks[-1][1:]
    return toks, None


def _simple(toks: list[str], line: int):
    head = toks[0]
    if head == "write" and len(toks) == 2:
        return WriteCellOne(toks[1])
    if len(toks) == 1 and head in ("advance", "park", "halt", "skip"):
        return {"advance": AdvanceOutput, "park": ParkOutput, "halt": Halt, "skip": Skip}[head]()
    if len(toks) >= 3 and toks[1] in ("=", "+=", "-="):
        dst = _register(head, line)
        rest = toks[2:]
        if toks[1] == "=":
            if rest == ["read"]:
                return Read(dst)
            if len(rest) == 2 and rest[0] == "prime":
                return IsPrime(dst, _register(rest[1], line))
            if len(rest) == 4 and rest[0] == "simulate":
                m, n, k = (_register(t, line) for t in rest[1:])
                return BoundedSimulate(dst, m, n, k)
            if len(rest) == 1:
                v = _operand(rest[0], line)
                return Set(dst, v) if isinstance(v, int) else Copy(dst, v)
        elif len(rest) == 1:
            v = _operand(rest[0], line)
            if toks[1] == "+=":
                return AddConst(dst, v) if isinstance(v, int) else AddReg(dst, v)
            return SubConst(dst, v) if isinstance(v, int) else SubReg(dst, v)
    raise IRSyntaxError(line, f"cannot parse statement {' '.join(toks)!r}")


def parse_program(text: str):
    name = None
    registers: list[str] = []
    inputs: list[str] = []
    alphabet: list[str] = []
    # stack of open blocks: (kind, data, statements, line)
    root: list = []
    stack: list[list] = [["root", None, root, 0]]
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        head = toks[0]
        if name is None:
            if head != "program" or len(toks) != 2:
                raise IRSyntaxError(lineno, "expected 'program <name>'")
            name = toks[1]
            continue
        if head == "registers":
            registers += [_register(t, lineno) for t in toks[1:]]
            continue
        if head == "inputs":
            inputs += [_register(t, lineno) for t in toks[1:]]
            continue
        if head == "input-alphabet":
            alphabet += toks[1:]
            continue
        block = stack[-1]
        if head == "if":
            if toks[-1] != "then":
                raise IRSyntaxError(lineno, "'if' line must end with 'then'")
            stack.append(["if", _cond(toks[1:-1], lineno), [], lineno, None])
        elif head == "else":
            if block[0] != "if" or block[4] is not None or len(toks) != 1:
                raise IRSyntaxError(lineno, "'else' outside an if block")
            block[4] = block[2]
            block[2] = []
        elif head == "end":
            if block[0] not in ("if", "while") or len(toks) != 1:
                raise IRSyntaxError(lineno, "'end' does not close an if or while block")
            stack.pop()
            if block[0] == "if":
                then, orelse = (block[4], block[2]) if block[4] is not None else (block[2], [])
                stack[-1][2].append(If(block[1], tuple(then), tuple(orelse)))
            else:
                cond, tag = block[1]
                stack[-1][2].append(While(cond, tuple(block[2]), tag))
        elif head == "while" and block[0] == "do" and (len(toks) < 2 or toks[-1] != "do") \
                and not toks[-1].startswith("@"):
            stack.pop()
            stack[-1][2].append(DoWhile(tuple(block[2]), _cond(toks[1:], lineno), block[1]))
        elif head == "while":
            rest, tag = _tag(toks[1:], lineno)
            if not rest or rest[-1] != "do":
                raise IRSyntaxError(lineno, "'while' header must end with 'do'")
            stack.append(["while", (_cond(rest[:-1], lineno), tag), [], lineno])
        elif head == "do":
            rest, tag = _tag(toks[1:], lineno)
            if rest:
                raise IRSyntaxError(lineno, "unexpected tokens after 'do'")
            stack.append(["do", tag, [], lineno])
        else:
            block[2].append(_simple(toks, lineno))
    if name is None:
        raise IRSyntaxError(1, "empty program")
    if len(stack) > 1:
        raise IRSyntaxError(stack[-1][3], f"unclosed '{stack[-1][0]}' block")
    return Program(name, tuple(registers), tuple(root), tuple(alphabet), tuple(inputs))


def _cond_text(c: Cond) -> str:
    return "true" if c.always else f"{c.left} {c.op} {c.right}"


def _tag_text(tag: str | None) -> str:
    return f" @{tag}" if tag else ""


def _lines(body, depth: int) -> list[str]:
    pad = "  " * depth
    out: list[str] = []
    for s in body:
        if isinstance(s, If):
            out.append(f"{pad}if {_cond_text(s.cond)} then")
            out += _lines(s.then, depth + 1)
            if s.orelse:
                out.append(f"{pad}else")
                out += _lines(s.orelse, depth + 1)
            out.append(f"{pad}end")
        elif isinstance(s, While):
            out.append(f"{pad}while {_cond_text(s.cond)} do{_tag_text(s.tag)}")
            out += _lines(s.body, depth + 1)
            out.append(f"{pad}end")
        elif isinstance(s, DoWhile):
            out.append(f"{pad}do{_tag_text(s.tag)}")
            out += _lines(s.body, depth + 1)
            out.append(f"{pad}while {_cond_text(s.cond)}")
        else:
            out.append(pad + _simple_text(s))
    return out


def _simple_text(s) -> str:
    if isinstance(s, Set):
        return f"{s.reg} = {s.value}"
    if isinstance(s, Copy):
        return f"{s.dst} = {s.src}"
    if isinstance(s, AddConst):
        return f"{s.reg} += {s.value}"
    if isinstance(s, AddReg):
        return f"{s.dst} += {s.src}"
    if isinstance(s, SubConst):
        return f"{s.reg} -= {s.value}"
    if isinstance(s, SubReg):
        return f"{s.dst} -= {s.src}"
    if isinstance(s, IsPrime):
        return f"{s.dst} = prime {s.src}"
    if isinstance(s, BoundedSimulate):
        return f"{s.dst} = simulate {s.machine} {s.word} {s.steps}"
    if isinstance(s, Read):
        return f"{s.dst} = read"
    if isinstance(s, WriteCellOne):
        return f"write {s.symbol}"
    return {AdvanceOutput: "advance", ParkOutput: "park", Halt: "halt", Skip: "skip"}[type(s)]


def print_program(p: Program) -> str:
    lines = [f"program {p.name}", "registers " + " ".join(p.registers)]
    if p.inputs:
        lines.append("inputs " + " ".join(p.inputs))
    if p.input_alphabet:
        lines.append("input-alphabet " + " ".join(p.input_alphabet))
    lines += _lines(p.body, 0)
    return "\n".join(lines) + "\n"
