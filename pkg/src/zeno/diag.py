"""Diagonal constructions against would-be halting solvers.

Generated machines need to know when their output head is on cell 1, which
a finite control cannot see.  They stamp output cell 1 with a *marked*
symbol ``[shadow]^visible`` in a one-step prologue and duplicate every rule
for marked and unmarked reads.  The ``^`` display convention (see
:func:`zeno.core.displayed`) makes the marked cell read as ``visible`` to
every observer, so marks never show up in outputs or verdicts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .codec import decode, encode
from .core import BLANK, MachineDescription, Outcome, TransitionRule, displayed, rule, tape_word
from .engine import (Halts, DivergesCertified, Process, RunBudget, SteppableMachine,
                     TuringMachine, Unknown, halting_oracle_small)
from .limits import (ClassicallyHalted, FirstCellOscillates, LimitStabilized, ZenoVerdict,
                     in_domain, zeno_run)

_SSS = "SSS"


def flip(v: str) -> str:
    return "0" if v == "1" else "1"


class _Marks:
    """Marked-symbol spellings that avoid every symbol already in use."""

    def __init__(self, alphabet: Iterable[str]):
        alphabet = set(alphabet)
        depth = 1
        while True:
            self.open, self.close = "[" * depth, "]" * depth
            self.here_open, self.here_close = "{" * depth, "}" * depth
            if not any(s.startswith(self.open) or s.startswith(self.here_open) for s in alphabet):
                break
            depth += 1

    def cell1(self, shadow: str, visible: str) -> str:
        return f"{self.open}{shadow}{self.close}^{visible}"

    def here(self, sym: str) -> str:
        return f"{self.here_open}{sym}{self.here_close}^{displayed(sym)}"


def _reads(desc: MachineDescription) -> list[tuple[str, str]]:
    return [(i, w) for i in sorted(desc.input_alphabet) for w in sorted(desc.work_alphabet)]


# --------------------------------------------------------------------------
# restrict-to-zero

def restrict_to_zero(y: MachineDescription) -> MachineDescription:
    """A machine that answers 0 where ``y`` halts with 0 on cell 1, and never
    halts elsewhere.

    The copy of ``y`` runs unchanged (apart from the cell-1 mark).  Where
    ``y`` would halt, the copy walks its output head back to cell 1: on a
    displayed 0 it steps right and halts, otherwise it loops in place.
    """
    marks = _Marks(y.output_alphabet)
    outs = sorted(y.output_alphabet)

    def st(q: str) -> str:
        return f"{q}/y"

    init, back, done, loop = "/rz-init", "/rz-back", "/rz-done", "/rz-loop"
    rules: list[TransitionRule] = []
    reads = _reads(y)
    for i in sorted(y.input_alphabet):
        rules.append(rule(init, (i, BLANK, BLANK), st(y.start), (BLANK, marks.cell1(BLANK, BLANK)), _SSS))
    for r in y.rules:
        rules.append(TransitionRule(st(r.state), r.read_input, r.read_work, r.read_output,
                                    st(r.next_state), r.write_work, r.write_output,
                                    r.move_input, r.move_work, r.move_output))
        rules.append(TransitionRule(st(r.state), r.read_input, r.read_work,
                                    marks.cell1(r.read_output, displayed(r.read_output)),
                                    st(r.next_state), r.write_work,
                                    marks.cell1(r.write_output, displayed(r.write_output)),
                                    r.move_input, r.move_work, r.move_output))
    for q in sorted(y.halting) + [back]:
        src = st(q) if q != back else back
        for i, w in reads:
            for o in outs:
                rules.append(rule(src, (i, w, o), back, (w, o), "SSL"))
                m = marks.cell1(o, displayed(o))
                if displayed(o) == "0":
                    rules.append(rule(src, (i, w, m), done, (w, m), "SSR"))
                else:
                    rules.append(rule(src, (i, w, m), loop, (w, m), _SSS))
    for i, w in reads:
        for o in outs:
            for sym in (o, marks.cell1(o, displayed(o))):
                rules.append(rule(loop, (i, w, sym), loop, (w, sym), _SSS))
    out_alpha = set(outs) | {marks.cell1(o, displayed(o)) for o in outs}
    states = {init, back, done, loop} | {st(q) for q in y.states}
    return MachineDescription(f"{y.name}.rz", y.input_alphabet, y.work_alphabet,
                              frozenset(out_alpha), frozenset(states), init,
                              frozenset({done}), tuple(set(rules)))


# --------------------------------------------------------------------------
# semantic diagonalizer

NORMAL, HYPER = "normal", "hyper"


class DiagonalProcess(Process):
    """Configuration of the diagonal machine: the solver's own configuration,
    the mode, the visible value of output cell 1 and whether the solver's
    halt has been replaced by the flip loop."""

    def __init__(self, y: Process):
        self.y = y
        self.mode = NORMAL
        self.visible = y.cell_one
        self.flipping = False
        self.steps = 0
        self.last_output_change = 0
        self.last_cell_one_change = 0
        self._final: Outcome | None = None

    def advance(self) -> Outcome:
        if self._final is not None:
            return self._final
        before = self.visible
        if self.y.halted:
            if self.mode == NORMAL:
                self._final = Outcome.HALTED
                return self._final
            self.flipping = True
            self.visible = flip(self.visible)
        else:
            at_one = self.y.output_head == 1
            y_out_before = self.y.output_word()
            outcome = self.y.advance()
            if outcome.stuck:
                self._final = outcome
                return outcome
            written = self.y.cell_one if at_one else None
            if self.mode == NORMAL:
                self.visible = self.y.cell_one
                if written == "1":
                    self.mode = HYPER
            elif written == "0":
                self.mode = NORMAL
                self.visible = "0"
            else:
                self.visible = flip(self.visible)
            if self.y.output_word() != y_out_before:
                self.last_output_change = self.steps + 1
        self.steps += 1
        if self.visible != before:
            self.last_output_change = self.last_cell_one_change = self.steps
        return Outcome.STEPPED

    @property
    def halted(self) -> bool:
        return self.mode == NORMAL and self.y.halted

    def fingerprint(self):
        return (self.mode, self.visible, self.flipping, self.y.fingerprint())

    def same(self, other: "DiagonalProcess") -> bool:
        return (self.mode == other.mode and self.visible == other.visible
                and self.flipping == other.flipping and self.y.same(other.y))

    def copy(self) -> "DiagonalProcess":
        p = DiagonalProcess.__new__(DiagonalProcess)
        p.__dict__.update(self.__dict__)
        p.y = self.y.copy()
        return p

    @property
    def cell_one(self) -> str:
        return self.visible

    @property
    def output_head(self) -> int:
        return self.y.output_head

    def output_word(self) -> str:
        config = getattr(self.y, "config", None)
        if config is not None:
            tape = dict(config.output_tape)
            tape[1] = self.visible
            return tape_word(tape)
        rest = self.y.output_word()[1:]
        return (self.visible + rest).rstrip(BLANK) if rest else self.visible.strip(BLANK)

    @property
    def state_name(self) -> str:
        return f"{self.y.state_name}/{self.mode}{'/loop' if self.flipping else ''}"


class DiagonalMachine(SteppableMachine):
    def __init__(self, y: SteppableMachine):
        self.y = y
        self.name = f"{y.name}.diag"

    def start(self, word="") -> DiagonalProcess:
        return DiagonalProcess(self.y.start(word))


def _with_binary_input(desc: MachineDescription) -> MachineDescription:
    extra = {"0", "1"} - desc.input_alphabet
    if not extra:
        return desc
    return MachineDescription(desc.name, desc.input_alphabet | extra, desc.work_alphabet,
                              desc.output_alphabet, desc.states, desc.start, desc.halting,
                              desc.rules)


def zeno_diagonalize_semantic(y: SteppableMachine | MachineDescription) -> DiagonalMachine:
    """Wrap ``y`` so that its answer 1 on cell 1 turns into eternal flipping.

    A syntactic ``y`` gets {0, 1} added to its input alphabet (without new
    rules) so the wrapper can be fed machine codes, exactly like the
    syntactic form.
    """
    if isinstance(y, MachineDescription):
        y = TuringMachine(_with_binary_input(y))
    elif isinstance(y, TuringMachine):
        y = TuringMachine(_with_binary_input(y.desc))
    return DiagonalMachine(y)


# --------------------------------------------------------------------------
# syntactic diagonalizer

def boundary_state(name: str) -> bool:
    """States of :func:`zeno_diagonalize_syntactic` output that correspond to
    a step of the semantic form (as opposed to prologue or travel states)."""
    return name.endswith(("/n", "/h", "/l0", "/l1"))


def zeno_diagonalize_syntactic(y: MachineDescription) -> MachineDescription:
    """Transition-table form of :func:`zeno_diagonalize_semantic`.

    States ``q/n`` and ``q/h`` run ``y`` in normal and hyperactive mode.  A
    hyperactive step that does not itself land on cell 1 is followed by a
    round trip (``q/t0``, ``q/t1``, ``q/t2``): mark the current output cell,
    walk left to cell 1, flip it, walk back to the mark.  A halt reached in
    hyperactive mode walks to cell 1 and enters the two-state flip loop
    ``/l0``, ``/l1``.
    """
    y = _with_binary_input(y)
    marks = _Marks(y.output_alphabet)
    outs = sorted(y.output_alphabet)
    visibles = sorted({BLANK, "0", "1"} | {displayed(o) for o in outs})
    reads = _reads(y)
    c1 = marks.cell1
    init, ht, l0, l1 = "/init", "/ht", "/l0", "/l1"

    def n(q):
        return f"{q}/n"

    def h(q):
        return f"{q}/h"

    def t(q, k):
        return f"{q}/t{k}"

    rules: list[TransitionRule] = []
    for i in sorted(y.input_alphabet):
        rules.append(rule(init, (i, BLANK, BLANK), n(y.start), (BLANK, c1(BLANK, BLANK)), _SSS))
    travel_targets = set()
    for r in y.rules:
        mi, mw, mo = r.move_input, r.move_work, r.move_output
        wdisp = displayed(r.write_output)
        # normal mode: mirror; a 1 landing on cell 1 switches to hyperactive
        rules.append(TransitionRule(n(r.state), r.read_input, r.read_work, r.read_output,
                                    n(r.next_state), r.write_work, r.write_output, mi, mw, mo))
        for v in visibles:
            rules.append(TransitionRule(n(r.state), r.read_input, r.read_work, c1(r.read_output, v),
                                        h(r.next_state) if wdisp == "1" else n(r.next_state),
                                        r.write_work, c1(r.write_output, wdisp), mi, mw, mo))
        # hyperactive mode: every step flips cell 1; a 0 landing there switches back
        travel_targets.add(r.next_state)
        rules.append(TransitionRule(h(r.state), r.read_input, r.read_work, r.read_output,
                                    t(r.next_state, 0), r.write_work, r.write_output, mi, mw, mo))
        for v in visibles:
            if wdisp == "0":
                nxt, shown = n(r.next_state), "0"
            else:
                nxt, shown = h(r.next_state), flip(v)
            rules.append(TransitionRule(h(r.state), r.read_input, r.read_work, c1(r.read_output, v),
                                        nxt, r.write_work, c1(r.write_output, shown), mi, mw, mo))
    for q in sorted(travel_targets):
        for i, w in reads:
            for o in outs:
                rules.append(rule(t(q, 0), (i, w, o), t(q, 1), (w, marks.here(o)), "SSL"))
                rules.append(rule(t(q, 1), (i, w, o), t(q, 1), (w, o), "SSL"))
                rules.append(rule(t(q, 2), (i, w, o), t(q, 2), (w, o), "SSR"))
                rules.append(rule(t(q, 2), (i, w, marks.here(o)), h(q), (w, o), _SSS))
                for v in visibles:
                    rules.append(rule(t(q, 0), (i, w, c1(o, v)), h(q), (w, c1(o, flip(v))), _SSS))
                    rules.append(rule(t(q, 1), (i, w, c1(o, v)), t(q, 2), (w, c1(o, flip(v))), "SSR"))
    for q in sorted(y.halting):
        for i, w in reads:
            for o in outs:
                rules.append(rule(h(q), (i, w, o), ht, (w, o), "SSL"))
                for v in visibles:
                    rules.append(rule(h(q), (i, w, c1(o, v)), l0, (w, c1(o, flip(v))), _SSS))
    for i, w in reads:
        for o in outs:
            rules.append(rule(ht, (i, w, o), ht, (w, o), "SSL"))
            for v in visibles:
                rules.append(rule(ht, (i, w, c1(o, v)), l0, (w, c1(o, flip(v))), _SSS))
                rules.append(rule(l0, (i, w, c1(o, v)), l1, (w, c1(o, flip(v))), _SSS))
                rules.append(rule(l1, (i, w, c1(o, v)), l0, (w, c1(o, flip(v))), _SSS))
    out_alpha = (set(outs) | {marks.here(o) for o in outs}
                 | {c1(o, v) for o in outs for v in visibles})
    states = ({init, ht, l0, l1} | {n(q) for q in y.states} | {h(q) for q in y.states}
              | {t(q, k) for q in travel_targets for k in range(3)})
    return MachineDescription(f"{y.name}.diag", y.input_alphabet, y.work_alphabet,
                              frozenset(out_alpha), frozenset(states), init,
                              frozenset(n(q) for q in y.halting), tuple(set(rules)))


def semantic_cell_one_sequence(m: SteppableMachine, word, steps: int) -> list[str]:
    """Displayed cell 1 after 0, 1, ... steps, up to ``steps`` values (fewer if
    the machine halts or gets stuck)."""
    p = m.start(word)
    seq = [p.cell_one]
    while len(seq) < steps:
        if p.advance().final:
            break
        seq.append(p.cell_one)
    return seq


def boundary_cell_one_sequence(x: MachineDescription, word, steps: int,
                               chunk: int = 1 << 16) -> list[str]:
    """Displayed cell 1 of ``x`` at its boundary states, up to ``steps`` values.

    Runs on the array kernel in chunks and filters the per-step logs.
    """
    from . import _kernels as K
    from .dense import DenseMachine, DenseRun
    dm = DenseMachine.of(x)
    is_boundary = np.array([boundary_state(s) for s in dm.states], dtype=bool)
    dr = DenseRun(dm, word)
    out: list[np.ndarray] = []
    count = 0
    code = K.BUDGET
    while count < steps and code == K.BUDGET:
        start = dr.steps
        c1 = np.zeros(chunk, dtype=np.int32)
        st = np.zeros(chunk, dtype=np.int32)
        hd = np.zeros(chunk, dtype=np.int64)
        code = dr.run(start + chunk - 1, detect=False, logs=(c1, st, hd), log_from=start)
        n_logged = dr.steps - start + 1
        keep = c1[:n_logged][is_boundary[st[:n_logged]]]
        out.append(keep)
        count += keep.size
        if code == K.BUDGET:
            # the last logged configuration is logged again at the next chunk start
            if is_boundary[st[n_logged - 1]]:
                out[-1] = keep[:-1]
                count -= 1
    seq = np.concatenate(out)[:steps] if out else np.zeros(0, dtype=np.int32)
    return [dm.display_values[k] for k in seq]


# --------------------------------------------------------------------------
# a semantic bounded solver

class BoundedSolverProcess(Process):
    """Simulates its input's machine on that same input for ``limit`` steps,
    then answers 1 if the simulation halted and 0 otherwise (cell 1, head
    left on cell 2).

    Every simulated step is preceded by an idle step.  When the solver
    simulates a machine that in turn runs the solver, each level therefore
    needs only half the steps of the level above, so the tower of nested
    simulations stays finite.
    """

    def __init__(self, solver: "BoundedHaltingSolver", word: str):
        self.solver = solver
        self.word = word
        self.target: Process | None = None
        self.resolved = False
        self.simulated = 0
        self.idle = True              # the next step is an idle one
        self.answer = BLANK
        self.phase = "simulate"       # simulate -> answered
        self.steps = 0
        self.last_output_change = 0
        self.last_cell_one_change = 0

    def advance(self) -> Outcome:
        if self.phase == "answered":
            return Outcome.HALTED
        self.steps += 1
        if self.idle:
            self.idle = False
            return Outcome.STEPPED
        if not self.resolved:
            self.target = self.solver.resolve_process(self.word)
            self.resolved = True
        target = self.target
        if target is None or target.halted or self.simulated >= self.solver.limit:
            halted = target is not None and target.halted
            self.answer = "1" if halted else "0"
            self.phase = "answered"
            self.target = None
            self.last_output_change = self.last_cell_one_change = self.steps
            return Outcome.STEPPED
        if target.advance().stuck:
            self.simulated = self.solver.limit
        else:
            self.simulated += 1
        self.idle = True
        return Outcome.STEPPED

    @property
    def halted(self) -> bool:
        return self.phase == "answered"

    def fingerprint(self):
        t = self.target.fingerprint() if self.target is not None else None
        return (self.phase, self.resolved, self.simulated, self.idle, self.answer, self.word, t)

    def same(self, other: "BoundedSolverProcess") -> bool:
        if (self.phase, self.resolved, self.simulated, self.idle, self.answer, self.word) != \
                (other.phase, other.resolved, other.simulated, other.idle, other.answer, other.word):
            return False
        if (self.target is None) != (other.target is None):
            return False
        return self.target is None or self.target.same(other.target)

    def copy(self) -> "BoundedSolverProcess":
        p = BoundedSolverProcess.__new__(BoundedSolverProcess)
        p.__dict__.update(self.__dict__)
        if self.target is not None:
            p.target = self.target.copy()
        return p

    @property
    def cell_one(self) -> str:
        return self.answer

    @property
    def output_head(self) -> int:
        return 2 if self.phase == "answered" else 1

    def output_word(self) -> str:
        return self.answer if self.answer != BLANK else ""

    @property
    def state_name(self) -> str:
        return f"{self.phase}:{self.simulated}{'+idle' if self.idle else ''}"


class BoundedHaltingSolver(SteppableMachine):
    """The pseudo-solver "does the coded machine halt on its own code within
    ``limit`` steps?".

    Codes are decoded with :func:`zeno.codec.decode`, except for reference
    codes registered with :meth:`bind`, which stand for machines that have no
    description text (such as a semantic diagonal machine).
    """

    def __init__(self, limit: int = 1000, name: str | None = None):
        self.limit = limit
        self.name = name or f"halts-within-{limit}"
        self.bindings: dict[str, SteppableMachine] = {}

    def bind(self, code: str, machine: SteppableMachine) -> None:
        if any(c not in "01" for c in code):
            raise ValueError("reference codes are bit strings")
        self.bindings[code] = machine

    def resolve_process(self, word: str) -> Process | None:
        m = self.bindings.get(word)
        if m is None:
            m = TuringMachine(decode(word))
        try:
            return m.start(word)
        except ValueError:
            return None

    def start(self, word="") -> BoundedSolverProcess:
        word = "".join(word)
        if any(c not in "01" for c in word):
            from .core import InvalidInputSymbol
            raise InvalidInputSymbol("the solver reads bit strings")
        return BoundedSolverProcess(self, word)


# --------------------------------------------------------------------------
# the contradiction harness

ZERO_CASE, ONE_CASE, NO_ANSWER = "ZeroCase", "OneCase", "SolverDidNotAnswer"


@dataclass
class HaltingSolverClaim:
    """A machine claimed to decide, from a code n_Z, whether n_Z lies in the
    domain of Z's bit function.  The claim can only be spot-checked."""
    solver: MachineDescription | BoundedHaltingSolver
    spot_checks: list[tuple[str, str, int]] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.solver.name

    def answer(self, code: str, budget: RunBudget) -> tuple[str | None, ZenoVerdict]:
        """The solver's bit on ``code`` (``None`` if it gave none), recorded
        as a spot check with its budget."""
        machine = TuringMachine(self.solver) if isinstance(self.solver, MachineDescription) else self.solver
        verdict = zeno_run(machine, code, budget)
        bit = verdict.bit if verdict.bit in ("0", "1") else None
        self.spot_checks.append((code[:64], bit if bit is not None else "none", budget.max_steps))
        return bit, verdict


@dataclass(frozen=True)
class ContradictionReport:
    solver: str
    n_x: str
    solver_bit: str | None
    solver_verdict: ZenoVerdict
    diagonal_behavior: ZenoVerdict
    case: str
    consistent: bool
    form: str


def demonstrate_contradiction(claim: HaltingSolverClaim | MachineDescription | BoundedHaltingSolver,
                              budget: RunBudget = RunBudget(1_000_000, 100_000)) -> ContradictionReport:
    """Feed the diagonal machine X its own code and confront the solver's
    answer on that code with what X actually does.

    Syntactic solvers are diagonalized syntactically and ``n_X`` is the real
    encoding of X.  A :class:`BoundedHaltingSolver` is diagonalized
    semantically and ``n_X`` is a reference code bound to X in the solver.
    """
    if not isinstance(claim, HaltingSolverClaim):
        claim = HaltingSolverClaim(claim)
    y = claim.solver
    if isinstance(y, MachineDescription):
        x_desc = zeno_diagonalize_syntactic(y)
        n_x = encode(x_desc)
        x: SteppableMachine = TuringMachine(x_desc)
        form = "syntactic"
    else:
        x = zeno_diagonalize_semantic(y)
        n_x = "".join(format(b, "08b") for b in f"reference:{x.name}".encode("utf-8"))
        y.bind(n_x, x)
        form = "semantic"
    bit, y_verdict = claim.answer(n_x, budget)
    x_verdict = zeno_run(x, n_x, budget)
    if bit is None:
        case, consistent = NO_ANSWER, True
    elif bit == "0":
        case = ZERO_CASE
        consistent = in_domain(x_verdict) is not True
    else:
        case = ONE_CASE
        consistent = not isinstance(x_verdict, FirstCellOscillates)
    return ContradictionReport(claim.name, n_x, bit, y_verdict, x_verdict, case, consistent, form)


# --------------------------------------------------------------------------
# a solvable subclass

@dataclass(frozen=True)
class SubclassCheck:
    machine: str
    word: str
    solver_bit: str | None
    oracle: str


@dataclass(frozen=True)
class SubclassReport:
    family: tuple[str, ...]
    checks: tuple[SubclassCheck, ...]
    mismatches: tuple[SubclassCheck, ...]
    outside_subclass: tuple[str, ...]
    unresolved: tuple[SubclassCheck, ...]

    @property
    def verified(self) -> bool:
        return not (self.mismatches or self.outside_subclass or self.unresolved)


def subclass_solver_demo(family: Mapping[str, MachineDescription] | None = None,
                         max_len: int = 6, budget: RunBudget = RunBudget(100_000, 10_000)
                         ) -> tuple[str, MachineDescription, SubclassReport]:
    """The constant-1 machine decides halting on any family of machines that
    halt on every input; check it against the bounded oracle."""
    from . import gallery
    from .engine import words
    if family is None:
        family = {n: gallery.load(n) for n in ("increment", "parity", "copy")}
    solver = gallery.load("constant-1")
    checks, mismatches, unresolved = [], [], []
    outside: set[str] = set()
    for name, desc in sorted(family.items()):
        code = encode(desc)
        bit = zeno_run(TuringMachine(solver), code, budget).bit
        alphabet = sorted(desc.input_alphabet - {BLANK})
        for w in words(alphabet, max_len):
            o = halting_oracle_small(desc, w, budget)
            label = "Halts" if isinstance(o, Halts) else \
                "Diverges" if isinstance(o, DivergesCertified) else "Unknown"
            c = SubclassCheck(name, w, bit, label)
            checks.append(c)
            if label == "Diverges":
                outside.add(name)
            elif label == "Unknown":
                unresolved.append(c)
            elif bit != "1":
                mismatches.append(c)
    description = "machines that halt on every input"
    return description, solver, SubclassReport(tuple(sorted(family)), tuple(checks),
                                               tuple(mismatches), tuple(sorted(outside)),
                                               tuple(unresolved))
