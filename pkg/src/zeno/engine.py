"""Budgeted execution of steppable machines.

Every machine kind (syntactic Turing machines, compiled or macro-stepped
programs, diagonal wrappers) implements :class:`SteppableMachine`, and all
semantics in :mod:`zeno.limits` are written against that interface.

Divergence is only ever claimed through a :class:`CycleCertificate`: a pair
``(mu, lam)`` with configuration(mu) == configuration(mu + lam).  Candidate
repeats come from fingerprints, but a certificate is issued only after the
candidate has been re-simulated from the origin and compared cell by cell.
"""
from __future__ import annotations

import contextlib
import contextvars
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterator, Sequence

from .core import (BLANK, Configuration, MachineDescription, Outcome, Stuck,
                   as_word, displayed, initial_configuration, tape_word)


class Process(ABC):
    """A live, mutable configuration of some machine.

    ``advance`` mutates in place.  Once it returns a final outcome the process
    is a fixed point: further calls return the same outcome and change nothing.
    """

    steps: int
    last_output_change: int
    last_cell_one_change: int

    @abstractmethod
    def advance(self) -> Outcome: ...

    @property
    @abstractmethod
    def halted(self) -> bool: ...

    @abstractmethod
    def fingerprint(self) -> Hashable: ...

    @abstractmethod
    def same(self, other: "Process") -> bool:
        """Configuration equality, ignoring step counters."""

    @abstractmethod
    def copy(self) -> "Process": ...

    @property
    @abstractmethod
    def cell_one(self) -> str: ...

    @property
    @abstractmethod
    def output_head(self) -> int: ...

    @abstractmethod
    def output_word(self) -> str: ...

    @property
    def state_name(self) -> str:
        return "?"

    def trace_fields(self, radius: int) -> dict:
        return {}


class SteppableMachine(ABC):
    name: str = "machine"

    @abstractmethod
    def start(self, word) -> Process: ...


# --------------------------------------------------------------------------
# syntactic machines

def _zkey(tape: int, cell: int, sym: str) -> int:
    return 0 if sym == BLANK else hash((tape, cell, sym))


class TuringMachine(SteppableMachine):
    """Adapter exposing a :class:`MachineDescription` as a steppable machine."""

    def __init__(self, desc: MachineDescription):
        self.desc = desc
        self.name = desc.name
        self.table = desc.table()

    def start(self, word="") -> "TMProcess":
        return TMProcess(self, initial_configuration(self.desc, word))

    def resume(self, config: Configuration) -> "TMProcess":
        return TMProcess(self, config.copy())

    def __repr__(self) -> str:
        return f"TuringMachine({self.name!r})"


class TMProcess(Process):
    __slots__ = ("machine", "config", "zhash", "steps", "last_output_change",
                 "last_cell_one_change", "_halting", "_table")

    def __init__(self, machine: TuringMachine, config: Configuration):
        self.machine = machine
        self.config = config
        self._halting = machine.desc.halting
        self._table = machine.table
        self.steps = config.step_count
        self.last_output_change = 0
        self.last_cell_one_change = 0
        z = 0
        for cell, sym in config.work_tape.items():
            z ^= _zkey(1, cell, sym)
        for cell, sym in config.output_tape.items():
            z ^= _zkey(2, cell, sym)
        self.zhash = z

    def advance(self) -> Outcome:
        c = self.config
        if c.state in self._halting:
            return Outcome.HALTED
        work, out = c.work_tape, c.output_tape
        wh, oh = c.work_head, c.output_head
        old_w = work.get(wh, BLANK)
        old_o = out.get(oh, BLANK)
        action = self._table.get((c.state, c.input_tape.get(c.input_head, BLANK), old_w, old_o))
        if action is None:
            return Outcome.STUCK_MISSING
        nxt, ww, wo, mi, mw, mo = action
        if (mi < 0 and c.input_head == 1) or (mo < 0 and oh == 1):
            return Outcome.STUCK_BOUNDARY
        step_no = self.steps + 1
        if ww != old_w:
            self.zhash ^= _zkey(1, wh, old_w) ^ _zkey(1, wh, ww)
            if ww == BLANK:
                del work[wh]
            else:
                work[wh] = ww
        if wo != old_o:
            self.zhash ^= _zkey(2, oh, old_o) ^ _zkey(2, oh, wo)
            if wo == BLANK:
                del out[oh]
            else:
                out[oh] = wo
            if displayed(wo) != displayed(old_o):
                self.last_output_change = step_no
                if oh == 1:
                    self.last_cell_one_change = step_no
        c.state = nxt
        c.input_head += mi
        c.work_head = wh + mw
        c.output_head = oh + mo
        c.step_count = step_no
        self.steps = step_no
        return Outcome.STEPPED

    @property
    def halted(self) -> bool:
        return self.config.state in self._halting

    def fingerprint(self):
        c = self.config
        return (c.state, c.input_head, c.work_head, c.output_head, self.zhash)

    def same(self, other: "TMProcess") -> bool:
        return self.config.same_as(other.config)

    def copy(self) -> "TMProcess":
        p = TMProcess.__new__(TMProcess)
        p.machine = self.machine
        p.config = self.config.copy()
        p._halting = self._halting
        p._table = self._table
        p.zhash = self.zhash
        p.steps = self.steps
        p.last_output_change = self.last_output_change
        p.last_cell_one_change = self.last_cell_one_change
        return p

    @property
    def cell_one(self) -> str:
        return displayed(self.config.output_tape.get(1, BLANK))

    @property
    def output_head(self) -> int:
        return self.config.output_head

    def output_word(self) -> str:
        return tape_word(self.config.output_tape)

    @property
    def state_name(self) -> str:
        return self.config.state

    def trace_fields(self, radius: int) -> dict:
        c = self.config

        def window(tape, head, lo_limit):
            lo = max(lo_limit, head - radius)
            return [tape.get(i, BLANK) for i in range(lo, head + radius + 1)]

        return {
            "heads": [c.input_head, c.work_head, c.output_head],
            "tapes": [window(c.input_tape, c.input_head, 1),
                      window(c.work_tape, c.work_head, c.work_head - radius),
                      window(c.output_tape, c.output_head, 1)],
        }


# --------------------------------------------------------------------------
# budgets, certificates, verdicts

@dataclass(frozen=True)
class RunBudget:
    max_steps: int = 100_000
    max_fingerprints: int = 100_000

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_fingerprints <= 0:
            raise ValueError("budget bounds must be positive")


@dataclass(frozen=True)
class CycleCertificate:
    """configuration(mu) == configuration(mu + lam), with what an observer sees
    over one period.  ``mu`` counts steps from the run's origin."""
    mu: int
    lam: int
    cell_one_values: tuple[str, ...]
    output_head_positions: tuple[int, ...]
    output_constant: bool
    output: str
    last_output_change: int

    @property
    def cell_one_constant(self) -> bool:
        return len(set(self.cell_one_values)) == 1

    @property
    def head_parked_at_two(self) -> bool:
        return all(p == 2 for p in self.output_head_positions)


@dataclass(frozen=True)
class HaltedWithOutput:
    output: str
    steps: int
    output_head: int
    cell_one: str
    last_output_change: int


@dataclass(frozen=True)
class StuckAt:
    reason: Stuck
    steps: int
    output: str
    output_head: int
    cell_one: str
    last_output_change: int


@dataclass(frozen=True)
class CycleCertified:
    certificate: CycleCertificate


@dataclass(frozen=True)
class BudgetExhausted:
    last_step: int
    last_cell_one: str
    steps_since_cell_one_changed: int
    output: str
    output_head: int
    last_output_change: int


RunVerdict = HaltedWithOutput | StuckAt | CycleCertified | BudgetExhausted


class ForgedCertificate(AssertionError):
    """A cycle claim failed re-simulation.  Never expected; maps to exit status 3."""


_observers: contextvars.ContextVar[tuple] = contextvars.ContextVar("zeno_cert_observers", default=())


@contextlib.contextmanager
def observe_certificates(callback: Callable[[Process, CycleCertificate], None]) -> Iterator[None]:
    """Call ``callback(origin, certificate)`` for every certificate issued in
    this context.  ``origin`` is a private copy of the run's starting process."""
    token = _observers.set(_observers.get() + (callback,))
    try:
        yield
    finally:
        _observers.reset(token)


def _notify(origin: Process, cert: CycleCertificate) -> None:
    for cb in _observers.get():
        cb(origin.copy(), cert)


def certify(origin: Process, mu: int, lam: int) -> CycleCertificate | None:
    """Re-simulate from ``origin`` and build a certificate if the claimed
    repeat is genuine; ``None`` otherwise."""
    if mu < 0 or lam <= 0:
        return None
    p = origin.copy()
    for _ in range(mu):
        p.advance()
    anchor = p.copy()
    out_mark = p.last_output_change
    base_word = p.output_word()
    cells, heads = [], []
    changed = False
    for _ in range(lam):
        cells.append(p.cell_one)
        heads.append(p.output_head)
        before = p.last_output_change
        p.advance()
        if p.last_output_change != before:
            changed = True
    if not p.same(anchor):
        return None
    return CycleCertificate(mu, lam, tuple(cells), tuple(heads), not changed,
                            base_word, max(out_mark - origin.steps, 0))


def verify_certificate(origin: Process, cert: CycleCertificate) -> bool:
    again = certify(origin, cert.mu, cert.lam)
    return again is not None and again == cert


def issue_certificate(origin: Process, mu: int, lam: int) -> CycleCertificate | None:
    cert = certify(origin, mu, lam)
    if cert is not None:
        _notify(origin, cert)
    return cert


TraceSink = Callable[[dict], None]


def _trace_record(p: Process, radius: int) -> dict:
    rec = {"step": p.steps, "state": p.state_name, "cell_one": p.cell_one}
    rec.update(p.trace_fields(radius))
    return rec


def drive(proc: Process, budget: RunBudget, trace: TraceSink | None = None,
          sample_every: int = 1, radius: int = 3) -> RunVerdict:
    """Run ``proc`` (mutated) from its current configuration.

    Cycle search: the first ``max_fingerprints`` configurations are stored in
    a table that every later configuration is looked up in.  Past that point
    a Brent-style tortoise is kept as well, parked at steps C, 2C, 4C, ...;
    it only costs one stored configuration.
    """
    origin = proc.copy()
    base = proc.steps
    cap = budget.max_fingerprints
    seen: dict = {}
    tortoise: Process | None = None
    tortoise_fp = None
    tortoise_at = -1
    checkpoint = cap
    i = 0
    while True:
        if trace is not None and i % sample_every == 0:
            trace(_trace_record(proc, radius))
        if proc.halted:
            return HaltedWithOutput(proc.output_word(), proc.steps - base, proc.output_head,
                                    proc.cell_one, max(proc.last_output_change - base, 0))
        fp = proc.fingerprint()
        j = seen.get(fp)
        if j is None:
            if len(seen) < cap:
                seen[fp] = i
        else:
            cert = _confirm_table_hit(origin, j, i)
            if cert is not None:
                return CycleCertified(cert)
        if i >= cap:
            if tortoise is not None and i > tortoise_at and fp == tortoise_fp and proc.same(tortoise):
                cert = issue_certificate(origin, tortoise_at, i - tortoise_at)
                if cert is None:
                    raise ForgedCertificate("direct comparison disagreed with replay")
                return CycleCertified(cert)
            if i == checkpoint:
                tortoise, tortoise_fp, tortoise_at = proc.copy(), fp, i
                checkpoint = 2 * i
        if i >= budget.max_steps:
            c1 = proc.cell_one
            return BudgetExhausted(i, c1, i - max(proc.last_cell_one_change - base, 0),
                                   proc.output_word(), proc.output_head,
                                   max(proc.last_output_change - base, 0))
        outcome = proc.advance()
        if outcome.stuck:
            return StuckAt(outcome.reason, i, proc.output_word(), proc.output_head,
                           proc.cell_one, max(proc.last_output_change - base, 0))
        i += 1


def _confirm_table_hit(origin: Process, j: int, i: int) -> CycleCertificate | None:
    # Fingerprint equality is only a hint: replay both positions and compare.
    p = origin.copy()
    for _ in range(j):
        p.advance()
    anchor = p.copy()
    for _ in range(i - j):
        p.advance()
    if not p.same(anchor):
        return None
    cert = issue_certificate(origin, j, i - j)
    if cert is None:
        raise ForgedCertificate("replayed configurations matched but certification failed")
    return cert


def run(m: SteppableMachine, word, budget: RunBudget = RunBudget(),
        trace: TraceSink | None = None, *, sample_every: int = 1, radius: int = 3,
        accelerate: bool = True) -> RunVerdict:
    """Classical bounded run with cycle certification.

    Syntactic machines go through the array kernel in :mod:`zeno.dense`
    unless a trace is requested or ``accelerate`` is false; both paths
    implement the same search and return identical verdicts.
    """
    if accelerate and trace is None and isinstance(m, TuringMachine):
        from . import dense
        return dense.run_dense(m, word, budget)
    return drive(m.start(word), budget, trace, sample_every, radius)


# --------------------------------------------------------------------------
# bounded simulation primitive and desk-scale oracle

@dataclass(frozen=True)
class Halted:
    output: str
    steps: int


@dataclass(frozen=True)
class StillRunning:
    steps: int


def _simulation_target(m_bits: str, n) -> TMProcess | None:
    from .codec import decode
    desc = decode(m_bits)
    try:
        return TuringMachine(desc).start(n)
    except ValueError:
        return None


def bounded_simulate(m_bits: str, n, steps: int) -> Halted | StillRunning:
    """Run the machine encoded by ``m_bits`` on ``n`` for at most ``steps`` steps.

    Garbage codes decode to the looping machine, and a word the decoded
    machine cannot read counts as never halting.
    """
    if steps <= 0:
        raise ValueError("steps must be positive")
    return IncrementalSimulation(m_bits, n).query(steps)


class IncrementalSimulation:
    """``bounded_simulate`` for a growing step bound without restarting.

    Answers depend only on ``(m_bits, n, steps)``; the cached process is an
    optimization for dovetailing loops that ask about 1, 2, 3, ... steps.
    """

    def __init__(self, m_bits: str, n):
        self.m_bits, self.n = m_bits, n
        self._proc = _simulation_target(m_bits, n)
        self._halt_time: int | None = None
        self._dead = self._proc is None

    def query(self, steps: int) -> Halted | StillRunning:
        if self._halt_time is not None:
            if self._halt_time <= steps:
                return Halted(self._proc.output_word(), self._halt_time)
            return StillRunning(steps)
        if self._dead:
            return StillRunning(steps)
        p = self._proc
        while p.steps < steps:
            if p.halted:
                break
            if p.advance().stuck:
                self._dead = True
                return StillRunning(steps)
        if p.halted:
            self._halt_time = p.steps
            return Halted(p.output_word(), p.steps)
        return StillRunning(steps)


@dataclass(frozen=True)
class Halts:
    steps: int
    output: str


@dataclass(frozen=True)
class DivergesCertified:
    certificate: CycleCertificate | None
    stuck: Stuck | None = None


@dataclass(frozen=True)
class Unknown:
    steps_run: int


def halting_oracle_small(m: MachineDescription | SteppableMachine, word,
                         budget: RunBudget = RunBudget()) -> Halts | DivergesCertified | Unknown:
    """Sound but incomplete halting oracle.  A stuck machine never reaches a
    halt state, so it is reported as diverging with the stuck reason."""
    machine = TuringMachine(m) if isinstance(m, MachineDescription) else m
    v = run(machine, word, budget)
    if isinstance(v, HaltedWithOutput):
        return Halts(v.steps, v.output)
    if isinstance(v, CycleCertified):
        return DivergesCertified(v.certificate)
    if isinstance(v, StuckAt):
        return DivergesCertified(None, v.reason)
    return Unknown(v.last_step)


def words(alphabet: Sequence[str], max_len: int) -> Iterator[str]:
    """All words over ``alphabet`` up to ``max_len``, shortest first."""
    from itertools import product
    for n in range(max_len + 1):
        for t in product(sorted(alphabet), repeat=n):
            yield "".join(t)


__all__ = [
    "Process", "SteppableMachine", "TuringMachine", "TMProcess", "RunBudget",
    "CycleCertificate", "HaltedWithOutput", "StuckAt", "CycleCertified",
    "BudgetExhausted", "RunVerdict", "run", "drive", "certify", "verify_certificate",
    "observe_certificates", "bounded_simulate", "IncrementalSimulation", "Halted",
    "StillRunning", "halting_oracle_small", "Halts", "DivergesCertified", "Unknown",
    "ForgedCertificate", "words", "as_word",
]
