"""Transfinite readings of a run: Zeno limits, inductive stabilization and
infinite-time (lim sup) stages.

All three reduce "what happens after infinitely many steps" to a finite
question answered by a :class:`~zeno.engine.CycleCertificate`.  A halted or
stuck configuration is a fixed point and is certified as a cycle of length 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import BLANK, Configuration, MachineDescription, TransitionRule, validate
from .engine import (BudgetExhausted, CycleCertificate, CycleCertified, HaltedWithOutput,
                     Process, RunBudget, SteppableMachine, StuckAt, TraceSink, TuringMachine, drive,
                     issue_certificate, run)


def _fixed_point_certificate(m: SteppableMachine, word, steps: int) -> CycleCertificate:
    cert = issue_certificate(m.start(word), steps, 1)
    assert cert is not None, "a halted or stuck configuration must be a fixed point"
    return cert


# --------------------------------------------------------------------------
# Zeno semantics

@dataclass(frozen=True)
class ClassicallyHalted:
    output: str
    output_head: int
    steps: int
    cell_one: str

    @property
    def computes_bit(self) -> bool:
        return self.output_head == 2

    @property
    def bit(self) -> str | None:
        return self.cell_one if self.computes_bit else None


@dataclass(frozen=True)
class LimitStabilized:
    cell_one: str
    certificate: CycleCertificate

    @property
    def bit(self) -> str:
        return self.cell_one


@dataclass(frozen=True)
class FirstCellOscillates:
    certificate: CycleCertificate
    bit = None


@dataclass(frozen=True)
class OutputHeadUnstable:
    """Certified cycle with a constant first cell, but the output head is not
    parked at cell 2 or some output cell keeps changing."""
    certificate: CycleCertificate
    bit = None


@dataclass(frozen=True)
class Undetermined:
    last_cell_one: str
    steps_since_cell_one_changed: int
    steps_run: int
    bit = None


ZenoVerdict = ClassicallyHalted | LimitStabilized | FirstCellOscillates | OutputHeadUnstable | Undetermined


def classify_cycle(cert: CycleCertificate) -> LimitStabilized | FirstCellOscillates | OutputHeadUnstable:
    """Oscillation of cell 1 wins over head behavior."""
    if not cert.cell_one_constant:
        return FirstCellOscillates(cert)
    if cert.head_parked_at_two and cert.output_constant:
        return LimitStabilized(cert.cell_one_values[0], cert)
    return OutputHeadUnstable(cert)


def zeno_run(m: SteppableMachine, word, budget: RunBudget = RunBudget(),
             trace: TraceSink | None = None, sample_every: int = 1) -> ZenoVerdict:
    v = run(m, word, budget, trace, sample_every=sample_every)
    if isinstance(v, HaltedWithOutput):
        return ClassicallyHalted(v.output, v.output_head, v.steps, v.cell_one)
    if isinstance(v, StuckAt):
        return classify_cycle(_fixed_point_certificate(m, word, v.steps))
    if isinstance(v, CycleCertified):
        return classify_cycle(v.certificate)
    return Undetermined(v.last_cell_one, v.steps_since_cell_one_changed, v.last_step)


def in_domain(verdict: ZenoVerdict) -> bool | None:
    """Whether the input lies in the domain of the computed bit function.

    ``None`` when the budget did not settle the question.
    """
    if isinstance(verdict, Undetermined):
        return None
    return verdict.bit is not None


# --------------------------------------------------------------------------
# inductive semantics

@dataclass(frozen=True)
class OutputStableCertified:
    word: str
    since_step: int
    certificate: CycleCertificate


@dataclass(frozen=True)
class OutputStableHeuristic:
    """Not a proof: the output merely did not change during the last ``window``
    steps before the budget ran out."""
    word: str
    since_step: int
    window: int
    certified = False


@dataclass(frozen=True)
class OutputChanged:
    last_change_step: int
    certificate: CycleCertificate | None = None


@dataclass(frozen=True)
class InductiveUndetermined:
    steps_run: int


InductiveVerdict = OutputStableCertified | OutputStableHeuristic | OutputChanged | InductiveUndetermined


def _last_change_in_cycle(m: SteppableMachine, word, cert: CycleCertificate) -> int:
    p = m.start(word)
    base = p.steps
    for _ in range(cert.mu + cert.lam):
        p.advance()
    return p.last_output_change - base


def inductive_run(m: SteppableMachine, word, budget: RunBudget = RunBudget(),
                  stability_window: int = 1000, trace: TraceSink | None = None,
                  sample_every: int = 1) -> InductiveVerdict:
    if stability_window <= 0:
        raise ValueError("stability window must be positive")
    v = run(m, word, budget, trace, sample_every=sample_every)
    if isinstance(v, (HaltedWithOutput, StuckAt)):
        cert = _fixed_point_certificate(m, word, v.steps)
        return OutputStableCertified(v.output, v.last_output_change, cert)
    if isinstance(v, CycleCertified):
        cert = v.certificate
        if cert.output_constant:
            return OutputStableCertified(cert.output, cert.last_output_change, cert)
        return OutputChanged(_last_change_in_cycle(m, word, cert), cert)
    if v.last_step - v.last_output_change >= stability_window:
        return OutputStableHeuristic(v.output, v.last_output_change, stability_window)
    return InductiveUndetermined(v.last_step)


# --------------------------------------------------------------------------
# infinite-time semantics

class AlphabetNotBinary(ValueError):
    pass


@dataclass(frozen=True, order=True)
class OrdinalClock:
    """The ordinal ``omega*limit_stages + successor_steps``."""
    limit_stages: int
    successor_steps: int

    def __str__(self) -> str:
        k, n = self.limit_stages, self.successor_steps
        if k == 0:
            return str(n)
        head = "ω" if k == 1 else f"ω·{k}"
        return head if n == 0 else f"{head}+{n}"


@dataclass(frozen=True)
class LimitStage:
    """Limit configuration reached at ordinal omega*index, and the certificate
    of the cycle it was computed from (steps counted from the previous stage)."""
    index: int
    certificate: CycleCertificate
    work_tape: dict = field(hash=False, compare=True)
    output_tape: dict = field(hash=False, compare=True)
    state: str = ""
    heads: tuple[int, int, int] = (1, 1, 1)


@dataclass(frozen=True)
class HaltedAtOrdinal:
    clock: OrdinalClock
    output: str
    stages: tuple[LimitStage, ...] = ()


@dataclass(frozen=True)
class LimitStageUncertifiable:
    stage_index: int
    reason: str = "NoCycleWithinBudget"
    stages: tuple[LimitStage, ...] = ()


@dataclass(frozen=True)
class OrdinalBudgetExhausted:
    clock: OrdinalClock
    stages: tuple[LimitStage, ...] = ()


IttmVerdict = HaltedAtOrdinal | LimitStageUncertifiable | OrdinalBudgetExhausted


def binary_form(desc: MachineDescription) -> MachineDescription:
    """Identify '0' with the blank on every tape.

    Raises :class:`AlphabetNotBinary` if a tape uses other symbols or if the
    machine distinguishes '0' from blank in a way the identification breaks.
    """
    for label, alphabet in (("input", desc.input_alphabet), ("work", desc.work_alphabet),
                            ("output", desc.output_alphabet)):
        extra = set(alphabet) - {BLANK, "0", "1"}
        if extra:
            raise AlphabetNotBinary(f"{label} alphabet has non-binary symbols {sorted(extra)}")

    def z(s: str) -> str:
        return BLANK if s == "0" else s

    rules = {TransitionRule(r.state, z(r.read_input), z(r.read_work), z(r.read_output),
                            r.next_state, z(r.write_work), z(r.write_output),
                            r.move_input, r.move_work, r.move_output) for r in desc.rules}
    binary = MachineDescription(desc.name, frozenset({BLANK, "1"}), frozenset({BLANK, "1"}),
                                frozenset({BLANK, "1"}), desc.states, desc.start, desc.halting,
                                tuple(rules))
    if not validate(binary).ok:
        raise AlphabetNotBinary("machine separates '0' from blank")
    return binary


def limit_configuration(stage_start: Process, cert: CycleCertificate, start_state: str) -> Configuration:
    """lim sup of the work and output tapes over one certified period, heads
    back at cell 1 and the machine in its start state."""
    p = stage_start.copy()
    for _ in range(cert.mu):
        p.advance()
    work: dict[int, str] = {}
    out: dict[int, str] = {}
    for _ in range(cert.lam):
        c = p.config
        for cell, sym in c.work_tape.items():
            if sym == "1":
                work[cell] = "1"
        for cell, sym in c.output_tape.items():
            if sym == "1":
                out[cell] = "1"
        p.advance()
    c = p.config
    return Configuration(start_state, c.input_tape, work, out, 1, 1, 1, c.step_count)


def ittm_run(m: MachineDescription | TuringMachine, word, limit_stages: int = 1,
             per_stage: RunBudget = RunBudget()) -> IttmVerdict:
    desc = m.desc if isinstance(m, TuringMachine) else m
    tm = TuringMachine(binary_form(desc))
    tape = {}
    for pos, sym in enumerate(word, 1):
        if sym not in ("0", "1"):
            raise AlphabetNotBinary(f"input symbol {sym!r} at position {pos} is not binary")
        if sym == "1":
            tape[pos] = "1"
    proc = tm.resume(Configuration(desc.start, tape, {}, {}))
    stages: list[LimitStage] = []
    k = 0
    while True:
        origin = proc.copy()
        v = drive(proc, per_stage)
        if isinstance(v, HaltedWithOutput):
            return HaltedAtOrdinal(OrdinalClock(k, v.steps), v.output, tuple(stages))
        if isinstance(v, StuckAt):
            cert = issue_certificate(origin, v.steps, 1)
        elif isinstance(v, CycleCertified):
            cert = v.certificate
        else:
            return LimitStageUncertifiable(k + 1, "NoCycleWithinBudget", tuple(stages))
        if k == limit_stages:
            return OrdinalBudgetExhausted(OrdinalClock(k, 0), tuple(stages))
        config = limit_configuration(origin, cert, desc.start)
        k += 1
        stages.append(LimitStage(k, cert, dict(config.work_tape), dict(config.output_tape),
                                 config.state, (1, 1, 1)))
        proc = tm.resume(config)
