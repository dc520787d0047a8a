import random

import pytest
from hypothesis import given, settings, strategies as st

from zeno import gallery
from zeno.core import BLANK, MachineDescription, rule
from zeno.engine import BudgetExhausted, CycleCertificate, RunBudget, TuringMachine, run
from zeno.limits import (AlphabetNotBinary, ClassicallyHalted, FirstCellOscillates,
                         HaltedAtOrdinal, InductiveUndetermined, LimitStabilized,
                         LimitStageUncertifiable, OrdinalBudgetExhausted, OrdinalClock,
                         OutputChanged, OutputHeadUnstable, OutputStableCertified,
                         OutputStableHeuristic, Undetermined, binary_form, classify_cycle,
                         in_domain, inductive_run, ittm_run, zeno_run)

B = RunBudget(10_000, 10_000)


def tm(name):
    return TuringMachine(gallery.load(name))


def machine(rules, outs=("0", "1"), work=(), halting=()):
    return TuringMachine(MachineDescription.build(
        "m", input_alphabet={"0", "1"}, work_alphabet=set(work), output_alphabet=set(outs),
        states={"a", "b", "h"}, start="a", halting=set(halting), rules=rules))


def cert(cells, heads, constant=True):
    return CycleCertificate(0, len(cells), tuple(cells), tuple(heads), constant, "", 0)


def test_classification_order():
    assert isinstance(classify_cycle(cert("01", (1, 1))), FirstCellOscillates)
    assert isinstance(classify_cycle(cert("01", (2, 2))), FirstCellOscillates)
    assert isinstance(classify_cycle(cert("11", (2, 3))), OutputHeadUnstable)
    assert isinstance(classify_cycle(cert("11", (2, 2), constant=False)), OutputHeadUnstable)
    v = classify_cycle(cert("11", (2, 2)))
    assert isinstance(v, LimitStabilized) and v.bit == "1"


def test_zeno_verdicts_for_bundled_machines():
    assert isinstance(zeno_run(tm("flip"), "", B), FirstCellOscillates)
    v = zeno_run(tm("write1-park-loop"), "", B)
    assert isinstance(v, LimitStabilized) and v.bit == "1" and in_domain(v)
    v = zeno_run(tm("parity"), "101", B)
    assert v == ClassicallyHalted("1", 2, 4, "1") and v.bit == "1"
    v = zeno_run(tm("copy"), "101", B)
    assert isinstance(v, ClassicallyHalted) and v.bit is None and not in_domain(v)
    v = zeno_run(tm("output-marcher"), "", RunBudget(1000, 1000))
    assert isinstance(v, Undetermined) and in_domain(v) is None
    assert v.steps_run == 1000 and v.last_cell_one == BLANK
    assert isinstance(zeno_run(tm("bounce"), "", B), OutputHeadUnstable)


def test_stuck_runs_are_limit_fixed_points():
    v = zeno_run(tm("input-left"), "", B)
    assert isinstance(v, OutputHeadUnstable) and v.certificate.lam == 1
    parked = machine([rule("a", (BLANK, BLANK, BLANK), "b", (BLANK, "1"), "SSR")])
    v = zeno_run(parked, "", B)
    assert isinstance(v, LimitStabilized) and v.bit == "1"


def test_inductive_verdicts():
    v = inductive_run(tm("write1-park-loop"), "", B)
    assert isinstance(v, OutputStableCertified) and v.word == "1" and v.since_step == 1
    v = inductive_run(tm("copy"), "0110", B)
    assert isinstance(v, OutputStableCertified) and v.word == "0110" and v.since_step == 4
    v = inductive_run(tm("flip"), "", B)
    assert isinstance(v, OutputChanged) and v.certificate is not None and v.last_change_step == 3
    v = inductive_run(tm("write1-march"), "", RunBudget(5000, 100), stability_window=1000)
    assert v == OutputStableHeuristic("1", 1, 1000)
    painter = machine([rule("a", (BLANK, BLANK, BLANK), "a", (BLANK, "1"), "SSR")])
    assert inductive_run(painter, "", RunBudget(500, 100)) == InductiveUndetermined(500)
    with pytest.raises(ValueError):
        inductive_run(tm("flip"), "", B, stability_window=0)


def test_ordinal_clock():
    assert str(OrdinalClock(0, 7)) == "7"
    assert str(OrdinalClock(1, 0)) == "ω"
    assert str(OrdinalClock(1, 1)) == "ω+1"
    assert str(OrdinalClock(3, 2)) == "ω·3+2"
    assert OrdinalClock(0, 10**9) < OrdinalClock(1, 0) < OrdinalClock(1, 1)


def test_ittm_runs():
    v = ittm_run(gallery.load("constant-1"), "")
    assert v == HaltedAtOrdinal(OrdinalClock(0, 1), "1")
    v = ittm_run(gallery.load("two-phase"), "", limit_stages=2)
    assert isinstance(v, HaltedAtOrdinal) and v.clock == OrdinalClock(1, 1) and v.output == "1"
    assert len(v.stages) == 1 and v.stages[0].output_tape == {1: "1"}
    v = ittm_run(gallery.load("flip"), "", limit_stages=3)
    assert isinstance(v, OrdinalBudgetExhausted) and v.clock == OrdinalClock(3, 0)
    assert [s.index for s in v.stages] == [1, 2, 3]
    v = ittm_run(gallery.load("work-marcher"), "", per_stage=RunBudget(1000, 100))
    assert isinstance(v, LimitStageUncertifiable) and v.stage_index == 1


def test_ittm_limit_is_lim_sup_of_work_tape():
    # the counter's work cells all hold 1 cofinally often only if the run is
    # periodic; here a two-state machine alternates a work cell
    m = MachineDescription.build(
        "alt", input_alphabet={"0", "1"}, work_alphabet={"1"}, output_alphabet={"1"},
        states={"a", "b"}, start="a", halting=set(),
        rules=[rule("a", (BLANK, BLANK, BLANK), "b", ("1", BLANK), "SSS"),
               rule("b", (BLANK, "1", BLANK), "a", (BLANK, BLANK), "SSS")])
    v = ittm_run(m, "", limit_stages=1)
    assert v.stages[0].work_tape == {1: "1"} and v.stages[0].output_tape == {}


def test_binary_form_checks():
    with pytest.raises(AlphabetNotBinary):
        binary_form(gallery.random_solver(random.Random(0)))      # work symbol 'm'
    with pytest.raises(AlphabetNotBinary, match="separates"):
        binary_form(gallery.load("parity"))
    assert binary_form(gallery.load("flip")).output_alphabet == frozenset({"_", "1"})
    with pytest.raises(AlphabetNotBinary):
        ittm_run(gallery.load("two-phase"), "2")
    b = binary_form(gallery.load("constant-0"))
    assert b.output_alphabet == frozenset({"_", "1"})


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_certified_zeno_verdicts_survive_larger_budgets(seed):
    rng = random.Random(seed)
    y = gallery.random_solver(rng)
    w = "".join(rng.choice("01") for _ in range(rng.randint(0, 8)))
    small = zeno_run(TuringMachine(y), w, RunBudget(200, 50))
    large = zeno_run(TuringMachine(y), w, RunBudget(20_000, 5000))
    if not isinstance(small, Undetermined):
        assert type(small) is type(large) and small.bit == large.bit


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_zeno_verdict_follows_classical_verdict(seed):
    rng = random.Random(seed)
    m = gallery.random_machine(rng, density=0.9)
    w = [rng.choice(sorted(m.input_alphabet - {"_"})) for _ in range(rng.randint(0, 4))]
    c = run(TuringMachine(m), w, B)
    z = zeno_run(TuringMachine(m), w, B)
    if isinstance(c, BudgetExhausted):
        assert isinstance(z, Undetermined)
    elif type(c).__name__ == "HaltedWithOutput":
        assert isinstance(z, ClassicallyHalted) and z.output == c.output
    else:
        assert isinstance(z, (LimitStabilized, FirstCellOscillates, OutputHeadUnstable))
