import pytest
from hypothesis import given, settings, strategies as st

from zeno import gallery
from zeno.core import (BLANK, Configuration, InvalidInputSymbol, IssueKind, MachineDescription,
                       Move, Outcome, displayed, first_output_cell, initial_configuration, rule,
                       step, tape_word, validate)


def tiny(rules, **kw):
    base = dict(input_alphabet={"0", "1"}, work_alphabet={"a"}, output_alphabet={"0", "1"},
                states={"s", "t", "h"}, start="s", halting={"h"})
    base.update(kw)
    return MachineDescription.build("tiny", rules=rules, **base)


def test_initial_configuration_heads_start_at_one():
    c = initial_configuration(gallery.load("copy"), "101")
    assert (c.input_head, c.work_head, c.output_head) == (1, 1, 1)
    assert c.input_tape == {1: "1", 2: "0", 3: "1"}
    assert c.work_tape == {} and c.output_tape == {} and c.step_count == 0


def test_input_symbols_are_checked():
    with pytest.raises(InvalidInputSymbol, match="position 2"):
        initial_configuration(gallery.load("copy"), "1x")
    with pytest.raises(InvalidInputSymbol):
        initial_configuration(gallery.load("copy"), ["0", BLANK])


def test_step_writes_then_moves():
    d = tiny([rule("s", ("1", BLANK, BLANK), "t", ("a", "1"), "RLR")])
    c, out = step(d, initial_configuration(d, "1"))
    assert out is Outcome.STEPPED
    assert c.state == "t" and c.work_tape == {1: "a"} and c.output_tape == {1: "1"}
    assert (c.input_head, c.work_head, c.output_head, c.step_count) == (2, 0, 2, 1)


def test_step_is_pure():
    d = tiny([rule("s", ("1", BLANK, BLANK), "s", ("a", "1"), "RRR")])
    c0 = initial_configuration(d, "1")
    step(d, c0)
    assert c0.work_tape == {} and c0.output_tape == {} and c0.step_count == 0


def test_writing_blank_erases():
    d = tiny([rule("s", (BLANK, BLANK, "1"), "h", (BLANK, BLANK), "SSS")])
    c = Configuration("s", {}, {}, {1: "1"})
    c, _ = step(d, c)
    assert c.output_tape == {}


def test_missing_rule_and_boundary_leave_configuration_unchanged():
    d = tiny([rule("s", ("0", BLANK, BLANK), "t", ("a", "1"), "LSS"),
              rule("s", ("1", BLANK, BLANK), "t", ("a", "1"), "SSL")])
    for w in ("0", "1"):
        c0 = initial_configuration(d, w)
        c, out = step(d, c0)
        assert out is Outcome.STUCK_BOUNDARY and c is c0 and c.work_tape == {}
    c0 = initial_configuration(d, "")
    c, out = step(d, c0)
    assert out is Outcome.STUCK_MISSING and c is c0


def test_halt_state_is_a_fixed_point():
    d = gallery.load("halt-now")
    c0 = initial_configuration(d, "")
    c, out = step(d, c0)
    assert out is Outcome.HALTED and c is c0


def test_work_tape_is_two_way_infinite():
    d = gallery.load("bounce")
    c, _ = step(d, Configuration("b", {}, {}, {}, work_head=-5))
    assert c.work_head == -6


def test_display_convention():
    assert displayed("[1]^0") == "0"
    assert displayed("a^b^c") == "c"
    assert displayed("x") == "x"
    c = Configuration("s", {}, {}, {1: "[_]^1", 3: "{_}^_"})
    assert first_output_cell(c) == "1" and first_output_cell(c, raw=True) == "[_]^1"
    assert tape_word(c.output_tape) == "1"
    assert tape_word({1: "0", 4: "1"}) == "0__1"


@pytest.mark.parametrize("change, kind", [
    (dict(start="nope"), IssueKind.BAD_START),
    (dict(halting={"zz"}), IssueKind.BAD_HALT),
    (dict(input_alphabet=frozenset({"0"})), IssueKind.MISSING_BLANK),
])
def test_validation_of_header(change, kind):
    d = tiny([rule("s", ("0", BLANK, BLANK), "h", (BLANK, BLANK), "SSS")])
    fields = {**d.__dict__, **change}
    bad = MachineDescription(**fields)
    assert kind in validate(bad).kinds()


def test_validation_of_rules():
    d = tiny([rule("s", ("0", BLANK, BLANK), "q", (BLANK, BLANK), "SSS"),
              rule("s", ("2", BLANK, BLANK), "h", (BLANK, BLANK), "SSS"),
              rule("h", ("0", BLANK, BLANK), "h", (BLANK, BLANK), "SSS"),
              rule("t", ("1", BLANK, BLANK), "h", (BLANK, BLANK), "SSS"),
              rule("t", ("1", BLANK, BLANK), "s", (BLANK, BLANK), "SSS")])
    kinds = validate(d).kinds()
    assert IssueKind.UNDECLARED_STATE in kinds
    assert IssueKind.UNDECLARED_SYMBOL in kinds
    assert IssueKind.RULE_ON_HALT_STATE in kinds
    assert kinds.count(IssueKind.NONDETERMINISM) == 1


def test_identical_duplicate_rules_collapse():
    r = rule("s", ("0", BLANK, BLANK), "h", (BLANK, BLANK), "SSS")
    d = tiny([r, r])
    assert validate(d).ok and len(d.rules) == 1


def test_bundled_machines_validate():
    assert len(gallery.names()) >= 20
    for name in gallery.names():
        assert validate(gallery.load(name)).ok, name


def test_move_letters():
    assert [Move.parse(c) for c in "LSR"] == [Move.LEFT, Move.STAY, Move.RIGHT]
    assert [m.letter for m in Move] == ["L", "S", "R"]
    with pytest.raises(ValueError):
        Move.parse("X")


@settings(max_examples=60, deadline=None)
@given(st.text("01", max_size=12))
def test_copy_machine_steps_match_word(word):
    d = gallery.load("copy")
    c = initial_configuration(d, word)
    table = d.table()
    for _ in range(len(word) + 1):
        c, out = step(d, c, table)
        assert out is Outcome.STEPPED
    assert c.state in d.halting and c.output_word() == word
