import random

import pytest
from hypothesis import given, settings, strategies as st

from zeno import gallery
from zeno.codec import (D_LOOP, ParseErrors, ValidationErrors, canonical, decode, encode,
                        parse_description, print_canonical)
from zeno.core import MachineDescription, validate

seeds = st.integers(0, 2**32 - 1)


def bits_of(text: str) -> str:
    return "".join(format(b, "08b") for b in text.encode("utf-8"))


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_decode_inverts_encode(seed):
    m = gallery.random_machine(random.Random(seed))
    assert decode(encode(m)) == canonical(m)
    assert print_canonical(decode(encode(m))) == print_canonical(m)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_canonical_text_is_a_fixed_point(seed):
    m = gallery.random_machine(random.Random(seed))
    text = print_canonical(m)
    assert print_canonical(parse_description(text)) == text


@settings(max_examples=300, deadline=None)
@given(st.text("01", max_size=400))
def test_decode_is_total(bits):
    d = decode(bits)
    assert d is D_LOOP or validate(d).ok


def test_encoding_ignores_rule_order_and_layout():
    text = gallery.text("increment")
    lines = text.splitlines()
    header = [l for l in lines if "->" not in l]
    rules = [l for l in lines if "->" in l]
    shuffled = "\n".join(header + rules[::-1] + ["", "# trailing comment"]) + "\n"
    assert encode(parse_description(shuffled)) == encode(gallery.load("increment"))


def test_encoding_is_utf8_bits_msb_first():
    bits = encode(gallery.load("halt-now"))
    assert bits.startswith(bits_of("machine "))
    assert len(bits) % 8 == 0 and set(bits) <= {"0", "1"}


def test_garbage_decodes_to_the_looper():
    for bits in ("", "0", "1" * 7, "0" * 16, bits_of("machine x\nbogus\n"), "11111111" * 3,
                 bits_of("machine") + "1" * 8):
        assert decode(bits) is D_LOOP
    assert validate(D_LOOP).ok and not D_LOOP.halting


def test_escapes_roundtrip():
    text = ("machine esc\\#1\ninput-alphabet _ \\# a\\\\b\nwork-alphabet _\n"
            "output-alphabet _ x\\#y\nstates s h\nstart s\nhalt h\n"
            "s \\# _ _ -> h _ x\\#y SSS  # comment\n")
    d = parse_description(text)
    assert d.name == "esc#1"
    assert d.input_alphabet == frozenset({"_", "#", "a\\b"})
    assert decode(encode(d)) == d


@pytest.mark.parametrize("text, line, col, fragment", [
    ("nonsense\n", 1, 1, "MissingHeader"),
    ("machine x\nstates a\nstart a\nbogus line\n", 4, 1, "unrecognized"),
    ("machine x\ninput-alphabet _\nwork-alphabet _\noutput-alphabet _\nstates a\nstart a\nhalt\n"
     "a _ _ _ -> a _ _ SXS\n", 8, 18, "bad moves"),
])
def test_parse_errors_carry_positions(text, line, col, fragment):
    with pytest.raises(ParseErrors) as exc:
        parse_description(text)
    first = exc.value.errors[0]
    assert (first.line, first.column) == (line, col)
    assert fragment in first.message


def test_invalid_machines_raise_validation_errors():
    text = "machine x\ninput-alphabet _\nwork-alphabet _\noutput-alphabet _\nstates a\nstart b\nhalt\n"
    with pytest.raises(ValidationErrors) as exc:
        parse_description(text)
    assert "StartNotDeclared" in str(exc.value)
    assert isinstance(parse_description(text, check=False), MachineDescription)


def test_bundled_machine_files_are_canonical_modulo_comments():
    for name in gallery.names():
        d = gallery.load(name)
        assert decode(encode(d)) == d
