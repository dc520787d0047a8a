import pytest
from hypothesis import given, strategies as st

from oracles import mpmath_pi_digits
from zeno.digits import (first_match_end, format_digit_file, parse_digit_file, pi_digits,
                         read_digit_file, write_digit_file)


def test_spigot_matches_mpmath():
    assert pi_digits(3000) == mpmath_pi_digits(3000)
    assert pi_digits(0) == "" and pi_digits(5) == "31415"
    with pytest.raises(ValueError):
        pi_digits(-1)


def test_first_777_in_pi():
    digits = mpmath_pi_digits(2000)
    assert first_match_end(digits, "777") == digits.index("777") + 3
    assert digits[first_match_end(digits, "777") - 3:first_match_end(digits, "777")] == "777"
    assert first_match_end("3141", "99") is None


@given(st.text("0123456789", min_size=1, max_size=450))
def test_digit_file_roundtrip(digits):
    text = format_digit_file(digits)
    assert parse_digit_file(text) == digits
    lines = text.splitlines()
    assert lines[0] == digits[0] and all(len(l) <= 100 for l in lines)


def test_digit_file_on_disk(tmp_path):
    path = tmp_path / "pi.txt"
    write_digit_file(path, 250)
    assert path.read_text().splitlines()[:2] == ["3", pi_digits(101)[1:]]
    assert read_digit_file(path) == pi_digits(250)


def test_bad_digit_files():
    with pytest.raises(ValueError, match="'.'"):
        parse_digit_file("3.14159")
    with pytest.raises(ValueError):
        format_digit_file("12a")
