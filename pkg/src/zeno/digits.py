"""Decimal digits of pi and digit files.

A digit file holds plain decimal digits with no decimal point; for pi its
first line is ``3`` and the fractional digits follow on later lines.
"""
from __future__ import annotations

from itertools import islice
from pathlib import Path
from typing import Iterator

LINE = 100


def pi_digit_stream() -> Iterator[int]:
    """Unbounded spigot (Gibbons' streaming form of the Leibniz-Euler
    series): yields 3, 1, 4, 1, 5, ... using exact integer arithmetic."""
    q, r, t, k, n, l = 1, 0, 1, 1, 3, 3
    while True:
        if 4 * q + r - t < n * t:
            yield n
            q, r, n = 10 * q, 10 * (r - n * t), (10 * (3 * q + r)) // t - 10 * n
        else:
            q, r, t, k, n, l = (q * k, (2 * q + r) * l, t * l, k + 1,
                                (q * (7 * k + 2) + r * l) // (t * l), l + 2)


def pi_digits(count: int) -> str:
    """The first ``count`` digits of pi, leading 3 included."""
    if count < 0:
        raise ValueError("count must be non-negative")
    return "".join(map(str, islice(pi_digit_stream(), count)))


def format_digit_file(digits: str) -> str:
    if not digits.isdigit():
        raise ValueError("digit files hold decimal digits only")
    head, rest = digits[0], digits[1:]
    lines = [head] + [rest[k:k + LINE] for k in range(0, len(rest), LINE)]
    return "\n".join(lines) + "\n"


def write_digit_file(path: str | Path, count: int) -> None:
    Path(path).write_text(format_digit_file(pi_digits(count)), encoding="utf-8")


def parse_digit_file(text: str) -> str:
    digits = "".join(text.split())
    if not digits.isdigit():
        bad = next(c for c in digits if not c.isdigit()) if digits else "nothing"
        raise ValueError(f"digit file contains {bad!r}; expected decimal digits")
    return digits


def read_digit_file(path: str | Path) -> str:
    return parse_digit_file(Path(path).read_text(encoding="utf-8"))


def first_match_end(stream: str, pattern: str) -> int | None:
    """1-based position of the last digit of the first occurrence of
    ``pattern`` in ``stream``."""
    at = stream.find(pattern)
    return None if at < 0 else at + len(pattern)
