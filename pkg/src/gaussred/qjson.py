"""Bit-exact JSON encoding of rationals as "p/q" (or "p") strings."""
from __future__ import annotations

from fractions import Fraction


def q(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def unq(text) -> Fraction:
    if isinstance(text, bool):
        raise ValueError("boolean is not a rational")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a rational string, got {type(text).__name__}")
    return Fraction(text.strip())


def unq_int(text) -> int:
    value = unq(text)
    if value.denominator != 1:
        raise ValueError(f"expected an integer, got {text!r}")
    return value.numerator


def qvec(values) -> list[str]:
    return [q(v) for v in values]


def qmat(rows) -> list[list[str]]:
    return [qvec(row) for row in rows]


def unqvec(values) -> list[Fraction]:
    return [unq(v) for v in values]


def unqmat(rows) -> list[list[Fraction]]:
    return [unqvec(row) for row in rows]
