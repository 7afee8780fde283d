"""Exact scalar prelude used throughout the code base.

Every scalar in the core is a `fractions.Fraction`; floats are rejected at the
boundary so no rounding can leak into an identity check.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable, Iterable, TypeVar

A = TypeVar("A")
B = TypeVar("B")


def fraction(value: Any) -> Fraction:
    """Convert an exact scalar description to a `Fraction`.

    Args:
    ----
        value: an `int`, a `Fraction`, or a string such as ``"3"`` or ``"-2/7"``

    Returns:
    -------
        Fraction: the reduced value

    Raises:
    ------
        TypeError: for floats, booleans and other inexact inputs
        ValueError: for malformed strings or a zero denominator

    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"Inexact scalar {value!r}; use an int or a 'p/q' string.")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE_ "):
            raise ValueError(f"Malformed fraction {value!r}.")
        try:
            return Fraction(text)
        except ZeroDivisionError as err:
            raise ValueError(f"Zero denominator in {value!r}.") from err
    raise TypeError(f"Cannot read {value!r} as an exact fraction.")


def fraction_str(x: Fraction) -> str:
    """Canonical text form: ``"p"`` for integers, ``"p/q"`` otherwise."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def mul(a: A, b: A) -> A:
    """Multiply two exact values."""
    return a * b  # type: ignore[operator]


def reduce(fn: Callable[[B, A], B], iter: Iterable[A], init: B) -> B:
    """Left fold of `iter` with `fn` starting from `init`."""
    for x in iter:
        init = fn(init, x)
    return init


def prod(iter: Iterable[A]) -> Any:
    """Exact product of all elements."""
    return reduce(mul, iter, 1)
