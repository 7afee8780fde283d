"""Weighted degrees of the flat coordinates and the charge of the metric.

The Euler field is ``E = sum_a d^a t^a d/dt^a``. The charge ``D`` is the weight
of the flat metric (``Lie_E J = D J``); with this convention

* ``eta^{ab}`` may be nonzero only when ``d^a + d^b = D``,
* ``deg g^{ab} = d^a + d^b + 1 - D``,
* ``deg Gamma^{ab}_c = d^a + d^b - d^c + 1 - D``,
* ``deg F = 1 + D``,

and the structure-constant divisor is ``d^b + (1 - D)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Sequence, Tuple

from .operators import fraction, fraction_str


class DegreeVectorError(ValueError):
    """Raised when a degree vector violates the invariants of its mode."""

    pass


class Mode(str, Enum):
    ELLIPTIC = "elliptic"
    COXETER = "coxeter"
    GENERIC = "generic"


@dataclass(frozen=True)
class DegreeVector:
    """Degrees ``d^1..d^n`` (stored 0-based), charge ``D`` and mode."""

    degrees: Tuple[Fraction, ...]
    charge: Fraction
    mode: Mode

    def __post_init__(self) -> None:
        degrees = tuple(fraction(d) for d in self.degrees)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "charge", fraction(self.charge))
        object.__setattr__(self, "mode", Mode(self.mode))
        n = len(degrees)
        if n == 0:
            raise DegreeVectorError("A degree vector needs at least one coordinate.")
        if degrees[0] != 1:
            raise DegreeVectorError(f"d^1 must be 1, got {fraction_str(degrees[0])}.")
        if self.mode == Mode.ELLIPTIC:
            if n < 2:
                raise DegreeVectorError("Elliptic mode needs at least two coordinates.")
            if degrees[-1] != 0:
                raise DegreeVectorError("d^n must be 0")
            if self.charge != 1:
                raise DegreeVectorError(f"Elliptic mode requires D = 1, got {fraction_str(self.charge)}.")
            middle = degrees[1:-1]
            if any(d <= 0 or d >= 1 for d in middle):
                raise DegreeVectorError("Elliptic mode requires 1 > d^a > 0 for 1 < a < n.")
            if any(a < b for a, b in zip(middle, middle[1:])):
                raise DegreeVectorError("Elliptic mode requires d^2 >= ... >= d^{n-1}.")
        else:
            for a, d in enumerate(degrees):
                if d <= 0:
                    raise DegreeVectorError(
                        f"{self.mode.value} mode requires d^{a + 1} > 0, got {fraction_str(d)}."
                    )

    @classmethod
    def elliptic(cls, degrees: Sequence[Any]) -> DegreeVector:
        return cls(tuple(degrees), Fraction(1), Mode.ELLIPTIC)

    @classmethod
    def generic(cls, degrees: Sequence[Any], charge: Any) -> DegreeVector:
        return cls(tuple(degrees), fraction(charge), Mode.GENERIC)

    @classmethod
    def coxeter(cls, invariant_degrees: Sequence[int]) -> DegreeVector:
        """Degrees ``c^i / h`` and charge ``1 + 2/h`` with ``h = c^1``."""
        h = Fraction(invariant_degrees[0])
        return cls(tuple(Fraction(c) / h for c in invariant_degrees), 1 + 2 / h, Mode.COXETER)

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def tau(self) -> Optional[int]:
        """Index of the degree-0 coordinate kept out of S^W (elliptic only)."""
        return self.n - 1 if self.mode == Mode.ELLIPTIC else None

    @property
    def polynomial_variables(self) -> Tuple[int, ...]:
        return tuple(a for a in range(self.n) if a != self.tau)

    def divisor(self, b: int) -> Fraction:
        return self.degrees[b] + (1 - self.charge) / 2

    @property
    def degenerate(self) -> Tuple[int, ...]:
        """Indices whose structure-constant divisor vanishes."""
        return tuple(b for b in range(self.n) if self.divisor(b) == 0)

    @property
    def expected_degenerate(self) -> Tuple[int, ...]:
        return (self.n - 1,) if self.mode == Mode.ELLIPTIC else ()

    def metric_degree(self, a: int, b: int, offset: Optional[Fraction] = None) -> Fraction:
        if offset is None:
            offset = 1 - self.charge
        return self.degrees[a] + self.degrees[b] + offset

    def christoffel_degree(self, a: int, b: int, c: int, offset: Optional[Fraction] = None) -> Fraction:
        return self.metric_degree(a, b, offset) - self.degrees[c]

    @property
    def potential_degree(self) -> Fraction:
        return 1 + self.charge

    def pairs(self, a: int, b: int) -> bool:
        """True iff ``eta^{ab}`` is allowed to be nonzero."""
        return self.degrees[a] + self.degrees[b] == self.charge

    def weight(self, exponent: Sequence[int]) -> Fraction:
        return sum((d * e for d, e in zip(self.degrees, exponent)), Fraction(0))

    def encode(self) -> dict:
        return {
            "mode": self.mode.value,
            "degrees": [fraction_str(d) for d in self.degrees],
            "charge": fraction_str(self.charge),
        }
