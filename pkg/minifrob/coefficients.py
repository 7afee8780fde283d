"""Exact coefficient rings.

Two kinds of coefficient exist. `RationalCoeff` is a plain rational number.
`SeriesCoeff` is a power series in one symbol ``q`` truncated modulo ``q^N``;
it stands for a function of the degree-0 coordinate, and the distinguished
derivation ``D_B = q d/dq`` is how that coordinate's derivative acts on it.
Series arithmetic is delegated to sympy's sparse ``ring_series`` helpers over
``QQ``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from enum import Enum
from fractions import Fraction
from typing import Any, List, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.ring_series import rs_mul, rs_series_inversion, rs_trunc
from sympy.polys.rings import PolyElement, ring

from .operators import fraction, fraction_str

_Q_RING, _q = ring("q", QQ)


class CoefficientError(ValueError):
    """Raised when coefficients of different kinds or truncations meet."""

    pass


class CoeffKind(str, Enum):
    RATIONAL = "rational"
    SERIES = "series"


def _to_qq(x: Fraction) -> Any:
    return QQ(x.numerator, x.denominator)


def _from_qq(x: Any) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class CoeffElem(ABC):
    """Common interface of the coefficient kinds."""

    kind: CoeffKind

    @property
    @abstractmethod
    def truncation(self) -> int:
        """Series precision N; 1 for rational coefficients."""
        ...

    @abstractmethod
    def is_zero(self) -> bool:
        """True for the zero element."""
        ...

    @abstractmethod
    def is_unit(self) -> bool:
        """True iff the element is invertible in its ring."""
        ...

    @abstractmethod
    def constant_term(self) -> Fraction:
        """The q^0 coefficient (the value itself for rationals)."""
        ...

    @abstractmethod
    def derivation(self) -> CoeffElem:
        """Apply D_B = q d/dq."""
        ...

    @abstractmethod
    def inverse(self) -> CoeffElem:
        """Multiplicative inverse (modulo q^N for series)."""
        ...

    @abstractmethod
    def evaluate(self, q_value: Fraction | None = None) -> Fraction:
        """Exact value, series read as a truncated polynomial in `q_value`."""
        ...

    @abstractmethod
    def truncate(self, truncation: int) -> CoeffElem:
        """Drop every q-power at or above `truncation`."""
        ...

    @abstractmethod
    def encode(self) -> Union[str, List[str]]:
        """Canonical text form: ``"p/q"`` or a list of N such strings."""
        ...

    @abstractmethod
    def _coerce(self, other: Any) -> CoeffElem: ...

    @abstractmethod
    def _add(self, other: CoeffElem) -> CoeffElem: ...

    @abstractmethod
    def _mul(self, other: CoeffElem) -> CoeffElem: ...

    @abstractmethod
    def __neg__(self) -> CoeffElem: ...

    def __add__(self, other: Any) -> CoeffElem:
        return self._add(self._coerce(other))

    def __radd__(self, other: Any) -> CoeffElem:
        return self._coerce(other)._add(self)

    def __sub__(self, other: Any) -> CoeffElem:
        return self._add(-self._coerce(other))

    def __rsub__(self, other: Any) -> CoeffElem:
        return self._coerce(other)._add(-self)

    def __mul__(self, other: Any) -> CoeffElem:
        return self._mul(self._coerce(other))

    def __rmul__(self, other: Any) -> CoeffElem:
        return self._coerce(other)._mul(self)

    def __truediv__(self, other: Any) -> CoeffElem:
        return self._mul(self._coerce(other).inverse())

    def __rtruediv__(self, other: Any) -> CoeffElem:
        return self._coerce(other)._mul(self.inverse())


class RationalCoeff(CoeffElem):
    """A rational coefficient. Compares equal to the same `Fraction`."""

    __slots__ = ("value",)
    kind = CoeffKind.RATIONAL

    def __init__(self, value: Any = 0):
        object.__setattr__(self, "value", fraction(value))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("RationalCoeff is immutable.")

    @property
    def truncation(self) -> int:
        return 1

    def is_zero(self) -> bool:
        return self.value == 0

    def is_unit(self) -> bool:
        return self.value != 0

    def constant_term(self) -> Fraction:
        return self.value

    def derivation(self) -> CoeffElem:
        return RationalCoeff(0)

    def inverse(self) -> CoeffElem:
        if self.value == 0:
            raise ZeroDivisionError("Inverse of the zero coefficient.")
        return RationalCoeff(1 / self.value)

    def evaluate(self, q_value: Fraction | None = None) -> Fraction:
        return self.value

    def truncate(self, truncation: int) -> CoeffElem:
        return self

    def encode(self) -> str:
        return fraction_str(self.value)

    def _coerce(self, other: Any) -> CoeffElem:
        if isinstance(other, RationalCoeff):
            return other
        if isinstance(other, CoeffElem):
            raise CoefficientError(f"Cannot combine rational and {other.kind.value} coefficients.")
        return RationalCoeff(other)

    def _add(self, other: CoeffElem) -> CoeffElem:
        assert isinstance(other, RationalCoeff)
        return RationalCoeff(self.value + other.value)

    def _mul(self, other: CoeffElem) -> CoeffElem:
        assert isinstance(other, RationalCoeff)
        return RationalCoeff(self.value * other.value)

    def __neg__(self) -> CoeffElem:
        return RationalCoeff(-self.value)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RationalCoeff):
            return self.value == other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __repr__(self) -> str:
        return f"RationalCoeff({fraction_str(self.value)})"


class SeriesCoeff(CoeffElem):
    """Truncated power series ``a_0 + a_1 q + ... + a_{N-1} q^{N-1}``."""

    __slots__ = ("poly", "_truncation")
    kind = CoeffKind.SERIES

    def __init__(self, poly: PolyElement, truncation: int):
        if truncation < 1:
            raise CoefficientError(f"Series truncation must be positive, got {truncation}.")
        object.__setattr__(self, "poly", rs_trunc(poly, _q, truncation))
        object.__setattr__(self, "_truncation", truncation)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("SeriesCoeff is immutable.")

    @classmethod
    def from_list(cls, coeffs: Sequence[Any], truncation: int | None = None) -> SeriesCoeff:
        """Build from the q-power coefficients ``[a_0, ..., a_{N-1}]``.

        Raises
        ------
            CoefficientError: if the list length differs from `truncation`

        """
        values = [fraction(c) for c in coeffs]
        if truncation is None:
            truncation = len(values)
        if len(values) != truncation:
            raise CoefficientError(
                f"Series has {len(values)} coefficients but truncation {truncation}."
            )
        poly = _Q_RING.from_dict({(k,): _to_qq(c) for k, c in enumerate(values) if c != 0})
        return cls(poly, truncation)

    @classmethod
    def constant(cls, value: Any, truncation: int) -> SeriesCoeff:
        return cls(_Q_RING(_to_qq(fraction(value))), truncation)

    @classmethod
    def q_power(cls, power: int, truncation: int, value: Any = 1) -> SeriesCoeff:
        """The series ``value * q^power`` (zero if the power is truncated away)."""
        return cls(_Q_RING.from_dict({(power,): _to_qq(fraction(value))}), truncation)

    @property
    def truncation(self) -> int:
        return self._truncation

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        out = [Fraction(0)] * self._truncation
        for (k,), c in self.poly.terms():
            out[k] = _from_qq(c)
        return tuple(out)

    def is_zero(self) -> bool:
        return not self.poly

    def is_unit(self) -> bool:
        return self.constant_term() != 0

    def constant_term(self) -> Fraction:
        c = self.poly.get((0,))
        return _from_qq(c) if c is not None else Fraction(0)

    def derivation(self) -> CoeffElem:
        return SeriesCoeff(_q * self.poly.diff(_q), self._truncation)

    def inverse(self) -> CoeffElem:
        if not self.is_unit():
            raise ZeroDivisionError("Series with zero constant term is not invertible.")
        return SeriesCoeff(rs_series_inversion(self.poly, _q, self._truncation), self._truncation)

    def evaluate(self, q_value: Fraction | None = None) -> Fraction:
        if q_value is None:
            raise CoefficientError("A q value is required to evaluate a series coefficient.")
        q_value = fraction(q_value)
        total = Fraction(0)
        for k, c in enumerate(self.coeffs):
            if c:
                total += c * q_value**k
        return total

    def truncate(self, truncation: int) -> CoeffElem:
        if truncation > self._truncation:
            raise CoefficientError(
                f"Cannot raise truncation from {self._truncation} to {truncation}."
            )
        return SeriesCoeff(self.poly, truncation)

    def encode(self) -> List[str]:
        return [fraction_str(c) for c in self.coeffs]

    def _coerce(self, other: Any) -> CoeffElem:
        if isinstance(other, SeriesCoeff):
            if other._truncation != self._truncation:
                raise CoefficientError(
                    f"Series truncations differ: {self._truncation} != {other._truncation}."
                )
            return other
        if isinstance(other, CoeffElem):
            raise CoefficientError("Cannot combine series and rational coefficients.")
        return SeriesCoeff.constant(other, self._truncation)

    def _add(self, other: CoeffElem) -> CoeffElem:
        assert isinstance(other, SeriesCoeff)
        return SeriesCoeff(self.poly + other.poly, self._truncation)

    def _mul(self, other: CoeffElem) -> CoeffElem:
        assert isinstance(other, SeriesCoeff)
        return SeriesCoeff(rs_mul(self.poly, other.poly, _q, self._truncation), self._truncation)

    def __neg__(self) -> CoeffElem:
        return SeriesCoeff(-self.poly, self._truncation)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SeriesCoeff):
            return self._truncation == other._truncation and self.poly == other.poly
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.coeffs, self._truncation))

    def __repr__(self) -> str:
        return f"SeriesCoeff({self.encode()})"


def coeff_from_scalar(value: Any, kind: CoeffKind, truncation: int = 1) -> CoeffElem:
    """Embed an exact scalar in the requested coefficient ring."""
    if isinstance(value, CoeffElem):
        if value.kind != kind or value.truncation != truncation:
            raise CoefficientError(
                f"Coefficient {value!r} does not belong to the {kind.value} ring "
                f"with truncation {truncation}."
            )
        return value
    if kind == CoeffKind.RATIONAL:
        return RationalCoeff(value)
    return SeriesCoeff.constant(value, truncation)


def decode_coeff(data: Any, kind: CoeffKind, truncation: int = 1) -> CoeffElem:
    """Inverse of `CoeffElem.encode`; a bare scalar is accepted for a constant series."""
    if isinstance(data, list):
        if kind != CoeffKind.SERIES:
            raise CoefficientError("Series coefficient given for a rational ring.")
        return SeriesCoeff.from_list(data, truncation)
    return coeff_from_scalar(fraction(data), kind, truncation)
