"""Sparse graded polynomials over an exact coefficient ring.

A `GradedPoly` maps exponent vectors to nonzero coefficients. Exponent
vectors always have ``n`` slots. In elliptic mode the last slot belongs to the
degree-0 coordinate ``t^n``; it is used only by potentials, and ``d/dt^n``
acts on coefficients through ``D_B = q d/dq`` as well as on that slot.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from typing_extensions import TypeAlias

from .coefficients import CoeffElem, CoeffKind, SeriesCoeff, coeff_from_scalar
from .degrees import DegreeVector, Mode
from .operators import fraction

Exponent: TypeAlias = Tuple[int, ...]


class RingMismatchError(ValueError):
    """Raised when polynomials from different rings are combined."""

    pass


class EvaluationError(ValueError):
    """Raised when a polynomial cannot be evaluated at the given data."""

    pass


@dataclass(frozen=True)
class RingConfig:
    """Shape of a polynomial ring: variable count, mode and coefficient ring."""

    n: int
    mode: Mode = Mode.GENERIC
    kind: CoeffKind = CoeffKind.RATIONAL
    truncation: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise RingMismatchError(f"A ring needs at least one variable, got n = {self.n}.")
        if self.kind == CoeffKind.RATIONAL and self.truncation != 1:
            raise RingMismatchError("Rational rings carry truncation 1.")

    @classmethod
    def for_degrees(
        cls, deg: DegreeVector, kind: CoeffKind = CoeffKind.RATIONAL, truncation: int = 1
    ) -> RingConfig:
        return cls(deg.n, deg.mode, kind, truncation if kind == CoeffKind.SERIES else 1)

    @property
    def tau(self) -> Optional[int]:
        return self.n - 1 if self.mode == Mode.ELLIPTIC else None

    @property
    def polynomial_variables(self) -> Tuple[int, ...]:
        return tuple(a for a in range(self.n) if a != self.tau)

    @property
    def is_series(self) -> bool:
        return self.kind == CoeffKind.SERIES

    def coeff(self, value: Any) -> CoeffElem:
        return coeff_from_scalar(value, self.kind, self.truncation)

    def with_truncation(self, truncation: int) -> RingConfig:
        if not self.is_series:
            return self
        return RingConfig(self.n, self.mode, self.kind, truncation)


class GradedPoly:
    """Immutable sparse polynomial. Terms iterate in lexicographic exponent order."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: RingConfig, terms: Optional[Mapping[Exponent, Any]] = None):
        clean: Dict[Exponent, CoeffElem] = {}
        for exp, value in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != ring.n:
                raise RingMismatchError(f"Exponent {exp} does not have {ring.n} slots.")
            if any(e < 0 for e in exp):
                raise RingMismatchError(f"Negative exponent in {exp}.")
            c = ring.coeff(value)
            if not c.is_zero():
                clean[exp] = c
        self.ring = ring
        self._terms = MappingProxyType({k: clean[k] for k in sorted(clean)})
        self._hash: Optional[int] = None

    # Constructors

    @classmethod
    def zero(cls, ring: RingConfig) -> GradedPoly:
        return cls(ring)

    @classmethod
    def constant(cls, ring: RingConfig, value: Any) -> GradedPoly:
        return cls(ring, {(0,) * ring.n: value})

    @classmethod
    def monomial(cls, ring: RingConfig, exponent: Sequence[int], value: Any = 1) -> GradedPoly:
        return cls(ring, {tuple(exponent): value})

    @classmethod
    def variable(cls, ring: RingConfig, a: int) -> GradedPoly:
        """The coordinate ``t^{a+1}``."""
        exp = [0] * ring.n
        exp[a] = 1
        return cls(ring, {tuple(exp): 1})

    # Views

    @property
    def terms(self) -> Mapping[Exponent, CoeffElem]:
        return self._terms

    def items(self) -> Iterator[Tuple[Exponent, CoeffElem]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, exponent: Sequence[int]) -> CoeffElem:
        return self._terms.get(tuple(exponent), self.ring.coeff(0))

    def is_constant(self) -> bool:
        return all(not any(exp) for exp in self._terms)

    def constant_value(self) -> CoeffElem:
        return self.coefficient((0,) * self.ring.n)

    def depends_on(self, a: int) -> bool:
        return any(exp[a] for exp in self._terms)

    def depends_on_tau(self) -> bool:
        tau = self.ring.tau
        return tau is not None and self.depends_on(tau)

    # Arithmetic

    def _check(self, other: GradedPoly) -> None:
        if self.ring != other.ring:
            raise RingMismatchError(f"Ring mismatch: {self.ring} vs {other.ring}.")

    def _lift(self, other: Any) -> GradedPoly:
        if isinstance(other, GradedPoly):
            self._check(other)
            return other
        return GradedPoly.constant(self.ring, other)

    def __add__(self, other: Any) -> GradedPoly:
        return combine(self, self._lift(other), "add")

    def __radd__(self, other: Any) -> GradedPoly:
        return combine(self._lift(other), self, "add")

    def __sub__(self, other: Any) -> GradedPoly:
        return combine(self, self._lift(other), "sub")

    def __rsub__(self, other: Any) -> GradedPoly:
        return combine(self._lift(other), self, "sub")

    def __mul__(self, other: Any) -> GradedPoly:
        if isinstance(other, GradedPoly):
            return combine(self, other, "mul")
        return self.scale(other)

    def __rmul__(self, other: Any) -> GradedPoly:
        return self.__mul__(other)

    def __neg__(self) -> GradedPoly:
        return GradedPoly(self.ring, {k: -c for k, c in self._terms.items()})

    def __pow__(self, power: int) -> GradedPoly:
        if power < 0:
            raise ValueError(f"Negative power {power} of a polynomial.")
        result = GradedPoly.constant(self.ring, 1)
        for _ in range(power):
            result = result * self
        return result

    def scale(self, value: Any) -> GradedPoly:
        c = self.ring.coeff(value)
        return GradedPoly(self.ring, {k: v * c for k, v in self._terms.items()})

    # Protocol

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GradedPoly):
            return self.ring == other.ring and dict(self._terms) == dict(other._terms)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self == GradedPoly.constant(self.ring, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, tuple(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        if self.is_zero():
            return "GradedPoly(0)"
        parts = []
        for exp, c in self._terms.items():
            mono = "*".join(f"t{a + 1}^{e}" if e > 1 else f"t{a + 1}" for a, e in enumerate(exp) if e)
            parts.append(f"({c.encode()})" + (f"*{mono}" if mono else ""))
        return "GradedPoly(" + " + ".join(parts) + ")"

    # Convenience wrappers around the module-level operations

    def derive(self, a: int) -> GradedPoly:
        return derive(self, a)

    def euler(self, deg: DegreeVector) -> GradedPoly:
        return euler(self, deg)

    def truncate(self, truncation: int) -> GradedPoly:
        ring = self.ring.with_truncation(truncation)
        return GradedPoly(ring, {k: c.truncate(truncation) for k, c in self._terms.items()})

    def is_homogeneous(self, d: Fraction, deg: DegreeVector) -> bool:
        return all(deg.weight(exp) == d for exp in self._terms)

    def degrees_present(self, deg: DegreeVector) -> List[Fraction]:
        return sorted({deg.weight(exp) for exp in self._terms})

    def map_coefficients(self, fn: Callable[[CoeffElem], Any]) -> GradedPoly:
        return GradedPoly(self.ring, {k: fn(c) for k, c in self._terms.items()})


def combine(a: GradedPoly, b: GradedPoly, op: str) -> GradedPoly:
    """Exact ``a + b``, ``a - b`` or ``a * b``.

    Args:
    ----
        a: left operand
        b: right operand, same ring configuration as `a`
        op: one of ``"add"``, ``"sub"``, ``"mul"``

    Returns:
    -------
        GradedPoly: the result; series coefficients are multiplied modulo q^N

    Raises:
    ------
        RingMismatchError: if the rings differ
        ValueError: for an unknown `op`

    """
    a._check(b)
    out: Dict[Exponent, CoeffElem] = dict(a.terms)
    if op in ("add", "sub"):
        for exp, c in b.items():
            c = c if op == "add" else -c
            out[exp] = out[exp] + c if exp in out else c
        return GradedPoly(a.ring, out)
    if op == "mul":
        prod: Dict[Exponent, CoeffElem] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                exp = tuple(x + y for x, y in zip(e1, e2))
                term = c1 * c2
                prod[exp] = prod[exp] + term if exp in prod else term
        return GradedPoly(a.ring, prod)
    raise ValueError(f"Unknown combine op {op!r}.")


def derive(p: GradedPoly, a: int) -> GradedPoly:
    """Partial derivative ``d/dt^{a+1}``.

    In elliptic mode the derivative along the degree-0 coordinate also applies
    ``D_B`` to every coefficient.

    Raises
    ------
        IndexError: if `a` is not a coordinate index

    """
    ring = p.ring
    if not 0 <= a < ring.n:
        raise IndexError(f"Coordinate index {a + 1} out of range 1..{ring.n}.")
    out: Dict[Exponent, CoeffElem] = {}

    def put(exp: Exponent, c: CoeffElem) -> None:
        out[exp] = out[exp] + c if exp in out else c

    for exp, c in p.items():
        if exp[a]:
            lowered = exp[:a] + (exp[a] - 1,) + exp[a + 1 :]
            put(lowered, c * exp[a])
        if a == ring.tau:
            put(exp, c.derivation())
    return GradedPoly(ring, out)


def euler(p: GradedPoly, deg: DegreeVector) -> GradedPoly:
    """``sum_a d^a t^a d_a p``: every term scaled by its weighted degree.

    Raises
    ------
        RingMismatchError: if `deg` does not describe the ring of `p`

    """
    if deg.n != p.ring.n or deg.mode != p.ring.mode:
        raise RingMismatchError(f"Degree vector for n={deg.n} ({deg.mode.value}) used on {p.ring}.")
    return GradedPoly(p.ring, {exp: c * deg.weight(exp) for exp, c in p.items()})


def homogeneous_part(p: GradedPoly, d: Any, deg: DegreeVector) -> GradedPoly:
    """Sum of the terms of `p` of weighted degree exactly `d`."""
    d = fraction(d)
    return GradedPoly(p.ring, {exp: c for exp, c in p.items() if deg.weight(exp) == d})


def _check_point(p: GradedPoly, point: Sequence[Any]) -> List[Fraction]:
    variables = p.ring.polynomial_variables
    if len(point) != len(variables):
        raise EvaluationError(f"Point has {len(point)} entries, ring has {len(variables)} variables.")
    if p.depends_on_tau():
        raise EvaluationError("Cannot evaluate a polynomial depending on the degree-0 coordinate.")
    values = [Fraction(0)] * p.ring.n
    for a, x in zip(variables, point):
        values[a] = fraction(x)
    return values


def _monomial_value(exp: Exponent, values: Sequence[Fraction]) -> Fraction:
    v = Fraction(1)
    for x, e in zip(values, exp):
        if e:
            v *= x**e
    return v


def evaluate_coeff(p: GradedPoly, point: Sequence[Any]) -> CoeffElem:
    """Evaluate the polynomial variables only; series coefficients stay formal in q."""
    values = _check_point(p, point)
    total = p.ring.coeff(0)
    for exp, c in p.items():
        total = total + c * _monomial_value(exp, values)
    return total


def evaluate(p: GradedPoly, point: Sequence[Any], q_value: Optional[Any] = None) -> Fraction:
    """Exact value of `p` at `point` (polynomial variables only).

    Raises
    ------
        EvaluationError: on a wrong point length, τ dependence, or a missing
            `q_value` in series mode

    """
    if p.ring.is_series and q_value is None:
        raise EvaluationError("q_value is required in series mode.")
    return evaluate_coeff(p, point).evaluate(None if q_value is None else fraction(q_value))


def substitute(p: GradedPoly, images: Sequence[GradedPoly]) -> GradedPoly:
    """Compose: replace variable ``a`` by ``images[a]``; coefficients are reused as-is."""
    if len(images) != p.ring.n:
        raise RingMismatchError(f"Need {p.ring.n} images, got {len(images)}.")
    target = images[0].ring
    for img in images:
        if img.ring != target:
            raise RingMismatchError("Substitution images live in different rings.")
    powers: Dict[Tuple[int, int], GradedPoly] = {}

    def power(a: int, e: int) -> GradedPoly:
        if (a, e) not in powers:
            powers[(a, e)] = images[a] if e == 1 else power(a, e - 1) * images[a]
        return powers[(a, e)]

    total = GradedPoly.zero(target)
    for exp, c in p.items():
        term = GradedPoly.constant(target, c)
        for a, e in enumerate(exp):
            if e:
                term = term * power(a, e)
        total = total + term
    return total


def monomials_of_degree(
    deg: DegreeVector, d: Any, variables: Optional[Iterable[int]] = None
) -> List[Exponent]:
    """All exponent vectors over `variables` (positive degree only) of weight `d`.

    Raises
    ------
        ValueError: if a listed variable has non-positive degree

    """
    d = fraction(d)
    names = list(deg.polynomial_variables if variables is None else variables)
    for a in names:
        if deg.degrees[a] <= 0:
            raise ValueError(f"Variable t{a + 1} has non-positive degree.")
    found: List[Exponent] = []
    if d < 0:
        return found

    def walk(i: int, remaining: Fraction, exp: List[int]) -> None:
        if i == len(names):
            if remaining == 0:
                found.append(tuple(exp))
            return
        a = names[i]
        e = 0
        while deg.degrees[a] * e <= remaining:
            exp[a] = e
            walk(i + 1, remaining - deg.degrees[a] * e, exp)
            e += 1
        exp[a] = 0

    walk(0, d, [0] * deg.n)
    return sorted(found)


def jacobian_matrix(polys: Sequence[GradedPoly]) -> List[List[GradedPoly]]:
    """``J[i][a] = d polys[i] / dt^a``."""
    return [[derive(f, a) for a in range(f.ring.n)] for f in polys]


def poly_det(matrix: Sequence[Sequence[GradedPoly]]) -> GradedPoly:
    """Leibniz determinant of a small square matrix of polynomials."""
    n = len(matrix)
    ring = matrix[0][0].ring
    total = GradedPoly.zero(ring)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = GradedPoly.constant(ring, -1 if inversions % 2 else 1)
        for i, j in enumerate(perm):
            term = term * matrix[i][j]
            if term.is_zero():
                break
        total = total + term
    return total


def coefficient_layers(c: CoeffElem) -> Iterator[Tuple[int, Fraction]]:
    """Nonzero ``(k, a_k)`` pairs of a coefficient; a rational is layer 0."""
    if c.kind == CoeffKind.RATIONAL:
        value = c.constant_term()
        if value:
            yield 0, value
        return
    for k, v in enumerate(c.coeffs):  # type: ignore[attr-defined]
        if v:
            yield k, v


def expand_layers(p: GradedPoly) -> Dict[Tuple[Exponent, int], Fraction]:
    """Flatten into rational coefficients keyed by (exponent, q-power)."""
    return {(exp, k): v for exp, c in p.items() for k, v in coefficient_layers(c)}


def from_layers(ring: RingConfig, values: Mapping[Tuple[Exponent, int], Any]) -> GradedPoly:
    """Inverse of `expand_layers`; q-powers at or beyond the truncation are dropped."""
    by_exp: Dict[Exponent, List[Fraction]] = {}
    for (exp, k), v in values.items():
        if k >= ring.truncation:
            continue
        row = by_exp.setdefault(tuple(exp), [Fraction(0)] * ring.truncation)
        row[k] += fraction(v)
    if ring.is_series:
        terms = {exp: SeriesCoeff.from_list(row, ring.truncation) for exp, row in by_exp.items()}
        return GradedPoly(ring, terms)
    return GradedPoly(ring, {exp: row[0] for exp, row in by_exp.items()})
