"""Exact sparse linear systems over QQ.

Every ansatz in the package (Christoffel symbols, flat coordinates, orbit
metric interpolation, series potentials) ends in a system whose rows are
labelled by "which coefficient of which identity" and whose columns are
labelled by "which unknown coefficient". `LinearSystem` keeps those labels and
delegates the elimination to sympy's `DomainMatrix`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Hashable, List, Mapping, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .operators import fraction

logger = logging.getLogger(__name__)


class LinearSystemError(RuntimeError):
    """Base class of linear-solve failures."""

    pass


class InconsistentSystemError(LinearSystemError):
    """The equations admit no solution."""

    pass


class RankDeficientError(LinearSystemError):
    """The solution is not unique; `free` lists unknowns left undetermined."""

    def __init__(self, message: str, free: List[Hashable]):
        super().__init__(message)
        self.free = free


@dataclass
class Solution:
    values: Dict[Hashable, Fraction]
    nullspace: List[Dict[Hashable, Fraction]] = field(default_factory=list)
    rank: int = 0

    def __getitem__(self, key: Hashable) -> Fraction:
        return self.values.get(key, Fraction(0))


def _qq(x: Fraction) -> Any:
    return QQ(x.numerator, x.denominator)


def _frac(x: Any) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class LinearSystem:
    """Accumulates ``sum_j a[row, j] x_j = b[row]`` with labelled rows and columns."""

    def __init__(self, name: str = "system"):
        self.name = name
        self._columns: Dict[Hashable, int] = {}
        self._rows: Dict[Hashable, Dict[int, Fraction]] = {}
        self._rhs: Dict[Hashable, Fraction] = {}

    @property
    def unknowns(self) -> List[Hashable]:
        return list(self._columns)

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self._rows), len(self._columns))

    def unknown(self, key: Hashable) -> int:
        if key not in self._columns:
            self._columns[key] = len(self._columns)
        return self._columns[key]

    def add(self, row: Hashable, unknown: Hashable, value: Any) -> None:
        value = fraction(value)
        col = self.unknown(unknown)
        entries = self._rows.setdefault(row, {})
        entries[col] = entries.get(col, Fraction(0)) + value

    def add_rhs(self, row: Hashable, value: Any) -> None:
        self._rows.setdefault(row, {})
        self._rhs[row] = self._rhs.get(row, Fraction(0)) + fraction(value)

    def add_equation(self, row: Hashable, coeffs: Mapping[Hashable, Any], rhs: Any = 0) -> None:
        for key, value in coeffs.items():
            self.add(row, key, value)
        self.add_rhs(row, rhs)

    def solve(self, unique: bool = True) -> Solution:
        """Reduced row echelon solve.

        Args:
        ----
            unique: raise if any unknown is left free

        Returns:
        -------
            Solution: particular solution (free unknowns set to zero), a
            nullspace basis and the rank

        Raises:
        ------
            InconsistentSystemError: if the right-hand side is not in the span
            RankDeficientError: if `unique` and the nullspace is nonzero

        """
        labels = list(self._rows)
        ncols = len(self._columns)
        m = len(labels)
        logger.debug("%s: solving %d equations in %d unknowns", self.name, m, ncols)
        if m == 0:
            if unique and ncols:
                raise RankDeficientError(f"{self.name}: no equations for {ncols} unknowns.", self.unknowns)
            return Solution({}, [{k: Fraction(1)} for k in self._columns], 0)

        data: Dict[int, Dict[int, Any]] = {}
        for i, label in enumerate(labels):
            row = {j: _qq(v) for j, v in self._rows[label].items() if v != 0}
            b = self._rhs.get(label, Fraction(0))
            if b != 0:
                row[ncols] = _qq(b)
            if row:
                data[i] = row
        matrix = DomainMatrix(data, (m, ncols + 1), QQ)
        reduced, pivots = matrix.rref()
        rep = reduced.to_sparse().rep

        if ncols in pivots:
            r = list(pivots).index(ncols)
            raise InconsistentSystemError(
                f"{self.name}: inconsistent (contradiction after {r} independent equations)."
            )

        keys = list(self._columns)
        values: Dict[Hashable, Fraction] = {}
        pivot_rows = {col: r for r, col in enumerate(pivots)}
        for col, r in pivot_rows.items():
            b = rep.get(r, {}).get(ncols)
            if b is not None:
                values[keys[col]] = _frac(b)

        free = [j for j in range(ncols) if j not in pivot_rows]
        logger.debug("%s: rank %d, nullity %d", self.name, len(pivots), len(free))
        if unique and free:
            raise RankDeficientError(
                f"{self.name}: solution not unique, {len(free)} free unknown(s) "
                f"starting with {keys[free[0]]!r}.",
                [keys[j] for j in free],
            )

        nullspace = []
        for j in free:
            vector = {keys[j]: Fraction(1)}
            for col, r in pivot_rows.items():
                a = rep.get(r, {}).get(j)
                if a is not None:
                    vector[keys[col]] = -_frac(a)
            nullspace.append(vector)
        return Solution(values, nullspace, len(pivots))


def _dense(rows: List[List[Any]]) -> DomainMatrix:
    n = len(rows)
    m = len(rows[0]) if n else 0
    return DomainMatrix([[_qq(fraction(x)) for x in row] for row in rows], (n, m), QQ)


def rational_det(rows: List[List[Any]]) -> Fraction:
    """Exact determinant of a square rational matrix."""
    return _frac(_dense(rows).det())


def rational_rank(rows: List[List[Any]]) -> int:
    return int(_dense(rows).rank())


def rational_inverse(rows: List[List[Any]]) -> List[List[Fraction]]:
    """Exact inverse.

    Raises
    ------
        ZeroDivisionError: if the matrix is singular

    """
    if rational_det(rows) == 0:
        raise ZeroDivisionError("Singular rational matrix.")
    inverse = _dense(rows).inv().to_sparse().rep
    n = len(rows)
    return [[_frac(inverse[i][j]) if j in inverse.get(i, {}) else Fraction(0) for j in range(n)] for i in range(n)]
