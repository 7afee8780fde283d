from fractions import Fraction
from typing import List

import pytest
from hypothesis import given
from hypothesis.strategies import DataObject, data, integers, lists

from minifrob import (
    InconsistentSystemError,
    LinearSystem,
    RankDeficientError,
    rational_det,
    rational_inverse,
    rational_rank,
)

from .strategies import small_fractions


@pytest.mark.algebra
def test_unique_solution() -> None:
    system = LinearSystem("two by two")
    system.add_equation("r1", {"x": 1, "y": 1}, 3)
    system.add_equation("r2", {"x": 1, "y": -1}, Fraction(1, 2))
    solution = system.solve()
    assert solution["x"] == Fraction(7, 4)
    assert solution["y"] == Fraction(5, 4)
    assert solution.rank == 2
    assert system.shape == (2, 2)


@pytest.mark.algebra
def test_inconsistent() -> None:
    system = LinearSystem()
    system.add_equation(0, {"x": 1}, 1)
    system.add_equation(1, {"x": 2}, 3)
    with pytest.raises(InconsistentSystemError):
        system.solve()


@pytest.mark.algebra
def test_rank_deficient_names_free_unknowns() -> None:
    system = LinearSystem()
    system.add_equation(0, {"x": 1, "y": 1}, 0)
    with pytest.raises(RankDeficientError) as info:
        system.solve()
    assert info.value.free == ["y"]
    solution = system.solve(unique=False)
    assert solution.nullspace == [{"y": 1, "x": -1}]


@pytest.mark.algebra
def test_unknown_without_equations() -> None:
    system = LinearSystem()
    system.unknown("z")
    with pytest.raises(RankDeficientError):
        system.solve()
    assert system.solve(unique=False).nullspace == [{"z": 1}]


@pytest.mark.algebra
@given(data())
def test_solution_satisfies_system(data: DataObject) -> None:
    n = data.draw(integers(min_value=1, max_value=4))
    rows: List[List[Fraction]] = [data.draw(lists(small_fractions, min_size=n, max_size=n)) for _ in range(n)]
    rhs = data.draw(lists(small_fractions, min_size=n, max_size=n))
    system = LinearSystem()
    for i, row in enumerate(rows):
        system.add_equation(i, {j: v for j, v in enumerate(row)}, rhs[i])
    for j in range(n):
        system.unknown(j)
    if rational_det(rows) == 0:
        assert rational_rank(rows) < n
        with pytest.raises(ZeroDivisionError):
            rational_inverse(rows)
        return
    solution = system.solve()
    for i, row in enumerate(rows):
        assert sum((v * solution[j] for j, v in enumerate(row)), Fraction(0)) == rhs[i]
    inverse = rational_inverse(rows)
    for i in range(n):
        for k in range(n):
            got = sum((rows[i][j] * inverse[j][k] for j in range(n)), Fraction(0))
            assert got == (1 if i == k else 0)
