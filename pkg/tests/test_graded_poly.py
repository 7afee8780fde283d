from fractions import Fraction
from typing import Callable, Tuple

import pytest
from hypothesis import given, settings
from hypothesis.strategies import DataObject, data, integers

from minifrob import (
    CoeffKind,
    DegreeVector,
    DegreeVectorError,
    EvaluationError,
    GradedPoly,
    Mode,
    RingConfig,
    RingMismatchError,
    SeriesCoeff,
    derive,
    euler,
    evaluate,
    expand_layers,
    from_layers,
    homogeneous_part,
    monomials_of_degree,
    poly_det,
    substitute,
)
from minifrob.testing import DerivationLaws, RingLaws

from .strategies import assert_exact, polys, rings

one_arg, three_arg = RingLaws._tests()
derivation_laws = DerivationLaws._tests()

R3 = RingConfig(3)
t1, t2, t3 = (GradedPoly.variable(R3, a) for a in range(3))


@pytest.mark.algebra
@given(data())
@pytest.mark.parametrize("fn", one_arg)
def test_one_args(fn: Tuple[str, Callable], data: DataObject) -> None:
    name, law = fn
    ring = data.draw(rings())
    lhs, rhs = law(data.draw(polys(ring)))
    assert_exact(lhs, rhs)


@pytest.mark.algebra
@given(data())
@settings(max_examples=50)
@pytest.mark.parametrize("fn", three_arg)
def test_three_args(fn: Tuple[str, Callable], data: DataObject) -> None:
    name, law = fn
    ring = data.draw(rings())
    a, b, c = (data.draw(polys(ring, max_terms=3)) for _ in range(3))
    lhs, rhs = law(a, b, c)
    assert_exact(lhs, rhs)


@pytest.mark.algebra
@given(data())
@settings(max_examples=50)
@pytest.mark.parametrize("fn", derivation_laws)
def test_derive_is_derivation(fn: Tuple[str, Callable], data: DataObject) -> None:
    name, law = fn
    ring = data.draw(rings())
    a, b = data.draw(polys(ring, max_terms=3)), data.draw(polys(ring, max_terms=3))
    for v in range(ring.n):
        lhs, rhs = law(lambda p: derive(p, v), a, b)
        assert_exact(lhs, rhs)


@pytest.mark.algebra
@given(data())
def test_derivatives_commute(data: DataObject) -> None:
    ring = data.draw(rings())
    p = data.draw(polys(ring))
    for a in range(ring.n):
        for b in range(ring.n):
            assert_exact(derive(derive(p, a), b), derive(derive(p, b), a))


@pytest.mark.algebra
def test_arithmetic() -> None:
    p = (t1 + t2) * (t1 - t2)
    assert p == t1 * t1 - t2 * t2
    assert (t1 + 1) ** 2 == t1 * t1 + t1 * 2 + 1
    assert (t1 - t1).is_zero()
    assert GradedPoly.constant(R3, 3).is_constant()
    assert p.depends_on(1) and not p.depends_on(2)
    assert p.coefficient((2, 0, 0)) == 1
    with pytest.raises(RingMismatchError):
        t1 + GradedPoly.variable(RingConfig(2), 0)
    with pytest.raises(RingMismatchError):
        GradedPoly(R3, {(1, 0): 1})
    assert t1**0 == GradedPoly.constant(R3, 1)
    with pytest.raises(ValueError):
        t1**-1


@pytest.mark.algebra
def test_derive_and_evaluate() -> None:
    p = t1 * t1 * t2 * 3 + t3
    assert derive(p, 0) == t1 * t2 * 6
    assert derive(p, 2) == 1
    assert evaluate(p, [1, 2, Fraction(1, 2)]) == Fraction(13, 2)
    with pytest.raises(EvaluationError):
        evaluate(p, [1, 2])
    with pytest.raises(IndexError):
        derive(p, 3)


@pytest.mark.algebra
def test_tau_derivative_acts_on_coefficients() -> None:
    ring = RingConfig(2, Mode.ELLIPTIC, CoeffKind.SERIES, 3)
    c = SeriesCoeff.from_list([1, 2, 3])
    tau = GradedPoly.variable(ring, 1)
    x = GradedPoly.variable(ring, 0)
    p = x * x * c + x * x * tau
    # d_tau acts as D_B on coefficients and on the tau slot
    assert derive(p, 1) == x * x * SeriesCoeff.from_list([1, 2, 6])
    with pytest.raises(EvaluationError):
        evaluate(p, [1], 0)
    assert evaluate(x * c, [2], Fraction(1, 2)) == 2 * (1 + 1 + Fraction(3, 4))
    with pytest.raises(EvaluationError):
        evaluate(x * c, [2])


@pytest.mark.algebra
def test_euler_and_homogeneity() -> None:
    deg = DegreeVector.generic([1, Fraction(1, 2), Fraction(1, 3)], 2)
    p = t1 * t2 + t2 * t2 * t2 + t3
    assert euler(p, deg) == t1 * t2 * Fraction(3, 2) + t2 * t2 * t2 * Fraction(3, 2) + t3 * Fraction(1, 3)
    assert homogeneous_part(p, Fraction(3, 2), deg) == t1 * t2 + t2 * t2 * t2
    assert not p.is_homogeneous(Fraction(3, 2), deg)
    assert p.degrees_present(deg) == [Fraction(1, 3), Fraction(3, 2)]


@pytest.mark.algebra
def test_monomials_of_degree() -> None:
    deg = DegreeVector.generic([1, Fraction(1, 2), Fraction(1, 3)], 2)
    found = monomials_of_degree(deg, 1)
    assert found == sorted([(1, 0, 0), (0, 2, 0), (0, 0, 3)])
    assert monomials_of_degree(deg, -1) == []
    assert monomials_of_degree(deg, 0) == [(0, 0, 0)]
    elliptic = DegreeVector.elliptic([1, Fraction(1, 2), 0])
    assert monomials_of_degree(elliptic, 2, [1]) == [(0, 4, 0)]
    with pytest.raises(ValueError):
        monomials_of_degree(elliptic, 1, [2])


@pytest.mark.algebra
def test_substitute_and_det() -> None:
    p = t1 * t2 + t3
    assert substitute(p, [t2, t1, t1 * t1]) == t1 * t2 + t1 * t1
    m = [[t1, t2], [t2, t1]]
    assert poly_det(m) == t1 * t1 - t2 * t2


@pytest.mark.algebra
@given(data())
def test_layers(data: DataObject) -> None:
    ring = data.draw(rings(series_ring=True))
    p = data.draw(polys(ring))
    assert_exact(from_layers(ring, expand_layers(p)), p)


@pytest.mark.algebra
@given(data())
def test_poly_truncation_coherence(data: DataObject) -> None:
    ring = data.draw(rings(series_ring=True))
    M = data.draw(integers(min_value=1, max_value=ring.truncation))
    p, q = data.draw(polys(ring)), data.draw(polys(ring))
    assert_exact((p * q).truncate(M), p.truncate(M) * q.truncate(M))
    tau = ring.n - 1
    assert_exact(derive(p, tau).truncate(M), derive(p.truncate(M), tau))


@pytest.mark.algebra
def test_degree_vector_invariants() -> None:
    with pytest.raises(DegreeVectorError):
        DegreeVector.generic([2, 1], 1)
    with pytest.raises(DegreeVectorError):
        DegreeVector.elliptic([1, Fraction(1, 2), 1])
    with pytest.raises(DegreeVectorError):
        DegreeVector.elliptic([1, Fraction(1, 3), Fraction(1, 2), 0])
    with pytest.raises(DegreeVectorError):
        DegreeVector.generic([1, 0], 1)
    deg = DegreeVector.coxeter([3, 2])
    assert deg.degrees == (1, Fraction(2, 3))
    assert deg.charge == Fraction(5, 3)
    assert deg.potential_degree == Fraction(8, 3)
    assert deg.metric_degree(0, 1) == Fraction(1)
    assert deg.pairs(0, 1) and not deg.pairs(0, 0)
    elliptic = DegreeVector.elliptic([1, Fraction(1, 2), 0])
    assert elliptic.degenerate == (2,) == elliptic.expected_degenerate
    assert elliptic.tau == 2
