from fractions import Fraction
from typing import Callable, Tuple

import pytest
from hypothesis import given
from hypothesis.strategies import DataObject, data, integers

from minifrob import CoefficientError, CoeffKind, RationalCoeff, SeriesCoeff, decode_coeff
from minifrob.operators import fraction, fraction_str
from minifrob.testing import DerivationLaws, RingLaws

from .strategies import assert_exact, series, small_fractions

one_arg, three_arg = RingLaws._tests()
derivation_laws = DerivationLaws._tests()


@pytest.mark.algebra
def test_fraction_parsing() -> None:
    assert fraction("3") == 3
    assert fraction("-2/7") == Fraction(-2, 7)
    assert fraction(" 4/6 ") == Fraction(2, 3)
    assert fraction(5) == 5
    with pytest.raises(TypeError):
        fraction(0.5)
    with pytest.raises(TypeError):
        fraction(True)
    for bad in ["", "1.5", "1e3", "1/0", "a/b"]:
        with pytest.raises(ValueError):
            fraction(bad)


@pytest.mark.algebra
def test_fraction_str() -> None:
    assert fraction_str(Fraction(6, 3)) == "2"
    assert fraction_str(Fraction(-3, 6)) == "-1/2"


@pytest.mark.algebra
@given(small_fractions, small_fractions)
def test_rational_coeff(a: Fraction, b: Fraction) -> None:
    x, y = RationalCoeff(a), RationalCoeff(b)
    assert_exact(x + y, RationalCoeff(a + b))
    assert_exact(x * y, RationalCoeff(a * b))
    assert_exact(x - y, RationalCoeff(a - b))
    assert x == a
    assert x.derivation().is_zero()
    if a:
        assert_exact(x.inverse() * x, RationalCoeff(1))
    else:
        with pytest.raises(ZeroDivisionError):
            x.inverse()


@pytest.mark.algebra
@given(data())
@pytest.mark.parametrize("fn", one_arg)
def test_series_one_arg(fn: Tuple[str, Callable], data: DataObject) -> None:
    name, law = fn
    a = data.draw(series())
    lhs, rhs = law(a)
    assert_exact(lhs, rhs)


@pytest.mark.algebra
@given(data())
@pytest.mark.parametrize("fn", three_arg)
def test_series_three_arg(fn: Tuple[str, Callable], data: DataObject) -> None:
    name, law = fn
    N = data.draw(integers(min_value=1, max_value=5))
    a, b, c = (data.draw(series(N)) for _ in range(3))
    lhs, rhs = law(a, b, c)
    assert_exact(lhs, rhs)


@pytest.mark.algebra
@given(data())
@pytest.mark.parametrize("fn", derivation_laws)
def test_series_derivation(fn: Tuple[str, Callable], data: DataObject) -> None:
    name, law = fn
    N = data.draw(integers(min_value=1, max_value=5))
    a, b = data.draw(series(N)), data.draw(series(N))
    lhs, rhs = law(lambda x: x.derivation(), a, b)
    assert_exact(lhs, rhs)


@pytest.mark.algebra
def test_series_truncation() -> None:
    a = SeriesCoeff.from_list([1, 1, 0])
    # (1 + q)^3 mod q^3
    assert (a * a * a).coeffs == (1, 3, 3)
    assert SeriesCoeff.q_power(3, 3).is_zero()
    assert a.truncate(2).coeffs == (1, 1)
    with pytest.raises(CoefficientError):
        a.truncate(4)
    with pytest.raises(CoefficientError):
        a + SeriesCoeff.from_list([1, 0])
    with pytest.raises(CoefficientError):
        a + RationalCoeff(1)
    with pytest.raises(CoefficientError):
        SeriesCoeff.from_list([1, 2], 3)


@pytest.mark.algebra
@given(data())
def test_truncation_coherence(data: DataObject) -> None:
    N = data.draw(integers(min_value=1, max_value=6))
    M = data.draw(integers(min_value=1, max_value=N))
    a, b = data.draw(series(N)), data.draw(series(N))
    assert_exact((a * b).truncate(M), a.truncate(M) * b.truncate(M))
    assert_exact((a + b).truncate(M), a.truncate(M) + b.truncate(M))
    assert_exact((a - b).truncate(M), a.truncate(M) - b.truncate(M))
    assert_exact(a.derivation().truncate(M), a.truncate(M).derivation())
    if a.is_unit():
        assert_exact(a.inverse().truncate(M), a.truncate(M).inverse())


@pytest.mark.algebra
def test_series_derivation_values() -> None:
    a = SeriesCoeff.from_list([5, 1, 2, 3])
    assert a.derivation().coeffs == (0, 1, 4, 9)
    assert a.evaluate(Fraction(1, 2)) == 5 + Fraction(1, 2) + Fraction(2, 4) + Fraction(3, 8)
    with pytest.raises(CoefficientError):
        a.evaluate()


@pytest.mark.algebra
@given(data())
def test_series_inverse(data: DataObject) -> None:
    a = data.draw(series())
    one = SeriesCoeff.constant(1, a.truncation)
    if a.is_unit():
        assert_exact(a * a.inverse(), one)
    else:
        with pytest.raises(ZeroDivisionError):
            a.inverse()


@pytest.mark.algebra
def test_series_inverse_geometric() -> None:
    a = SeriesCoeff.from_list([1, -1, 0, 0, 0])
    assert a.inverse().coeffs == (1, 1, 1, 1, 1)


@pytest.mark.algebra
def test_decode_coeff() -> None:
    assert decode_coeff("2/3", CoeffKind.RATIONAL) == Fraction(2, 3)
    assert decode_coeff(["1", "0", "-1/2"], CoeffKind.SERIES, 3).coeffs == (1, 0, Fraction(-1, 2))
    assert decode_coeff("4", CoeffKind.SERIES, 2).coeffs == (4, 0)
    with pytest.raises(CoefficientError):
        decode_coeff(["1"], CoeffKind.RATIONAL)
    assert SeriesCoeff.from_list(["1/2", "3"]).encode() == ["1/2", "3"]
