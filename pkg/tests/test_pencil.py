from fractions import Fraction
from typing import List

import pytest

from minifrob import (
    Christoffel,
    ChristoffelError,
    CoeffKind,
    ConstMetric,
    DegreeVector,
    GradedPoly,
    IntegrabilityError,
    IntersectionForm,
    MetricError,
    Mode,
    RingConfig,
    SeriesCoeff,
    Status,
    TensorData,
    check_pencil,
    christoffel_point_oracle,
    christoffel_solve,
    evaluate_coeff,
    integrate_vector_potential,
    solve_connection,
)

ELLIPTIC = DegreeVector.elliptic([1, Fraction(1, 2), 0])
ETA3 = ConstMetric.from_upper([[0, 0, 1], [0, 1, 0], [1, 0, 0]])


def elliptic_metric(kappa: object, ring: RingConfig) -> IntersectionForm:
    """``g`` of ``F = 1/2 t1^2 tau + 1/2 t1 t2^2 + kappa t2^4``."""
    t1, t2 = GradedPoly.variable(ring, 0), GradedPoly.variable(ring, 1)
    zero = GradedPoly.zero(ring)
    g22 = t1 + t2 * t2 * kappa * 12
    return IntersectionForm.from_rows(
        ELLIPTIC,
        [[zero, zero, t1], [zero, g22, t2 * Fraction(1, 2)], [t1, t2 * Fraction(1, 2), zero]],
    )


def a2_metric() -> IntersectionForm:
    deg = DegreeVector.coxeter([3, 2])
    ring = RingConfig.for_degrees(deg)
    t1, t2 = GradedPoly.variable(ring, 0), GradedPoly.variable(ring, 1)
    return IntersectionForm.from_rows(deg, [[t2 * t2 * 54, t1], [t1, t2 * Fraction(2, 3)]])


ETA2 = ConstMetric.from_upper([[0, 1], [1, 0]])


@pytest.mark.pencil
def test_const_metric() -> None:
    eta = ConstMetric.from_upper([[0, 2], [2, 0]], unit_scale=2)
    assert eta.lower(0, 1) == Fraction(1, 2)
    assert eta.unit_pairing == 1
    assert eta.scaled(Fraction(3)).unit_scale == 6
    with pytest.raises(MetricError):
        ConstMetric.from_upper([[1, 2], [3, 4]])
    with pytest.raises(MetricError):
        ConstMetric.from_upper([[1, 1], [1, 1]])
    with pytest.raises(MetricError):
        ConstMetric.from_upper([[1]], unit_scale=0)
    with pytest.raises(MetricError):
        ConstMetric.from_upper([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).validate_for(ELLIPTIC)


@pytest.mark.pencil
def test_intersection_form_validation() -> None:
    ring = RingConfig.for_degrees(ELLIPTIC)
    t1, t2 = GradedPoly.variable(ring, 0), GradedPoly.variable(ring, 1)
    zero = GradedPoly.zero(ring)
    # g^{12} = t1 has the wrong degree
    with pytest.raises(MetricError):
        IntersectionForm.from_rows(ELLIPTIC, [[zero, t1, t1], [t1, t1, t2], [t1, t2, zero]])
    with pytest.raises(MetricError):
        IntersectionForm.from_rows(ELLIPTIC, [[zero, zero, t1], [zero, t1, zero], [t1, t2 * Fraction(1, 2), zero]])
    tau = GradedPoly.variable(ring, 2)
    with pytest.raises(MetricError):
        IntersectionForm.from_rows(ELLIPTIC, [[zero, zero, t1], [zero, t1, zero], [t1, zero, tau]])


@pytest.mark.pencil
def test_a2_christoffel_matches_oracle() -> None:
    g = a2_metric()
    gamma = christoffel_solve(g, ETA2)
    for point in ([1, 2], [Fraction(-3, 4), Fraction(5, 7)]):
        oracle = christoffel_point_oracle(g, point)
        for index in oracle.indices():
            assert evaluate_coeff(gamma[index], point) == oracle.get(index)


@pytest.mark.pencil
def test_a2_pencil_passes() -> None:
    g = a2_metric()
    gamma = christoffel_solve(g, ETA2)
    report = check_pencil(g, ETA2, gamma, points=4, seed=3, symbolic=True)
    assert report.passed, report.failed()
    assert report["degenerate_rows"].status == Status.SKIPPED
    assert report["symbolic_curvature"].status == Status.PASS
    assert report["oracle_agreement"].status == Status.PASS


@pytest.mark.pencil
def test_elliptic_rational_pencil() -> None:
    ring = RingConfig.for_degrees(ELLIPTIC)
    g = elliptic_metric(1, ring)
    gamma = christoffel_solve(g, ETA3)
    report = check_pencil(g, ETA3, gamma, points=3, seed=11)
    assert report.passed, report.failed()
    assert report["degenerate_rows"].status == Status.PASS
    f = integrate_vector_potential(gamma, ETA3)
    assert sorted(f) == [0, 1]


@pytest.mark.pencil
def test_elliptic_series_pencil() -> None:
    # g of F = 1/2 t1^2 tau + 1/2 t1 t2^2 + C(q) t2^4 with the WDVV series C mod q^4
    ring = RingConfig.for_degrees(ELLIPTIC, CoeffKind.SERIES, 4)
    t1, t2 = GradedPoly.variable(ring, 0), GradedPoly.variable(ring, 1)
    zero = GradedPoly.zero(ring)
    g11 = t2**4 * SeriesCoeff.from_list([0, 2, 96, 1152])
    g12 = t2**3 * SeriesCoeff.from_list([0, 6, 144, 1152])
    g22 = t1 + t2**2 * SeriesCoeff.from_list([Fraction(-1, 8), 12, 144, 768])
    half = t2 * Fraction(1, 2)
    g = IntersectionForm.from_rows(ELLIPTIC, [[g11, g12, t1], [g12, g22, half], [t1, half, zero]])
    gamma = christoffel_solve(g, ETA3)
    report = check_pencil(g, ETA3, gamma, lambdas=[0, 1], points=2, seed=5)
    assert report.passed, report.failed()
    assert report["degenerate_rows"].status == Status.PASS
    assert report["oracle_agreement"].status == Status.PASS



@pytest.mark.pencil
def test_constant_metric_fails_d1_checks() -> None:
    deg = DegreeVector.generic([1], 3)
    ring = RingConfig.for_degrees(deg)
    g = IntersectionForm.from_rows(deg, [[GradedPoly.constant(ring, 1)]])
    eta = ConstMetric.from_upper([[1]])
    with pytest.raises(ChristoffelError):
        christoffel_solve(g, eta)
    zero = TensorData.build((1, 1, 1), lambda a, b, c: GradedPoly.zero(ring))
    report = check_pencil(g, eta, Christoffel(deg, zero), lambdas=[0, 2], points=2, seed=1)
    assert report["d1_metric"].status == Status.FAIL
    assert report["unit_determinant"].status == Status.FAIL
    assert not report.passed


@pytest.mark.pencil
def test_non_pencil_metric() -> None:
    ring = RingConfig.for_degrees(ELLIPTIC)
    g = elliptic_metric(1, ring)
    t1 = GradedPoly.variable(ring, 0)
    rows: List[List[GradedPoly]] = [[g[a, b] for b in range(3)] for a in range(3)]
    rows[0][0] = t1 * t1
    broken = IntersectionForm.from_rows(ELLIPTIC, rows)
    try:
        gamma = christoffel_solve(broken, ETA3)
    except ChristoffelError:
        return
    report = check_pencil(broken, ETA3, gamma, points=2, seed=2)
    assert report["d1_metric"].status == Status.FAIL
    assert not report.passed


@pytest.mark.pencil
def test_integrability_failure() -> None:
    ring = RingConfig.for_degrees(ELLIPTIC)
    g = elliptic_metric(1, ring)
    gamma = christoffel_solve(g, ETA3)
    t2 = GradedPoly.variable(ring, 1)
    entries = TensorData.build((3, 3, 3), lambda a, b, c: gamma[a, b, c])
    entries.set((0, 1, 1), gamma[0, 1, 1] + t2)
    with pytest.raises(IntegrabilityError):
        integrate_vector_potential(Christoffel(ELLIPTIC, entries), ETA3)


@pytest.mark.pencil
def test_generic_mode_ring() -> None:
    deg = DegreeVector.generic([1], 2)
    ring = RingConfig.for_degrees(deg)
    assert ring.mode == Mode.GENERIC
    g = IntersectionForm.from_rows(deg, [[GradedPoly.variable(ring, 0)]])
    gamma = christoffel_solve(g, ConstMetric.from_upper([[1]]))
    assert gamma[0, 0, 0] == Fraction(1, 2)


@pytest.mark.pencil
def test_oracle_on_one_dimensional_metric() -> None:
    deg = DegreeVector.generic([1], 2)
    ring = RingConfig.for_degrees(deg)
    g = IntersectionForm.from_rows(deg, [[GradedPoly.variable(ring, 0)]])
    assert christoffel_point_oracle(g, [Fraction(2)]).get((0, 0, 0)) == Fraction(1, 2)
    assert christoffel_point_oracle(g, [Fraction(-3, 7)]).get((0, 0, 0)) == Fraction(1, 2)


@pytest.mark.pencil
def test_constant_metric_has_zero_connection() -> None:
    deg = DegreeVector.generic([1, 1], 3)
    ring = RingConfig.for_degrees(deg)
    const = [[GradedPoly.constant(ring, x) for x in row] for row in [[2, 1], [1, 3]]]
    g = IntersectionForm.from_rows(deg, const)
    oracle = christoffel_point_oracle(g, [Fraction(5), Fraction(-1, 2)])
    assert all(oracle.get(index) == 0 for index in oracle.indices())
    entries = solve_connection(g.entries, deg, g.offset)
    assert all(entries.get(index).is_zero() for index in entries.indices())
