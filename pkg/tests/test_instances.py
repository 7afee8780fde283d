from fractions import Fraction

import pytest

from minifrob import (
    CoeffKind,
    ConstMetric,
    DegreeVector,
    GradedPoly,
    InstanceError,
    Mode,
    RingConfig,
    SeriesCoeff,
    christoffel_solve,
    coxeter_chart,
    coxeter_invariants,
    elliptic_series_fixture,
    forced_potential,
    frobenius_structure,
    integrate_vector_potential,
    invariant_degrees,
    invert_triangular,
    recover_intersection_form,
    substitute,
    verify_frobenius,
)
from minifrob.instances import OrbitChart

ELLIPTIC = DegreeVector.elliptic([1, Fraction(1, 2), 0])
ETA3 = ConstMetric.from_upper([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
CHAZY = [Fraction(-1, 96), 1, 12, 64, 448, 1536, 12288, 32768]
SEED = {0: {(0, 4, 0): Fraction(-1, 96)}, 1: {(0, 4, 0): 1}}


def full_check(chart: OrbitChart) -> None:
    assert chart.g_t is not None and chart.eta is not None
    gamma = christoffel_solve(chart.g_t, chart.eta)
    S = frobenius_structure(gamma, chart.eta, integrate_vector_potential(gamma, chart.eta))
    report = verify_frobenius(S)
    assert report.passed, report.failed()
    assert recover_intersection_form(S.potential, S.eta, S.deg) == chart.g_t


@pytest.mark.instances
def test_invariant_degrees() -> None:
    assert invariant_degrees("A", 1) == [2]
    assert invariant_degrees("A", 3) == [4, 3, 2]
    assert invariant_degrees("B", 3) == [6, 4, 2]
    with pytest.raises(InstanceError):
        coxeter_invariants("D", 4)
    with pytest.raises(InstanceError):
        coxeter_invariants("A", 4)
    with pytest.raises(InstanceError):
        coxeter_invariants("B", 1)
    inv = coxeter_invariants("b", 2, seed=1)
    assert inv.group_type == "B"
    assert inv.degrees == (4, 2)
    assert inv.m == 2


@pytest.mark.instances
def test_a1_chart() -> None:
    chart = coxeter_chart("A", 1, seed=4)
    x = GradedPoly.variable(chart.inv.ambient, 0)
    assert chart.inv.invariants[0] == x * x + GradedPoly.variable(chart.inv.ambient, 1) ** 2
    s = GradedPoly.variable(chart.g_s.ring, 0)
    assert chart.g_s[0, 0] == s * 4
    assert chart.g_t is not None and chart.eta is not None
    t = GradedPoly.variable(chart.g_t.ring, 0)
    assert chart.g_t[0, 0] == t * 4
    assert chart.eta.upper(0, 0) == 4
    gamma = christoffel_solve(chart.g_t, chart.eta)
    S = frobenius_structure(gamma, chart.eta, integrate_vector_potential(gamma, chart.eta))
    assert S.F == t**3 * Fraction(1, 24)


@pytest.mark.instances
def test_a2_kappa_from_power_sums() -> None:
    # x1 + x2 + x3 = 0, written in the first two coordinates
    plane = RingConfig(2)
    x, y = GradedPoly.variable(plane, 0), GradedPoly.variable(plane, 1)
    xs = [x, y, -(x + y)]
    p2 = sum((v * v for v in xs), GradedPoly.zero(plane))
    p3 = sum((v**3 for v in xs), GradedPoly.zero(plane))
    # gradients projected onto the plane
    grad2 = [v * 2 for v in xs]
    grad3 = [v * v * 3 - p2 for v in xs]

    def dot(u: list, v: list) -> GradedPoly:
        return sum((a * b for a, b in zip(u, v)), GradedPoly.zero(plane))

    sring = RingConfig(2)
    s1, s2 = GradedPoly.variable(sring, 0), GradedPoly.variable(sring, 1)
    g_s = [[s2 * s2 * Fraction(3, 2), s1 * 6], [s1 * 6, s2 * 4]]
    grads = [grad3, grad2]
    for a in range(2):
        for b in range(2):
            assert dot(grads[a], grads[b]) == substitute(g_s[a][b], [p3, p2])

    chart = coxeter_chart("A", 2, seed=6)
    assert chart.g_t is not None and chart.eta is not None
    ring = chart.g_t.ring
    t1, t2 = GradedPoly.variable(ring, 0), GradedPoly.variable(ring, 1)
    g11 = substitute(g_s[0][0], [t1, t2 * 6])
    assert g11 == t2 * t2 * 54
    # g^{11} = E(d2 d2 F) = 16 kappa t2^2 for F = 1/2 t1^2 t2 + kappa t2^4
    kappa = g11.coefficient((0, 2)).constant_term() / 16
    assert kappa == Fraction(27, 8)
    assert chart.g_t[0, 0] == g11
    gamma = christoffel_solve(chart.g_t, chart.eta)
    S = frobenius_structure(gamma, chart.eta, integrate_vector_potential(gamma, chart.eta))
    assert S.F == t1 * t1 * t2 * Fraction(1, 2) + t2**4 * kappa


@pytest.mark.instances
def test_a2_chart() -> None:
    chart = coxeter_chart("A", 2, seed=2)
    assert chart.deg.degrees == (1, Fraction(2, 3))
    assert chart.g_t is not None and chart.eta is not None
    ring = chart.g_t.ring
    t1, t2 = GradedPoly.variable(ring, 0), GradedPoly.variable(ring, 1)
    assert chart.g_t[0, 0] == t2 * t2 * 54
    assert chart.g_t[0, 1] == t1
    assert chart.g_t[1, 1] == t2 * Fraction(2, 3)
    assert chart.eta.eta_upper == ((0, 1), (1, 0))
    # the chart maps invariants to flat coordinates and back
    assert invert_triangular(chart.flat, chart.deg) == chart.inverse
    full_check(chart)


@pytest.mark.instances
def test_unit_scale_rescales_eta() -> None:
    chart = coxeter_chart("A", 2, seed=2, unit_scale=2)
    assert chart.eta is not None
    assert chart.eta.unit_scale == 2
    assert chart.eta.upper(0, 1) == 2
    assert chart.eta.unit_pairing == 1


@pytest.mark.instances
def test_b2_chart() -> None:
    chart = coxeter_chart("B", 2, seed=5)
    assert chart.deg.charge == Fraction(3, 2)
    full_check(chart)


@pytest.mark.instances
@pytest.mark.slow
@pytest.mark.parametrize("group", [("A", 3), ("B", 3)])
def test_rank3_charts(group: tuple) -> None:
    chart = coxeter_chart(*group, seed=7)
    assert chart.eta is not None
    assert chart.eta.determinant() != 0
    full_check(chart)


@pytest.mark.instances
def test_forced_potential() -> None:
    ring = RingConfig.for_degrees(ELLIPTIC)
    t1, t2, tau = (GradedPoly.variable(ring, a) for a in range(3))
    F = forced_potential(ring, ETA3)
    assert F == t1 * t1 * tau * Fraction(1, 2) + t1 * t2 * t2 * Fraction(1, 2)


@pytest.mark.instances
def test_elliptic_series_fixture() -> None:
    potential = elliptic_series_fixture(3, ELLIPTIC, ETA3, 8, SEED)
    F = potential.F
    assert F.ring == RingConfig(3, Mode.ELLIPTIC, CoeffKind.SERIES, 8)
    assert F.coefficient((0, 4, 0)) == SeriesCoeff.from_list(CHAZY)
    assert F - GradedPoly.monomial(F.ring, (0, 4, 0), SeriesCoeff.from_list(CHAZY)) == forced_potential(F.ring, ETA3)


@pytest.mark.instances
def test_elliptic_series_fixture_short() -> None:
    F = elliptic_series_fixture(3, ELLIPTIC, ETA3, 3, SEED).F
    assert F.coefficient((0, 4, 0)) == SeriesCoeff.from_list(CHAZY[:3])


@pytest.mark.instances
def test_elliptic_series_fixture_errors() -> None:
    with pytest.raises(InstanceError):
        # the q^1 coefficient is a free gauge
        elliptic_series_fixture(3, ELLIPTIC, ETA3, 3, {0: SEED[0]})
    with pytest.raises(InstanceError):
        elliptic_series_fixture(3, ELLIPTIC, ETA3, 3, {0: {(1, 0, 0): 1}})
    with pytest.raises(InstanceError):
        elliptic_series_fixture(3, ELLIPTIC, ETA3, 0, SEED)
    with pytest.raises(InstanceError):
        elliptic_series_fixture(2, DegreeVector.coxeter([3, 2]), ETA3, 3, SEED)
