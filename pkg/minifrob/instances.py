"""Concrete inputs: Coxeter orbit-space charts and elliptic series potentials.

Coxeter charts are built by sampling: basic invariants are evaluated at random
rational points, the Euclidean form is interpolated over the finite weighted
monomial basis in the invariants and checked on held-out points.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .coefficients import CoeffKind
from .degrees import DegreeVector, Mode
from .frobenius import Potential, normalize_potential, raise_two, third_derivatives
from .graded_poly import (
    Exponent,
    GradedPoly,
    RingConfig,
    derive,
    evaluate,
    expand_layers,
    from_layers,
    jacobian_matrix,
    monomials_of_degree,
    poly_det,
    substitute,
)
from .linalg import LinearSystem, LinearSystemError, RankDeficientError, rational_inverse, rational_rank
from .operators import fraction, fraction_str
from .pencil import ConstMetric, IntersectionForm, solve_connection
from .sampling import default_seed, make_pts, make_rng

logger = logging.getLogger(__name__)

SUPPORTED = {"A": (1, 2, 3), "B": (2, 3)}
EXTRA_SAMPLES = 5
HELD_OUT = 10
RESAMPLE_TRIES = 5


class InstanceError(RuntimeError):
    """Raised when a chart or fixture cannot be generated."""

    pass


@dataclass(frozen=True)
class InvariantSystem:
    """Basic invariants ``s^1..s^n`` of a reflection group acting on ``x^1..x^m``.

    Type A acts on ``l + 1`` coordinates restricted to the sum-zero hyperplane;
    type B acts on ``l`` coordinates.
    """

    group_type: str
    rank: int
    ambient: RingConfig
    invariants: Tuple[GradedPoly, ...]
    degrees: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.invariants)

    @property
    def m(self) -> int:
        return self.ambient.n

    @property
    def deg(self) -> DegreeVector:
        return DegreeVector.coxeter(self.degrees)

    def random_points(self, rng: Any, count: int) -> List[List[Fraction]]:
        """Points of the reflection representation (on the hyperplane for type A)."""
        if self.group_type == "A":
            return [pt + [-sum(pt, Fraction(0))] for pt in make_pts(rng, count, self.rank)]
        return make_pts(rng, count, self.rank)

    def gradients(self) -> List[List[GradedPoly]]:
        """Gradients of the invariants, projected onto the hyperplane for type A."""
        grads = jacobian_matrix(list(self.invariants))
        if self.group_type != "A":
            return grads
        out = []
        for row in grads:
            mean = GradedPoly.zero(self.ambient)
            for p in row:
                mean = mean + p
            mean = mean * Fraction(1, self.m)
            out.append([p - mean for p in row])
        return out

    def reflections(self) -> List[List[List[Fraction]]]:
        """Generating reflections as ``m x m`` matrices."""
        m = self.m
        out = []
        for i in range(m - 1):
            M = [[Fraction(int(r == c)) for c in range(m)] for r in range(m)]
            M[i][i] = M[i + 1][i + 1] = Fraction(0)
            M[i][i + 1] = M[i + 1][i] = Fraction(1)
            out.append(M)
        if self.group_type == "B":
            M = [[Fraction(int(r == c)) for c in range(m)] for r in range(m)]
            M[m - 1][m - 1] = Fraction(-1)
            out.append(M)
        return out


@dataclass(frozen=True)
class OrbitChart:
    """Orbit space in invariant coordinates ``s`` and in flat coordinates ``t``.

    ``flat[a]`` is ``t^a`` as a polynomial in ``s``; ``inverse[i]`` is ``s^i``
    as a polynomial in ``t``.
    """

    inv: InvariantSystem
    g_s: IntersectionForm
    saito: IntersectionForm
    flat: Tuple[GradedPoly, ...]
    inverse: Tuple[GradedPoly, ...] = ()
    g_t: Optional[IntersectionForm] = None
    eta: Optional[ConstMetric] = None

    @property
    def deg(self) -> DegreeVector:
        return self.inv.deg


# Invariants


def invariant_degrees(group_type: str, rank: int) -> List[int]:
    """Degrees of the basic invariants, descending."""
    if group_type == "A":
        return list(range(rank + 1, 1, -1))
    return [2 * k for k in range(rank, 0, -1)]


def coxeter_invariants(group_type: str, rank: int, seed: Optional[int] = None) -> InvariantSystem:
    """Power-sum invariants of A_l (l <= 3) or B_l (2 <= l <= 3), degrees descending.

    Raises
    ------
        InstanceError: for an unsupported group, or if the invariants fail the
            Jacobian rank or reflection invariance test

    """
    group_type = group_type.upper()
    if rank not in SUPPORTED.get(group_type, ()):
        raise InstanceError(f"Unsupported Coxeter group {group_type}{rank}.")
    m = rank + 1 if group_type == "A" else rank
    ambient = RingConfig(m)
    xs = [GradedPoly.variable(ambient, a) for a in range(m)]

    def power_sum(k: int) -> GradedPoly:
        total = GradedPoly.zero(ambient)
        for x in xs:
            total = total + x**k
        return total

    degrees = invariant_degrees(group_type, rank)
    inv = InvariantSystem(group_type, rank, ambient, tuple(power_sum(c) for c in degrees), tuple(degrees))
    _verify_invariants(inv, seed)
    logger.debug("%s%d invariants of degrees %s", group_type, rank, degrees)
    return inv


def _verify_invariants(inv: InvariantSystem, seed: Optional[int]) -> None:
    rng = make_rng(seed)
    jac = jacobian_matrix(list(inv.invariants))
    for pt in inv.random_points(rng, HELD_OUT):
        for M in inv.reflections():
            image = [sum((M[r][c] * pt[c] for c in range(inv.m)), Fraction(0)) for r in range(inv.m)]
            for i, s in enumerate(inv.invariants):
                if evaluate(s, image) != evaluate(s, pt):
                    raise InstanceError(f"s^{i + 1} is not invariant under a generating reflection.")
    for pt in inv.random_points(rng, RESAMPLE_TRIES):
        rows = [[evaluate(p, pt) for p in row] for row in jac]
        if inv.group_type == "A":
            # hyperplane coordinates x^1..x^l with x^{l+1} = -sum
            rows = [[row[a] - row[-1] for a in range(inv.rank)] for row in rows]
        if rational_rank(rows) == inv.n:
            return
    raise InstanceError("The invariant Jacobian is singular at every sampled point.")


# Orbit metric


def _s_ring(inv: InvariantSystem) -> RingConfig:
    return RingConfig(inv.n, Mode.COXETER)


def _monomial_value(exp: Exponent, values: Sequence[Fraction]) -> Fraction:
    v = Fraction(1)
    for x, e in zip(values, exp):
        v *= x**e
    return v


def orbit_metric(inv: InvariantSystem, seed: Optional[int] = None) -> IntersectionForm:
    """Euclidean form in invariant coordinates, ``g^{ij}(s(x)) = <grad s^i, grad s^j>``.

    Each entry is interpolated over the monomials in ``s`` of weight
    ``c^i + c^j - 2`` from ``#monomials + 5`` random samples, then checked on
    10 held-out points.

    Raises
    ------
        InstanceError: if the interpolation stays singular after resampling or
            the held-out check fails

    """
    n = inv.n
    deg = inv.deg
    ring = _s_ring(inv)
    grads = inv.gradients()
    base = default_seed() if seed is None else seed
    rows: List[List[GradedPoly]] = [[GradedPoly.zero(ring)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            target = GradedPoly.zero(inv.ambient)
            for a in range(inv.m):
                target = target + grads[i][a] * grads[j][a]
            basis = monomials_of_degree(deg, deg.metric_degree(i, j))
            entry = _interpolate(inv, target, basis, ring, base + 7 * (i * n + j), f"g^{i + 1}{j + 1}")
            rows[i][j] = rows[j][i] = entry
    return IntersectionForm.from_rows(deg, rows)


def _interpolate(
    inv: InvariantSystem,
    target: GradedPoly,
    basis: List[Exponent],
    ring: RingConfig,
    seed: int,
    name: str,
) -> GradedPoly:
    for attempt in range(RESAMPLE_TRIES):
        rng = make_rng(seed + attempt)
        points = inv.random_points(rng, len(basis) + EXTRA_SAMPLES)
        system = LinearSystem(name)
        for r, pt in enumerate(points):
            s_values = [evaluate(s, pt) for s in inv.invariants]
            for exp in basis:
                system.add(r, exp, _monomial_value(exp, s_values))
            system.add_rhs(r, evaluate(target, pt))
        try:
            solution = system.solve(unique=True)
        except RankDeficientError:
            logger.debug("%s: singular sample set, resampling (attempt %d)", name, attempt + 1)
            continue
        except LinearSystemError as err:
            raise InstanceError(f"{name}: no polynomial in the invariants matches: {err}") from err
        poly = GradedPoly(ring, {exp: solution[exp] for exp in basis})
        for pt in inv.random_points(rng, HELD_OUT):
            s_values = [evaluate(s, pt) for s in inv.invariants]
            got = sum((c.constant_term() * _monomial_value(e, s_values) for e, c in poly.items()), Fraction(0))
            if got != evaluate(target, pt):
                raise InstanceError(f"{name}: held-out verification failed.")
        return poly
    raise InstanceError(f"{name}: interpolation stayed singular after {RESAMPLE_TRIES} samples.")


def saito_metric(g: IntersectionForm) -> IntersectionForm:
    """``J^{ij} = d g^{ij} / d s^1`` with constant nonzero determinant.

    Raises
    ------
        InstanceError: if the top degree is not unique or ``det J`` is not a
            nonzero constant

    """
    deg = g.deg
    if deg.n > 1 and deg.degrees[1] == deg.degrees[0]:
        raise InstanceError("The top invariant degree is not unique.")
    rows = [[derive(g[a, b], 0) for b in range(g.n)] for a in range(g.n)]
    J = IntersectionForm.from_rows(deg, rows, -deg.charge)
    det = poly_det(rows)
    if not det.is_constant() or det.is_zero():
        raise InstanceError(f"det of the Saito metric is not a nonzero constant: {det!r}.")
    logger.debug("Saito metric determinant %s", det.constant_value().encode())
    return J


# Flat coordinates


def _flat_sections(J: IntersectionForm, d: Fraction) -> List[GradedPoly]:
    """Basis of homogeneous ``t`` of degree `d` with ``J^{il} d_k d_l t + G^{il}_k d_l t = 0``."""
    deg = J.deg
    n = deg.n
    ring = J.ring
    gamma = solve_connection(J.entries, deg, -deg.charge, "saito connection")
    basis = monomials_of_degree(deg, d)
    system = LinearSystem(f"flat sections of degree {fraction_str(d)}")
    for exp in basis:
        t = GradedPoly.monomial(ring, exp)
        grad = [derive(t, l) for l in range(n)]
        for i, k in itertools.product(range(n), repeat=2):
            expr = GradedPoly.zero(ring)
            for l in range(n):
                expr = expr + J[i, l] * derive(grad[l], k) + gamma.get((i, l, k)) * grad[l]
            for (e, _), v in expand_layers(expr).items():
                system.add((i, k, e), exp, v)
    for exp in basis:
        system.unknown(exp)
    solution = system.solve(unique=False)
    return [GradedPoly(ring, {exp: vector.get(exp, 0) for exp in basis}) for vector in solution.nullspace]


def flat_coordinates(g: IntersectionForm, J: IntersectionForm) -> Tuple[GradedPoly, ...]:
    """Flat coordinates ``t^a(s)`` of the Saito metric.

    Normalized so that the Jacobian block between coordinates of equal degree
    is the identity, then each lower-degree partner ``t^{a*}`` of a pair
    ``a < a*`` is divided by the raw ``J(dt^a, dt^{a*})``.

    Raises
    ------
        InstanceError: if the solution space has the wrong dimension or the
            normalization is impossible

    """
    deg = g.deg
    n = deg.n
    ring = g.ring
    flat: List[Optional[GradedPoly]] = [None] * n
    for d in sorted(set(deg.degrees), reverse=True):
        block = [a for a in range(n) if deg.degrees[a] == d]
        sections = _flat_sections(J, d)
        if len(sections) != len(block):
            raise InstanceError(
                f"Flat coordinates of degree {fraction_str(d)}: found {len(sections)}, expected {len(block)}."
            )
        linear = [[p.coefficient(_unit_exp(n, a)).constant_term() for a in block] for p in sections]
        try:
            inverse = rational_inverse(linear)
        except ZeroDivisionError as err:
            raise InstanceError(f"Flat coordinates of degree {fraction_str(d)} are not triangular.") from err
        for r, a in enumerate(block):
            t = GradedPoly.zero(ring)
            for k, p in enumerate(sections):
                t = t + p * inverse[r][k]
            flat[a] = t
    coords = [t for t in flat if t is not None]

    raw = pairing_matrix(coords, J)
    for a in range(n):
        for b in range(a + 1, n):
            if deg.pairs(a, b) and deg.degrees[a] != deg.degrees[b]:
                if raw[a][b] == 0:
                    raise InstanceError(f"Coordinates t{a + 1} and t{b + 1} pair to zero.")
                low = b if deg.degrees[b] < deg.degrees[a] else a
                coords[low] = coords[low] * (1 / raw[a][b])
    return tuple(coords)


def _unit_exp(n: int, a: int) -> Exponent:
    return tuple(int(i == a) for i in range(n))


def pairing_matrix(coords: Sequence[GradedPoly], J: IntersectionForm) -> List[List[Fraction]]:
    """``J(dt^a, dt^b)``; raises `InstanceError` unless every entry is constant."""
    n = len(coords)
    jac = jacobian_matrix(list(coords))
    out = []
    for a in range(n):
        row = []
        for b in range(n):
            p = GradedPoly.zero(J.ring)
            for i, j in itertools.product(range(n), repeat=2):
                p = p + jac[a][i] * J[i, j] * jac[b][j]
            if not p.is_constant():
                raise InstanceError(f"J(dt{a + 1}, dt{b + 1}) is not constant.")
            row.append(p.constant_value().constant_term())
        out.append(row)
    return out


def invert_triangular(coords: Sequence[GradedPoly], deg: DegreeVector) -> Tuple[GradedPoly, ...]:
    """``s(t)`` from ``t(s)``, in ascending degree.

    Each ``t^a = l_a s^a + N_a``, where ``N_a`` only involves invariants of
    lower degree.

    Raises
    ------
        InstanceError: if some ``t^a`` has no constant nonzero ``s^a`` coefficient

    """
    n = deg.n
    ring = coords[0].ring
    images: List[Optional[GradedPoly]] = [None] * n
    for a in sorted(range(n), key=lambda i: deg.degrees[i]):
        unit = _unit_exp(n, a)
        lead = coords[a].coefficient(unit).constant_term()
        if not lead:
            raise InstanceError(f"t{a + 1} has no leading s{a + 1} term.")
        rest = coords[a] - GradedPoly.monomial(ring, unit, lead)
        known = [images[i] if images[i] is not None else GradedPoly.zero(ring) for i in range(n)]
        if any(rest.depends_on(i) and images[i] is None for i in range(n)):
            raise InstanceError(f"t{a + 1} is not triangular in the invariants.")
        images[a] = (GradedPoly.variable(ring, a) - substitute(rest, known)) * (1 / lead)
    return tuple(p for p in images if p is not None)


def to_flat_coordinates(chart: OrbitChart, unit_scale: Any = 1) -> OrbitChart:
    """Rewrite ``g`` in the flat coordinates and read off ``eta = u d_1 g``.

    Raises
    ------
        InstanceError: if ``d_1 g`` is not the constant Saito pairing

    """
    deg = chart.deg
    n = deg.n
    u = fraction(unit_scale)
    jac = jacobian_matrix(list(chart.flat))
    inverse = invert_triangular(chart.flat, deg)
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            p = GradedPoly.zero(chart.g_s.ring)
            for i, j in itertools.product(range(n), repeat=2):
                p = p + jac[a][i] * chart.g_s[i, j] * jac[b][j]
            row.append(substitute(p, inverse))
        rows.append(row)
    g_t = IntersectionForm.from_rows(deg, rows)
    pairing = pairing_matrix(chart.flat, chart.saito)
    d1 = g_t.d1()
    for a, b in itertools.product(range(n), repeat=2):
        if d1[a][b] != GradedPoly.constant(g_t.ring, pairing[a][b]):
            raise InstanceError(f"d_1 g^{{{a + 1}{b + 1}}} differs from the Saito pairing.")
    eta = ConstMetric.from_upper([[u * x for x in row] for row in pairing], u)
    return OrbitChart(chart.inv, chart.g_s, chart.saito, chart.flat, inverse, g_t, eta)


def coxeter_chart(group_type: str, rank: int, seed: Optional[int] = None, unit_scale: Any = 1) -> OrbitChart:
    """Invariants, orbit metric, Saito metric, flat coordinates and ``g`` in them."""
    inv = coxeter_invariants(group_type, rank, seed)
    g_s = orbit_metric(inv, seed)
    J = saito_metric(g_s)
    flat = flat_coordinates(g_s, J)
    chart = to_flat_coordinates(OrbitChart(inv, g_s, J, flat), unit_scale)
    logger.info(
        "%s%d chart: flat coordinates of degrees %s",
        inv.group_type,
        rank,
        [fraction_str(d) for d in inv.deg.degrees],
    )
    return chart


# Elliptic series potentials


def forced_potential(ring: RingConfig, eta: ConstMetric) -> GradedPoly:
    """Terms of ``F`` fixed by the unit: ``(1/u)(1/2 eta_{1n} (t^1)^2 t^n + 1/2 t^1 eta_{ab} t^a t^b)``."""
    n = ring.n
    t = [GradedPoly.variable(ring, a) for a in range(n)]
    F = t[0] * t[0] * t[n - 1] * (eta.lower(0, n - 1) / 2)
    for a, b in itertools.product(range(1, n - 1), repeat=2):
        if eta.lower(a, b):
            F = F + t[0] * t[a] * t[b] * (eta.lower(a, b) / 2)
    return F * (1 / eta.unit_scale)


def _wdvv_residuals(F: GradedPoly, eta: ConstMetric) -> List[GradedPoly]:
    n = F.ring.n
    zero = GradedPoly.zero(F.ring)
    C = raise_two(third_derivatives(F), eta, zero)
    out = []
    for a, b, d, m in itertools.product(range(n), repeat=4):
        if b >= d:
            continue
        r = zero
        for c in range(n):
            r = r + C.get((a, b, c)) * C.get((c, d, m)) - C.get((a, d, c)) * C.get((c, b, m))
        out.append(r)
    return out


def _layer(residuals: List[GradedPoly], k: int) -> Dict[Tuple[int, Exponent], Fraction]:
    out = {}
    for r, p in enumerate(residuals):
        for (exp, j), v in expand_layers(p).items():
            if j == k:
                out[(r, exp)] = v
    return out


def elliptic_series_fixture(
    n: int,
    deg: DegreeVector,
    eta: ConstMetric,
    N: int,
    seed_data: Mapping[int, Mapping[Exponent, Any]],
) -> Potential:
    """Solve WDVV order by order in ``q`` for an elliptic potential.

    ``F = forced + sum_m r_m(q) t^m`` over monomials ``m`` in ``t^2..t^{n-1}``
    of degree 2. `seed_data[0]` gives the ``q^0`` layer of the ``r_m``;
    `seed_data[k]` pins gauge values at order ``k``. At every order ``k >= 1``
    the ``q^k`` layer of the WDVV residual is affine in the unknown layer.

    Raises
    ------
        InstanceError: if the degree vector is not elliptic, the ``q^0`` layer
            fails WDVV, or some order is inconsistent or under-determined

    """
    if deg.mode != Mode.ELLIPTIC or deg.n != n:
        raise InstanceError("elliptic_series_fixture needs an elliptic degree vector of size n.")
    eta.validate_for(deg)
    if N < 1:
        raise InstanceError(f"Truncation must be positive, got {N}.")
    middle = list(range(1, n - 1))
    unknowns = monomials_of_degree(deg, deg.potential_degree, middle)
    layers: Dict[Tuple[Exponent, int], Fraction] = {}
    for k, values in seed_data.items():
        for exp in values:
            if tuple(exp) not in unknowns:
                raise InstanceError(f"Seed entry {tuple(exp)} at order {k} is not a free monomial.")
    for exp in unknowns:
        layers[(exp, 0)] = fraction(seed_data.get(0, {}).get(exp, 0))

    def potential(truncation: int, trial: Mapping[Tuple[Exponent, int], Fraction]) -> GradedPoly:
        ring = RingConfig(n, Mode.ELLIPTIC, CoeffKind.SERIES, truncation)
        return forced_potential(ring, eta) + from_layers(ring, trial)

    base = _layer(_wdvv_residuals(potential(1, layers), eta), 0)
    if base:
        raise InstanceError(f"The q^0 layer does not satisfy WDVV ({len(base)} nonzero residual terms).")

    for k in range(1, N):
        system = LinearSystem(f"WDVV order q^{k}")
        zero_trial = dict(layers)
        constant = _layer(_wdvv_residuals(potential(k + 1, zero_trial), eta), k)
        for exp in unknowns:
            system.unknown(exp)
            trial = dict(layers)
            trial[(exp, k)] = Fraction(1)
            shifted = _layer(_wdvv_residuals(potential(k + 1, trial), eta), k)
            for row in set(shifted) | set(constant):
                v = shifted.get(row, Fraction(0)) - constant.get(row, Fraction(0))
                if v:
                    system.add(row, exp, v)
        for row, v in constant.items():
            system.add_rhs(row, -v)
        for exp, value in seed_data.get(k, {}).items():
            system.add_equation(("gauge", tuple(exp)), {tuple(exp): 1}, fraction(value))
        try:
            solution = system.solve(unique=True)
        except RankDeficientError as err:
            raise InstanceError(
                f"Order q^{k} is under-determined; pin {err.free[0]} in the seed data."
            ) from err
        except LinearSystemError as err:
            raise InstanceError(f"Order q^{k} is inconsistent: {err}") from err
        for exp in unknowns:
            layers[(exp, k)] = solution[exp]
        logger.debug("order q^%d solved: %s", k, {e: fraction_str(solution[e]) for e in unknowns})

    F, _ = normalize_potential(potential(N, layers))
    return Potential(F, {}, Fraction(0), f"WDVV series solution modulo q^{N}")
