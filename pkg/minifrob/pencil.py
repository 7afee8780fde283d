"""Contravariant Levi-Civita connections and flat pencil verification.

All components are stored 0-based: ``g[a, b] = g^{ab}``,
``Gamma[a, b, c] = Gamma^{ab}_c``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .checks import CheckResult, CheckSuite, Witness, nonzero
from .coefficients import RationalCoeff
from .degrees import DegreeVector, Mode
from .graded_poly import (
    Exponent,
    GradedPoly,
    RingConfig,
    derive,
    evaluate_coeff,
    expand_layers,
    from_layers,
    monomials_of_degree,
    poly_det,
)
from .linalg import LinearSystem, LinearSystemError, rational_det, rational_inverse
from .operators import fraction, fraction_str
from .sampling import accepted_points, default_seed, make_rng
from .tensor_data import TensorData
from .tensor_ops import is_unit, matmul, matrix_inverse

logger = logging.getLogger(__name__)

DEFAULT_LAMBDAS = (Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 3))
DEFAULT_POINTS = 20
SYMBOLIC_MAX_N = 3


class MetricError(ValueError):
    """Raised when metric data violates its type invariants."""

    pass


class ChristoffelError(RuntimeError):
    """Raised when the connection system has no unique polynomial solution."""

    pass


class SingularPointError(RuntimeError):
    """Raised when the metric is not invertible at an evaluation point."""

    pass


class IntegrabilityError(RuntimeError):
    """Raised when Christoffel symbols do not come from a vector potential."""

    pass


@dataclass(frozen=True)
class ConstMetric:
    """Constant metric ``eta^{ab}``, its inverse, and the unit scale ``u``.

    The unit field is ``u d/dt^1``; a pencil satisfies ``eta = u d_1 g``.
    """

    eta_upper: Tuple[Tuple[Fraction, ...], ...]
    eta_lower: Tuple[Tuple[Fraction, ...], ...]
    unit_scale: Fraction = Fraction(1)

    @classmethod
    def from_upper(cls, rows: Sequence[Sequence[Any]], unit_scale: Any = 1) -> ConstMetric:
        """Build from ``eta^{ab}``.

        Raises
        ------
            MetricError: if the matrix is not square, symmetric and invertible,
                or the unit scale is zero

        """
        upper = tuple(tuple(fraction(x) for x in row) for row in rows)
        n = len(upper)
        if n == 0 or any(len(row) != n for row in upper):
            raise MetricError("eta must be a non-empty square matrix.")
        for a in range(n):
            for b in range(a + 1, n):
                if upper[a][b] != upper[b][a]:
                    raise MetricError(f"eta is not symmetric at ({a + 1}, {b + 1}).")
        try:
            lower = rational_inverse([list(r) for r in upper])
        except ZeroDivisionError as err:
            raise MetricError("eta is not invertible.") from err
        u = fraction(unit_scale)
        if u == 0:
            raise MetricError("The unit scale must be nonzero.")
        return cls(upper, tuple(tuple(r) for r in lower), u)

    @property
    def n(self) -> int:
        return len(self.eta_upper)

    def upper(self, a: int, b: int) -> Fraction:
        return self.eta_upper[a][b]

    def lower(self, a: int, b: int) -> Fraction:
        return self.eta_lower[a][b]

    @property
    def unit_pairing(self) -> Fraction:
        """``eta^{1n} / u``, the constant appearing in the degenerate-row rules."""
        return self.eta_upper[0][self.n - 1] / self.unit_scale

    def determinant(self) -> Fraction:
        return rational_det([list(r) for r in self.eta_upper])

    def scaled(self, c: Fraction) -> ConstMetric:
        """``eta -> c eta`` and ``u -> c u``."""
        return ConstMetric.from_upper([[c * x for x in row] for row in self.eta_upper], c * self.unit_scale)

    def validate_for(self, deg: DegreeVector) -> None:
        """Mode-dependent invariants.

        Raises
        ------
            MetricError: on a size mismatch or, in elliptic mode, ``eta^{1n} = 0``

        """
        if self.n != deg.n:
            raise MetricError(f"eta has size {self.n}, degree vector has {deg.n}.")
        if deg.mode == Mode.ELLIPTIC and self.eta_upper[0][deg.n - 1] == 0:
            raise MetricError("Elliptic mode requires eta^{1n} != 0.")

    def as_poly(self, ring: RingConfig, a: int, b: int) -> GradedPoly:
        return GradedPoly.constant(ring, self.eta_upper[a][b])

    def encode(self) -> dict:
        return {
            "eta": [[fraction_str(x) for x in row] for row in self.eta_upper],
            "unit_scale": fraction_str(self.unit_scale),
        }


def _check_entries(entries: TensorData, dims: int, n: int, what: str) -> RingConfig:
    if tuple(entries.shape) != (n,) * dims:
        raise MetricError(f"{what} must have shape {(n,) * dims}, got {entries.shape}.")
    ring = entries.get((0,) * dims).ring
    for index, p in entries.entries():
        if not isinstance(p, GradedPoly) or p.ring != ring:
            raise MetricError(f"{what} entry {tuple(i + 1 for i in index)} is not in ring {ring}.")
    return ring


@dataclass(frozen=True, eq=False)
class IntersectionForm:
    """Symmetric contravariant metric ``g^{ab}`` with polynomial entries.

    `offset` fixes the degree law ``deg g^{ab} = d^a + d^b + offset``; the
    default ``1 - D`` is the intersection form, ``-D`` the Saito metric.
    """

    deg: DegreeVector
    entries: TensorData
    offset: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.offset is None:
            object.__setattr__(self, "offset", 1 - self.deg.charge)
        n = self.deg.n
        ring = _check_entries(self.entries, 2, n, "metric")
        if ring.n != n or ring.mode != self.deg.mode:
            raise MetricError(f"Metric ring {ring} does not match the degree vector.")
        for a in range(n):
            for b in range(n):
                p = self.entries.get((a, b))
                if p != self.entries.get((b, a)):
                    raise MetricError(f"g^{{{a + 1}{b + 1}}} != g^{{{b + 1}{a + 1}}}.")
                if p.depends_on_tau():
                    raise MetricError(f"g^{{{a + 1}{b + 1}}} depends on the degree-0 coordinate.")
                want = self.deg.metric_degree(a, b, self.offset)
                if not p.is_homogeneous(want, self.deg):
                    raise MetricError(
                        f"g^{{{a + 1}{b + 1}}} is not homogeneous of degree {fraction_str(want)}."
                    )

    @classmethod
    def from_rows(cls, deg: DegreeVector, rows: Sequence[Sequence[GradedPoly]], offset: Optional[Fraction] = None) -> IntersectionForm:
        return cls(deg, TensorData.from_nested(rows, 2), offset)

    @property
    def n(self) -> int:
        return self.deg.n

    @property
    def ring(self) -> RingConfig:
        return self.entries.get((0, 0)).ring

    def __getitem__(self, index: Tuple[int, int]) -> GradedPoly:
        return self.entries.get(index)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntersectionForm):
            return NotImplemented
        return self.deg == other.deg and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.deg, self.entries))

    def d1(self) -> List[List[GradedPoly]]:
        return [[derive(self[a, b], 0) for b in range(self.n)] for a in range(self.n)]


@dataclass(frozen=True, eq=False)
class Christoffel:
    deg: DegreeVector
    entries: TensorData
    offset: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.offset is None:
            object.__setattr__(self, "offset", 1 - self.deg.charge)
        _check_entries(self.entries, 3, self.deg.n, "Christoffel symbols")

    @property
    def n(self) -> int:
        return self.deg.n

    @property
    def ring(self) -> RingConfig:
        return self.entries.get((0, 0, 0)).ring

    def __getitem__(self, index: Tuple[int, int, int]) -> GradedPoly:
        return self.entries.get(index)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Christoffel):
            return NotImplemented
        return self.deg == other.deg and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.deg, self.entries))


class PencilReport(CheckSuite):
    """Results of `check_pencil`, keyed by check name."""

    pass




# Ansatz solve


def solve_connection(
    metric: TensorData, deg: DegreeVector, offset: Fraction, name: str = "christoffel"
) -> TensorData:
    """Unique polynomial solution of the compatibility and torsion conditions.

    Args:
    ----
        metric: symmetric ``(n, n)`` polynomial entries
        deg: degree vector of the coordinates
        offset: degree law offset of `metric`
        name: label used in diagnostics

    Returns:
    -------
        TensorData: ``(n, n, n)`` entries ``Gamma^{ab}_c``

    Raises:
    ------
        ChristoffelError: if the system is inconsistent or rank-deficient, or a
            component of negative degree is forced to be nonzero

    """
    n = deg.n
    ring: RingConfig = metric.get((0, 0)).ring
    N = ring.truncation
    basis: Dict[Tuple[int, int, int], List[Exponent]] = {}
    for index in itertools.product(range(n), repeat=3):
        d = deg.christoffel_degree(*index, offset)
        basis[index] = monomials_of_degree(deg, d) if d >= 0 else []

    system = LinearSystem(name)
    for a in range(n):
        for b in range(a, n):
            for c in range(n):
                forced = derive(metric.get((a, b)), c)
                if not basis[(a, b, c)] and not basis[(b, a, c)] and not forced.is_zero():
                    raise ChristoffelError(
                        f"{name}: Gamma^{{{a + 1}{b + 1}}}_{c + 1} has negative degree "
                        f"but d_{c + 1} g^{{{a + 1}{b + 1}}} is nonzero."
                    )
                for x, y in ((a, b), (b, a)):
                    for exp in basis[(x, y, c)]:
                        for k in range(N):
                            system.add(("metric", a, b, c, exp, k), (x, y, c, exp, k), 1)
                for (exp, k), v in expand_layers(forced).items():
                    system.add_rhs(("metric", a, b, c, exp, k), v)

    # torsion(lo, hi, c) = sum_s g^{lo s} Gamma^{hi c}_s - g^{hi s} Gamma^{lo c}_s
    layers = {(a, s): expand_layers(metric.get((a, s))) for a in range(n) for s in range(n)}
    for (x, y, s), monos in basis.items():
        for exp in monos:
            for k in range(N):
                unknown = (x, y, s, exp, k)
                for a in range(n):
                    if a == x:
                        continue
                    lo, hi = min(a, x), max(a, x)
                    sign = 1 if a < x else -1
                    for (e, j), v in layers[(a, s)].items():
                        if j + k < N:
                            total = tuple(p + r for p, r in zip(e, exp))
                            system.add(("torsion", lo, hi, y, total, j + k), unknown, sign * v)

    logger.debug("%s: ansatz system %s", name, system.shape)
    try:
        solution = system.solve(unique=True)
    except LinearSystemError as err:
        raise ChristoffelError(f"Input is not a Levi-Civita-admissible metric: {err}") from err

    def entry(a: int, b: int, c: int) -> GradedPoly:
        values = {(exp, k): solution[(a, b, c, exp, k)] for exp in basis[(a, b, c)] for k in range(N)}
        return from_layers(ring, values)

    return TensorData.build((n, n, n), entry)


def christoffel_solve(g: IntersectionForm, eta: ConstMetric) -> Christoffel:
    """Christoffel symbols of the intersection form by homogeneous ansatz.

    Raises
    ------
        ChristoffelError: if ``det(d_1 g)`` is not the constant ``det(eta)/u^n``
            or the linear system has no unique solution

    """
    eta.validate_for(g.deg)
    expected = eta.determinant() / eta.unit_scale**g.n
    det_d1 = poly_det(g.d1())
    if det_d1 != GradedPoly.constant(g.ring, expected):
        raise ChristoffelError(
            f"det(d_1 g) must be the constant {fraction_str(expected)} matching eta, got {det_d1!r}."
        )
    entries = solve_connection(g.entries, g.deg, g.offset, "christoffel")  # type: ignore[arg-type]
    return Christoffel(g.deg, entries, g.offset)


# Point evaluation. Values are coefficient elements: rationals, or series in
# a formal q.

Matrix = List[List[Any]]


def _dot(row: Sequence[Any], column: Sequence[Any]) -> Any:
    acc = row[0] * column[0]
    for x, y in zip(row[1:], column[1:]):
        acc = acc + x * y
    return acc


def _plain(x: Any) -> Any:
    return x.value if isinstance(x, RationalCoeff) else x


def _is_zero(x: Any) -> bool:
    is_zero = getattr(x, "is_zero", None)
    return bool(is_zero()) if is_zero is not None else x == 0


def metric_jet(
    g: IntersectionForm,
    point: Sequence[Any],
    eta: Optional[ConstMetric] = None,
    shift: Any = 0,
    order: int = 1,
) -> Tuple[Matrix, List[Matrix], Optional[List[List[Matrix]]]]:
    """Values of ``g + shift*eta`` and its derivatives at `point`.

    Returns ``(G, dG, ddG)`` with ``dG[c][a][b] = d_c g^{ab}`` and, when
    `order` is 2, ``ddG[k][c][a][b] = d_k d_c g^{ab}``.
    """
    n = g.n
    shift = fraction(shift)
    G = [[evaluate_coeff(g[a, b], point) for b in range(n)] for a in range(n)]
    if shift and eta is not None:
        G = [[G[a][b] + shift * eta.upper(a, b) for b in range(n)] for a in range(n)]
    if order < 1:
        return G, [], None
    d1 = [[[derive(g[a, b], c) for b in range(n)] for a in range(n)] for c in range(n)]
    dG = [[[evaluate_coeff(d1[c][a][b], point) for b in range(n)] for a in range(n)] for c in range(n)]
    ddG = None
    if order >= 2:
        ddG = [
            [[[evaluate_coeff(derive(d1[c][a][b], k), point) for b in range(n)] for a in range(n)] for c in range(n)]
            for k in range(n)
        ]
    return G, dG, ddG


def _invert(G: Matrix) -> Matrix:
    try:
        return matrix_inverse(G)
    except ZeroDivisionError as err:
        raise SingularPointError(f"Metric is singular at the evaluation point: {err}") from err


def _lower_derivative(H: Matrix, dG: Matrix) -> Matrix:
    """``d g_{..} = -H (d g^{..}) H`` for ``H = g^{-1}``."""
    m = matmul(matmul(H, dG), H)
    return [[-x for x in row] for row in m]


def _first_kind(dH: List[Matrix], n: int) -> List[List[List[Any]]]:
    half = Fraction(1, 2)
    return [
        [[half * (dH[s][l][c] + dH[c][l][s] - dH[l][s][c]) for c in range(n)] for s in range(n)]
        for l in range(n)
    ]


def _raise_index(G: Matrix, first: List[List[List[Any]]], n: int) -> List[List[List[Any]]]:
    """``out[b][s][c] = g^{bl} first[l][s][c]``."""
    return [
        [[_dot(G[b], [first[l][s][c] for l in range(n)]) for c in range(n)] for s in range(n)]
        for b in range(n)
    ]


def _contravariant(G: Matrix, second: List[List[List[Any]]], n: int) -> List[List[List[Any]]]:
    """``Gamma^{ab}_c = -g^{as} Gamma^b_{sc}``."""
    return [
        [[-_dot(G[a], [second[b][s][c] for s in range(n)]) for c in range(n)] for b in range(n)]
        for a in range(n)
    ]


def christoffel_point_oracle(g: IntersectionForm, point: Sequence[Any]) -> TensorData:
    """``Gamma^{ab}_c`` at one point through the covariant metric.

    Evaluates ``g`` and ``dg``, inverts exactly, forms
    ``d_c g_{ab} = -g_{ae} (d_c g^{em}) g_{mb}``, the classical symbols
    ``Gamma^b_{sc}``, and returns ``-g^{as} Gamma^b_{sc}``. In series mode the
    values keep ``q`` formal.

    Raises
    ------
        SingularPointError: if ``g(point)`` is not invertible

    """
    n = g.n
    G, dG, _ = metric_jet(g, point)
    H = _invert(G)
    dH = [_lower_derivative(H, dG[c]) for c in range(n)]
    gamma = _contravariant(G, _raise_index(G, _first_kind(dH, n), n), n)
    return TensorData.build((n, n, n), lambda a, b, c: _plain(gamma[a][b][c]))


def connection_jet(
    g: IntersectionForm, point: Sequence[Any], eta: Optional[ConstMetric] = None, shift: Any = 0
) -> Tuple[Matrix, List[List[List[Any]]], List[List[List[List[Any]]]]]:
    """Metric value, ``Gamma^{ab}_c`` and ``d_k Gamma^{ab}_c`` of ``g + shift*eta`` at a point.

    Returns ``(G, gamma, d_gamma)`` with ``gamma[a][b][c]`` and
    ``d_gamma[k][a][b][c]``.

    Raises
    ------
        SingularPointError: if the shifted metric is not invertible at `point`

    """
    n = g.n
    G, dG, ddG = metric_jet(g, point, eta, shift, order=2)
    assert ddG is not None
    H = _invert(G)
    dH = [_lower_derivative(H, dG[c]) for c in range(n)]
    ddH = []
    for k in range(n):
        row = []
        for c in range(n):
            t1 = matmul(matmul(dH[k], dG[c]), H)
            t2 = matmul(matmul(H, ddG[k][c]), H)
            t3 = matmul(matmul(H, dG[c]), dH[k])
            row.append([[-(t1[i][j] + t2[i][j] + t3[i][j]) for j in range(n)] for i in range(n)])
        ddH.append(row)

    first = _first_kind(dH, n)
    second = _raise_index(G, first, n)
    gamma = _contravariant(G, second, n)
    d_gamma = []
    for k in range(n):
        d_first = _first_kind(ddH[k], n)
        d_second_a = _raise_index(dG[k], first, n)
        d_second_b = _raise_index(G, d_first, n)
        d_second = [
            [[d_second_a[b][s][c] + d_second_b[b][s][c] for c in range(n)] for s in range(n)]
            for b in range(n)
        ]
        part_a = _contravariant(dG[k], second, n)
        part_b = _contravariant(G, d_second, n)
        d_gamma.append(
            [[[part_a[a][b][c] + part_b[a][b][c] for c in range(n)] for b in range(n)] for a in range(n)]
        )
    return G, gamma, d_gamma


def curvature_components(
    G: Sequence[Sequence[Any]], gamma: Any, d_gamma: Any, n: int
) -> Iterable[Tuple[Tuple[int, int, int, int], Any]]:
    """Contravariant curvature
    ``R^{abc}_d = g^{as}(d_s Gamma^{bc}_d - d_d Gamma^{bc}_s) + Gamma^{ab}_s Gamma^{sc}_d - Gamma^{ac}_s Gamma^{sb}_d``.

    `gamma[a][b][c]` and `d_gamma[k][a][b][c]` may hold point values or
    polynomials.
    """
    for a, b, c, d in itertools.product(range(n), repeat=4):
        acc = None
        for s in range(n):
            term = G[a][s] * (d_gamma[s][b][c][d] - d_gamma[d][b][c][s])
            term = term + gamma[a][b][s] * gamma[s][c][d] - gamma[a][c][s] * gamma[s][b][d]
            acc = term if acc is None else acc + term
        yield (a, b, c, d), acc


def point_curvature(
    g: IntersectionForm, point: Sequence[Any], eta: Optional[ConstMetric] = None, shift: Any = 0
) -> Dict[Tuple[int, int, int, int], Any]:
    """Curvature of ``g + shift*eta`` at one point from its exact connection jet."""
    G, gamma, d_gamma = connection_jet(g, point, eta, shift)
    return {index: _plain(r) for index, r in curvature_components(G, gamma, d_gamma, g.n)}


def symbolic_curvature(
    g: IntersectionForm, gamma: Christoffel, eta: Optional[ConstMetric] = None, shift: Any = 0
) -> Dict[Tuple[int, int, int, int], GradedPoly]:
    """Polynomial curvature of ``g + shift*eta`` with connection `gamma`.

    ``eta`` is constant in flat coordinates, so the pencil member shares the
    Christoffel symbols of ``g``.
    """
    n = g.n
    shift = fraction(shift)
    G = [[g[a, b] + (shift * eta.upper(a, b) if eta is not None else 0) for b in range(n)] for a in range(n)]
    gam = [[[gamma[a, b, c] for c in range(n)] for b in range(n)] for a in range(n)]
    d_gam = [[[[derive(gamma[a, b, c], k) for c in range(n)] for b in range(n)] for a in range(n)] for k in range(n)]
    return dict(curvature_components(G, gam, d_gam, n))


def sample_points(
    g: IntersectionForm,
    count: int,
    seed: Optional[int] = None,
    eta: Optional[ConstMetric] = None,
    shift: Any = 0,
) -> List[List[Fraction]]:
    """Seeded random points at which ``g + shift*eta`` is invertible.

    Raises
    ------
        RuntimeError: if too few random points are accepted

    """

    def accept(pt: List[Fraction]) -> bool:
        G, _, _ = metric_jet(g, pt, eta, shift, order=0)
        try:
            matrix_inverse(G)
        except ZeroDivisionError:
            return False
        return True

    rng = make_rng(seed)
    return accepted_points(rng, count, len(g.ring.polynomial_variables), accept)


# Pencil checks


def torsion_residuals(
    metric: Sequence[Sequence[GradedPoly]], gamma: Christoffel
) -> Iterable[Tuple[Tuple[int, int, int], GradedPoly]]:
    n = gamma.n
    zero = GradedPoly.zero(gamma.ring)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(n):
                r = zero
                for s in range(n):
                    r = r + metric[a][s] * gamma[b, c, s] - metric[b][s] * gamma[a, c, s]
                yield (a, b, c), r


def lowered_christoffel(gamma: Christoffel, eta: ConstMetric, b: int) -> List[List[GradedPoly]]:
    """``h[e][c] = eta_{ea} Gamma^{ab}_c``, the Hessian of ``f^b`` for a flat pencil."""
    n = gamma.n
    zero = GradedPoly.zero(gamma.ring)
    out = []
    for e in range(n):
        row = []
        for c in range(n):
            acc = zero
            for a in range(n):
                if eta.lower(e, a):
                    acc = acc + gamma[a, b, c] * eta.lower(e, a)
            row.append(acc)
        out.append(row)
    return out


def check_pencil(
    g: IntersectionForm,
    eta: ConstMetric,
    gamma: Christoffel,
    lambdas: Sequence[Any] = DEFAULT_LAMBDAS,
    points: int = DEFAULT_POINTS,
    seed: Optional[int] = None,
    symbolic: bool = False,
) -> PencilReport:
    """Run every flat pencil check and record the outcome.

    Failures are report entries; nothing here raises for a non-pencil input.
    """
    n = g.n
    deg = g.deg
    ring = g.ring
    report = PencilReport()
    lambdas = [fraction(x) for x in lambdas]
    metric = [[g[a, b] for b in range(n)] for a in range(n)]
    upper_pairs = [(a, b) for a in range(n) for b in range(a, n)]
    triples = list(itertools.product(range(n), repeat=3))

    d1_squared = list(nonzero(((a, b), derive(derive(g[a, b], 0), 0)) for a, b in upper_pairs))
    d1_squared += nonzero((i, derive(derive(gamma[i], 0), 0)) for i in triples)
    report.add(CheckResult.from_witnesses("d1_squared", d1_squared))
    report.add(
        CheckResult.from_witnesses(
            "d1_metric",
            nonzero(((a, b), derive(g[a, b], 0) * eta.unit_scale - eta.upper(a, b)) for a, b in upper_pairs),
        )
    )
    det_d1 = poly_det(g.d1())
    det_ok = det_d1.is_constant() and is_unit(det_d1.constant_value())
    report.add(
        CheckResult.from_witnesses(
            "unit_determinant", [] if det_ok else [Witness((), det_d1)], "det(d_1 g) constant and invertible"
        )
    )
    report.add(
        CheckResult.from_witnesses(
            "compatibility",
            nonzero(
                ((a, b, c), gamma[a, b, c] + gamma[b, a, c] - derive(g[a, b], c))
                for a, b in upper_pairs
                for c in range(n)
            ),
        )
    )
    report.add(CheckResult.from_witnesses("torsion", nonzero(torsion_residuals(metric, gamma))))

    def quadratic() -> Iterable[Tuple[Tuple[int, ...], GradedPoly]]:
        zero = GradedPoly.zero(ring)
        for a, b, d, m in itertools.product(range(n), repeat=4):
            if b >= d:
                continue
            r = zero
            for c in range(n):
                r = r + gamma[a, b, c] * gamma[c, d, m] - gamma[a, d, c] * gamma[c, b, m]
            yield (a, b, d, m), r

    report.add(CheckResult.from_witnesses("quadratic", nonzero(quadratic())))

    if deg.mode == Mode.ELLIPTIC:
        nu = eta.unit_pairing
        last = n - 1

        def degenerate_rows() -> Iterable[Tuple[Tuple[Any, ...], GradedPoly]]:
            for a in range(n):
                yield ("g", last, a), g[last, a] - GradedPoly.variable(ring, a) * (nu * deg.degrees[a])
            for a, b in itertools.product(range(n), repeat=2):
                yield ("gamma", a, last, b), gamma[a, last, b]
                yield ("gamma", last, a, b), gamma[last, a, b] - (nu * deg.degrees[a] if a == b else 0)

        report.add(CheckResult.from_witnesses("degenerate_rows", nonzero(degenerate_rows())))
    else:
        report.add(CheckResult.skipped("degenerate_rows", "only defined in elliptic mode"))

    def potential_symmetry() -> Iterable[Tuple[Tuple[int, ...], GradedPoly]]:
        for b in range(n):
            h = lowered_christoffel(gamma, eta, b)
            for e in range(n):
                for c in range(e + 1, n):
                    yield (e, b, c), h[e][c] - h[c][e]

    report.add(CheckResult.from_witnesses("potential_symmetry", nonzero(potential_symmetry())))
    report.add(
        CheckResult.from_witnesses(
            "degree_law",
            (
                Witness(i, gamma[i])
                for i in triples
                if not gamma[i].is_homogeneous(deg.christoffel_degree(*i, gamma.offset), deg)
            ),
        )
    )

    _sampled_checks(report, g, eta, gamma, lambdas, points, seed)

    if not symbolic:
        report.add(CheckResult.skipped("symbolic_curvature", "not requested"))
    elif n > SYMBOLIC_MAX_N:
        report.add(CheckResult.skipped("symbolic_curvature", f"limited to n <= {SYMBOLIC_MAX_N}"))
    else:
        witnesses: List[Witness] = []
        for lam in lambdas:
            shifted = [[g[a, b] + lam * eta.upper(a, b) for b in range(n)] for a in range(n)]
            for w in nonzero(torsion_residuals(shifted, gamma)):
                witnesses.append(Witness(w.indices, w.residual, {"lambda": lam, "identity": "torsion"}))
            for w in nonzero(symbolic_curvature(g, gamma, eta, lam).items()):
                witnesses.append(Witness(w.indices, w.residual, {"lambda": lam, "identity": "curvature"}))
        report.add(CheckResult.from_witnesses("symbolic_curvature", witnesses))
    logger.info("pencil checks: %d passed, failed %s", len(report.checks) - len(report.failed()), report.failed())
    return report


def _sampled_checks(
    report: PencilReport,
    g: IntersectionForm,
    eta: ConstMetric,
    gamma: Christoffel,
    lambdas: Sequence[Fraction],
    points: int,
    seed: Optional[int],
) -> None:
    base = default_seed() if seed is None else seed
    curvature: List[Witness] = []
    agreement: List[Witness] = []
    for li, lam in enumerate(lambdas):
        try:
            pts = sample_points(g, points, base + li, eta, lam)
        except RuntimeError as err:
            curvature.append(Witness((), str(err), {"lambda": lam}))
            continue
        for pt in pts:
            if lam == 0:
                oracle = christoffel_point_oracle(g, pt)
                for index in oracle.indices():
                    r = _plain(evaluate_coeff(gamma[index], pt)) - oracle.get(index)
                    if not _is_zero(r):
                        agreement.append(Witness(index, r, {"point": pt}))
            for index, r in point_curvature(g, pt, eta, lam).items():
                if not _is_zero(r):
                    curvature.append(Witness(index, r, {"lambda": lam, "point": pt}))
    report.add(
        CheckResult.from_witnesses(
            "curvature", curvature, f"{points} points for each of {len(lambdas)} lambda values"
        )
    )
    if 0 in lambdas:
        report.add(CheckResult.from_witnesses("oracle_agreement", agreement, f"{points} points"))
    else:
        report.add(CheckResult.skipped("oracle_agreement", "lambda = 0 not sampled"))


def integrate_vector_potential(gamma: Christoffel, eta: ConstMetric) -> Dict[int, GradedPoly]:
    """Vector potentials ``f^b`` with ``Gamma^{ab}_c = eta^{ae} d_e d_c f^b``.

    Two Euler divisions: first ``d_s f^b`` from ``E(d_s f^b)``, then ``f^b``
    from ``E(f^b)``; the result is re-differentiated and compared.

    Returns
    -------
        dict mapping each non-degenerate index ``b`` to ``f^b``

    Raises
    ------
        IntegrabilityError: if an Euler division is by zero or
            re-differentiation does not reproduce `gamma`

    """
    deg = gamma.deg
    n = deg.n
    ring = gamma.ring
    zero = GradedPoly.zero(ring)
    result: Dict[int, GradedPoly] = {}
    for b in range(n):
        if b in deg.degenerate:
            continue
        h = lowered_christoffel(gamma, eta, b)
        partials: List[GradedPoly] = []
        for s in range(n):
            weight = 1 + deg.degrees[b] - deg.degrees[s]
            if weight == 0:
                raise IntegrabilityError(f"d_{s + 1} f^{b + 1} has degree 0; cannot divide by its Euler weight.")
            acc = zero
            for e in range(n):
                if deg.degrees[e]:
                    acc = acc + GradedPoly.variable(ring, e) * h[e][s] * deg.degrees[e]
            partials.append(acc * (1 / weight))
        f = zero
        for s in range(n):
            if deg.degrees[s]:
                f = f + GradedPoly.variable(ring, s) * partials[s] * deg.degrees[s]
        f = f * (1 / (1 + deg.degrees[b]))
        hessian = [[derive(derive(f, e), c) for c in range(n)] for e in range(n)]
        for a, c in itertools.product(range(n), repeat=2):
            got = zero
            for e in range(n):
                if eta.upper(a, e):
                    got = got + hessian[e][c] * eta.upper(a, e)
            if got != gamma[a, b, c]:
                raise IntegrabilityError(
                    f"Gamma^{{{a + 1}{b + 1}}}_{c + 1} is not eta^{{{a + 1}e}} d_e d_{c + 1} f^{b + 1}; "
                    "the connection does not come from a flat pencil."
                )
        result[b] = f
        logger.debug("vector potential f^%d has %d terms", b + 1, len(f.terms))
    return result
