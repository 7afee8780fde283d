"""Products, potentials and the Frobenius axioms in flat coordinates.

The product is stored through its raised structure constants
``C[a, b, c] = C^{ab}_c``: ``dt^a o dt^b = C^{ab}_c dt^c`` after identifying
forms and vectors with ``eta``. The unit field is ``u d/dt^1``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, Iterable, Mapping, Tuple, Union

from .checks import CheckResult, CheckSuite, Witness, nonzero
from .degrees import DegreeVector, Mode
from .graded_poly import GradedPoly, RingConfig, coefficient_layers, derive, euler, from_layers
from .operators import fraction, fraction_str
from .pencil import Christoffel, ConstMetric, IntersectionForm
from .tensor_data import TensorData
from .tensor_ops import SimpleOps, contract, is_unit

logger = logging.getLogger(__name__)

DEFAULT_SCALINGS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 3))


class StructureError(RuntimeError):
    """Raised when Christoffel symbols cannot be turned into a product."""

    pass


class PotentialError(RuntimeError):
    """Raised when the vector potentials do not integrate to a potential."""

    pass


class ScalingError(ValueError):
    """Raised for a zero scaling factor or structures on different data."""

    pass


@dataclass(frozen=True, eq=False)
class StructureConstants:
    deg: DegreeVector
    entries: TensorData

    @property
    def n(self) -> int:
        return self.deg.n

    @property
    def ring(self) -> RingConfig:
        return self.entries.get((0, 0, 0)).ring

    def __getitem__(self, index: Tuple[int, int, int]) -> GradedPoly:
        return self.entries.get(index)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StructureConstants):
            return NotImplemented
        return self.deg == other.deg and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.deg, self.entries))


@dataclass(frozen=True)
class Potential:
    """A potential ``F`` with the intermediate ``F^c`` it was assembled from.

    `removed_t1_square` is the ``q^0`` coefficient of ``(t^1)^2`` dropped by
    normalization.
    """

    F: GradedPoly
    intermediates: Mapping[int, GradedPoly] = field(default_factory=dict)
    removed_t1_square: Fraction = Fraction(0)
    note: str = ""

    def scaled(self, c: Fraction) -> Potential:
        """Potential of the structure rescaled by ``c``: ``F -> F/c^2``, ``F^b -> F^b/c``."""
        return Potential(
            self.F * (1 / (c * c)),
            {b: p * (1 / c) for b, p in self.intermediates.items()},
            self.removed_t1_square / (c * c),
            self.note,
        )


@dataclass(frozen=True)
class FrobeniusStructure:
    """Flat metric, Euler grading, product and potential on one chart."""

    eta: ConstMetric
    deg: DegreeVector
    C: StructureConstants
    potential: Potential

    unit_index = 0

    @property
    def n(self) -> int:
        return self.deg.n

    @property
    def F(self) -> GradedPoly:
        return self.potential.F


class VerificationReport(CheckSuite):
    """Results of `verify_frobenius`, keyed by axiom name."""

    pass


@dataclass(frozen=True)
class Mismatch:
    """First component that differs after scaling."""

    component: str
    detail: str


# Helpers


def _eta_tensor(eta: ConstMetric) -> TensorData:
    return TensorData.build((eta.n, eta.n), lambda a, b: eta.upper(a, b))


def raise_two(T: TensorData, eta: ConstMetric, zero: GradedPoly) -> TensorData:
    """``out[a, b, c] = eta^{ae} eta^{bm} T[e, m, c]``."""
    E = _eta_tensor(eta)
    first = contract(E, 1, T, 0, zero)  # [a, m, c]
    second = contract(E, 1, first, 1, zero)  # [b, a, c]
    return second.permute(1, 0, 2)


def third_derivatives(F: GradedPoly) -> TensorData:
    n = F.ring.n
    second = [[derive(derive(F, a), b) for b in range(n)] for a in range(n)]
    return TensorData.build((n, n, n), lambda a, b, c: derive(second[a][b], c))


def normalize_potential(F: GradedPoly) -> Tuple[GradedPoly, Fraction]:
    """Drop the ``q^0`` part of the ``(t^1)^2`` coefficient; return it as well."""
    ring = F.ring
    exp = (2,) + (0,) * (ring.n - 1)
    c = F.coefficient(exp).constant_term()
    if not c:
        return F, Fraction(0)
    return F - GradedPoly.monomial(ring, exp, c), c


# Construction


def structure_constants(gamma: Christoffel, eta: ConstMetric, deg: DegreeVector) -> StructureConstants:
    """``C^{ab}_c = Gamma^{ab}_c / (d^b + (1 - D)/2)``, with the unit rule on degenerate columns.

    Raises
    ------
        StructureError: if the degenerate index set is not the one expected in
            this mode, or a degenerate column of `gamma` is nonzero

    """
    n = deg.n
    if deg.degenerate != deg.expected_degenerate:
        raise StructureError(
            f"Degenerate indices {[b + 1 for b in deg.degenerate]} differ from the "
            f"{deg.mode.value} expectation {[b + 1 for b in deg.expected_degenerate]}."
        )
    ring = gamma.ring
    nu = eta.unit_pairing
    for b in deg.degenerate:
        for a, c in itertools.product(range(n), repeat=2):
            if not gamma[a, b, c].is_zero():
                raise StructureError(
                    f"Gamma^{{{a + 1}{b + 1}}}_{c + 1} must vanish in the degenerate column {b + 1}."
                )

    def entry(a: int, b: int, c: int) -> GradedPoly:
        if b in deg.degenerate:
            return GradedPoly.constant(ring, nu if a == c else 0)
        return gamma[a, b, c] * (1 / deg.divisor(b))

    return StructureConstants(deg, TensorData.build((n, n, n), entry))


def build_potential(f: Mapping[int, GradedPoly], eta: ConstMetric, deg: DegreeVector) -> Potential:
    """Assemble ``F`` from the vector potentials ``f^b``.

    ``F^c = f^c / (d^c + (1 - D)/2)``; in elliptic mode the degenerate sheet is
    ``F^n = 1/2 (eta^{1n}/u) eta_{ab} t^a t^b``. After the integrability check
    ``F = (1/(1 + D)) sum d^m t^m eta_{mb} F^b`` and ``eta^{bm} d_m F = F^b`` is
    verified.

    Raises
    ------
        PotentialError: on a missing sheet, an integrability failure (naming
            the index pair) or a failed verification

    """
    n = deg.n
    if not f:
        raise PotentialError("No vector potentials given.")
    ring = next(iter(f.values())).ring
    zero = GradedPoly.zero(ring)
    sheets: Dict[int, GradedPoly] = {}
    for b in range(n):
        if b in deg.degenerate:
            if deg.mode != Mode.ELLIPTIC:
                raise PotentialError(f"Index {b + 1} is degenerate outside elliptic mode.")
            acc = zero
            for a, c in itertools.product(range(n), repeat=2):
                if eta.lower(a, c):
                    acc = acc + GradedPoly.variable(ring, a) * GradedPoly.variable(ring, c) * eta.lower(a, c)
            sheets[b] = acc * (eta.unit_pairing / 2)
        elif b not in f:
            raise PotentialError(f"Vector potential f^{b + 1} is missing.")
        else:
            sheets[b] = f[b] * (1 / deg.divisor(b))

    def raised(b: int, c: int) -> GradedPoly:
        acc = zero
        for e in range(n):
            if eta.upper(b, e):
                acc = acc + derive(sheets[c], e) * eta.upper(b, e)
        return acc

    for b in range(n):
        for c in range(b + 1, n):
            if raised(b, c) != raised(c, b):
                raise PotentialError(
                    f"Integrability fails for (beta, gamma) = ({b + 1}, {c + 1}): "
                    f"eta^{{{b + 1}e}} d_e F^{c + 1} != eta^{{{c + 1}e}} d_e F^{b + 1}."
                )

    F = zero
    for m in range(n):
        if not deg.degrees[m]:
            continue
        lowered = zero
        for b in range(n):
            if eta.lower(m, b):
                lowered = lowered + sheets[b] * eta.lower(m, b)
        F = F + GradedPoly.variable(ring, m) * lowered * deg.degrees[m]
    F = F * (1 / deg.potential_degree)

    for b in range(n):
        got = zero
        for m in range(n):
            if eta.upper(b, m):
                got = got + derive(F, m) * eta.upper(b, m)
        if got != sheets[b]:
            raise PotentialError(f"eta^{{{b + 1}m}} d_m F does not reproduce F^{b + 1}.")

    F, removed = normalize_potential(F)
    logger.debug("potential has %d terms, removed (t1)^2 coefficient %s", len(F.terms), fraction_str(removed))
    return Potential(F, sheets, removed, "q^0 coefficient of (t1)^2 set to zero")


def _integrate_degree_zero(c_tau: GradedPoly, ring: RingConfig, constant: Fraction) -> GradedPoly:
    """Solve ``d_tau H = c_tau`` for ``H`` of degree 0, so a function of tau alone.

    ``H = a_0 tau + sum_{k > 0} (a_k / k) q^k + constant`` for ``c_tau = sum a_k q^k``.
    """
    if not c_tau.is_constant():
        raise PotentialError("A degree-0 Hessian block has a non-constant tau derivative.")
    origin = (0,) * ring.n
    layers = dict(coefficient_layers(c_tau.constant_value()))
    values = {(origin, k): a / k for k, a in layers.items() if k}
    values[(origin, 0)] = constant
    H = from_layers(ring, values)
    if layers.get(0) and ring.tau is not None:
        exp = [0] * ring.n
        exp[ring.tau] = 1
        H = H + GradedPoly.monomial(ring, exp, layers[0])
    return H


def potential_from_structure_constants(
    C: StructureConstants, eta: ConstMetric, deg: DegreeVector, constant: Any = 0, normalize: bool = True
) -> Potential:
    """Integrate ``F`` directly from ``c_{abc} = eta_{ae} eta_{bm} C^{em}_c``.

    Hessian blocks ``d_a d_b F`` come from Euler division; a degree-0 block
    (``(1, 1)`` in elliptic mode) is integrated in the degree-0 coordinate and
    takes `constant` as its free value. Then ``d_a F`` and ``F`` follow by two
    more Euler divisions. Without normalization the result differs from
    `build_potential` by a multiple of ``(t^1)^2``.

    Raises
    ------
        PotentialError: if some third derivative of the result differs from
            ``c_{abc}``

    """
    n = deg.n
    ring = C.ring
    zero = GradedPoly.zero(ring)
    L = TensorData.build((n, n), lambda a, b: eta.lower(a, b))
    first = contract(L, 1, C.entries, 0, zero)  # [a, m, c]
    lowered = contract(L, 1, first, 1, zero).permute(1, 0, 2)  # [a, b, c]

    hessian: Dict[Tuple[int, int], GradedPoly] = {}
    for a in range(n):
        for b in range(a, n):
            weight = deg.potential_degree - deg.degrees[a] - deg.degrees[b]
            if weight == 0:
                if (a, b) != (0, 0):
                    raise PotentialError(f"Hessian block ({a + 1}, {b + 1}) has degree 0.")
                tau_row = lowered.get((a, b, ring.tau)) if ring.tau is not None else zero
                H = _integrate_degree_zero(tau_row, ring, fraction(constant))
            else:
                H = zero
                for c in range(n):
                    if deg.degrees[c]:
                        H = H + GradedPoly.variable(ring, c) * lowered.get((a, b, c)) * deg.degrees[c]
                H = H * (1 / weight)
            hessian[(a, b)] = hessian[(b, a)] = H

    gradient = []
    for a in range(n):
        acc = zero
        for b in range(n):
            if deg.degrees[b]:
                acc = acc + GradedPoly.variable(ring, b) * hessian[(a, b)] * deg.degrees[b]
        gradient.append(acc * (1 / (deg.potential_degree - deg.degrees[a])))
    F = zero
    for a in range(n):
        if deg.degrees[a]:
            F = F + GradedPoly.variable(ring, a) * gradient[a] * deg.degrees[a]
    F = F * (1 / deg.potential_degree)

    T = third_derivatives(F)
    for index in T.indices():
        if T.get(index) != lowered.get(index):
            raise PotentialError(f"d^3 F / dt{index} does not match the lowered structure constants.")
    removed = Fraction(0)
    if normalize:
        F, removed = normalize_potential(F)
    return Potential(F, {}, removed, "integrated from structure constants")


def frobenius_structure(gamma: Christoffel, eta: ConstMetric, f: Mapping[int, GradedPoly]) -> FrobeniusStructure:
    deg = gamma.deg
    return FrobeniusStructure(eta, deg, structure_constants(gamma, eta, deg), build_potential(f, eta, deg))


# Verification


def verify_frobenius(S: FrobeniusStructure) -> VerificationReport:
    """Check every axiom of ``S`` as an exact identity.

    Failures are report entries; nothing here raises for a failing structure.
    """
    n = S.n
    deg = S.deg
    eta = S.eta
    C = S.C
    ring = C.ring
    zero = GradedPoly.zero(ring)
    report = VerificationReport()
    triples = list(itertools.product(range(n), repeat=3))

    report.add(
        CheckResult.from_witnesses(
            "commutativity", nonzero(((a, b, c), C[a, b, c] - C[b, a, c]) for a, b, c in triples if a < b)
        )
    )

    def wdvv() -> Iterable[Tuple[Tuple[int, ...], GradedPoly]]:
        for a, b, d, m in itertools.product(range(n), repeat=4):
            if b >= d:
                continue
            r = zero
            for c in range(n):
                r = r + C[a, b, c] * C[c, d, m] - C[a, d, c] * C[c, b, m]
            yield (a, b, d, m), r

    report.add(CheckResult.from_witnesses("wdvv", nonzero(wdvv())))

    def unit() -> Iterable[Tuple[Tuple[int, ...], GradedPoly]]:
        for a, c in itertools.product(range(n), repeat=2):
            r = zero
            for e in range(n):
                if eta.lower(0, e):
                    r = r + C[a, e, c] * (eta.unit_scale * eta.lower(0, e))
            yield (a, c), r - (1 if a == c else 0)

    report.add(CheckResult.from_witnesses("unit", nonzero(unit())))

    F = S.F
    if F.ring != ring:
        report.add(CheckResult.from_witnesses("potentiality", [Witness((), "potential and product live in different rings")]))
    else:
        expected = raise_two(third_derivatives(F), eta, zero)
        report.add(
            CheckResult.from_witnesses(
                "potentiality", nonzero((i, C[i] - expected.get(i)) for i in triples)
            )
        )

    symmetric = all(eta.upper(a, b) == eta.upper(b, a) for a, b in itertools.product(range(n), repeat=2))
    report.add(
        CheckResult.from_witnesses(
            "flatness",
            [] if symmetric and eta.determinant() else [Witness((), "eta is not a constant nondegenerate form")],
            "eta has constant components",
        )
    )
    report.add(
        CheckResult.from_witnesses(
            "flat_unit",
            [] if eta.unit_scale else [Witness((), "unit scale is zero")],
            "unit field is a constant multiple of d/dt1",
        )
    )

    def product_degrees() -> Iterable[Witness]:
        for i in triples:
            p = C[i]
            if not p.is_homogeneous(deg.christoffel_degree(*i), deg):
                yield Witness(i, p, {"expected_degree": deg.christoffel_degree(*i)})
            elif p.depends_on_tau():
                yield Witness(i, p, {"reason": "depends on the degree-0 coordinate"})

    report.add(CheckResult.from_witnesses("product_homogeneity", product_degrees()))
    report.add(
        CheckResult.from_witnesses(
            "metric_homogeneity",
            (
                Witness((a, b), eta.upper(a, b))
                for a, b in itertools.product(range(n), repeat=2)
                if eta.upper(a, b) and not deg.pairs(a, b)
            ),
            f"Lie_E J = {fraction_str(deg.charge)} J",
        )
    )
    report.add(
        CheckResult.from_witnesses(
            "potential_homogeneity", nonzero([((), euler(F, deg) - F * deg.potential_degree)])
        )
    )
    logger.info("frobenius checks: failed %s", report.failed())
    return report


def recover_intersection_form(F: Union[Potential, GradedPoly], eta: ConstMetric, deg: DegreeVector) -> IntersectionForm:
    """``g^{bc} = E(eta^{be} eta^{cm} d_e d_m F)``."""
    poly = F.F if isinstance(F, Potential) else F
    n = deg.n
    zero = GradedPoly.zero(poly.ring)
    hessian = TensorData.build((n, n, 1), lambda a, b, _: derive(derive(poly, a), b))
    raised = raise_two(hessian, eta, zero)
    weighted = SimpleOps.map(lambda p: euler(p, deg))(raised)
    return IntersectionForm.from_rows(deg, [[weighted.get((a, b, 0)) for b in range(n)] for a in range(n)])


# The C* action and uniqueness


def scale_structure(S: FrobeniusStructure, c: Any) -> FrobeniusStructure:
    """Act by ``c``: product ``c^{-1} o``, unit ``c e``, same Euler field, metric ``c^{-1} J``.

    In flat coordinates: ``u -> c u``, ``eta^{ab} -> c eta^{ab}``, ``C`` unchanged,
    ``F -> c^{-2} F``.

    Raises
    ------
        ScalingError: if ``c = 0``

    """
    c = fraction(c)
    if c == 0:
        raise ScalingError("The scaling factor must be nonzero.")
    return replace(S, eta=S.eta.scaled(c), potential=S.potential.scaled(c))


def match_up_to_scaling(S1: FrobeniusStructure, S2: FrobeniusStructure) -> Union[Fraction, Mismatch]:
    """Find ``c`` with ``scale_structure(S1, c) == S2``.

    ``c`` is read off the unit row of ``eta``; the scaled structure is then
    compared component by component.

    Raises
    ------
        ScalingError: if the structures have different dimensions or degree
            vectors

    """
    if S1.n != S2.n or S1.deg != S2.deg:
        raise ScalingError("Structures with different dimensions or Euler fields cannot match.")
    n = S1.n
    j = next((b for b in range(n) if S1.eta.upper(0, b)), None)
    if j is None or not S2.eta.upper(0, j):
        return Mismatch("eta", "the unit row of eta vanishes")
    c = S2.eta.upper(0, j) / S1.eta.upper(0, j)
    scaled = scale_structure(S1, c)
    if scaled.eta.eta_upper != S2.eta.eta_upper:
        return Mismatch("eta", f"eta differs after scaling by {fraction_str(c)}")
    if scaled.eta.unit_scale != S2.eta.unit_scale:
        return Mismatch("unit_scale", f"{fraction_str(scaled.eta.unit_scale)} != {fraction_str(S2.eta.unit_scale)}")
    for index in itertools.product(range(n), repeat=3):
        if scaled.C[index] != S2.C[index]:
            a, b, d = (i + 1 for i in index)
            return Mismatch("C", f"C^{{{a}{b}}}_{d} differs")
    if scaled.F != S2.F:
        return Mismatch("F", f"potentials differ after scaling by {fraction_str(c)}")
    return c


def unit_candidate_check(g: IntersectionForm, deg: DegreeVector, u: Any) -> bool:
    """Is ``u d/dt^1`` an admissible unit field for ``g``?

    Requires ``u`` invertible, ``[E, u d_1] = -u d_1`` and ``(u d_1)^2 g = 0``.

    Raises
    ------
        StructureError: if `u` is a non-constant polynomial

    """
    ring = g.ring
    if isinstance(u, GradedPoly):
        if not u.is_constant():
            raise StructureError("The unit candidate must be a degree-0 coefficient times d/dt1.")
        u = u.constant_value()
    coeff = ring.coeff(u)
    if not is_unit(coeff):
        return False
    scale = GradedPoly.constant(ring, coeff)
    # [E, u d_1] = (E(u) - d^1 u) d_1
    bracket = euler(scale, deg) - scale * deg.degrees[0]
    if bracket != -scale:
        return False
    return all(
        (scale * derive(scale * derive(g[a, b], 0), 0)).is_zero()
        for a, b in itertools.product(range(g.n), repeat=2)
    )
