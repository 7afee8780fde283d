"""Stage runner: pencil -> build -> {verify, roundtrip, uniqueness}.

Mathematical failures end up in the report; only I/O problems raise.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__
from .checks import CheckResult, Status, Witness, nonzero
from .codec import InstanceSpec, canonical_json, encode_check, encode_value
from .frobenius import (
    DEFAULT_SCALINGS,
    FrobeniusStructure,
    PotentialError,
    ScalingError,
    StructureError,
    frobenius_structure,
    match_up_to_scaling,
    potential_from_structure_constants,
    recover_intersection_form,
    scale_structure,
    verify_frobenius,
)
from .graded_poly import GradedPoly, RingMismatchError, coefficient_layers
from .instances import InstanceError, OrbitChart, coxeter_chart
from .operators import fraction, fraction_str
from .pencil import (
    Christoffel,
    ChristoffelError,
    ConstMetric,
    IntegrabilityError,
    IntersectionForm,
    MetricError,
    check_pencil,
    christoffel_solve,
    integrate_vector_potential,
)
from .sampling import default_seed

logger = logging.getLogger(__name__)

STAGES: Dict[str, Tuple[str, ...]] = {
    "pencil": (),
    "build": ("pencil",),
    "verify": ("build",),
    "roundtrip": ("build",),
    "uniqueness": ("build",),
}

MATH_ERRORS = (
    ChristoffelError,
    MetricError,
    IntegrabilityError,
    StructureError,
    PotentialError,
    InstanceError,
    ScalingError,
    RingMismatchError,
)


class StageError(ValueError):
    """Raised for an unknown stage name."""

    pass


def topological_sort(stages: Iterable[str]) -> List[str]:
    """Requested stages plus their prerequisites, prerequisites first.

    Raises
    ------
        StageError: for an unknown stage

    """
    requested = set(stages)
    for stage in sorted(requested):
        if stage not in STAGES:
            raise StageError(f"Unknown stage {stage!r}; choose from {list(STAGES)}.")
    order: List[str] = []
    seen = set()

    def visit(stage: str) -> None:
        if stage in seen:
            return
        for parent in STAGES[stage]:
            visit(parent)
        seen.add(stage)
        order.append(stage)

    for stage in STAGES:
        if stage in requested:
            visit(stage)
    return order


@dataclass
class RunConfig:
    seed: int
    points: int
    lambdas: Tuple[Any, ...]
    symbolic: bool
    timings: bool = False


@dataclass
class StageResult:
    name: str
    status: Status
    checks: Dict[str, CheckResult] = field(default_factory=dict)
    data: Dict[str, Any] = field(default_factory=dict)
    note: str = ""
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status != Status.FAIL


@dataclass
class PipelineReport:
    """Stage results, witnesses, tool version, input digest and seed."""

    name: str
    digest: str
    seed: int
    stages: Dict[str, StageResult] = field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(stage.passed for stage in self.stages.values())

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def encode(self, timings: bool = False) -> Dict[str, Any]:
        stages = {}
        for name, stage in self.stages.items():
            out: Dict[str, Any] = {
                "status": stage.status.value,
                "checks": {k: encode_check(c) for k, c in stage.checks.items()},
            }
            if stage.data:
                out["data"] = encode_value(stage.data)
            if stage.note:
                out["note"] = stage.note
            if timings:
                out["seconds"] = f"{stage.seconds:.3f}"
            stages[name] = out
        return {
            "tool": "minifrob",
            "version": self.version,
            "name": self.name,
            "input_digest": self.digest,
            "seed": self.seed,
            "passed": self.passed,
            "stages": stages,
        }


@dataclass
class PipelineState:
    """Objects handed from one stage to the next."""

    g: Optional[IntersectionForm] = None
    eta: Optional[ConstMetric] = None
    gamma: Optional[Christoffel] = None
    structure: Optional[FrobeniusStructure] = None
    chart: Optional[OrbitChart] = None


def realize(spec: InstanceSpec, seed: Optional[int] = None) -> Tuple[IntersectionForm, ConstMetric, Optional[OrbitChart]]:
    """The intersection form and ``eta`` of an instance, building a Coxeter chart if needed.

    Raises
    ------
        InstanceError: if the Coxeter chart cannot be built

    """
    if spec.coxeter is None:
        assert spec.metric is not None and spec.eta is not None
        return spec.metric, spec.eta, None
    group, rank = spec.coxeter
    chart = coxeter_chart(group, rank, seed, spec.unit_scale)
    assert chart.g_t is not None and chart.eta is not None
    return chart.g_t, chart.eta, chart


def build_structure(spec: InstanceSpec, seed: Optional[int] = None) -> FrobeniusStructure:
    """Realize, solve for the Christoffel symbols and assemble the structure.

    Raises
    ------
        ChristoffelError, IntegrabilityError, StructureError, PotentialError,
        InstanceError: as the underlying steps

    """
    g, eta, _ = realize(spec, seed)
    gamma = christoffel_solve(g, eta)
    return frobenius_structure(gamma, eta, integrate_vector_potential(gamma, eta))


def _error_check(name: str, err: Exception) -> CheckResult:
    return CheckResult.from_witnesses(name, [Witness((), str(err), {"error": type(err).__name__})])


# Stages


def _pencil(spec: InstanceSpec, state: PipelineState, config: RunConfig, result: StageResult) -> None:
    try:
        state.g, state.eta, state.chart = realize(spec, config.seed)
    except InstanceError as err:
        result.checks["instance"] = _error_check("instance", err)
        return
    if state.chart is not None:
        result.data["eta"] = [list(row) for row in state.eta.eta_upper]
        result.data["flat_coordinates"] = list(state.chart.flat)
    try:
        state.gamma = christoffel_solve(state.g, state.eta)
    except (ChristoffelError, MetricError) as err:
        result.checks["christoffel"] = _error_check("christoffel", err)
        return
    report = check_pencil(
        state.g, state.eta, state.gamma, config.lambdas, config.points, config.seed, config.symbolic
    )
    result.checks.update(report.checks)


def _build(spec: InstanceSpec, state: PipelineState, config: RunConfig, result: StageResult) -> None:
    assert state.gamma is not None and state.eta is not None
    try:
        f = integrate_vector_potential(state.gamma, state.eta)
        state.structure = S = frobenius_structure(state.gamma, state.eta, f)
    except (IntegrabilityError, StructureError, PotentialError) as err:
        result.checks["construction"] = _error_check("construction", err)
        return
    result.data["F"] = S.F
    result.data["removed_t1_square"] = S.potential.removed_t1_square
    try:
        raw = potential_from_structure_constants(S.C, S.eta, S.deg, normalize=False)
    except PotentialError as err:
        result.checks["integration_routes"] = _error_check("integration_routes", err)
        return
    ring = S.F.ring
    square = (2,) + (0,) * (ring.n - 1)
    unnormalized = S.F + GradedPoly.monomial(ring, square, S.potential.removed_t1_square)
    difference = raw.F - unnormalized
    # a rational multiple of (t1)^2, nothing else
    extra = [exp for exp, c in difference.items() if exp != square or any(k for k, _ in coefficient_layers(c))]
    witnesses = [Witness((), difference, {"reason": "routes differ by more than c (t1)^2"})] if extra else []
    result.checks["integration_routes"] = CheckResult.from_witnesses(
        "integration_routes", witnesses, "Hessian route agrees with the vector-potential route up to c (t1)^2"
    )


def _verify(spec: InstanceSpec, state: PipelineState, config: RunConfig, result: StageResult) -> None:
    assert state.structure is not None
    result.checks.update(verify_frobenius(state.structure).checks)


def _form_differences(g: IntersectionForm, other: IntersectionForm) -> Iterable[Witness]:
    n = g.n
    return nonzero(((a, b), other[a, b] - g[a, b]) for a, b in itertools.product(range(n), repeat=2))


def _roundtrip(spec: InstanceSpec, state: PipelineState, config: RunConfig, result: StageResult) -> None:
    assert state.structure is not None and state.g is not None
    S = state.structure
    try:
        recovered = recover_intersection_form(S.potential, S.eta, S.deg)
    except (MetricError, RingMismatchError) as err:
        result.checks["intersection_form"] = _error_check("intersection_form", err)
        return
    result.checks["intersection_form"] = CheckResult.from_witnesses(
        "intersection_form", _form_differences(state.g, recovered)
    )


def _uniqueness(spec: InstanceSpec, state: PipelineState, config: RunConfig, result: StageResult) -> None:
    assert state.structure is not None and state.g is not None
    S = state.structure
    axioms: List[Witness] = []
    forms: List[Witness] = []
    recovered: List[Witness] = []
    for c in DEFAULT_SCALINGS:
        scaled = scale_structure(S, c)
        for name in verify_frobenius(scaled).failed():
            axioms.append(Witness((), name, {"c": c}))
        try:
            g_c = recover_intersection_form(scaled.potential, scaled.eta, scaled.deg)
            forms.extend(Witness(w.indices, w.residual, {"c": c}) for w in _form_differences(state.g, g_c))
        except (MetricError, RingMismatchError) as err:
            forms.append(Witness((), str(err), {"c": c}))
        found = match_up_to_scaling(S, scaled)
        if found != c:
            recovered.append(Witness((), found if isinstance(found, Fraction) else str(found), {"c": c}))
    note = "c in {" + ", ".join(fraction_str(c) for c in DEFAULT_SCALINGS) + "}"
    result.checks["scaled_axioms"] = CheckResult.from_witnesses("scaled_axioms", axioms, note)
    result.checks["scaled_intersection_form"] = CheckResult.from_witnesses("scaled_intersection_form", forms, note)
    result.checks["scaling_recovered"] = CheckResult.from_witnesses("scaling_recovered", recovered, note)


RUNNERS: Dict[str, Callable[[InstanceSpec, PipelineState, RunConfig, StageResult], None]] = {
    "pencil": _pencil,
    "build": _build,
    "verify": _verify,
    "roundtrip": _roundtrip,
    "uniqueness": _uniqueness,
}


def run_config(
    spec: InstanceSpec,
    seed: Optional[int] = None,
    points: Optional[int] = None,
    lambdas: Optional[Sequence[Any]] = None,
    symbolic: Optional[bool] = None,
    timings: bool = False,
) -> RunConfig:
    """Flags override the instance options, which override the environment."""
    options = spec.options
    if seed is None:
        seed = options.seed if options.seed is not None else default_seed()
    return RunConfig(
        seed=seed,
        points=options.points if points is None else points,
        lambdas=tuple(fraction(x) for x in (options.lambdas if not lambdas else lambdas)),
        symbolic=options.symbolic_curvature if symbolic is None else symbolic,
        timings=timings,
    )


def run_pipeline(
    spec: InstanceSpec, stages: Iterable[str] = tuple(STAGES), config: Optional[RunConfig] = None
) -> PipelineReport:
    """Run `stages` and their prerequisites in dependency order.

    A failed stage marks every dependent stage ``skipped``.
    """
    config = config or run_config(spec)
    report = PipelineReport(spec.name, spec.digest, config.seed)
    state = PipelineState()
    for name in topological_sort(stages):
        blocked = [p for p in STAGES[name] if report.stages[p].status != Status.PASS]
        if blocked:
            report.stages[name] = StageResult(name, Status.SKIPPED, note=f"prerequisite {blocked[0]} did not pass")
            logger.info("stage %s skipped", name)
            continue
        result = StageResult(name, Status.PASS)
        start = time.perf_counter()
        RUNNERS[name](spec, state, config, result)
        result.seconds = time.perf_counter() - start
        if any(not c.passed for c in result.checks.values()):
            result.status = Status.FAIL
        report.stages[name] = result
        logger.info("stage %s: %s (%.2fs)", name, result.status.value, result.seconds)
    return report


def emit_report(report: PipelineReport, format: str = "json", timings: bool = False) -> bytes:
    """Canonical JSON (sorted keys, exact fractions as strings) or a text summary."""
    if format == "json":
        return canonical_json(report.encode(timings)) + b"\n"
    if format != "text":
        raise ValueError(f"Unknown report format {format!r}.")
    lines = [f"minifrob {report.version}  {report.name or '<unnamed>'}  seed {report.seed}"]
    lines.append(f"input {report.digest}")
    for name, stage in report.stages.items():
        head = f"{name}: {stage.status.value}"
        if timings:
            head += f" ({stage.seconds:.3f}s)"
        if stage.note:
            head += f"  [{stage.note}]"
        lines.append(head)
        for check_name, check in stage.checks.items():
            if check.status == Status.FAIL:
                lines.append(f"  {check_name}: FAIL ({check.failures} residual(s))")
                for w in check.witnesses[:3]:
                    lines.append(f"    at {w.indices}: {canonical_json(encode_value(w.residual)).decode()}")
            else:
                lines.append(f"  {check_name}: {check.status.value}")
    lines.append("PASS" if report.passed else "FAIL")
    return ("\n".join(lines) + "\n").encode("utf-8")
