"""Pure states, ensembles, density operators and measurement statistics.

Two normalization conventions coexist. ``standard`` states satisfy
<psi|psi> = 1 and their density operators Tr(rho) = 1; ``metric`` states
satisfy <psi|A|psi> = 1 for a referenced metric, with Tr(A rho) = 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    MetricQMError,
    NormalizationError,
    NotHermitian,
    TraceConditionViolation,
)
from .io import vector_from_json, vector_to_json
from .linalg import (
    as_matrix,
    as_vector,
    hermitian_eigen,
    hermiticity_deviation,
)
from .metric import MetricOperator, a_norm_squared, normalize_A

log = logging.getLogger(__name__)

Normalization = Literal["standard", "metric"]

STATE_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray
    normalization: Normalization = "standard"
    metric: MetricOperator | None = None

    def __post_init__(self):
        v = as_vector(self.vector)
        object.__setattr__(self, "vector", _readonly(v))
        if self.normalization == "standard":
            norm2 = float(np.vdot(v, v).real)
        elif self.normalization == "metric":
            if self.metric is None:
                raise NormalizationError("metric-normalized state needs its metric")
            norm2 = a_norm_squared(v, self.metric)
        else:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if abs(norm2 - 1.0) > STATE_TOL:
            raise NormalizationError(
                f"{self.normalization} norm squared is {norm2!r}, expected 1", value=norm2
            )

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Finite mixture of pure states sharing one normalization convention."""

    members: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        members = tuple((float(w), s) for w, s in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise MetricQMError("ensemble must have at least one member")
        weights = [w for w, _ in members]
        if min(weights) < 0:
            raise MetricQMError(f"negative ensemble weight {min(weights)!r}")
        if abs(math.fsum(weights) - 1.0) > STATE_TOL:
            raise MetricQMError(f"ensemble weights sum to {math.fsum(weights)!r}, expected 1")
        first = members[0][1]
        for _, s in members[1:]:
            if s.dim != first.dim:
                raise DimensionMismatch("ensemble members have different dimensions")
            if s.normalization != first.normalization:
                raise NormalizationError("ensemble mixes standard and metric normalizations")
            if first.metric is not None and not first.metric.same_as(s.metric):
                raise NormalizationError("ensemble members reference different metrics")

    @classmethod
    def of(cls, *pairs: tuple[float, object], normalization: Normalization = "standard",
           metric: MetricOperator | None = None) -> Ensemble:
        """Build from ``(weight, vector)`` pairs."""
        return cls(tuple(
            (w, s if isinstance(s, PureState) else PureState(s, normalization, metric))
            for w, s in pairs
        ))

    @property
    def normalization(self) -> Normalization:
        return self.members[0][1].normalization

    @property
    def metric(self) -> MetricOperator | None:
        return self.members[0][1].metric

    @property
    def dim(self) -> int:
        return self.members[0][1].dim

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    trace_convention: Normalization = "standard"
    metric: MetricOperator | None = None
    min_eigenvalue: float = field(init=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        # raises NotHermitian beyond 1e-12
        lo = float(hermitian_eigen(m).eigenvalues[0])
        if lo < -PSD_TOL:
            raise NormalizationError(f"density matrix has eigenvalue {lo:.3e} < 0", value=lo)
        if self.trace_convention == "standard":
            tr = float(m.diagonal().real.sum())
        elif self.trace_convention == "metric":
            if self.metric is None:
                raise NormalizationError("metric trace convention needs its metric")
            if self.metric.dim != m.shape[0]:
                raise DimensionMismatch("metric and density matrix dimensions differ")
            tr = float((self.metric.matrix * m.T).real.sum())
        else:
            raise ValueError(f"unknown trace convention {self.trace_convention!r}")
        if abs(tr - 1.0) > TRACE_TOL:
            raise TraceConditionViolation(
                f"{self.trace_convention} trace is {tr!r}, expected 1", value=tr
            )
        object.__setattr__(self, "matrix", _readonly(m))
        object.__setattr__(self, "min_eigenvalue", lo)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class MeasurementProjector:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = as_matrix(self.matrix)
        dev = hermiticity_deviation(m)
        if dev > STATE_TOL:
            raise NotHermitian(f"projector deviates from Hermitian by {dev:.3e}", value=dev)
        idem = float(np.linalg.norm(m @ m - m))
        if idem > 1e-10:
            raise MetricQMError(f"projector is not idempotent (|M^2 - M| = {idem:.3e})", value=idem)
        object.__setattr__(self, "matrix", _readonly(m))

    @classmethod
    def onto(cls, vector, label: str = "") -> MeasurementProjector:
        """Rank-one projector onto the direction of ``vector``."""
        v = as_vector(vector)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), label)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


_SQRT_HALF = 1.0 / np.sqrt(2.0)

BASIS_VECTORS = {
    "computational": np.eye(2, dtype=np.complex128),
    "diagonal": np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT_HALF,
}


def basis_states(name: str, dim: int = 2) -> list[PureState]:
    """Named qubit basis: ``computational`` {|0>, |1>} or ``diagonal`` {|+>, |->}."""
    if dim != 2:
        raise DimensionMismatch(f"named bases are qubit-only, got dim {dim}")
    try:
        cols = BASIS_VECTORS[name]
    except KeyError:
        raise MetricQMError(f"unknown basis {name!r}; expected one of {sorted(BASIS_VECTORS)}") from None
    return [PureState(cols[:, k]) for k in range(2)]


def bell_state() -> PureState:
    """(|00> + |11>) / sqrt(2), Alice's qubit first."""
    return PureState(np.array([1, 0, 0, 1], dtype=np.complex128) * _SQRT_HALF)


def ensemble_to_density(e: Ensemble) -> DensityOperator:
    rho = sum(w * s.projector() for w, s in e.members)
    return DensityOperator(rho, e.normalization, e.metric)


def metric_normalize(e: Ensemble, a: MetricOperator) -> Ensemble:
    """Rescale every member to unit A-norm, weights unchanged."""
    return Ensemble(tuple((w, normalize_A(s.vector, a)) for w, s in e.members))


class TraceCheck(NamedTuple):
    value: float
    passed: bool


def _dims_agree(*mats: np.ndarray) -> None:
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise DimensionMismatch(f"operand shapes differ: {sorted(shapes)}")


def check_trace_condition(rho: DensityOperator | np.ndarray, a: MetricOperator) -> TraceCheck:
    """``Re Tr(A rho)`` and whether it equals 1 within 1e-10."""
    m = rho.matrix if isinstance(rho, DensityOperator) else as_matrix(rho)
    _dims_agree(m, a.matrix)
    value = float((a.matrix * m.T).real.sum())
    return TraceCheck(value, abs(value - 1.0) < TRACE_TOL)


def weighted_trace(m: MeasurementProjector, rho: DensityOperator, a: MetricOperator) -> complex:
    """Raw ``Tr(A M rho)``; complex in general when A, M, rho do not commute."""
    _dims_agree(m.matrix, rho.matrix, a.matrix)
    return complex(np.trace((a.matrix @ m.matrix) @ rho.matrix))


def probability_weighted(m: MeasurementProjector, rho: DensityOperator, a: MetricOperator) -> float:
    """``Re Tr(A M rho)``, never clamped.

    A non-negligible imaginary part or a negative value is logged as a
    warning; callers that need the imaginary part use ``weighted_trace``.
    """
    raw = weighted_trace(m, rho, a)
    if abs(raw.imag) > 1e-12:
        log.warning("Tr(AM rho) has imaginary part %.3e for projector %r", raw.imag, m.label)
    if raw.real < -1e-12:
        log.warning("negative weighted probability %.6g for projector %r", raw.real, m.label)
    return raw.real


def probability_standard(m: MeasurementProjector, rho: DensityOperator) -> float:
    _dims_agree(m.matrix, rho.matrix)
    return float(np.trace(m.matrix @ rho.matrix).real)


def ensemble_to_json(e: Ensemble) -> dict:
    return {
        "normalization": e.normalization,
        "members": [{"weight": w, "state": vector_to_json(s.vector)} for w, s in e.members],
    }


def ensemble_from_json(obj: dict, metric: MetricOperator | None = None) -> Ensemble:
    try:
        norm = obj["normalization"]
        pairs = [(float(mem["weight"]), vector_from_json(mem["state"])) for mem in obj["members"]]
    except (KeyError, TypeError) as exc:
        raise MetricQMError(f"malformed ensemble JSON: {exc}") from exc
    if norm not in ("standard", "metric"):
        raise MetricQMError(f"unknown normalization {norm!r}")
    return Ensemble.of(*pairs, normalization=norm, metric=metric)
