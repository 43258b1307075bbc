"""Unitary evolution followed by state-dependent A-renormalization.

For a unitary U and metric A the pure-state update is

    psi -> U psi / sqrt(N(psi)),   N(psi) = <psi| U^dagger A U |psi>

and an ensemble is updated member by member and re-averaged. The update
is homogeneous of degree zero in ``psi``, so a member may arrive in either
normalization convention and lands on the same output.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import MetricQMError, NormalizationError, PreconditionViolated
from .linalg import as_matrix, commutator_norm, is_unitary, trace_distance
from .metric import MetricOperator
from .states import DensityOperator, Ensemble, PureState, ensemble_to_density

LINEAR_REGIME_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if not is_unitary(m):
            raise MetricQMError(f"gate {self.label!r} is not unitary within 1e-10")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


_S = 1.0 / math.sqrt(2.0)
_NAMED = {
    "H": np.array([[_S, _S], [_S, -_S]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "I": np.eye(2, dtype=np.complex128),
}
_ROT = re.compile(r"^rot:([yz]):(.+)$")


def rot_z(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rot_y(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def named_gate(name: str) -> UnitaryGate:
    """``H``, ``X``, ``Z``, ``I``, ``rot:z:<theta>`` or ``rot:y:<theta>``."""
    if name in _NAMED:
        return UnitaryGate(_NAMED[name], name)
    match = _ROT.match(name)
    if match is None:
        raise MetricQMError(f"unknown gate {name!r}")
    try:
        theta = float(match.group(2))
    except ValueError:
        raise MetricQMError(f"bad rotation angle in {name!r}") from None
    rot = rot_z if match.group(1) == "z" else rot_y
    return UnitaryGate(rot(theta), name)


def random_qubit_unitary(rng: np.random.Generator, label: str = "haar") -> UnitaryGate:
    """Haar-random SU(2) element as Rz(alpha) Ry(beta) Rz(gamma).

    Haar measure in these Euler angles has density proportional to
    ``sin(beta)``, i.e. ``cos(beta)`` uniform on [-1, 1].
    """
    alpha, gamma = rng.uniform(0.0, 2 * math.pi, size=2)
    beta = math.acos(rng.uniform(-1.0, 1.0))
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    plus = cmath.exp(0.5j * (alpha + gamma))
    minus = cmath.exp(0.5j * (alpha - gamma))
    m = np.array([[c / plus, -s / minus], [s * minus, c * plus]], dtype=np.complex128)
    return UnitaryGate(m, label)


@dataclass(frozen=True, eq=False)
class EvolutionRecord:
    input_state: PureState
    output_state: PureState
    normalization_factor: float


def _check_compatible(state: PureState, u: UnitaryGate, a: MetricOperator) -> None:
    if not (state.dim == u.dim == a.dim):
        raise MetricQMError(
            f"dimension mismatch: state {state.dim}, unitary {u.dim}, metric {a.dim}"
        )
    if state.normalization == "metric" and not a.same_as(state.metric):
        raise NormalizationError("state is normalized against a different metric")


def _factor(psi: np.ndarray, u: UnitaryGate, a: MetricOperator) -> tuple[np.ndarray, float]:
    moved = u.matrix @ psi
    n = complex(np.vdot(moved, a.matrix @ moved))
    return moved, n.real


def norm_shift(psi: PureState, u: UnitaryGate, a: MetricOperator) -> tuple[float, float]:
    """A-norm squared of ``psi`` before and after ``U``, without renormalizing."""
    _check_compatible(psi, u, a)
    before = complex(np.vdot(psi.vector, a.matrix @ psi.vector)).real
    _, after = _factor(psi.vector, u, a)
    return before, after


def evolve_pure(psi: PureState, u: UnitaryGate, a: MetricOperator) -> EvolutionRecord:
    _check_compatible(psi, u, a)
    moved, n = _factor(psi.vector, u, a)
    # A > 0 and psi != 0 make n strictly positive
    assert n > 0.0, n
    out = PureState(moved / math.sqrt(n), normalization="metric", metric=a)
    return EvolutionRecord(psi, out, n)


def evolve_ensemble(e: Ensemble, u: UnitaryGate, a: MetricOperator) -> DensityOperator:
    """sum_i p_i U|psi_i><psi_i|U^dagger / <psi_i|U^dagger A U|psi_i>.

    The result is tagged with the metric trace convention; constructing it
    re-verifies Tr(A rho) = 1.
    """
    rho = np.zeros((a.dim, a.dim), dtype=np.complex128)
    for w, s in e.members:
        _check_compatible(s, u, a)
        moved, n = _factor(s.vector, u, a)
        rho += (w / n) * np.outer(moved, moved.conj())
    return DensityOperator(rho, "metric", a)


def is_linear_regime(u: UnitaryGate, a: MetricOperator, tol: float = LINEAR_REGIME_TOL) -> bool:
    """True when ``[U, A]`` vanishes, so the update is plain conjugation."""
    return commutator_norm(u.matrix, a.matrix) < tol


def convexity_defect(e1: Ensemble, e2: Ensemble, u: UnitaryGate, a: MetricOperator) -> float:
    """Trace distance between the evolved images of two decompositions of one state.

    Zero for every admissible pair exactly when the update respects
    mixtures; a positive value means the output depends on the
    decomposition and not only on the density matrix.
    """
    rho1 = ensemble_to_density(e1).matrix
    rho2 = ensemble_to_density(e2).matrix
    gap = float(np.linalg.norm(rho1 - rho2))
    if gap > 1e-10:
        raise PreconditionViolated(
            f"ensembles realize different density matrices (Frobenius gap {gap:.3e})",
            value=gap,
        )
    return trace_distance(evolve_ensemble(e1, u, a).matrix, evolve_ensemble(e2, u, a).matrix)
