"""Metric operators and the deformed inner product <phi|A|psi>."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, ZeroVector
from .linalg import (
    POSITIVITY_TOL,
    as_matrix,
    as_vector,
    check_hermitian,
    hermitian_eigen,
    hermiticity_deviation,
)

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=a.dtype, copy=True)
    a.setflags(write=False)
    return a


class MetricOperator:
    """A validated positive-definite Hermitian matrix.

    Construction performs the validation, so holding an instance is proof
    that ``A > 0``. Eigendata and ``A**(1/2)`` are computed once here.
    """

    __slots__ = ("matrix", "eigenvalues", "eigenvectors", "sqrt")

    def __init__(self, candidate):
        m = check_hermitian(candidate)
        eig = hermitian_eigen(m)
        lo = float(eig.eigenvalues[0])
        if lo <= POSITIVITY_TOL:
            raise NotPositiveDefinite(
                f"minimum eigenvalue {lo:.6g} is not above {POSITIVITY_TOL:g}", value=lo
            )
        v = eig.eigenvectors
        root = (v * np.sqrt(eig.eigenvalues)) @ v.conj().T
        self.matrix = _frozen(m)
        self.eigenvalues = _frozen(eig.eigenvalues)
        self.eigenvectors = _frozen(v)
        self.sqrt = _frozen(0.5 * (root + root.conj().T))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def scalar_multiple(self, tol: float = 1e-12) -> float | None:
        """Return ``c`` if ``A = c I`` (relative tolerance), else ``None``."""
        c = float(np.trace(self.matrix).real) / self.dim
        if np.max(np.abs(self.matrix - c * np.eye(self.dim))) <= tol * max(1.0, c):
            return c
        return None

    def same_as(self, other: MetricOperator, tol: float = 1e-12) -> bool:
        return self is other or (
            self.dim == other.dim and float(np.max(np.abs(self.matrix - other.matrix))) <= tol
        )

    def scaled(self, c: float) -> MetricOperator:
        return MetricOperator(c * self.matrix)

    def __repr__(self) -> str:
        return f"MetricOperator(dim={self.dim}, eigenvalues={self.eigenvalues.tolist()})"


def validate_metric(candidate) -> MetricOperator:
    """Validate ``candidate`` as a metric operator.

    Raises ``NotHermitian`` or ``NotPositiveDefinite`` carrying the offending
    deviation or eigenvalue in ``.value``.
    """
    return MetricOperator(candidate)


def diag_metric(*values: float) -> MetricOperator:
    return MetricOperator(np.diag(np.asarray(values, dtype=np.complex128)))


def _matrix_of(a) -> np.ndarray:
    return a.matrix if isinstance(a, MetricOperator) else as_matrix(a)


def _check_dims(m: np.ndarray, *vectors: np.ndarray) -> None:
    for x in vectors:
        if x.shape[0] != m.shape[0]:
            raise DimensionMismatch(f"vector of dim {x.shape[0]} vs metric of dim {m.shape[0]}")


def inner_product_A(phi, psi, a) -> complex:
    """<phi|A|psi>, antilinear in ``phi``.

    ``a`` may be a raw matrix so that invalid candidates can still be probed
    (see ``verify_axioms``).
    """
    m = _matrix_of(a)
    phi, psi = as_vector(phi), as_vector(psi)
    _check_dims(m, phi, psi)
    return complex(np.vdot(phi, m @ psi))


def a_norm_squared(psi, a: MetricOperator) -> float:
    value = inner_product_A(psi, psi, a)
    # Hermitian A gives a real value; anything else is a bug upstream.
    assert abs(value.imag) <= 1e-12 * max(1.0, abs(value.real)), value
    return value.real


def normalize_A(psi, a: MetricOperator):
    """Rescale ``psi`` to unit A-norm, keeping its global phase."""
    from .states import PureState

    psi = as_vector(psi)
    n2 = a_norm_squared(psi, a)
    if n2 <= 1e-24:
        raise ZeroVector(f"A-norm squared {n2:.3e} is too small to normalize", value=n2)
    return PureState(psi / np.sqrt(n2), normalization="metric", metric=a)


@dataclass(frozen=True)
class AxiomReport:
    conjugate_symmetry_max_violation: float
    linearity_max_violation: float
    positive_definiteness_min_value: float
    samples_used: int
    seed: int
    tolerance: float = 1e-10

    @property
    def passed(self) -> bool:
        return (
            self.conjugate_symmetry_max_violation < self.tolerance
            and self.linearity_max_violation < self.tolerance
            and self.positive_definiteness_min_value > 0.0
        )

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def verify_axioms(a, sample_count: int, seed: int) -> AxiomReport:
    """Sample the three inner-product axioms for ``<.|A|.>``.

    Violations are relative: ``|lhs - rhs| / max(1, |rhs|)``. The positivity
    entry is the smallest Rayleigh quotient ``<psi|A|psi> / <psi|psi>`` seen.
    ``a`` may be an unvalidated matrix.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be at least 1")
    m = _matrix_of(a)
    d = m.shape[0]
    rng = np.random.default_rng(seed)
    phi = _complex_gaussian(rng, (sample_count, d))
    psi1 = _complex_gaussian(rng, (sample_count, d))
    psi2 = _complex_gaussian(rng, (sample_count, d))
    c1 = _complex_gaussian(rng, sample_count)
    c2 = _complex_gaussian(rng, sample_count)

    def form(x, y):
        # row-wise <x|A|y>
        return np.einsum("ni,ni->n", x.conj(), y @ m.T)

    fwd = form(phi, psi1)
    bwd = form(psi1, phi)
    conj_sym = np.abs(bwd - fwd.conj()) / np.maximum(1.0, np.abs(fwd))

    lhs = form(phi, c1[:, None] * psi1 + c2[:, None] * psi2)
    rhs = c1 * fwd + c2 * form(phi, psi2)
    linear = np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))

    quad = form(psi1, psi1).real / np.einsum("ni,ni->n", psi1.conj(), psi1).real

    return AxiomReport(
        conjugate_symmetry_max_violation=float(conj_sym.max()),
        linearity_max_violation=float(linear.max()),
        positive_definiteness_min_value=float(quad.min()),
        samples_used=sample_count,
        seed=seed,
    )


def bloch_decomposition(a: MetricOperator) -> tuple[float, np.ndarray]:
    """Coefficients ``(a0, (ax, ay, az))`` with ``A = a0 I + a . sigma``.

    For a standard-normalized qubit state with Bloch vector ``n``,
    ``<psi|A|psi> = a0 + a . n``; the unit-A-norm states are a sphere only
    when ``a`` vanishes.
    """
    m = _matrix_of(a)
    if m.shape[0] != 2:
        raise DimensionMismatch(f"Bloch decomposition needs a qubit metric, got dim {m.shape[0]}")
    a0 = float(np.trace(m).real) / 2.0
    vec = np.array([np.trace(m @ s).real / 2.0 for s in PAULI])
    return a0, vec


def bloch_reconstruct(a0: float, vec) -> np.ndarray:
    return a0 * np.eye(2, dtype=np.complex128) + sum(c * s for c, s in zip(vec, PAULI))


__all__ = [
    "AxiomReport",
    "MetricOperator",
    "a_norm_squared",
    "bloch_decomposition",
    "bloch_reconstruct",
    "diag_metric",
    "hermiticity_deviation",
    "inner_product_A",
    "normalize_A",
    "validate_metric",
    "verify_axioms",
]
