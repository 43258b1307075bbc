"""Dense complex linear algebra for small systems (d <= ~16).

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``;
``as_matrix``/``as_vector`` are the gatekeepers that enforce shape and
finiteness. The Hermitian eigensolver is a cyclic complex Jacobi method,
everything else is thin numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatch,
    MetricQMError,
    NegativeEigenvalue,
    NotHermitian,
)

HERMITIAN_TOL = 1e-12
POSITIVITY_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite square complex128 matrix."""
    m = a if type(a) is np.ndarray and a.dtype == np.complex128 else np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise MetricQMError("matrix has non-finite entries")
    return m


def as_vector(v) -> np.ndarray:
    """Coerce ``v`` to a finite 1-d complex128 vector."""
    x = np.asarray(v, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty vector, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise MetricQMError("vector has non-finite entries")
    return x


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a @ b


def dagger(a) -> np.ndarray:
    """Conjugate transpose of a matrix (or conjugate of a vector)."""
    x = np.asarray(a, dtype=np.complex128)
    return x.conj().T if x.ndim == 2 else x.conj()


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two matrices or two vectors."""
    x = np.asarray(a, dtype=np.complex128)
    y = np.asarray(b, dtype=np.complex128)
    if x.ndim != y.ndim:
        raise DimensionMismatch("tensor needs two matrices or two vectors")
    return np.kron(x, y)


def partial_trace(
    rho, dims: tuple[int, int], keep: Literal[0, 1] = 0
) -> np.ndarray:
    """Reduced matrix of a bipartite operator.

    ``keep=0`` traces out the second factor, ``keep=1`` the first.
    """
    rho = as_matrix(rho)
    d0, d1 = dims
    if d0 < 1 or d1 < 1 or rho.shape[0] != d0 * d1:
        raise DimensionMismatch(f"dims {dims} do not match matrix of size {rho.shape[0]}")
    r = rho.reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    if keep == 1:
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 0 or 1, got {keep!r}")


def _deviation(rows: list[list[complex]]) -> float:
    n = len(rows)
    return max(abs(rows[i][j] - rows[j][i].conjugate()) for i in range(n) for j in range(i, n))


def hermiticity_deviation(a) -> float:
    """Largest entrywise ``|a - a^dagger|``."""
    return _deviation(as_matrix(a).tolist())


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_matrix(a)
    dev = hermiticity_deviation(a)
    if dev > tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}", value=dev)
    return a


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _off_norm(a: list[list[complex]]) -> float:
    n = len(a)
    return math.sqrt(
        sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j)
    )


def hermitian_eigen(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first strips the phase of the pivot ``a[p, q]`` and then
    applies the real symmetric Jacobi rotation, so ``a[p, q]`` vanishes
    exactly. Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||a||_F)``. The loop runs on Python scalars: at d <= 16
    that is several times faster than numpy element access.

    Raises
    ------
    NotHermitian
        If the input deviates from Hermitian by more than 1e-12.
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    m = as_matrix(a).tolist()
    dev = _deviation(m)
    if dev > HERMITIAN_TOL:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}", value=dev)
    n = len(m)
    for i in range(n):
        m[i][i] = complex(m[i][i].real, 0.0)
        for j in range(i + 1, n):
            m[i][j] = 0.5 * (m[i][j] + m[j][i].conjugate())
            m[j][i] = m[i][j].conjugate()
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    scale = max(1.0, math.sqrt(sum(abs(x) ** 2 for row in m for x in row)))
    for _ in range(max_sweeps + 1):
        if _off_norm(m) < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = m[p][q]
                mag = abs(b)
                if mag == 0.0:
                    continue
                phase = b / mag
                cp = phase.conjugate()
                theta = (m[q][q].real - m[p][p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                scp, ccp = s * cp, c * cp
                sph, cph = s * phase, c * phase
                for row in m:
                    x, y = row[p], row[q]
                    row[p] = c * x - scp * y
                    row[q] = s * x + ccp * y
                row_p, row_q = m[p], m[q]
                for k in range(n):
                    x, y = row_p[k], row_q[k]
                    row_p[k] = c * x - sph * y
                    row_q[k] = s * x + cph * y
                row_p[q] = row_q[p] = 0j
                row_p[p] = complex(row_p[p].real, 0.0)
                row_q[q] = complex(row_q[q].real, 0.0)
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = c * x - scp * y
                    row[q] = s * x + ccp * y
    else:
        raise ConvergenceError(
            f"Jacobi did not converge in {max_sweeps} sweeps", value=_off_norm(m)
        )
    w = np.array([m[i][i].real for i in range(n)])
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(
        eigenvalues=w[order], eigenvectors=np.array(v, dtype=np.complex128)[:, order]
    )


def matrix_sqrt_psd(a, tol: float = POSITIVITY_TOL) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in ``[-tol, 0)`` are clamped to zero."""
    eig = hermitian_eigen(a)
    w = eig.eigenvalues
    if w[0] < -tol:
        raise NegativeEigenvalue(f"minimum eigenvalue {w[0]:.3e} is below -{tol:g}", value=float(w[0]))
    root = np.sqrt(np.clip(w, 0.0, None))
    v = eig.eigenvectors
    s = (v * root) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def trace_distance(a, b) -> float:
    """Half the sum of absolute eigenvalues of ``a - b``."""
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    check_hermitian(a)
    check_hermitian(b)
    w = hermitian_eigen(a - b).eigenvalues
    return 0.5 * float(np.sum(np.abs(w)))


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = as_matrix(u)
    err = u.conj().T @ u - np.eye(u.shape[0])
    return math.sqrt(float((err.real**2 + err.imag**2).sum())) <= tol


def commutator_norm(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return float(np.linalg.norm(a @ b - b @ a))
