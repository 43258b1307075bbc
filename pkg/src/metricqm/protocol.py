"""Two-party steering protocol and the signalling certifier.

Bob measures his half of a shared two-qubit state in some basis, which
leaves Alice holding one of several ensembles with identical reduced
density matrix. Alice applies a local unitary followed by A-renormalization
and measures a projector with the weighted rule Tr(A M rho). Any dependence
of her statistics on Bob's basis choice is a signal.

Bob's side always uses the standard Born rule; the metric only acts on
Alice's qubit.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, NamedTuple, Sequence, Union

import numpy as np

from .dynamics import UnitaryGate, evolve_ensemble, named_gate
from .errors import DimensionMismatch, MetricQMError, TraceConditionViolation
from .io import matrix_to_json
from .linalg import as_matrix, is_unitary, trace_distance
from .metric import MetricOperator, diag_metric
from .states import (
    BASIS_VECTORS,
    DensityOperator,
    Ensemble,
    MeasurementProjector,
    PureState,
    bell_state,
    check_trace_condition,
    probability_weighted,
    weighted_trace,
)

log = logging.getLogger(__name__)

VERDICT_TOL = 1e-8
SEARCH_THRESHOLD = 1e-6

# A named basis, or a 2x2 unitary whose columns are Bob's basis vectors.
BobBasis = Union[str, np.ndarray]


def basis_columns(basis: BobBasis) -> np.ndarray:
    if isinstance(basis, str):
        try:
            return BASIS_VECTORS[basis]
        except KeyError:
            raise MetricQMError(f"unknown basis {basis!r}") from None
    m = as_matrix(basis)
    if m.shape != (2, 2) or not is_unitary(m):
        raise MetricQMError("a custom Bob basis must be a 2x2 unitary (columns = basis vectors)")
    return m


def basis_label(basis: BobBasis, index: int) -> str:
    return basis if isinstance(basis, str) else f"basis{index}"


def steer(shared: PureState, bob_basis: BobBasis) -> Ensemble:
    """Alice's conditional ensemble after Bob measures in ``bob_basis``.

    Weights are Bob's standard Born probabilities; Alice's conditional
    states are standard-normalized. Zero-probability branches are dropped
    and branches leaving Alice in the same ray are merged.
    """
    if shared.dim != 4:
        raise DimensionMismatch(f"shared state must be two qubits (dim 4), got {shared.dim}")
    joint = shared.vector.reshape(2, 2)  # [alice, bob]
    cols = basis_columns(bob_basis)
    weights: list[float] = []
    states: list[np.ndarray] = []
    for k in range(2):
        alice = joint @ cols[:, k].conj()
        p = float(np.vdot(alice, alice).real)
        if p < 1e-15:
            log.info("dropping zero-probability Bob outcome %d (p=%.3e)", k, p)
            continue
        alice = alice / math.sqrt(p)
        for j, seen in enumerate(states):
            if abs(np.vdot(seen, alice)) > 1.0 - 1e-12:
                weights[j] += p
                break
        else:
            weights.append(p)
            states.append(alice)
    total = sum(weights)
    return Ensemble(tuple((w / total, PureState(s)) for w, s in zip(weights, states)))


def zero_projector() -> MeasurementProjector:
    return MeasurementProjector(np.diag([1.0, 0.0]).astype(np.complex128), "|0><0|")


@dataclass(frozen=True, eq=False)
class ProtocolConfig:
    metric: MetricOperator
    alice_unitary: UnitaryGate
    bob_bases: Sequence[BobBasis] = ("computational", "diagonal")
    alice_projector: MeasurementProjector = field(default_factory=zero_projector)
    shared_state: PureState = field(default_factory=bell_state)

    def __post_init__(self):
        if self.shared_state.dim != 4:
            raise DimensionMismatch("shared state must have dim 4")
        if self.metric.dim != 2 or self.alice_unitary.dim != 2 or self.alice_projector.dim != 2:
            raise DimensionMismatch("metric, unitary and projector act on Alice's qubit (dim 2)")
        if len(self.bob_bases) < 1:
            raise MetricQMError("need at least one Bob basis")


@dataclass(frozen=True, eq=False)
class BasisResult:
    alice_ensemble: Ensemble
    final_density: DensityOperator
    probability: float
    probability_imag: float


@dataclass(frozen=True, eq=False)
class ProtocolOutcome:
    per_basis: dict[str, BasisResult]
    signalling_magnitude: float
    probability_gap: float
    frobenius_distance: float

    @property
    def signalling(self) -> bool:
        return self.signalling_magnitude > VERDICT_TOL

    @property
    def verdict(self) -> str:
        return "signalling" if self.signalling else "no-signalling"

    def probabilities(self) -> dict[str, float]:
        return {k: r.probability for k, r in self.per_basis.items()}


def effective_state(rho: DensityOperator | np.ndarray, a: MetricOperator) -> np.ndarray:
    """A^(1/2) rho A^(1/2): unit standard trace whenever Tr(A rho) = 1."""
    m = rho.matrix if isinstance(rho, DensityOperator) else as_matrix(rho)
    eff = a.sqrt @ m @ a.sqrt
    return 0.5 * (eff + eff.conj().T)


def signalling_magnitude(rho1: DensityOperator, rho2: DensityOperator, a: MetricOperator) -> float:
    """Trace distance of the effective states; lies in [0, 1]."""
    for rho in (rho1, rho2):
        value, ok = check_trace_condition(rho, a)
        if not ok:
            raise TraceConditionViolation(f"Tr(A rho) = {value!r}, expected 1", value=value)
    return trace_distance(effective_state(rho1, a), effective_state(rho2, a))


def run_protocol(cfg: ProtocolConfig) -> ProtocolOutcome:
    a, u, m = cfg.metric, cfg.alice_unitary, cfg.alice_projector
    per_basis: dict[str, BasisResult] = {}
    for i, basis in enumerate(cfg.bob_bases):
        ens = steer(cfg.shared_state, basis)
        rho = evolve_ensemble(ens, u, a)
        raw = weighted_trace(m, rho, a)
        per_basis[basis_label(basis, i)] = BasisResult(
            ens, rho, probability_weighted(m, rho, a), raw.imag
        )
    results = list(per_basis.values())
    probs = [r.probability for r in results]
    magnitude = 0.0
    frob = 0.0
    for r1, r2 in itertools.combinations(results, 2):
        magnitude = max(magnitude, signalling_magnitude(r1.final_density, r2.final_density, a))
        frob = max(frob, float(np.linalg.norm(r1.final_density.matrix - r2.final_density.matrix)))
    if frob > 0.0:
        log.debug("raw Frobenius distance between final states: %.3e", frob)
    return ProtocolOutcome(per_basis, magnitude, max(probs) - min(probs), frob)


@dataclass(frozen=True, eq=False)
class Witness:
    unitary: UnitaryGate
    bob_bases: tuple[np.ndarray, np.ndarray]
    projector: MeasurementProjector
    probability_gap: float
    signalling_magnitude: float
    trial: int
    kind: str

    def config(self, a: MetricOperator) -> ProtocolConfig:
        return ProtocolConfig(a, self.unitary, self.bob_bases, self.projector)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "trial": self.trial,
            "unitary": matrix_to_json(self.unitary.matrix),
            "bob_bases": [matrix_to_json(b) for b in self.bob_bases],
            "projector": matrix_to_json(self.projector.matrix),
            "probability_gap": self.probability_gap,
            "signalling_magnitude": self.signalling_magnitude,
        }


@dataclass(frozen=True, eq=False)
class SignallingCertificate:
    metric: MetricOperator
    found: bool
    witness: Witness | None
    trials_used: int
    seed: int
    threshold: float = SEARCH_THRESHOLD

    @property
    def scalar_multiple(self) -> float | None:
        """``c`` when the metric is ``c I``; ``c != 1`` is reported, not rejected."""
        return self.metric.scalar_multiple()

    def to_json(self) -> dict:
        c = self.scalar_multiple
        return {
            "metric": matrix_to_json(self.metric.matrix),
            "found": self.found,
            "trials_used": self.trials_used,
            "seed": self.seed,
            "threshold": self.threshold,
            "scalar_metric": c is not None,
            "scale": c,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


_HADAMARD = named_gate("H").matrix


def _deterministic_candidates(a: MetricOperator) -> list[tuple[str, UnitaryGate, tuple, MeasurementProjector]]:
    v = np.array(a.eigenvectors)
    return [
        ("hadamard", named_gate("H"),
         (BASIS_VECTORS["computational"], BASIS_VECTORS["diagonal"]), zero_projector()),
        # The same construction carried into A's eigenframe. For the Bell
        # state Bob's basis conj(v_k) leaves Alice in v_k.
        ("eigenframe", UnitaryGate(v @ _HADAMARD @ v.conj().T, "eigenframe-H"),
         (v.conj(), (v @ _HADAMARD).conj()), MeasurementProjector.onto(v[:, 0], "eigvec0")),
    ]


def haar_batch(rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` Haar-random SU(2) matrices, Rz(alpha) Ry(beta) Rz(gamma)."""
    u = rng.random((count, 3))
    alpha, gamma = 2 * np.pi * u[:, 0], 2 * np.pi * u[:, 1]
    beta = np.arccos(2 * u[:, 2] - 1)
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    plus = np.exp(0.5j * (alpha + gamma))
    minus = np.exp(0.5j * (alpha - gamma))
    out = np.empty((count, 2, 2), dtype=np.complex128)
    out[:, 0, 0] = c / plus
    out[:, 0, 1] = -s / minus
    out[:, 1, 0] = s * minus
    out[:, 1, 1] = c * plus
    return out


def _screen_rho(joint: np.ndarray, basis: np.ndarray, u: np.ndarray, a: np.ndarray) -> np.ndarray:
    # alice[t, k] = unnormalized conditional state for Bob outcome k; its
    # squared norm p is the branch probability. The update is scale-free, so
    # p * U s s^+ U^+ / N(s) with s = alice / sqrt(p) is p * (U alice)(U alice)^+ / N(alice).
    alice = np.einsum("ab,tbk->tka", joint, basis.conj())
    moved = np.einsum("tij,tkj->tki", u, alice)
    n = np.einsum("tki,ij,tkj->tk", moved.conj(), a, moved).real
    p = np.einsum("tki,tki->tk", alice.conj(), alice).real
    n = np.where(p < 1e-15, 1.0, n)
    w = np.where(p < 1e-15, 0.0, p / n)
    return np.einsum("tk,tki,tkj->tij", w, moved, moved.conj())


def _screen(a: MetricOperator, shared: PureState, u, b1, b2, proj) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized probability gap and signalling magnitude for a batch of qubit configs.

    Same quantities as ``run_protocol`` without the per-object validation;
    used only to locate candidates, which are then re-run in full.
    """
    joint = shared.vector.reshape(2, 2)
    rho1 = _screen_rho(joint, b1, u, a.matrix)
    rho2 = _screen_rho(joint, b2, u, a.matrix)
    am = np.einsum("ij,tjk->tik", a.matrix, proj)
    gap = np.abs(np.einsum("tij,tji->t", am, rho1 - rho2).real)
    sq = a.sqrt
    d = np.einsum("ij,tjk,kl->til", sq, rho1 - rho2, sq)
    half_diff = 0.5 * (d[:, 0, 0].real - d[:, 1, 1].real)
    radius = np.sqrt(half_diff**2 + np.abs(d[:, 0, 1]) ** 2)
    tr = d[:, 0, 0].real + d[:, 1, 1].real
    # eigenvalues tr/2 +- radius; half the sum of their magnitudes
    magnitude = 0.5 * np.maximum(np.abs(tr), 2 * radius)
    return gap, magnitude


def certify(a: MetricOperator, trials: int, seed: int, threshold: float = SEARCH_THRESHOLD) -> SignallingCertificate:
    """Search for a signalling witness for the qubit metric ``a``.

    Two deterministic candidates run first (Hadamard with the
    computational/diagonal pair, then the same in A's eigenframe), followed
    by ``trials`` seeded Haar-random (unitary, basis pair, projector)
    triples. Stops at the first candidate whose probability gap exceeds
    ``threshold``, since only a gap is observable by Alice; the witness
    always comes from a full ``run_protocol`` evaluation.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if a.dim != 2:
        raise DimensionMismatch("certify works on qubit metrics")
    used = 0

    def attempt(kind, u, bases, proj):
        out = run_protocol(ProtocolConfig(a, u, bases, proj))
        if out.probability_gap > threshold:
            return Witness(u, bases, proj, out.probability_gap, out.signalling_magnitude, used, kind)
        return None

    for candidate in _deterministic_candidates(a):
        used += 1
        witness = attempt(*candidate)
        if witness is not None:
            return SignallingCertificate(a, True, witness, used, seed, threshold)

    rng = np.random.default_rng(seed)
    batch = haar_batch(rng, 4 * trials).reshape(trials, 4, 2, 2)
    us, b1, b2 = batch[:, 0], batch[:, 1], batch[:, 2]
    axis = batch[:, 3, :, 0]
    projs = np.einsum("ti,tj->tij", axis, axis.conj())
    gap, _ = _screen(a, bell_state(), us, b1, b2, projs)
    offset = used
    for i in np.flatnonzero(gap > threshold):
        used = offset + int(i) + 1
        witness = attempt(
            "random", UnitaryGate(us[i], f"haar[{i}]"), (b1[i], b2[i]),
            MeasurementProjector(projs[i], "random"),
        )
        if witness is not None:
            return SignallingCertificate(a, True, witness, used, seed, threshold)
    return SignallingCertificate(a, False, None, offset + trials, seed, threshold)


def replay(a: MetricOperator, witness: Witness) -> ProtocolOutcome:
    return run_protocol(witness.config(a))


class SweepRow(NamedTuple):
    lam: float
    p_z: float
    p_x: float
    gap: float
    magnitude: float


def sweep_lambda(
    lambdas: Iterable[float],
    u: UnitaryGate | None = None,
    m: MeasurementProjector | None = None,
) -> list[SweepRow]:
    """One protocol run per lambda with A = diag(1, lambda), rows in input order."""
    u = u or named_gate("H")
    m = m or zero_projector()
    rows = []
    for lam in lambdas:
        lam = float(lam)
        if not lam > 0.0:
            raise MetricQMError(f"lambda must be positive, got {lam!r}", value=lam)
        out = run_protocol(ProtocolConfig(diag_metric(1.0, lam), u, ("computational", "diagonal"), m))
        p = out.probabilities()
        rows.append(SweepRow(lam, p["computational"], p["diagonal"],
                             abs(p["computational"] - p["diagonal"]), out.signalling_magnitude))
    return rows


SWEEP_HEADER = ("lambda", "p_z", "p_x", "gap", "magnitude")


def format_float(x: float) -> str:
    return format(x, ".17g")


def write_sweep_csv(rows: Iterable[SweepRow], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow([format_float(x) for x in row])
