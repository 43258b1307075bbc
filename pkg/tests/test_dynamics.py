import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricqm.dynamics import (
    UnitaryGate,
    convexity_defect,
    evolve_ensemble,
    evolve_pure,
    is_linear_regime,
    named_gate,
    norm_shift,
    random_qubit_unitary,
    rot_y,
    rot_z,
)
from metricqm.errors import MetricQMError, NormalizationError, PreconditionViolated
from metricqm.metric import MetricOperator, a_norm_squared, diag_metric, normalize_A
from metricqm.states import Ensemble, PureState, ensemble_to_density, metric_normalize

from conftest import random_metric, random_unitary, random_vector

seeds = st.integers(min_value=0, max_value=2**32 - 1)
lambdas = st.floats(min_value=0.05, max_value=20.0)
H = named_gate("H")
S = 1 / np.sqrt(2)
E_Z = Ensemble.of((0.5, [1, 0]), (0.5, [0, 1]))
E_X = Ensemble.of((0.5, [S, S]), (0.5, [S, -S]))


def random_ensemble(rng, d, k):
    w = rng.dirichlet(np.ones(k))
    vs = [random_vector(rng, d) for _ in range(k)]
    return Ensemble.of(*((p, v / np.linalg.norm(v)) for p, v in zip(w, vs)))


class TestGates:
    def test_named(self):
        for name in ("H", "X", "Z", "I", "rot:z:0.3", "rot:y:-1.2"):
            g = named_gate(name)
            assert g.label == name
            np.testing.assert_allclose(g.matrix.conj().T @ g.matrix, np.eye(2), atol=1e-15)

    def test_rotations(self):
        np.testing.assert_allclose(named_gate("rot:y:3.141592653589793").matrix, [[0, -1], [1, 0]], atol=1e-15)
        np.testing.assert_allclose(named_gate("rot:z:0").matrix, np.eye(2))

    def test_bad_names(self):
        for name in ("Q", "rot:x:1", "rot:z:abc"):
            with pytest.raises(MetricQMError):
                named_gate(name)

    def test_non_unitary_rejected(self):
        with pytest.raises(MetricQMError):
            UnitaryGate(np.diag([1.0, 2.0]))

    def test_haar_sampler_matches_euler_product(self):
        rng1, rng2 = np.random.default_rng(4), np.random.default_rng(4)
        u = random_qubit_unitary(rng1).matrix
        alpha, gamma = rng2.uniform(0, 2 * np.pi, size=2)
        beta = np.arccos(rng2.uniform(-1, 1))
        np.testing.assert_allclose(u, rot_z(alpha) @ rot_y(beta) @ rot_z(gamma), atol=1e-15)

    def test_haar_first_moment(self):
        # E|U_00|^2 = 1/2 under the Haar measure
        rng = np.random.default_rng(0)
        vals = [abs(random_qubit_unitary(rng).matrix[0, 0]) ** 2 for _ in range(4000)]
        assert np.mean(vals) == pytest.approx(0.5, abs=0.02)


class TestNormShift:
    @given(lambdas)
    def test_hadamard_on_zero(self, lam):
        before, after = norm_shift(PureState([1, 0]), H, diag_metric(1, lam))
        assert before == pytest.approx(1.0)
        assert after == pytest.approx((1 + lam) / 2, abs=1e-12)

    def test_identity_metric(self):
        rng = np.random.default_rng(2)
        v = random_vector(rng, 2)
        _, after = norm_shift(PureState(v / np.linalg.norm(v)), UnitaryGate(random_unitary(rng, 2)), diag_metric(1, 1))
        assert after == pytest.approx(1.0, abs=1e-14)

    def test_commuting_gate(self):
        a = diag_metric(1, 3)
        psi = normalize_A([0.3, 0.7j], a)
        before, after = norm_shift(psi, named_gate("rot:z:0.9"), a)
        assert before == pytest.approx(1.0) and after == pytest.approx(1.0, abs=1e-14)


class TestEvolvePure:
    @given(lambdas)
    def test_hadamard_example_case_one(self, lam):
        rec = evolve_pure(PureState([1, 0]), H, diag_metric(1, lam))
        assert rec.normalization_factor == pytest.approx((1 + lam) / 2, abs=1e-12)
        np.testing.assert_allclose(rec.output_state.vector, np.array([S, S]) / np.sqrt((1 + lam) / 2), atol=1e-14)

    @given(lambdas)
    def test_hadamard_example_case_two_renormalized_input(self, lam):
        a = diag_metric(1, lam)
        plus_a = normalize_A([S, S], a)
        rec = evolve_pure(plus_a, H, a)
        # H|+> = |0>, which has unit A-norm: output is exactly |0>
        np.testing.assert_allclose(rec.output_state.vector, [1, 0], atol=1e-12)
        assert rec.normalization_factor == pytest.approx(1 / ((1 + lam) / 2), rel=1e-12)

    def test_identity_metric_is_plain_unitary(self):
        rng = np.random.default_rng(8)
        u = random_unitary(rng, 3)
        v = random_vector(rng, 3)
        v /= np.linalg.norm(v)
        rec = evolve_pure(PureState(v), UnitaryGate(u), MetricOperator(np.eye(3)))
        assert rec.normalization_factor == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(rec.output_state.vector, u @ v, atol=1e-14)

    @given(seeds)
    @settings(max_examples=100)
    def test_output_has_unit_a_norm(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        a = random_metric(rng, d)
        psi = normalize_A(random_vector(rng, d), a)
        rec = evolve_pure(psi, UnitaryGate(random_unitary(rng, d)), a)
        assert abs(a_norm_squared(rec.output_state.vector, a) - 1) < 1e-12

    def test_foreign_metric_rejected(self):
        psi = normalize_A([1, 1], diag_metric(1, 2))
        with pytest.raises(NormalizationError):
            evolve_pure(psi, H, diag_metric(1, 3))


class TestEvolveEnsemble:
    @given(lambdas)
    def test_hadamard_example_density_matrices(self, lam):
        a = diag_metric(1, lam)
        np.testing.assert_allclose(evolve_ensemble(E_Z, H, a).matrix, np.eye(2) / (1 + lam), atol=1e-12)
        np.testing.assert_allclose(evolve_ensemble(E_X, H, a).matrix, np.diag([0.5, 1 / (2 * lam)]), atol=1e-12)

    @given(lambdas)
    def test_metric_normalized_input_gives_same_output(self, lam):
        a = diag_metric(1, lam)
        for e in (E_Z, E_X):
            np.testing.assert_allclose(
                evolve_ensemble(metric_normalize(e, a), H, a).matrix, evolve_ensemble(e, H, a).matrix, atol=1e-14
            )

    def test_identity_metric_is_conjugation(self):
        rng = np.random.default_rng(1)
        e = random_ensemble(rng, 3, 4)
        u = random_unitary(rng, 3)
        rho = ensemble_to_density(e).matrix
        out = evolve_ensemble(e, UnitaryGate(u), MetricOperator(np.eye(3))).matrix
        np.testing.assert_allclose(out, u @ rho @ u.conj().T, atol=1e-12)

    @given(seeds)
    @settings(max_examples=100)
    def test_trace_condition_holds(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        a = random_metric(rng, d)
        rho = evolve_ensemble(random_ensemble(rng, d, 3), UnitaryGate(random_unitary(rng, d)), a)
        assert abs(np.trace(a.matrix @ rho.matrix).real - 1) < 1e-10

    @given(seeds)
    @settings(max_examples=100)
    def test_commuting_unitary_is_linear(self, seed):
        rng = np.random.default_rng(seed)
        a = MetricOperator(np.diag(rng.uniform(0.2, 5.0, size=3)))
        u = UnitaryGate(np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, size=3))))
        assert is_linear_regime(u, a)
        e = metric_normalize(random_ensemble(rng, 3, 3), a)
        rho = ensemble_to_density(e).matrix
        out = evolve_ensemble(e, u, a).matrix
        assert np.max(np.abs(out - u.matrix @ rho @ u.matrix.conj().T)) < 1e-10

    @given(seeds)
    @settings(max_examples=100)
    def test_phase_covariance(self, seed):
        rng = np.random.default_rng(seed)
        a = random_metric(rng, 2)
        e = random_ensemble(rng, 2, 3)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=3))
        rotated = Ensemble.of(*((w, ph * s.vector) for (w, s), ph in zip(e.members, phases)))
        u = UnitaryGate(random_unitary(rng, 2))
        diff = evolve_ensemble(e, u, a).matrix - evolve_ensemble(rotated, u, a).matrix
        assert np.max(np.abs(diff)) < 1e-12

    def test_generic_pair_not_linear_regime(self):
        assert not is_linear_regime(H, diag_metric(1, 2))


class TestConvexityDefect:
    def test_hadamard_example_pair_at_lambda_two(self):
        # trace distance of diag(1/3, 1/3) and diag(1/2, 1/4) is 1/8
        assert convexity_defect(E_Z, E_X, H, diag_metric(1, 2)) == pytest.approx(1 / 8, abs=1e-12)

    def test_identity_metric(self):
        assert convexity_defect(E_Z, E_X, H, diag_metric(1, 1)) < 1e-15

    def test_same_ensemble(self):
        assert convexity_defect(E_X, E_X, H, diag_metric(1, 5)) == 0.0

    @given(seeds, st.sampled_from([1.0, 0.5, 3.0, 17.0]))
    @settings(max_examples=50)
    def test_scalar_metrics_have_no_defect(self, seed, c):
        rng = np.random.default_rng(seed)
        u = UnitaryGate(random_unitary(rng, 2))
        # two decompositions of one state: eigen-decomposition vs a rotated pair
        rho = ensemble_to_density(random_ensemble(rng, 2, 3)).matrix
        w, v = np.linalg.eigh(rho)
        w = np.clip(w, 0.0, None) / np.clip(w, 0.0, None).sum()
        e1 = Ensemble.of(*((float(w[k]), v[:, k]) for k in range(2)))
        assert convexity_defect(e1, _split(rho), u, MetricOperator(c * np.eye(2))) < 1e-10

    def test_generic_metric_has_defect(self):
        rng = np.random.default_rng(12)
        rho = ensemble_to_density(random_ensemble(rng, 2, 3)).matrix
        w, v = np.linalg.eigh(rho)
        e1 = Ensemble.of(*((float(w[k]), v[:, k]) for k in range(2)))
        assert convexity_defect(e1, _split(rho), H, diag_metric(1, 2)) > 1e-3

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            convexity_defect(E_Z, Ensemble.of((1.0, [1, 0])), H, diag_metric(1, 2))


def _split(rho):
    """Equal-weight two-member decomposition of a qubit density matrix."""
    # rho = (I + n.sigma)/2 = 1/2 (|a><a| + |b><b|) with Bloch vectors n +- m, m perpendicular to n
    n = np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])
    perp = np.cross(n, [1.0, 0.3, -0.2])
    perp *= np.sqrt(max(1 - n @ n, 0.0)) / np.linalg.norm(perp)
    members = []
    for m in (n + perp, n - perp):
        theta, phi = np.arccos(np.clip(m[2], -1, 1)), np.arctan2(m[1], m[0])
        members.append((0.5, [np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]))
    return Ensemble.of(*members)
