import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricqm.errors import MetricQMError, NormalizationError, TraceConditionViolation
from metricqm.linalg import tensor
from metricqm.metric import MetricOperator, diag_metric
from metricqm.states import (
    DensityOperator,
    Ensemble,
    MeasurementProjector,
    PureState,
    basis_states,
    bell_state,
    check_trace_condition,
    ensemble_to_density,
    metric_normalize,
    probability_standard,
    probability_weighted,
    weighted_trace,
)

from conftest import random_metric, random_vector

seeds = st.integers(min_value=0, max_value=2**32 - 1)
lambdas = st.floats(min_value=0.05, max_value=20.0)
M0 = MeasurementProjector(np.diag([1.0, 0.0]), "0")
S = 1 / np.sqrt(2)


class TestConstruction:
    def test_bases(self):
        comp = basis_states("computational")
        diag = basis_states("diagonal")
        np.testing.assert_array_equal([s.vector for s in comp], [[1, 0], [0, 1]])
        np.testing.assert_allclose([s.vector for s in diag], [[S, S], [S, -S]])
        for b in comp:
            for d in diag:
                assert abs(np.vdot(b.vector, d.vector)) ** 2 == pytest.approx(0.5)

    def test_unknown_basis(self):
        with pytest.raises(MetricQMError):
            basis_states("circular")

    def test_bell(self):
        v = bell_state().vector
        np.testing.assert_allclose(v, [S, 0, 0, S])
        assert np.vdot(v, v).real == pytest.approx(1.0)

    def test_pure_state_normalization_is_checked(self):
        with pytest.raises(NormalizationError):
            PureState([1, 1])
        a = diag_metric(1, 4)
        PureState([0, 0.5], "metric", a)
        with pytest.raises(NormalizationError):
            PureState([0, 1], "metric", a)

    def test_ensemble_checks(self):
        with pytest.raises(MetricQMError):
            Ensemble(())
        with pytest.raises(MetricQMError):
            Ensemble.of((0.5, [1, 0]), (0.6, [0, 1]))
        with pytest.raises(MetricQMError):
            Ensemble.of((1.5, [1, 0]), (-0.5, [0, 1]))
        a = diag_metric(1, 1)
        with pytest.raises(NormalizationError):
            Ensemble(((0.5, PureState([1, 0])), (0.5, PureState([0, 1], "metric", a))))

    def test_projector_checks(self):
        with pytest.raises(MetricQMError):
            MeasurementProjector(np.diag([1.0, 0.5]))


class TestDensity:
    def test_hadamard_example_ensembles_give_maximally_mixed(self):
        e_z = Ensemble.of((0.5, [1, 0]), (0.5, [0, 1]))
        e_x = Ensemble.of((0.5, [S, S]), (0.5, [S, -S]))
        for e in (e_z, e_x):
            np.testing.assert_allclose(ensemble_to_density(e).matrix, np.eye(2) / 2, atol=1e-16)

    def test_single_member_is_projector(self):
        v = np.array([0.6, 0.8j])
        rho = ensemble_to_density(Ensemble.of((1.0, v))).matrix
        np.testing.assert_allclose(rho, np.outer(v, v.conj()))

    @given(seeds)
    @settings(max_examples=50)
    def test_random_ensembles_hermitian_psd(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, 6))
        w = rng.dirichlet(np.ones(k))
        vs = [random_vector(rng, 3) for _ in range(k)]
        e = Ensemble.of(*((p, v / np.linalg.norm(v)) for p, v in zip(w, vs)))
        rho = ensemble_to_density(e)
        assert np.max(np.abs(rho.matrix - rho.matrix.conj().T)) <= 1e-12
        assert rho.min_eigenvalue >= -1e-10

    @given(seeds)
    @settings(max_examples=50)
    def test_metric_ensembles_meet_trace_condition(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        a = random_metric(rng, d)
        k = int(rng.integers(1, 5))
        w = rng.dirichlet(np.ones(k))
        vs = [random_vector(rng, d) for _ in range(k)]
        standard = Ensemble.of(*((p, v / np.linalg.norm(v)) for p, v in zip(w, vs)))
        rho = ensemble_to_density(metric_normalize(standard, a))
        assert rho.trace_convention == "metric"
        value, ok = check_trace_condition(rho, a)
        assert ok, value

    def test_trace_violation_rejected(self):
        with pytest.raises(TraceConditionViolation):
            DensityOperator(np.eye(2) / 2, "metric", diag_metric(1, 3))


class TestTraceCondition:
    @given(lambdas)
    def test_hadamard_example_states(self, lam):
        a = diag_metric(1, lam)
        assert check_trace_condition(np.eye(2) / (1 + lam), a).passed
        assert check_trace_condition(np.diag([0.5, 1 / (2 * lam)]), a).passed

    def test_identity(self):
        assert check_trace_condition(np.eye(2) / 2, diag_metric(1, 1)) == (1.0, True)


class TestProbabilities:
    @given(lambdas)
    def test_hadamard_example_probabilities(self, lam):
        a = diag_metric(1, lam)
        rho_z = DensityOperator(np.eye(2) / (1 + lam), "metric", a)
        rho_x = DensityOperator(np.diag([0.5, 1 / (2 * lam)]), "metric", a)
        assert probability_weighted(M0, rho_z, a) == pytest.approx(1 / (1 + lam), abs=1e-12)
        assert probability_weighted(M0, rho_x, a) == pytest.approx(0.5, abs=1e-12)

    @given(seeds)
    def test_identity_metric_is_born_rule(self, seed):
        rng = np.random.default_rng(seed)
        v = random_vector(rng, 2)
        rho = DensityOperator(np.outer(v, v.conj()) / np.vdot(v, v).real)
        m = MeasurementProjector.onto(random_vector(rng, 2))
        assert probability_weighted(m, rho, MetricOperator(np.eye(2))) == probability_standard(m, rho)

    def test_standard_examples(self):
        half = DensityOperator(np.eye(2) / 2)
        assert probability_standard(M0, half) == 0.5
        assert probability_standard(MeasurementProjector(np.eye(2)), half) == pytest.approx(1.0)
        v = bell_state().vector
        bell = DensityOperator(np.outer(v, v.conj()))
        # |<00|Psi>|^2 + |<01|Psi>|^2 = 1/2 + 0
        assert probability_standard(MeasurementProjector(tensor(np.diag([1, 0]), np.eye(2))), bell) == pytest.approx(0.5)

    @given(seeds)
    @settings(max_examples=50)
    def test_complete_projectors_sum_to_one(self, seed):
        rng = np.random.default_rng(seed)
        a = random_metric(rng, 2)
        v = random_vector(rng, 2)
        e = metric_normalize(Ensemble.of((1.0, v / np.linalg.norm(v))), a)
        rho = ensemble_to_density(e)
        axis = random_vector(rng, 2)
        p = MeasurementProjector.onto(axis)
        q = MeasurementProjector(np.eye(2) - p.matrix)
        total = probability_weighted(p, rho, a) + probability_weighted(q, rho, a)
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_non_commuting_case_is_complex(self, caplog):
        a = MetricOperator(np.array([[2, 0.5], [0.5, 1]]))
        rho = DensityOperator(np.diag([1 / 2, 0.0]), "metric", a)
        m = MeasurementProjector.onto([1, 1j])
        raw = weighted_trace(m, rho, a)
        assert abs(raw.imag) > 1e-3
        assert probability_weighted(m, rho, a) == raw.real
        assert "imaginary" in caplog.text
