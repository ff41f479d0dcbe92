import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reverse_ais import (BinaryRbm, GeometricPath, InitialDistribution, TwoLayerDbm, TwoLayerDbn, Schedule,
                         dbr_from_dataset, initial_log_partition, intermediate_log_f, linear_schedule,
                         sample_initial)
from reverse_ais.exact import all_states

from conftest import random_dbm, random_rbm

LN2 = math.log(2)


class TestSchedule:
    def test_k1(self):
        np.testing.assert_array_equal(linear_schedule(1).betas, [0.0, 1.0])

    def test_k4(self):
        np.testing.assert_array_equal(linear_schedule(4).betas, [0, 0.25, 0.5, 0.75, 1])

    def test_paper_scale(self):
        s = linear_schedule(100_000)
        assert len(s) == 100_001 and s.betas[0] == 0.0 and s.betas[-1] == 1.0 and s.K == 100_000

    def test_errors(self):
        with pytest.raises(ValueError):
            linear_schedule(0)
        with pytest.raises(ValueError):
            Schedule([0.0, 0.5, 0.5, 1.0])
        with pytest.raises(ValueError):
            Schedule([0.1, 1.0])


class TestDbr:
    def test_all_zeros(self):
        init = dbr_from_dataset(np.zeros((8, 5), dtype=np.uint8))
        np.testing.assert_allclose(init.dbr_visible_bias, math.log(1 / 9), rtol=1e-14)

    def test_half(self):
        data = np.array([[1, 0], [0, 0], [1, 1], [0, 1]])
        np.testing.assert_allclose(dbr_from_dataset(data).dbr_visible_bias, 0.0, atol=1e-15)

    def test_two_examples(self):
        a0 = dbr_from_dataset([[1, 0], [1, 1]]).dbr_visible_bias
        np.testing.assert_allclose(a0, [math.log(3), 0.0], atol=1e-15)

    def test_empty(self):
        with pytest.raises(ValueError):
            dbr_from_dataset(np.zeros((0, 3)))


class TestIntermediate:
    def test_endpoints(self, rng):
        m = random_rbm(rng, 4, 3)
        for init in (InitialDistribution.uniform(), InitialDistribution(rng.normal(size=4))):
            path = GeometricPath(init, m)
            state = (np.array([1, 0, 1, 1]), np.array([0, 1, 1]))
            assert intermediate_log_f(path, 1.0, state) == pytest.approx(m.log_f(state), abs=1e-14)
        path = GeometricPath(InitialDistribution.uniform(), m)
        assert intermediate_log_f(path, 0.0, state) == 0.0

    def test_half_beta_one_by_one(self):
        path = GeometricPath(InitialDistribution.uniform(), BinaryRbm([0.0], [0.0], [[LN2]]))
        assert intermediate_log_f(path, 0.5, ([1], [1])) == pytest.approx(0.5 * LN2, abs=1e-15)

    def test_beta_range(self):
        path = GeometricPath(InitialDistribution.uniform(), BinaryRbm.zeros(1, 1))
        with pytest.raises(ValueError):
            intermediate_log_f(path, 1.5, ([1], [1]))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.booleans(), st.floats(0, 1))
    def test_affine_and_parameter_averaging(self, seed, dbr, beta):
        r = np.random.default_rng(seed)
        m = random_dbm(r, 3, 3, 2) if seed % 2 else random_rbm(r, 4, 3)
        init = InitialDistribution(r.normal(size=m.num_visible)) if dbr else InitialDistribution.uniform()
        path = GeometricPath(init, m)
        state = tuple((r.random(n) < 0.5).astype(np.uint8) for n in m.layer_sizes)
        f0, f5, f1 = (intermediate_log_f(path, b, state) for b in (0.0, 0.5, 1.0))
        assert f5 == pytest.approx(0.5 * (f0 + f1), abs=1e-12)
        assert intermediate_log_f(path, beta, state) == pytest.approx(path.model_at(beta).log_f(state), abs=1e-12)


class TestInitialPartition:
    def test_uniform(self):
        path = GeometricPath(InitialDistribution.uniform(), BinaryRbm.zeros(3, 2))
        assert initial_log_partition(path) == pytest.approx(5 * LN2)

    def test_dbr_zero_bias(self):
        path = GeometricPath(InitialDistribution(np.zeros(3)), BinaryRbm.zeros(3, 2))
        assert initial_log_partition(path) == pytest.approx(5 * LN2, abs=1e-14)

    def test_dbr_log3(self):
        path = GeometricPath(InitialDistribution([math.log(3)]), BinaryRbm.zeros(1, 1))
        assert initial_log_partition(path) == pytest.approx(LN2 + math.log(4), abs=1e-14)

    @pytest.mark.parametrize("dbr", [False, True])
    def test_sum_at_beta_zero(self, rng, dbr):
        m = random_dbm(rng, 3, 2, 2)
        init = InitialDistribution(rng.normal(size=3)) if dbr else InitialDistribution.uniform()
        path = GeometricPath(init, m)
        flat = all_states(7)
        state = (flat[:, :3], flat[:, 3:5], flat[:, 5:])
        total = math.fsum(np.exp(intermediate_log_f(path, 0.0, state)))
        assert total == pytest.approx(math.exp(initial_log_partition(path)), rel=1e-10)

    def test_dbn_rejects_dbr(self):
        with pytest.raises(ValueError):
            GeometricPath(InitialDistribution(np.zeros(2)), TwoLayerDbn.zeros(2, 2, 2))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            GeometricPath(InitialDistribution(np.zeros(2)), BinaryRbm.zeros(3, 2))


class TestSampleInitial:
    def test_uniform_means(self):
        path = GeometricPath(InitialDistribution.uniform(), TwoLayerDbm.zeros(4, 3, 2))
        v, h1, h2 = sample_initial(path, np.random.default_rng(0), 100_000)
        for layer in (v, h1, h2):
            assert np.all(np.abs(layer.mean(axis=0) - 0.5) < 0.01)

    def test_dbr_means(self):
        path = GeometricPath(InitialDistribution([math.log(3), 0.0]), BinaryRbm.zeros(2, 2))
        v, h = sample_initial(path, np.random.default_rng(1), 100_000)
        assert abs(v[:, 0].mean() - 0.75) < 0.01
        assert abs(v[:, 1].mean() - 0.5) < 0.01
        assert np.all(np.abs(h.mean(axis=0) - 0.5) < 0.01)

    def test_shapes(self):
        path = GeometricPath(InitialDistribution.uniform(), TwoLayerDbm.zeros(4, 3, 2))
        state = sample_initial(path, np.random.default_rng(2))
        assert [s.shape for s in state] == [(4,), (3,), (2,)]
        assert all(s.dtype == np.uint8 and set(np.unique(s)) <= {0, 1} for s in state)
