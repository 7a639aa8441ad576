import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisefold.ensembles import (
    EnsembleSpec,
    gen_bernoulli,
    gen_concat_orthobases,
    gen_gaussian,
    gen_sphere_columns,
)
from noisefold.errors import PreconditionError
from noisefold.model import NoiseSpec
from noisefold.rng import RandomStream, derive_seed, mix64
from noisefold.whitening import compute_eta, whiten


class TestRng:
    def test_mix64_reference_values(self):
        # SplitMix64 seeded with 0: first outputs are mix64(k * 0x9E3779B97F4A7C15)
        assert derive_seed(0, 0) == 0xE220A8397B1DCDAF
        assert derive_seed(0, 1) == 0x6E789E6AA1B965F4
        assert derive_seed(0, 2) == 0x06C45D188009454F
        assert mix64(0) == 0

    def test_derivation_is_pure(self):
        assert derive_seed(42, 3, 1) == derive_seed(derive_seed(42, 3), 1)
        assert derive_seed(42, 3) != derive_seed(42, 4)
        assert derive_seed(42, 3) != derive_seed(43, 3)

    def test_bad_seed(self):
        with pytest.raises(ValueError):
            RandomStream(-1)
        with pytest.raises(ValueError):
            RandomStream(1 << 64)
        with pytest.raises(TypeError):
            RandomStream(1.5)

    def test_stream_is_reproducible(self):
        a = RandomStream(7).normal(11)
        b = RandomStream(7).normal(11)
        np.testing.assert_array_equal(a, b)
        assert a.shape == (11,)

    def test_uniform_range(self):
        u = RandomStream(1).uniform(10000)
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 4 * np.sqrt(1 / 12 / 10000)

    def test_normal_moments(self):
        z = RandomStream(2).normal(200000)
        assert abs(z.mean()) < 4 / np.sqrt(200000)
        assert abs(z.var() - 1.0) < 0.02
        # fourth moment of a standard normal is 3
        assert abs(np.mean(z**4) - 3.0) < 0.1


class TestGaussian:
    def test_determinism(self):
        assert gen_gaussian(1, 1, 123)[0, 0] == gen_gaussian(1, 1, 123)[0, 0]

    def test_mean(self):
        A = gen_gaussian(100, 400, 1)
        assert abs(A.mean()) <= 4.0 / np.sqrt(100 * 40000)

    def test_variance(self):
        A = gen_gaussian(100, 400, 1)
        assert abs(A.var() - 0.01) <= 0.1 * 0.01

    def test_zero_dims(self):
        with pytest.raises(PreconditionError):
            gen_gaussian(0, 3, 1)


class TestBernoulli:
    def test_entries(self):
        A = gen_bernoulli(50, 200, 3)
        assert set(np.unique(A)) == {-1 / np.sqrt(50), 1 / np.sqrt(50)}

    def test_column_norms(self):
        A = gen_bernoulli(50, 200, 3)
        np.testing.assert_allclose(np.sum(A * A, axis=0), 1.0, rtol=1e-14)

    def test_balance(self):
        A = gen_bernoulli(50, 200, 3)
        assert abs(np.mean(A > 0) - 0.5) <= 0.07


class TestSphere:
    def test_unit_columns(self):
        A = gen_sphere_columns(7, 300, 4)
        np.testing.assert_allclose(np.linalg.norm(A, axis=0), 1.0, atol=1e-12)

    def test_coordinate_means(self):
        A = gen_sphere_columns(3, 1000, 9)
        assert np.all(np.abs(A.mean(axis=1)) <= 0.05)

    def test_determinism(self):
        np.testing.assert_array_equal(gen_sphere_columns(5, 20, 8), gen_sphere_columns(5, 20, 8))


class TestOrthobases:
    def test_two_bases(self):
        A = gen_concat_orthobases(4, 2, 7)
        assert A.shape == (4, 8)
        assert np.max(np.abs(A @ A.T - 2 * np.eye(4))) <= 1e-10

    def test_single_basis(self):
        A = gen_concat_orthobases(6, 1, 7)
        np.testing.assert_allclose(A.T @ A, np.eye(6), atol=1e-12)
        assert compute_eta(A) <= 1e-10

    def test_blocks_orthogonal(self):
        A = gen_concat_orthobases(8, 3, 2)
        for k in range(3):
            blk = A[:, 8 * k : 8 * (k + 1)]
            np.testing.assert_allclose(blk.T @ blk, np.eye(8), atol=1e-12)

    def test_whitening_is_identity(self):
        A = gen_concat_orthobases(64, 4, 11)
        sys = whiten(A, NoiseSpec(1.0, 1.0))
        assert np.max(np.abs(sys.B - A)) <= 1e-8


class TestSpec:
    @pytest.mark.parametrize("family", ["gaussian", "bernoulli", "sphere-columns", "concat-orthobases"])
    def test_bit_identical(self, family):
        spec = EnsembleSpec(family, 8, 32, 99)
        a, b = spec.generate(), spec.generate()
        assert a.shape == (8, 32)
        assert a.tobytes() == b.tobytes()

    def test_validation(self):
        with pytest.raises(PreconditionError):
            EnsembleSpec("uniform", 4, 8, 1)
        with pytest.raises(PreconditionError):
            EnsembleSpec("gaussian", 8, 4, 1)
        with pytest.raises(PreconditionError):
            EnsembleSpec("concat-orthobases", 4, 10, 1)
        with pytest.raises(ValueError):
            EnsembleSpec("gaussian", 4, 8, -5)

    def test_streams_uncorrelated(self):
        spec = EnsembleSpec("gaussian", 50, 200, 5)
        a = spec.stream(0).generate().ravel()
        b = spec.stream(1).generate().ravel()
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.05
        assert not np.any(a == b)

    def test_thread_independent(self):
        from concurrent.futures import ThreadPoolExecutor

        specs = [EnsembleSpec("gaussian", 16, 64, s) for s in range(8)]
        serial = [s.generate() for s in specs]
        with ThreadPoolExecutor(4) as pool:
            threaded = list(pool.map(lambda s: s.generate(), reversed(specs)))[::-1]
        for a, b in zip(serial, threaded):
            assert a.tobytes() == b.tobytes()

    @given(st.integers(0, 2**64 - 1))
    @settings(max_examples=25, deadline=None)
    def test_any_seed(self, seed):
        A = EnsembleSpec("bernoulli", 3, 5, seed).generate()
        assert np.all(np.abs(A) == 1 / np.sqrt(3))
