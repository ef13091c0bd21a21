"""
Tests for allocation, seeding, quadrature, validators and the domain types
"""

import numpy as np
import pytest

from config.enums import AllocationMode
from config.settings import Settings
from models.errors import InvalidSetupError
from models.spectrum_models import InputDist, KernelSpec
from models.task_models import SolverOptions, TaskSetup, equicorrelated
from utils.apportionment import apportion, labels_from_counts
from utils.quadrature import gauss_legendre, gaussian_legendre
from utils.seeding import scenario_key, substream
from utils.validators import SetupValidator, is_positive_definite, require_noise


class TestApportion:
    @pytest.mark.parametrize("n, expected", [(1, [1, 0]), (2, [1, 1]), (4, [1, 3]), (7, [2, 5]), (500, [125, 375])])
    def test_two_task_rule(self, n, expected):
        np.testing.assert_array_equal(apportion(n, [0.25, 0.75]), expected)

    def test_floor_guard(self):
        # 0.29 * 100 is 28.999999999999996 in binary floating point
        np.testing.assert_array_equal(apportion(100, [0.71, 0.29]), [71, 29])

    def test_largest_remainder(self):
        counts = apportion(10, [0.125, 0.375, 0.5])
        assert counts.sum() == 10
        np.testing.assert_array_equal(counts, [1, 4, 5])

    def test_equal_fractions_fill_in_order(self):
        np.testing.assert_array_equal(apportion(5, np.full(4, 0.25)), [2, 1, 1, 1])
        np.testing.assert_array_equal(apportion(2, np.full(4, 0.25)), [1, 1, 0, 0])

    def test_random_mode(self):
        counts = apportion(1000, [0.2, 0.3, 0.5], AllocationMode.RANDOM, np.random.default_rng(0))
        assert counts.sum() == 1000
        with pytest.raises(InvalidSetupError):
            apportion(10, [0.5, 0.5], AllocationMode.RANDOM)

    def test_rejects_bad_input(self):
        with pytest.raises(InvalidSetupError):
            apportion(2.5, [0.5, 0.5])
        with pytest.raises(InvalidSetupError):
            apportion(10, [0.5, 0.6])

    def test_labels(self):
        np.testing.assert_array_equal(labels_from_counts([2, 0, 1]), [0, 0, 2])


class TestSeeding:
    def test_same_key_same_stream(self):
        a = substream(1, 2, 3, 4).random(5)
        b = substream(1, 2, 3, 4).random(5)
        np.testing.assert_array_equal(a, b)

    def test_keys_are_independent(self):
        base = substream(1, 2, 3, 4).random(5)
        for other in (substream(2, 2, 3, 4), substream(1, 3, 3, 4), substream(1, 2, 4, 4), substream(1, 2, 3, 5)):
            assert not np.array_equal(base, other.random(5))

    def test_scenario_key_is_stable(self):
        assert scenario_key("se_gaussian") == scenario_key("se_gaussian")
        assert scenario_key("se_gaussian") != scenario_key("se_uniform")


class TestQuadrature:
    def test_legendre_integrates_polynomials(self):
        x, w = gauss_legendre(5, 2.0, 4.0)
        assert w.sum() == pytest.approx(1.0)
        # mean of x^3 under U[2, 4] is (4^4 - 2^4) / (4 * 2) = 30
        assert w @ x ** 3 == pytest.approx(30.0)

    def test_gaussian_moments(self):
        x, w = gaussian_legendre(200, 4.0)
        assert w.sum() == pytest.approx(1.0)
        assert w @ x ** 2 == pytest.approx(4.0)
        assert w @ x ** 4 == pytest.approx(3.0 * 16.0)


class TestValidators:
    def test_task_covariance_checks(self):
        validator = SetupValidator()
        assert validator.validate_task_covariance(np.eye(2))["valid"]
        assert not validator.validate_task_covariance([[1.0, 2.0], [2.0, 1.0]])["valid"]
        assert not validator.validate_task_covariance([[1.0, 0.2], [0.3, 1.0]])["valid"]
        singular = validator.validate_task_covariance(equicorrelated(2, 1.0))
        assert singular["valid"] and singular["warnings"]

    def test_fractions(self):
        validator = SetupValidator()
        result = validator.validate_fractions([0.5, 0.6])
        assert not result["valid"]
        assert "sum to 1" in result["errors"][0]

    def test_grid(self):
        validator = SetupValidator()
        assert validator.validate_grid([1, 1, 2])["valid"]
        assert not validator.validate_grid([1, 1, 2], strict=True)["valid"]
        assert not validator.validate_grid([])["valid"]

    def test_noise_broadcast(self):
        np.testing.assert_array_equal(require_noise(0.05, 3), [0.05, 0.05, 0.05])
        with pytest.raises(InvalidSetupError):
            require_noise([0.05, -1.0], 2)

    def test_positive_definite(self):
        assert is_positive_definite(equicorrelated(3, 0.5))
        assert not is_positive_definite(equicorrelated(3, 1.0))


class TestDomainTypes:
    def test_task_setup_is_read_only(self):
        setup = TaskSetup(np.eye(2), 0.05, [1.0, 2.0])
        with pytest.raises(ValueError):
            setup.counts[0] = 5.0
        assert setup.T == 2

    def test_from_fractions(self):
        setup = TaskSetup.from_fractions(np.eye(2), 0.05, [0.25, 0.75], 100)
        np.testing.assert_allclose(setup.counts, [25.0, 75.0])

    def test_permuted(self):
        D = np.array([[1.0, 0.2, 0.1], [0.2, 2.0, 0.3], [0.1, 0.3, 3.0]])
        setup = TaskSetup(D, [0.1, 0.2, 0.3], [1.0, 2.0, 3.0]).permuted([2, 0, 1])
        np.testing.assert_allclose(np.diag(setup.D), [3.0, 1.0, 2.0])
        np.testing.assert_allclose(setup.noise, [0.3, 0.1, 0.2])

    def test_kernel_defaults(self):
        assert KernelSpec.ornstein_uhlenbeck(0.1).r == 0.0
        assert KernelSpec.ornstein_uhlenbeck(0.1, smoothness=1.0).r == 1.0
        assert KernelSpec.squared_exponential(0.1).r == float("inf")
        with pytest.raises(InvalidSetupError):
            KernelSpec.squared_exponential(0.0)
        with pytest.raises(InvalidSetupError):
            InputDist.uniform(1.0, 0.0)

    def test_solver_options_from_settings(self, monkeypatch):
        monkeypatch.setenv("MTLC_SOLVER_TOL", "1e-8")
        opts = SolverOptions.from_settings(Settings(), max_iter=50, pd_tol=None)
        assert opts.tol == 1e-8
        assert opts.max_iter == 50
        assert opts.pd_tol == 1e-10

    def test_settings_validation(self, monkeypatch):
        monkeypatch.setenv("MTLC_DEFAULT_REPLICAS", "1")
        report = Settings().validate()
        assert not report["valid"]
        assert any("REPLICAS" in issue for issue in report["issues"])
