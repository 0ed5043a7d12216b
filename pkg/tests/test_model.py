import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gauss_onsager import scenarios
from gauss_onsager.errors import DimensionError, DomainError, ValidationError
from gauss_onsager.linalg import min_eigenvalue
from gauss_onsager.model import (
    DampingMatrix,
    EnvCovMatrix,
    GaussianMap,
    LyapunovSystem,
    bona_fide_check,
    cptp_check,
    diffusion_from_env,
    psd_tolerance,
    squeezed_thermal_cm,
    symplectic_form,
    thermal_cm,
)
from gauss_onsager.sampling import random_gaussian_cm, random_product_cm


class TestSymplecticForm:
    def test_single_mode(self):
        np.testing.assert_array_equal(symplectic_form(1), np.diag([-1j, 1j]))

    def test_two_modes(self):
        np.testing.assert_array_equal(symplectic_form(2), np.diag([-1j, 1j, -1j, 1j]))

    @pytest.mark.parametrize("modes", [1, 2, 3, 4])
    def test_algebra(self, modes):
        om = symplectic_form(modes)
        np.testing.assert_array_equal(om @ om, -np.eye(2 * modes))
        np.testing.assert_array_equal(om.conj().T, -om)

    @pytest.mark.parametrize("modes", [0, -1, 1.5])
    def test_bad_modes(self, modes):
        with pytest.raises(DomainError):
            symplectic_form(modes)


class TestBonaFide:
    def test_vacuum(self):
        ok, margin = bona_fide_check(0.5 * np.eye(2))
        assert ok and margin == pytest.approx(0.0, abs=1e-15)

    def test_thermal(self):
        ok, margin = bona_fide_check(thermal_cm(1.0, 1))
        assert ok and margin == pytest.approx(1.0)

    def test_sub_vacuum(self):
        ok, margin = bona_fide_check(0.4 * np.eye(2))
        assert not ok and margin == pytest.approx(-0.1)

    def test_dimension(self):
        with pytest.raises(DimensionError):
            bona_fide_check(np.eye(3))

    def test_env_var_tolerance(self, monkeypatch):
        monkeypatch.setenv("GAUSS_ONSAGER_TOL", "0.2")
        assert psd_tolerance() == 0.2
        assert bona_fide_check(0.4 * np.eye(2)).ok
        monkeypatch.setenv("GAUSS_ONSAGER_TOL", "nope")
        with pytest.raises(DomainError):
            psd_tolerance()

    @pytest.mark.parametrize("nbar", [0.0, 0.1, 0.5, 1.0, 3.0, 10.0])
    @pytest.mark.parametrize("modes", [1, 2, 3, 4])
    def test_thermal_grid(self, nbar, modes):
        assert bona_fide_check(thermal_cm(nbar, modes)).ok

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_bona_fide_implies_psd(self, modes, seed):
        r = np.random.default_rng(seed)
        for theta in (random_gaussian_cm(r, modes), random_product_cm(r, modes)):
            assert bona_fide_check(theta).ok
            assert min_eigenvalue(theta) >= 0


class TestCPTP:
    def test_identity_map(self):
        ok, margin = cptp_check(GaussianMap(np.eye(2), np.zeros((2, 2))))
        assert ok and margin == pytest.approx(0.0, abs=1e-15)

    def test_loss_channel_accept(self):
        eta = 0.5
        ok, margin = cptp_check(GaussianMap(np.sqrt(eta) * np.eye(2), 0.25 * np.eye(2)))
        assert ok and margin == pytest.approx(0.0, abs=1e-15)

    def test_loss_channel_reject(self):
        ok, margin = cptp_check(GaussianMap(np.sqrt(0.5) * np.eye(2), 0.1 * np.eye(2)))
        assert not ok and margin == pytest.approx(-0.15)

    def test_non_hermitian_y(self):
        with pytest.raises(ValidationError):
            cptp_check(GaussianMap(np.eye(2), np.array([[0, 1], [0, 0]])))

    @pytest.mark.parametrize("kind", sorted(scenarios.SCENARIO_PARAMETERS))
    @pytest.mark.parametrize("dt", [1e-4, 1e-5])
    def test_infinitesimal_scenario_maps(self, kind, dt):
        sys = scenarios.build(scenarios.ScenarioSpec(kind))
        for t in (0.0, 0.3):
            # first-order map violates CP only at O(dt^2), far inside the tolerance
            assert cptp_check(sys.infinitesimal_map(dt, t)).ok


class TestDiffusion:
    def test_scalar(self):
        g = DampingMatrix.uniform(2.0, 1)
        np.testing.assert_allclose(diffusion_from_env(g, EnvCovMatrix.fixed(3.0 * np.eye(2))), 6.0 * np.eye(2))

    def test_squeezed(self):
        q = squeezed_thermal_cm(0.3, 0.4, 0.2, 1.5, 0.7)
        g = DampingMatrix.uniform(0.7, 1)
        np.testing.assert_allclose(diffusion_from_env(g, EnvCovMatrix.fixed(q)), 0.7 * q)

    def test_commuting_diagonals(self):
        g = DampingMatrix((1.0, 2.0))
        q = np.diag([3.0, 3.0, 5.0, 5.0])
        np.testing.assert_allclose(diffusion_from_env(g, q), np.diag([3, 3, 10, 10]))

    def test_general_form_symmetrizes(self):
        g = np.diag([1.0, 2.0])
        q = np.array([[1.0, 0.5], [0.5, 1.0]])
        f = diffusion_from_env(g, q)
        np.testing.assert_allclose(f, 0.5 * (g @ q + q @ g))

    def test_mismatch(self):
        with pytest.raises(DimensionError):
            diffusion_from_env(DampingMatrix((1.0,)), np.eye(4))


class TestStates:
    def test_thermal(self):
        np.testing.assert_array_equal(thermal_cm(0, 1), 0.5 * np.eye(2))
        np.testing.assert_array_equal(thermal_cm(1, 1), 1.5 * np.eye(2))
        np.testing.assert_array_equal(thermal_cm(0.5, 2), np.eye(4))
        with pytest.raises(DomainError):
            thermal_cm(-0.1)

    def test_squeezed_no_squeezing(self):
        np.testing.assert_allclose(squeezed_thermal_cm(0.7, 0.0, 1.0, 2.0, 3.0), thermal_cm(0.7, 1))

    def test_squeezed_vacuum_example(self):
        expected = np.array([[0.5 * np.cosh(1), 0.5 * np.sinh(1)], [0.5 * np.sinh(1), 0.5 * np.cosh(1)]])
        np.testing.assert_allclose(squeezed_thermal_cm(0.0, 0.5, 0.0, 0.0, 0.0), expected, rtol=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0, 5), st.floats(-1.5, 1.5), st.floats(-np.pi, np.pi), st.floats(-3, 3), st.floats(0, 10))
    def test_squeezed_determinant(self, nbar, r, theta, omega_p, t):
        q = squeezed_thermal_cm(nbar, r, theta, omega_p, t)
        assert np.linalg.det(q).real == pytest.approx((nbar + 0.5) ** 2, rel=1e-9)
        assert bona_fide_check(q).ok

    @pytest.mark.parametrize("t", [0.0, 0.4, 2.5])
    def test_squeezed_eigenvalues_time_independent(self, t):
        nbar, r = 0.4, 0.3
        w = np.linalg.eigvalsh(squeezed_thermal_cm(nbar, r, 0.0, 1.3, t))
        np.testing.assert_allclose(w, sorted([(nbar + 0.5) * np.exp(-2 * r), (nbar + 0.5) * np.exp(2 * r)]))


class TestContainers:
    def test_damping(self):
        g = DampingMatrix((1.0, 2.0))
        np.testing.assert_array_equal(np.asarray(g), np.diag([1, 1, 2, 2]))
        with pytest.raises(DomainError):
            DampingMatrix((-1.0,))

    def test_env_requires_one_source(self):
        with pytest.raises(ValidationError):
            EnvCovMatrix()

    def test_system_dimension_checks(self):
        with pytest.raises(DimensionError):
            LyapunovSystem(np.zeros((2, 2)), DampingMatrix((1.0, 1.0)), EnvCovMatrix.fixed(thermal_cm(0, 1)))

    def test_commuting_flag_enforced(self):
        q = squeezed_thermal_cm(0, 0.3)
        q2 = np.zeros((4, 4), dtype=complex)
        q2[:2, :2] = q
        q2[2:, 2:] = q
        q2[0, 2] = q2[2, 0] = 0.1
        with pytest.raises(ValidationError):
            LyapunovSystem(np.zeros((4, 4)), DampingMatrix((1.0, 2.0)), EnvCovMatrix.fixed(q2))
