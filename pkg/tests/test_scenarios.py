import numpy as np
import pytest

from gauss_onsager import scenarios
from gauss_onsager.dynamics import integrate, stability, steady_state
from gauss_onsager.errors import DomainError
from gauss_onsager.model import thermal_cm
from gauss_onsager.thermo import (
    entropy_flux,
    entropy_production,
    flow_matrix,
    production_from_flow,
    production_matrix,
    scalar_onsager,
)
from gauss_onsager.scenarios import ScenarioSpec

REL = 1e-8

GRID = [
    ScenarioSpec("opo"),
    ScenarioSpec("opo", {"gamma": 2.0, "chi": 0.9, "nbar": 0.4}),
    ScenarioSpec("opo", {"chi": -0.3, "nbar": 1.5}),
    ScenarioSpec("squeezed_bath"),
    ScenarioSpec("squeezed_bath", {"gamma": 0.3, "omega": 2.0, "omega_p": 1.1, "nbar": 0.8, "r": 0.2, "theta": 1.0}),
    ScenarioSpec("two_mode"),
    ScenarioSpec("two_mode", {"gamma_a": 0.5, "gamma_b": 3.0, "chi": 1.1, "nbar": 0.3}),
]


def numerical(spec):
    sys = scenarios.stationary_system(spec)
    theta = steady_state(sys)
    g, q = sys.damping.matrix, sys.env()
    return g, q, theta


@pytest.mark.parametrize("spec", GRID, ids=lambda s: f"{s.kind}-{sorted(s.params.items())}")
class TestClosedForms:
    def test_rates(self, spec):
        g, q, theta = numerical(spec)
        cf = scenarios.closed_forms(spec)
        assert entropy_production(g, q, theta) == pytest.approx(cf.Pi, rel=REL, abs=1e-12)
        assert entropy_flux(g, q, theta) == pytest.approx(cf.Phi, rel=REL, abs=1e-12)

    def test_matrices(self, spec):
        g, q, theta = numerical(spec)
        cf = scenarios.closed_forms(spec)
        scale = max(1.0, np.abs(theta).max())
        if cf.theta_ss is not None:
            np.testing.assert_allclose(theta, cf.theta_ss, rtol=REL, atol=REL * scale)
        if cf.flow is not None:
            np.testing.assert_allclose(flow_matrix(g, q, theta), cf.flow, rtol=REL, atol=1e-12)
        if cf.production is not None:
            np.testing.assert_allclose(production_matrix(g, q, theta), cf.production, rtol=REL, atol=1e-12)

    def test_onsager(self, spec):
        g, q, theta = numerical(spec)
        cf = scenarios.closed_forms(spec)
        assert production_from_flow(flow_matrix(g, q, theta), g) == pytest.approx(cf.Pi, rel=REL, abs=1e-12)


class TestOPO:
    def test_demo_values(self):
        cf = scenarios.opo_closed_forms(1.0, 0.25)
        assert cf.Pi == pytest.approx(1 / 3)
        np.testing.assert_allclose(cf.theta_ss, np.array([[2, -1], [-1, 2]]) / 3)
        np.testing.assert_allclose(cf.flow, [[1 / 3, -2 / 3], [-2 / 3, 1 / 3]])
        np.testing.assert_allclose(cf.production, [[1 / 3, -1 / 6], [-1 / 6, 1 / 3]])

    @pytest.mark.parametrize("nbar", [0.0, 1.0, 5.0])
    def test_temperature_independent(self, nbar):
        g, q, theta = numerical(ScenarioSpec("opo", {"nbar": nbar}))
        assert entropy_production(g, q, theta) == pytest.approx(1 / 3, rel=1e-9)

    def test_production_grows_towards_threshold(self):
        chis = np.linspace(0.05, 0.45, 9)
        pis = [scenarios.opo_closed_forms(1.0, c).Pi for c in chis]
        assert np.all(np.diff(pis) > 0)

    @pytest.mark.parametrize("chi", [0.5, 0.6, -0.7])
    def test_unstable(self, chi):
        with pytest.raises(DomainError):
            scenarios.opo_closed_forms(1.0, chi)
        assert not stability(scenarios.build_opo(1.0, chi)).stable

    def test_relaxation_branch(self):
        # no drive: Theta relaxes to Q, production follows phi^2 / (phi + gamma)
        gamma, nbar = 1.0, 0.5
        sys = scenarios.build_opo(gamma, 0.0, nbar)
        traj = integrate(sys, thermal_cm(1.5, 1), 3.0, 0.01)
        q = sys.env()
        for theta in traj.states[::50]:
            phi = entropy_flux(sys.damping.matrix, q, theta)
            assert entropy_production(sys.damping.matrix, q, theta) == pytest.approx(
                scalar_onsager(phi, gamma), rel=1e-10, abs=1e-14)

    def test_law_of_cooling(self):
        assert scenarios.law_of_cooling(2.0, 0.5, 1.0, 1.0) == pytest.approx(1 + np.exp(-1))
        traj = integrate(scenarios.build_opo(1.0, 0.0, 0.5), 2.0 * np.eye(2), 1.0, 0.01)
        assert traj.final[0, 0].real == pytest.approx(1 + np.exp(-1), abs=1e-10)


class TestSqueezedBath:
    def test_demo_value(self):
        cf = scenarios.squeezed_bath_closed_forms(1.0, 1.0, 1.5, 0.0, 0.5, 0.0)
        assert cf.Phi == pytest.approx(0.5 * np.sinh(1.0) ** 2, rel=1e-14)
        assert cf.Phi == pytest.approx(0.690549, abs=1e-6)

    def test_coherence_reduction(self):
        cf = scenarios.squeezed_bath_closed_forms(1.0, 1.0, 1.5, 0.0, 0.5, 0.0)
        m = 0.5 * np.sinh(1.0)
        assert abs(cf.m_tilde) / m == pytest.approx(1 / np.sqrt(2), rel=1e-14)

    @pytest.mark.parametrize("nbar", [0.0, 1.0, 5.0])
    def test_flux_temperature_independent(self, nbar):
        g, q, theta = numerical(ScenarioSpec("squeezed_bath", {"nbar": nbar}))
        assert entropy_flux(g, q, theta) == pytest.approx(0.5 * np.sinh(1.0) ** 2, rel=1e-9)

    def test_large_detuning_limit(self):
        gamma, r = 0.7, 0.4
        cf = scenarios.squeezed_bath_closed_forms(gamma, 1.0, 1.0 + 1e5, 0.0, r)
        assert cf.Phi == pytest.approx(gamma * np.sinh(2 * r) ** 2, rel=1e-9)

    @pytest.mark.parametrize("params", [{"omega_p": 1.0}, {"r": 0.0}])
    def test_no_flux(self, params):
        spec = ScenarioSpec("squeezed_bath", params)
        assert scenarios.closed_forms(spec).Phi == 0.0
        g, q, theta = numerical(spec)
        assert entropy_flux(g, q, theta) == pytest.approx(0.0, abs=1e-12)

    def test_lab_frame_trajectory(self):
        spec = ScenarioSpec("squeezed_bath")
        sys = scenarios.build(spec)
        traj = integrate(sys, thermal_cm(0, 1), 40.0, 0.01)
        t = traj.times[-1]
        phi = entropy_flux(sys.damping.matrix, sys.env(t), traj.final)
        assert phi == pytest.approx(scenarios.closed_forms(spec).Phi, rel=1e-6)


class TestTwoMode:
    def test_demo_values(self):
        cf = scenarios.two_mode_closed_forms(1.0, 2.0, 1.0)
        assert cf.Pi == pytest.approx(8 / 3)
        s2 = np.sqrt(2)
        expected = 4 / 3 * np.array([[1, 0, 0, -s2], [0, 1, -s2, 0], [0, -s2, 1, 0], [-s2, 0, 0, 1]])
        np.testing.assert_allclose(cf.flow, expected)

    @pytest.mark.parametrize("nbar", [0.0, 1.0, 5.0])
    def test_temperature_independent(self, nbar):
        g, q, theta = numerical(ScenarioSpec("two_mode", {"nbar": nbar}))
        assert entropy_production(g, q, theta) == pytest.approx(8 / 3, rel=1e-9)

    @pytest.mark.parametrize("gamma_a, gamma_b, chi", [(1.0, 4.0, 2.0), (1.0, 2.0, 1.5), (0.5, 0.5, -0.6)])
    def test_unstable(self, gamma_a, gamma_b, chi):
        with pytest.raises(DomainError):
            scenarios.two_mode_closed_forms(gamma_a, gamma_b, chi)
        assert not stability(scenarios.build_two_mode(gamma_a, gamma_b, chi)).stable


class TestSpec:
    def test_defaults_merged(self):
        spec = ScenarioSpec("opo", {"chi": 0.1})
        assert spec.params == {"gamma": 1.0, "chi": 0.1, "nbar": 0.0}
        assert spec.replace(gamma=2.0).params["gamma"] == 2.0

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            ScenarioSpec("laser")

    def test_unknown_parameter(self):
        with pytest.raises(DomainError):
            ScenarioSpec("opo", {"omega": 1.0})

    @pytest.mark.parametrize("spec, stable", [
        (ScenarioSpec("opo", {"chi": 0.49}), True),
        (ScenarioSpec("opo", {"chi": 0.5}), False),
        (ScenarioSpec("two_mode", {"chi": 1.41}), True),
        (ScenarioSpec("two_mode", {"chi": 1.42}), False),
    ])
    def test_stable_region_matches_spectrum(self, spec, stable):
        assert spec.is_stable_region() is stable
        assert stability(scenarios.build(spec)).stable is stable

    def test_nonpositive_damping(self):
        with pytest.raises(DomainError):
            scenarios.build(ScenarioSpec("opo", {"gamma": 0.0}))
