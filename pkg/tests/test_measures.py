"""Tests of spectral measures, bound states, and their discretization."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ab_spectral.errors import ConfigurationError, DomainError
from ab_spectral.measures import (
    ExtensionParams,
    ac_density,
    atom_weight,
    bound_state_energy,
    channel_measure,
    discretize,
    gauss_legendre,
    has_bound_state,
    reduce_theta,
    spectral_measure,
)
from ab_spectral.special import theta_kappa


class TestReduceTheta:
    @settings(max_examples=60, deadline=None)
    @given(theta=st.floats(-50.0, 50.0))
    def test_decomposition(self, theta):
        t, n = reduce_theta(theta)
        assert 0.0 <= t < math.pi
        assert t + n * math.pi == pytest.approx(theta, abs=1e-12)

    def test_exact_pi_shift(self):
        # when theta + pi rounds exactly, reduction returns theta bitwise
        for theta in (0.25, 0.5, 1.0):
            t, n = reduce_theta(theta + math.pi)
            assert t == theta and n == 1

    def test_theta_sign(self):
        assert ExtensionParams(0.3, 0.5).theta_sign == 1
        assert ExtensionParams(0.3, 0.5 + math.pi).theta_sign == -1
        assert ExtensionParams(0.3, 0.5 + 2 * math.pi).theta_sign == 1
        assert ExtensionParams(0.3, 0.5 - math.pi).theta_sign == -1


class TestBoundStates:
    @pytest.mark.parametrize("kappa", np.linspace(-0.9, 0.9, 19))
    def test_half_pi_energy_is_minus_one(self, kappa):
        energy = bound_state_energy(ExtensionParams(float(kappa), math.pi / 2))
        assert energy == pytest.approx(-1.0, abs=1e-12)

    def test_quarter_pi_zero_order(self):
        energy = bound_state_energy(ExtensionParams(0.0, math.pi / 4))
        assert energy == pytest.approx(-math.exp(math.pi), abs=1e-12 * math.exp(math.pi))

    def test_half_pi_weight_zero_order(self):
        assert atom_weight(ExtensionParams(0.0, math.pi / 2)) == pytest.approx(
            math.pi**2 / 2.0, abs=1e-12
        )

    def test_direct_formula_agreement(self):
        # the log1p evaluation equals the textbook ratio power
        kappa, t = 0.45, 1.2
        tk = theta_kappa(kappa)
        direct = -((math.sin(t + tk) / math.sin(t - tk)) ** (1.0 / kappa))
        assert bound_state_energy(ExtensionParams(kappa, t)) == pytest.approx(
            direct, rel=1e-13
        )

    def test_branch_boundary_is_strict(self):
        kappa = 0.6
        tk = theta_kappa(kappa)
        assert not has_bound_state(ExtensionParams(kappa, tk))
        assert not has_bound_state(ExtensionParams(kappa, math.pi - tk))
        assert has_bound_state(ExtensionParams(kappa, tk + 1e-9))

    def test_no_theta_for_large_kappa(self):
        with pytest.raises(DomainError):
            has_bound_state(ExtensionParams(1.2, 0.3))
        with pytest.raises(DomainError):
            bound_state_energy(ExtensionParams(-1.0, 0.3))

    @settings(max_examples=40, deadline=None)
    @given(kappa=st.floats(-0.9, 0.9), theta=st.floats(0.1, math.pi - 0.1))
    def test_weight_positive_whenever_bound(self, kappa, theta):
        params = ExtensionParams(kappa, theta)
        if has_bound_state(params):
            assert atom_weight(params) > 0.0
            assert bound_state_energy(params) < 0.0
        else:
            assert atom_weight(params) is None

    def test_kappa_zero_limit_of_formulas(self):
        for theta in (0.9, math.pi / 2, 2.2):
            small = ExtensionParams(1e-4, theta)
            zero = ExtensionParams(0.0, theta)
            e0 = bound_state_energy(zero)
            w0 = atom_weight(zero)
            assert bound_state_energy(small) == pytest.approx(e0, rel=1e-6)
            assert atom_weight(small) == pytest.approx(w0, rel=1e-6)


class TestAcDensity:
    @pytest.mark.parametrize("kappa", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("E", [0.1, 1.0, 10.0])
    def test_collapse_at_reference_angle(self, kappa, E):
        value = ac_density(ExtensionParams(kappa, theta_kappa(kappa)), E)
        assert value == pytest.approx(0.5 * E**kappa, rel=1e-13)

    @pytest.mark.parametrize("kappa", [1.0, 1.5, 3.0, -2.0])
    def test_fixed_measure_off_extension_family(self, kappa):
        E = np.array([0.5, 2.0, 40.0])
        assert np.allclose(
            ac_density(ExtensionParams(kappa), E), 0.5 * E ** abs(kappa), rtol=1e-14
        )

    def test_zero_order_formula(self):
        theta, E = 1.1, 3.7
        c, s = math.cos(theta), math.sin(theta)
        expected = 0.5 / ((c - math.log(E) * s / math.pi) ** 2 + s * s)
        assert ac_density(ExtensionParams(0.0, theta), E) == pytest.approx(
            expected, rel=1e-14
        )

    def test_negative_energy_density_vanishes(self):
        assert ac_density(ExtensionParams(0.3, 1.0), -2.0) == 0.0

    def test_periodicity_mod_pi(self):
        E = np.geomspace(1e-3, 100.0, 64)
        a = ac_density(ExtensionParams(0.3, 1.0), E)
        b = ac_density(ExtensionParams(0.3, 1.0 + math.pi), E)
        assert np.max(np.abs(a - b)) < 1e-14

    @settings(max_examples=40, deadline=None)
    @given(
        kappa=st.floats(-0.95, 0.95),
        theta=st.floats(0.0, math.pi, exclude_max=True),
        E=st.floats(1e-6, 1e3),
    )
    def test_density_nonnegative(self, kappa, theta, E):
        assert ac_density(ExtensionParams(kappa, theta), E) >= 0.0


class TestDiscretize:
    def test_weights_integrate_power_density(self):
        # integral of (1/2) E**kappa over [0, E_max] has a closed form
        kappa, e_max = 1.5, 20.0
        quad = discretize(spectral_measure(ExtensionParams(kappa)), e_max)
        exact = 0.5 * e_max ** (kappa + 1.0) / (kappa + 1.0)
        assert np.sum(quad.e_weights) == pytest.approx(exact, rel=1e-12)

    def test_endpoint_singularity_absorbed(self):
        # kappa < 0 gives an integrable E**kappa blow-up at 0; graded panels
        # must integrate it to usable accuracy without special-casing (the
        # innermost ungraded panel limits a strong E**-0.7 singularity to ~1e-3)
        kappa = -0.7
        quad = discretize(
            spectral_measure(ExtensionParams(kappa, theta_kappa(kappa))), 10.0
        )
        exact = 0.5 * 10.0 ** (kappa + 1.0) / (kappa + 1.0)
        assert np.sum(quad.e_weights) == pytest.approx(exact, rel=2e-3)

    def test_atoms_carried_through(self):
        quad = discretize(spectral_measure(ExtensionParams(0.3, math.pi / 2)), 5.0)
        assert len(quad.atoms) == 1
        energy, weight = quad.atoms[0]
        assert energy == pytest.approx(-1.0, abs=1e-12)
        assert weight > 0

    def test_zero_e_max_gives_empty_grid(self):
        quad = discretize(spectral_measure(ExtensionParams(1.5)), 0.0)
        assert len(quad.e_nodes) == 0

    def test_node_budget_floor(self):
        with pytest.raises(DomainError):
            discretize(spectral_measure(ExtensionParams(1.5)), 1.0, node_budget=8)

    def test_deterministic(self):
        m = spectral_measure(ExtensionParams(0.3, 1.0))
        a = discretize(m, 100.0)
        b = discretize(m, 100.0)
        assert np.array_equal(a.e_nodes, b.e_nodes)
        assert np.array_equal(a.e_weights, b.e_weights)


class TestChannelMeasure:
    class _Spec:
        def theta_for(self, m, p):
            if m != 0:
                raise KeyError(m)
            return math.pi / 2

    def test_critical_channel_uses_theta(self):
        measure = channel_measure(0.5, self._Spec(), 0, 0.0)
        assert len(measure.atoms) == 1  # theta = pi/2 always binds

    def test_off_critical_ignores_theta(self):
        measure = channel_measure(0.5, self._Spec(), 2, 0.0)  # kappa = 2.5
        assert measure.atoms == ()
        assert measure.density(4.0) == pytest.approx(0.5 * 4.0**2.5)

    def test_missing_entry_is_configuration_error(self):
        with pytest.raises(ConfigurationError):
            channel_measure(0.5, self._Spec(), -1, 0.0)  # kappa = -0.5, no entry


class TestCsv:
    def test_measure_csv_shape(self):
        measure = spectral_measure(ExtensionParams(0.3, math.pi / 2))
        out = io.StringIO()
        measure.write_csv(out, [0.5, 1.0])
        lines = out.getvalue().split("\n")
        assert lines[0].startswith("# atom ")
        assert lines[1] == "E,density"
        assert len([ln for ln in lines if ln and not ln.startswith("#")]) == 3

    def test_gauss_legendre_rule(self):
        x, w = gauss_legendre(1.0, 3.0, 24)
        assert np.sum(w) == pytest.approx(2.0, rel=1e-14)
        assert np.sum(w * x**3) == pytest.approx((3.0**4 - 1.0) / 4.0, rel=1e-13)
