import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindblift.errors import ContractViolation, DimensionMismatch, EigenoperatorWarning, StepSizeError
from lindblift.lindblad_model import (
    JumpChannel,
    MasterEquation,
    StandardForm,
    from_standard_form,
    generator_norm_bound,
    min_rk4_steps,
    rhs,
    rk4_evolve,
    standard_form_rhs,
)
from lindblift.operators import EXCITED, GROUND, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, destroy, number

from conftest import random_density, random_hermitian, random_matrix, random_model

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def qubit_sf(rabi=5.0, gamma=1.0):
    return StandardForm(0.5 * rabi * SIGMA_Z, lowering_channels=((SIGMA_MINUS, gamma),))


def eq17(gamma, t):
    """Zero-temperature decay of the excited state, written out by hand."""
    e = math.exp(-gamma * t)
    return np.diag([e, 1 - e]).astype(complex)


class TestFromStandardForm:
    def test_qubit_drift(self):
        rabi, gamma = 5.0, 1.0
        model = from_standard_form(qubit_sf(rabi, gamma))
        expected = 0.5 * (rabi * SIGMA_Z - 1j * gamma * SIGMA_PLUS @ SIGMA_MINUS)
        np.testing.assert_allclose(model.drift, expected, atol=1e-15)
        assert len(model.channels) == 1
        np.testing.assert_array_equal(model.channels[0].operator, SIGMA_MINUS)
        assert model.channels[0].rate == gamma
        assert model.trace_preserving_by_construction

    def test_cavity_drift(self):
        w, k, n_max = 2.0, 0.3, 6
        a = destroy(n_max)
        model = from_standard_form(StandardForm(w * number(n_max), lowering_channels=((a, k),)))
        np.testing.assert_allclose(model.drift, (w - 0.5j * k) * number(n_max), atol=1e-15)
        np.testing.assert_array_equal(model.channels[0].operator, a)

    def test_zero_rates_give_closed_system(self):
        h0 = 0.5 * SIGMA_Z
        model = from_standard_form(
            StandardForm(h0, lowering_channels=((SIGMA_MINUS, 0.0),), raising_channels=((SIGMA_PLUS, 0.0),))
        )
        np.testing.assert_array_equal(model.drift, h0)
        assert model.channels == ()

    def test_anti_hermitian_part_is_back_action(self):
        sf = StandardForm(0.5 * SIGMA_Z, ((SIGMA_MINUS, 1.3),), ((SIGMA_PLUS, 0.4),))
        assert from_standard_form(sf).anti_hermitian_residual() <= 1e-15

    def test_negative_rate_rejected(self):
        with pytest.raises(ContractViolation):
            StandardForm(SIGMA_Z, lowering_channels=((SIGMA_MINUS, -1.0),))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            StandardForm(SIGMA_Z, lowering_channels=((destroy(3), 1.0),))

    def test_non_hermitian_h0_rejected(self):
        with pytest.raises(ContractViolation):
            StandardForm(SIGMA_PLUS)

    def test_eigenoperator_warning(self):
        with pytest.warns(EigenoperatorWarning):
            from_standard_form(StandardForm(0.5 * SIGMA_Z, lowering_channels=((SIGMA_PLUS + SIGMA_MINUS, 1.0),)))

    def test_no_warning_for_true_eigenoperators(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            from_standard_form(StandardForm(0.5 * SIGMA_Z, ((SIGMA_MINUS, 1.0),), ((SIGMA_PLUS, 0.5),)))

    @settings(max_examples=30, deadline=None)
    @given(seeds, st.floats(0.1, 5.0), st.floats(0.0, 2.0), st.floats(0.0, 2.0))
    def test_superoperator_equivalence(self, seed, w, k_rate, g_rate):
        r = np.random.default_rng(seed)
        n_max = 4
        a = destroy(n_max)
        sf = StandardForm(w * number(n_max), ((a, k_rate),), ((a.conj().T, g_rate),))
        model = from_standard_form(sf)
        rho = random_hermitian(r, n_max + 1)
        diff = rhs(model, rho) - standard_form_rhs(sf, rho)
        assert np.max(np.abs(diff)) <= 1e-12 * max(1.0, np.max(np.abs(rho)))


class TestRhs:
    def test_closed_system_commutator(self, rng):
        h, rho = random_hermitian(rng, 3), random_density(rng, 3)
        model = MasterEquation(h)
        np.testing.assert_allclose(rhs(model, rho), -1j * (h @ rho - rho @ h), atol=1e-15)

    def test_qubit_at_excited_state(self):
        gamma = 0.7
        out = rhs(from_standard_form(qubit_sf(5.0, gamma)), EXCITED)
        np.testing.assert_allclose(out, gamma * (GROUND - EXCITED), atol=1e-15)

    def test_qubit_matches_difference_quotient_of_decay_law(self):
        gamma, t0, h = 0.7, 0.5, 1e-5
        model = from_standard_form(qubit_sf(5.0, gamma))
        quotient = (eq17(gamma, t0 + h) - eq17(gamma, t0 - h)) / (2 * h)
        assert np.max(np.abs(rhs(model, eq17(gamma, t0)) - quotient)) <= 1e-9

    def test_traceless_for_trace_preserving(self, rng):
        model = random_model(rng, 4, 3)
        assert abs(np.trace(rhs(model, random_matrix(rng, 4)))) <= 1e-13 * 10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            rhs(from_standard_form(qubit_sf()), np.eye(3))

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(2, 4), st.integers(0, 3))
    def test_hermiticity_propagation(self, seed, n, k):
        r = np.random.default_rng(seed)
        model = random_model(r, n, k)
        rho = random_matrix(r, n)
        lhs = rhs(model, rho).conj().T
        assert np.max(np.abs(lhs - rhs(model, rho.conj().T))) <= 1e-13 * max(1.0, np.max(np.abs(lhs)))

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(2, 4), st.integers(1, 3))
    def test_trace_identity(self, seed, n, k):
        r = np.random.default_rng(seed)
        model = random_model(r, n, k)
        assert abs(np.trace(rhs(model, random_density(r, n)))) <= 1e-13 * 10


class TestRk4:
    def test_zero_time(self, rng):
        rho = random_density(rng, 3)
        out = rk4_evolve(random_model(rng, 3, 2), rho, 0.0, 10)
        np.testing.assert_array_equal(out, rho)

    def test_qubit_decay(self):
        out = rk4_evolve(from_standard_form(qubit_sf(5.0, 1.0)), EXCITED, 1.0, 1000)
        assert abs(out[0, 0] - math.exp(-1)) <= 1e-9

    def test_fourth_order_convergence(self):
        model = from_standard_form(qubit_sf(5.0, 1.0))
        rho0 = 0.5 * np.ones((2, 2), dtype=complex)
        r500, r1000, r2000 = (rk4_evolve(model, rho0, 1.0, s) for s in (500, 1000, 2000))
        coarse = np.linalg.norm(r1000 - r500)
        fine = np.linalg.norm(r2000 - r1000)
        assert fine <= coarse / 15
        assert 12 < coarse / fine < 20

    def test_step_guard(self):
        model = from_standard_form(qubit_sf(5.0, 1.0))
        with pytest.raises(StepSizeError):
            rk4_evolve(model, EXCITED, 1.0, 10)
        steps = min_rk4_steps(model, 1.0)
        assert (1.0 / steps) * generator_norm_bound(model) <= 0.1
        rk4_evolve(model, EXCITED, 1.0, steps)

    def test_bad_steps(self):
        with pytest.raises(ContractViolation):
            rk4_evolve(from_standard_form(qubit_sf()), EXCITED, 1.0, 0)

    def test_norm_bound_dominates_generator(self, rng):
        model = random_model(rng, 3, 2)
        bound = generator_norm_bound(model)
        for _ in range(20):
            rho = random_matrix(rng, 3)
            assert np.linalg.norm(rhs(model, rho)) <= bound * np.linalg.norm(rho) * (1 + 1e-12)

    @pytest.mark.parametrize("n,k", [(2, 1), (3, 2), (4, 3)])
    def test_preserves_trace_and_hermiticity(self, rng, n, k):
        model = random_model(rng, n, k)
        gamma_min = min(ch.rate for ch in model.channels)
        t = 10 / gamma_min
        rho = rk4_evolve(model, random_density(rng, n), t, min_rk4_steps(model, t) * 2)
        assert abs(np.trace(rho) - 1) <= 1e-10
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-10


def test_jump_channel_validation():
    with pytest.raises(ContractViolation):
        JumpChannel(SIGMA_MINUS, -0.1)
    with pytest.raises(ContractViolation):
        JumpChannel(SIGMA_MINUS, float("nan"))
    with pytest.raises(DimensionMismatch):
        MasterEquation(SIGMA_Z, [(destroy(2), 1.0)])
