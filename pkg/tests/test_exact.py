import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twolevel.bloch import bloch_from_spinor
from twolevel.errors import BranchTrackingFailure, DegenerateFrequency
from twolevel.exact import (
    ClosedForm,
    ConstantFieldSolution,
    SechSolutionParams,
    TanhSolutionParams,
    _ansatz,
    _sech_geometry,
    constant_q_components,
    constant_solution,
    fit_exponentials,
    match_pulse,
    out_amplitudes,
    scattering_probabilities,
    sech_branch_arg,
    sech_out_asymptotics,
    sech_solution,
    survival_probability,
    tanh_solution,
    track_branch,
    transition_probability,
)
from twolevel.fields import FieldConfiguration, Layout, Sech, Tanh
from twolevel.quantum import Spinor, evolve_schrodinger, second_order_residual
from twolevel.special import HypParams

positive = st.floats(0.2, 2.5)


def sech_transition_closed_form(F0, E):
    """Independent transition probability for f = f0 sech(t/T)."""
    return math.sin(math.pi * F0) ** 2 / math.cosh(math.pi * E) ** 2


# ---------------------------------------------------------------- constant


@settings(max_examples=25, deadline=None)
@given(eps=positive, f=st.floats(-2, 2), phase=st.floats(0, 2 * math.pi))
def test_constant_solution_solves_schrodinger(eps, f, phase):
    sol = ConstantFieldSolution(eps, f, 0.6, 0.8 * cmath.exp(1j * phase))
    tr = evolve_schrodinger(sol.field(), constant_solution(sol, 0.0), 0.0, 3.0, 1e-12)
    np.testing.assert_allclose(tr.final.to_array(), constant_solution(sol, 3.0).to_array(), atol=1e-9)


def test_constant_eigenstates_have_definite_energy():
    sol = ConstantFieldSolution(0.7, -0.4)
    psi = constant_solution(sol, 0.0).to_array()
    H = -0.5 * np.array([[-2 * sol.f, -2 * sol.epsilon], [-2 * sol.epsilon, 2 * sol.f]])
    # the p-term is the lower state, E = -omega
    np.testing.assert_allclose(H @ psi, -sol.omega * psi, atol=1e-14)


@pytest.mark.parametrize("t", [0.0, 0.4, 2.3])
def test_constant_q_components_match_spinor(t):
    sol = ConstantFieldSolution(0.9, 0.35, 0.6, 0.8 * cmath.exp(0.7j))
    q = constant_q_components(sol, t)
    ref = bloch_from_spinor(constant_solution(sol, t))
    np.testing.assert_allclose(q.q, ref.q, atol=1e-14)
    assert q.q0 == pytest.approx(1.0)


def test_q2_sign_matters():
    sol = ConstantFieldSolution(0.9, 0.35, 0.6, 0.8)
    t = 0.4
    q = constant_q_components(sol, t).q
    assert abs(q[1]) > 0.1
    assert abs(-q[1] - bloch_from_spinor(constant_solution(sol, t)).q[1]) > 0.1


# -------------------------------------------------------------------- tanh


@pytest.mark.parametrize("abE", [(1.0, 0.5, 1.0), (0.5, 2.0, 0.5), (2.0, -1.0, 1.5)])
def test_tanh_residual_small(abE):
    cf = ClosedForm(TanhSolutionParams.dimensionless(*abE, c1=0.3, c2=0.8j))
    for t in np.linspace(-6, 6, 13):
        assert abs(second_order_residual(cf, cf.config, t)) < 1e-9


def test_tanh_matches_incoming_plane_wave():
    base = TanhSolutionParams.dimensionless(1.0, 0.5, 1.0, T=2.0)
    params = match_pulse(base, 0.6, 0.8j)
    sol = ConstantFieldSolution(base.epsilon, base.f1 - base.f0, 0.6, 0.8j)
    t = -30 * base.T
    np.testing.assert_allclose(ClosedForm(params).spinor(t).to_array(), constant_solution(sol, t).to_array(), atol=1e-10)


@pytest.mark.parametrize("f0", [1e-3, 1e-5])
def test_tanh_tends_to_constant_as_f0_vanishes(f0):
    base = TanhSolutionParams(f0, 0.6, 1.0, 0.8)
    params = match_pulse(base, 0.6, 0.8)
    ref = ConstantFieldSolution(0.8, 0.6, 0.6, 0.8)
    for t in (-3.0, 0.0, 2.0):
        assert abs(tanh_solution(params, t) - constant_solution(ref, t).psi1) < 50 * f0


def test_tanh_array_evaluation():
    params = TanhSolutionParams.dimensionless(1.0, 0.5, 1.0)
    ts = np.array([-1.0, 0.0, 1.0])
    np.testing.assert_array_equal(tanh_solution(params, ts), [tanh_solution(params, t) for t in ts])


def test_tanh_degenerate_frequency():
    with pytest.raises(DegenerateFrequency):
        match_pulse(TanhSolutionParams.dimensionless(1.0, 1.0, 0.0), 1.0, 0.0)


def test_from_field_round_trip_and_type_check():
    cfg = FieldConfiguration(0.5, Tanh(1.0, 0.2, 2.0))
    assert TanhSolutionParams.from_field(cfg).field() == cfg
    with pytest.raises(TypeError):
        TanhSolutionParams.from_field(FieldConfiguration(0.5, Sech(1.0, 1.0)))
    with pytest.raises(TypeError):
        SechSolutionParams.from_field(FieldConfiguration(0.5, Sech(1.0, 1.0), Layout.X_DRIVE))


@settings(max_examples=15, deadline=None)
@given(a=positive, b=st.floats(-2, 2), E=positive)
def test_tanh_probabilities_are_unitary(a, b, E):
    params = TanhSolutionParams.dimensionless(a, b, E)
    for state in ("lower", "upper"):
        p, s = scattering_probabilities(params, state)
        assert 0 <= p <= 1 + 1e-9
        assert p + s == pytest.approx(1.0, abs=1e-8)


def test_no_coupling_no_transition():
    params = TanhSolutionParams.dimensionless(1.0, 0.5, 0.0)
    assert scattering_probabilities(params) == (0.0, 1.0)


# -------------------------------------------------------------------- sech


def test_verbatim_sech_triple_fails_the_equation():
    # (mu, 1/2 + 2 nu - mu; 1 + 2 mu) does not solve the sech equation
    params = SechSolutionParams.dimensionless(0.8, 0.6)
    mu, nu = params.mu, params.nu
    cfg = params.field()
    for t in (-2.0, -0.5):
        z, w, ln_z, ln_w, zdot, zddot, _ = _sech_geometry(params, t)
        verbatim = HypParams(mu, 0.5 + 2 * nu - mu, 1 + 2 * mu)
        bad = _ansatz(verbatim, mu, nu, z, w, ln_z, ln_w, zdot, zddot, 2)
        good = _ansatz(params.hyp_params(mu), mu, nu, z, w, ln_z, ln_w, zdot, zddot, 2)

        class Probe:
            def __init__(self, terms):
                self.terms = terms

            def derivatives(self, _t):
                return self.terms

        assert abs(second_order_residual(Probe(good), cfg, t)) < 1e-12
        assert abs(second_order_residual(Probe(bad), cfg, t)) > 1e-2


@pytest.mark.parametrize("F0, E", [(0.5, 0.5), (1.0, 1.0), (0.8, 0.3), (1.7, 0.9)])
def test_sech_residual_on_both_sides(F0, E):
    cf = ClosedForm(SechSolutionParams.dimensionless(F0, E, c1=0.3 + 0.2j, c2=0.7))
    for t in (-4.0, -1.0, -1e-9, 0.0, 1e-9, 1.0, 4.0):
        assert abs(second_order_residual(cf, cf.config, t)) < 1e-9


def test_sech_continuous_through_the_pulse_centre():
    params = SechSolutionParams.dimensionless(0.8, 0.6, c1=0.4, c2=0.9j)
    left, right = sech_solution(params, -1e-10), sech_solution(params, 1e-10)
    assert abs(left - right) < 1e-8


def test_sech_reflection_symmetry():
    # f is even, so conj(psi1(-t)) solves the same equation as psi1(t).  Match it
    # to the closed-form basis on one side of the pulse; the continuation must
    # then reproduce it on the other side.
    F0, E = 0.8, 0.6
    basis = [SechSolutionParams.dimensionless(F0, E, c1=1, c2=0), SechSolutionParams.dimensionless(F0, E, c1=0, c2=1)]
    target = ClosedForm(SechSolutionParams.dimensionless(F0, E, c1=0.6, c2=0.3 - 0.5j))

    def reflected(t):
        psi, dpsi, _ = target.derivatives(-t)
        return np.conj(psi), -np.conj(dpsi)

    t0 = -3.0
    M = np.array([[ClosedForm(p).derivatives(t0)[k] for p in basis] for k in (0, 1)])
    coef = np.linalg.solve(M, np.array(reflected(t0)))
    for t in (-1.0, 0.5, 3.0, 6.0):
        combo = sum(c * ClosedForm(p).derivatives(t)[0] for c, p in zip(coef, basis))
        assert abs(combo - reflected(t)[0]) < 1e-10


@pytest.mark.parametrize("E", [0.3, 1.0])
def test_sech_without_drive_is_a_plane_wave(E):
    params = match_pulse(SechSolutionParams.dimensionless(0.0, E, T=1.5), 0.6, 0.8j)
    ref = ConstantFieldSolution(params.epsilon, 0.0, 0.6, 0.8j)
    for t in (-5.0, -0.3, 0.0, 0.7, 5.0):
        np.testing.assert_allclose(ClosedForm(params).spinor(t).to_array(), constant_solution(ref, t).to_array(), atol=1e-10)


@pytest.mark.parametrize("F0, E", [(0.5, 0.5), (0.8, 1.0), (1.0, 0.4), (1.3, 0.2), (0.25, 0.7)])
def test_sech_transition_matches_closed_form(F0, E):
    params = SechSolutionParams.dimensionless(F0, E)
    assert transition_probability(params) == pytest.approx(sech_transition_closed_form(F0, E), abs=1e-10)
    assert survival_probability(params, "upper") == pytest.approx(1 - sech_transition_closed_form(F0, E), abs=1e-10)


def test_sech_amplitudes_against_integration():
    params = match_pulse(SechSolutionParams.dimensionless(0.8, 0.6), 0.6, 0.8j)
    T = params.T
    ts = np.linspace(30 * T, 40 * T, 201)
    tr = evolve_schrodinger(params.field(), ClosedForm(params).spinor(-15 * T), -15 * T, 40 * T, 1e-12, t_eval=ts)
    amps = out_amplitudes(params)
    fit = fit_exponentials(ts / T, tr.psi1, amps.omega_out)
    assert abs(fit[0] - amps.a_plus) < 1e-8
    assert abs(fit[1] - amps.a_minus) < 1e-8


def test_sech_outgoing_coefficients_are_not_a_swap():
    # the outgoing weights follow the transfer matrix; they are not (c2, c1)
    params = SechSolutionParams.dimensionless(1.0, 1.0, c1=0.3, c2=0.7)
    asy = sech_out_asymptotics(params)
    assert asy.exchange == (params.c2, params.c1)
    assert asy.exchange_defect > 0.1
    np.testing.assert_allclose(asy.transfer @ [params.c1, params.c2], asy.coefficients, atol=1e-14)
    t = 40.0
    assert abs(asy.psi1(t) - sech_solution(params, t)) < 1e-10


def test_track_branch_follows_closed_form():
    ts = np.linspace(-6, 6, 400)
    np.testing.assert_allclose(track_branch(ts, 1.0), sech_branch_arg(ts, 1.0), atol=1e-12)
    assert sech_branch_arg(-50.0, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert sech_branch_arg(50.0, 1.0) == pytest.approx(2 * math.pi, abs=1e-12)


def test_track_branch_rejects_coarse_grid():
    with pytest.raises(BranchTrackingFailure):
        track_branch(np.array([-5.0, 5.0]), 1.0)
    with pytest.raises(ValueError):
        track_branch(np.array([1.0, 0.0]), 1.0)


def test_sech_array_uses_tracked_branch():
    params = SechSolutionParams.dimensionless(0.8, 0.6, c1=0.4, c2=0.9j)
    ts = np.linspace(-3, 3, 61)
    np.testing.assert_allclose(sech_solution(params, ts), [sech_solution(params, t) for t in ts], atol=1e-13)


def test_times_beyond_range_rejected():
    with pytest.raises(ValueError):
        sech_solution(SechSolutionParams.dimensionless(0.5, 0.5), 1e4)
