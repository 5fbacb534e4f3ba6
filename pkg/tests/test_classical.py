import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twolevel.bloch import evolve_bloch
from twolevel.classical import (
    POLE_ENTER,
    Chart,
    ChartState,
    CouplingSplit,
    ExtendedState,
    chart_from_spin,
    coords_from_spin,
    extend_howland,
    extended_flow,
    hamilton_flow,
    hamiltonian_value,
    poincare_section,
    poisson_bracket_numeric,
    section_spread,
    spin_component,
    spin_from_chart,
    spin_from_coords,
    spin_partials,
)
from twolevel.errors import ProfileNotAngular
from twolevel.fields import Constant, FieldConfiguration, Layout, Periodic, Sech, Tanh

angles = st.floats(0, 2 * math.pi, exclude_max=True)
compact = st.floats(-0.98, 0.98)


def make_state(chart, angle, c):
    return ChartState(chart, angle, c) if chart is Chart.ONE else ChartState(chart, c, angle)


@given(st.sampled_from(list(Chart)), angles, compact)
def test_spin_is_unit_and_round_trips(chart, angle, c):
    s = make_state(chart, angle, c)
    S = spin_from_chart(s)
    assert np.linalg.norm(S) == pytest.approx(1.0)
    back = chart_from_spin(S, chart)
    assert back.compact == pytest.approx(s.compact, abs=1e-12)
    assert math.cos(back.q - s.q) + math.cos(back.p - s.p) == pytest.approx(2.0, abs=1e-10)


def test_chart_conventions():
    # chart 1: (phi, S3); chart 2: (-S3, phi)
    S = np.array([0.0, 0.6, 0.8])
    assert coords_from_spin(Chart.ONE, S) == pytest.approx((math.pi / 2, 0.8))
    assert coords_from_spin(Chart.TWO, S) == pytest.approx((-0.8, math.pi / 2))


def test_chart_state_validation_and_wrapping():
    assert ChartState(Chart.ONE, 7.0, 0.2).q == pytest.approx(7.0 - 2 * math.pi)
    assert ChartState(Chart.TWO, 1.0 + 1e-13, 0.0).q == 1.0
    with pytest.raises(ValueError):
        ChartState(Chart.ONE, 0.0, 1.1)


@settings(max_examples=40)
@given(st.sampled_from(list(Chart)), angles, compact)
def test_canonical_brackets_reproduce_spin_algebra(chart, angle, c):
    s = make_state(chart, angle, c)
    S = spin_from_chart(s)
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        pb = poisson_bracket_numeric(spin_component(chart, i), spin_component(chart, j), s)
        assert pb == pytest.approx(S[k], abs=1e-6)


def test_partials_match_finite_differences():
    for chart in Chart:
        s = make_state(chart, 1.1, 0.3)
        dq, dp = spin_partials(chart, s.q, s.p)
        h = 1e-6
        np.testing.assert_allclose(dq, (spin_from_coords(chart, s.q + h, s.p) - spin_from_coords(chart, s.q - h, s.p)) / (2 * h), atol=1e-8)
        np.testing.assert_allclose(dp, (spin_from_coords(chart, s.q, s.p + h) - spin_from_coords(chart, s.q, s.p - h)) / (2 * h), atol=1e-8)


def test_energy_conserved_for_constant_field():
    cfg = FieldConfiguration(0.7, Constant(0.4))
    s0 = ChartState(Chart.ONE, 0.3, 0.5)
    tr = hamilton_flow(cfg, Chart.ONE, s0, 0.0, 20.0, 1e-11, n_samples=101)
    assert np.ptp(tr.energy) < 1e-9
    assert tr.energy[0] == pytest.approx(hamiltonian_value(s0, cfg.field_at(0.0)))


@pytest.mark.parametrize("chart", list(Chart))
@pytest.mark.parametrize("layout", list(Layout))
def test_chart_flow_agrees_with_precession(chart, layout):
    cfg = FieldConfiguration(0.5, Tanh(1.2, 0.1, 1.0), layout)
    S0 = np.array([0.48, 0.6, 0.64])
    ts = np.linspace(-4, 4, 81)
    ch = hamilton_flow(cfg, chart, chart_from_spin(S0, chart), -4, 4, 1e-11, t_eval=ts)
    bl = evolve_bloch(cfg, S0, -4, 4, 1e-11, t_eval=ts)
    regular = ~ch.on_pole
    np.testing.assert_allclose(ch.spins[regular], bl.q[regular], atol=1e-7)


def test_flow_through_a_pole():
    # chart 2 poles are S3 = +-1; precession about x carries the spin across S3 = 1
    cfg = FieldConfiguration(0.5, Constant(0.0))
    S0 = np.array([0.0, -0.6, 0.8])
    ts = np.linspace(0, 4, 81)
    ch = hamilton_flow(cfg, Chart.TWO, chart_from_spin(S0, Chart.TWO), 0, 4, 1e-11, t_eval=ts)
    bl = evolve_bloch(cfg, S0, 0, 4, 1e-11, t_eval=ts)
    assert ch.crossed_pole
    np.testing.assert_allclose(ch.spins, bl.q, atol=1e-7)
    assert np.all(np.abs(ch.q[~ch.on_pole]) < POLE_ENTER + 1e-9)


def test_backward_flow_retraces():
    cfg = FieldConfiguration(0.5, Sech(1.0, 1.0))
    s0 = ChartState(Chart.ONE, 0.4, 0.2)
    fwd = hamilton_flow(cfg, Chart.ONE, s0, -3, 3, 1e-12)
    end = ChartState(Chart.ONE, fwd.q[-1], fwd.p[-1])
    back = hamilton_flow(cfg, Chart.ONE, end, 3, -3, 1e-12)
    np.testing.assert_allclose(back.spins[0], spin_from_chart(s0), atol=1e-9)
    assert np.all(np.diff(back.times) > 0)


# ------------------------------------------------------------- Howland


def test_howland_requires_angular_drive():
    with pytest.raises(ProfileNotAngular):
        extend_howland(FieldConfiguration(0.5, Tanh(1, 0, 1)), Chart.TWO)


def test_split_defaults_and_physical_config():
    cfg = FieldConfiguration(0.4, Periodic.cosine(1.3, 0.8))
    strong = extend_howland(cfg, Chart.TWO)
    weak = extend_howland(cfg, Chart.TWO, CouplingSplit.WEAK)
    assert strong.coupling == 0.4 and weak.coupling == 1.0
    assert strong.physical_config() == cfg and weak.physical_config() == cfg
    half = weak.with_coupling(0.5).physical_config()
    assert float(half.profile.value(0.0)) == pytest.approx(0.4)


@pytest.mark.parametrize("split", list(CouplingSplit))
def test_k_equals_h0_plus_coupling_v(split):
    cfg = FieldConfiguration(0.4, Periodic.cosine(1.3, 0.8, 0.2))
    desc = extend_howland(cfg, Chart.TWO, split, 0.7)
    s = ChartState(Chart.TWO, 0.3, 1.2)
    theta, action = (0.9,), (0.25,)
    k = desc.k(s, theta, action)
    assert k == pytest.approx(desc.h0(s, theta, action) + 0.7 * desc.v(s, theta))
    assert k == pytest.approx(desc.k_from_spin(spin_from_chart(s), theta, action))


def test_extended_k_is_conserved():
    cfg = FieldConfiguration(0.4, Periodic.cosine(1.3, 0.8, 0.2))
    desc = extend_howland(cfg, Chart.TWO)
    ext = extended_flow(desc, ExtendedState(ChartState(Chart.TWO, 0.3, 1.0), (0.5,)), 30.0, 1e-11, n_samples=61)
    assert np.ptp(ext.k_value) < 1e-8
    np.testing.assert_allclose(ext.theta[:, 0], 0.5 + 1.3 * ext.times, atol=1e-10)


# ------------------------------------------------------------- sections


def test_section_points_are_strictly_after_start():
    desc = extend_howland(FieldConfiguration(0.3, Periodic.cosine(1.0)), Chart.TWO)
    pts = poincare_section(desc, ExtendedState(ChartState(Chart.TWO, 0.3, 1.0), (0.0,)), 5)
    assert [p.crossing_index for p in pts] == list(range(5))
    np.testing.assert_allclose([p.time for p in pts], 2 * math.pi * np.arange(1, 6), atol=1e-9)
    assert all(math.isnan(p.theta2) for p in pts)


def test_section_matches_stroboscopic_direct_flow():
    cfg = FieldConfiguration(0.3, Periodic.cosine(1.0))
    desc = extend_howland(cfg, Chart.TWO)
    s0 = ChartState(Chart.TWO, 0.3, 1.0)
    pts = poincare_section(desc, ExtendedState(s0, (0.0,)), 3, tol=1e-11)
    ts = 2 * math.pi * np.arange(1, 4)
    ref = hamilton_flow(cfg, Chart.TWO, s0, 0.0, ts[-1], 1e-11, t_eval=np.concatenate([[0.0], ts]))
    np.testing.assert_allclose([p.q for p in pts], ref.q[1:], atol=1e-8)


def test_integrable_section_is_a_point():
    desc = extend_howland(FieldConfiguration(0.0, Periodic.cosine(1.0)), Chart.TWO)
    pts = poincare_section(desc, ExtendedState(ChartState(Chart.TWO, 0.3, 1.0), (0.0,)), 20)
    assert section_spread(pts) < 1e-12


def test_section_argument_checks():
    desc = extend_howland(FieldConfiguration(0.3, Periodic.cosine(1.0)), Chart.TWO)
    s0 = ExtendedState(ChartState(Chart.TWO, 0.3, 1.0), (0.0,))
    with pytest.raises(ValueError):
        poincare_section(desc, s0, 0)
    with pytest.raises(ValueError):
        poincare_section(desc, s0, 3, section_angle_index=1)
