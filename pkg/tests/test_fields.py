import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twolevel.errors import ValidationError
from twolevel.fields import (
    Constant,
    FieldConfiguration,
    Layout,
    Periodic,
    QuasiPeriodic,
    Sech,
    Tanh,
    field_from_dict,
    omega_vector,
    profile_from_dict,
)

finite = st.floats(-5, 5, allow_nan=False)


def test_tanh_limits_and_derivative():
    prof = Tanh(1.5, 0.25, 2.0)
    assert prof.value(-1e3) == pytest.approx(prof.f_minus)
    assert prof.value(1e3) == pytest.approx(prof.f_plus)
    h = 1e-6
    fd = (prof.value(0.3 + h) - prof.value(0.3 - h)) / (2 * h)
    assert prof.derivative(0.3) == pytest.approx(fd, rel=1e-8)


def test_sech_derivative_matches_difference():
    prof = Sech(0.7, 1.3)
    h = 1e-6
    for t in (-2.0, 0.0, 0.9):
        fd = (prof.value(t + h) - prof.value(t - h)) / (2 * h)
        assert prof.derivative(t) == pytest.approx(fd, abs=1e-9)


def test_profiles_accept_arrays():
    ts = np.linspace(-1, 1, 7)
    for prof in (Constant(0.3), Tanh(1, 0, 1), Sech(1, 1), Periodic.cosine(2.0, 0.5)):
        assert np.shape(prof.value(ts)) == ts.shape


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_nonpositive_width_rejected(bad):
    with pytest.raises(ValidationError):
        Tanh(1, 0, bad)
    with pytest.raises(ValidationError):
        Sech(1, bad)


def test_periodic_cosine_matches_numpy():
    prof = Periodic.cosine(1.7, 0.8, 0.1)
    ts = np.linspace(0, 10, 31)
    np.testing.assert_allclose(prof.value(ts), 0.8 * np.cos(1.7 * ts) + 0.1, atol=1e-14)
    np.testing.assert_allclose(prof.derivative(ts), -0.8 * 1.7 * np.sin(1.7 * ts), atol=1e-14)


def test_periodic_requires_conjugate_symmetry():
    with pytest.raises(ValidationError):
        Periodic(1.0, ((1, 0.5), (-1, 0.4)))
    with pytest.raises(ValidationError):
        Periodic(1.0, ((0, 1j),))


def test_quasiperiodic_angle_form_agrees_with_time_form():
    prof = QuasiPeriodic((1.0, math.sqrt(2)), (((1, 0), 0.4), ((-1, 0), 0.4), ((1, 1), 0.1j), ((-1, -1), -0.1j)))
    for t in (0.0, 0.7, 3.1):
        assert prof.value_at_angle(prof.angles(t)) == pytest.approx(float(prof.value(t)), abs=1e-14)
        grad = prof.angle_gradient(prof.angles(t))
        assert grad @ prof.frequencies == pytest.approx(float(prof.derivative(t)), abs=1e-13)


@given(eps=finite, f=finite)
def test_layouts_are_rotations_of_each_other(eps, f):
    z = FieldConfiguration(eps, Constant(f)).field_at(0.0)
    x = FieldConfiguration(eps, Constant(f), Layout.X_DRIVE).field_at(0.0)
    assert np.linalg.norm(z) == pytest.approx(np.linalg.norm(x))
    np.testing.assert_allclose(z, [-2 * eps, 0, -2 * f])
    np.testing.assert_allclose(x, [2 * f, 0, -2 * eps])


def test_field_basis_reconstructs_field():
    for layout in Layout:
        cfg = FieldConfiguration(0.4, Tanh(1, 0.2, 1), layout)
        b_eps, b_f = cfg.field_basis()
        t = 0.37
        np.testing.assert_allclose(cfg.field_at(t), 0.4 * b_eps + float(cfg.profile.value(t)) * b_f)
        np.testing.assert_array_equal(omega_vector(cfg, t), cfg.field_at(t))


@settings(max_examples=50)
@given(f0=finite, f1=finite, T=st.floats(0.1, 5), eps=finite)
def test_dict_round_trip(f0, f1, T, eps):
    cfg = FieldConfiguration(eps, Tanh(f0, f1, T), Layout.X_DRIVE)
    assert field_from_dict(cfg.to_dict()) == cfg


def test_periodic_round_trip():
    prof = Periodic(2.0, ((1, 0.3 + 0.1j), (-1, 0.3 - 0.1j), (0, 0.2)))
    assert profile_from_dict(prof.to_dict()) == prof


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"kind": "tanh", "f0": 1, "T": 1}, "f1"),
        ({"kind": "sech", "f0": "x", "T": 1}, "number"),
        ({"kind": "sech", "f0": 1, "T": 1, "extra": 2}, "unknown"),
        ({"kind": "wobble"}, "unknown profile"),
        ({"kind": "constant", "f0": float("inf")}, "finite"),
    ],
)
def test_profile_errors_name_the_problem(doc, fragment):
    with pytest.raises(ValidationError, match=fragment):
        profile_from_dict(doc)


def test_field_block_errors():
    with pytest.raises(ValidationError, match="layout"):
        field_from_dict({"epsilon": 1, "layout": "y", "profile": {"kind": "constant", "f0": 0}})
    with pytest.raises(ValidationError, match="profile"):
        field_from_dict({"epsilon": 1})
