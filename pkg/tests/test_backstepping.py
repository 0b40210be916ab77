import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadbackstep import (ChannelReference, ConfigError, Gains, ThrustSingularity,
                          compute_errors, control_laws, lyapunov_values, state_derivative,
                          virtual_control)
from quadbackstep.backstepping import analytical_vdot, ref_array


def hold_refs(s):
    return [ChannelReference(s[0], s[1]), ChannelReference(s[2], s[3]),
            ChannelReference(s[4], s[5]), ChannelReference(s[6], s[7])]


def test_perfect_tracking_has_zero_errors():
    s = np.array([0.1, 0.2, -0.1, 0.3, 0.5, 0.0, 1.0, 0.5, 0, 0, 0, 0])
    np.testing.assert_array_equal(compute_errors(s, hold_refs(s), Gains.uniform(3.0)), 0.0)


def test_errors_roll_example():
    refs = [ChannelReference(0.2), ChannelReference(0), ChannelReference(0), ChannelReference(0)]
    e = compute_errors(np.zeros(12), refs, Gains.uniform(2.0))
    assert e[0] == pytest.approx(0.2)
    assert e[1] == pytest.approx(-0.4)


def test_errors_altitude_riding_virtual_control():
    s = np.zeros(12)
    s[6], s[7] = 1.0, 0.5
    refs = [ChannelReference(0)] * 3 + [ChannelReference(1.0, 0.5)]
    e = compute_errors(s, refs, Gains(c7=3.0))
    assert e[6] == 0 and e[7] == 0


@pytest.mark.parametrize("e,rate,c,expected", [(0, 0, 2, 0), (0.1, 0.5, 2, 0.7), (-0.1, 0, 2, -0.2)])
def test_virtual_control(e, rate, c, expected):
    assert virtual_control(e, rate, c) == pytest.approx(expected)


def test_hover_control(coeffs):
    refs = [ChannelReference(0)] * 3 + [ChannelReference(0.0)]
    u = control_laws(np.zeros(12), refs, Gains(), coeffs, 9.81)
    assert u == pytest.approx((19.62, 0, 0, 0), abs=1e-12)


def test_roll_feedforward_equals_inertia(coeffs):
    refs = [ChannelReference(0, 0, 1.0)] + [ChannelReference(0)] * 3
    u = control_laws(np.zeros(12), refs, Gains(), coeffs, 9.81)
    assert u.u2 == pytest.approx(0.0035, rel=1e-12)


def test_inverted_raises(coeffs):
    s = np.zeros(12)
    s[0] = np.pi / 2
    with pytest.raises(ThrustSingularity):
        control_laws(s, [ChannelReference(0)] * 4, Gains(), coeffs, 9.81)


def test_lyapunov_values_examples():
    assert all(v == (0, 0, 0) for v in lyapunov_values(np.zeros(8), Gains()))
    e = np.zeros(8)
    e[0], e[1] = 0.2, -0.4
    v = lyapunov_values(e, Gains.uniform(2.0))[0]
    assert v.V == pytest.approx(0.10)
    assert v.V_dot == pytest.approx(-0.40)
    assert v.V_first == pytest.approx(0.02)


@given(st.lists(st.floats(-10, 10), min_size=8, max_size=8),
       st.lists(st.floats(0.01, 20), min_size=8, max_size=8))
def test_lyapunov_signs(errs, gains):
    g = Gains(*gains)
    for k, v in enumerate(lyapunov_values(errs, g)):
        assert v.V >= v.V_first >= 0
        assert v.V_dot <= 0
        if errs[2 * k] != 0 or errs[2 * k + 1] != 0:
            assert v.V_dot < 0 or (errs[2 * k] ** 2 + errs[2 * k + 1] ** 2) < 1e-300
    np.testing.assert_allclose(analytical_vdot(np.array([errs]), g.as_array())[0],
                               [v.V_dot for v in lyapunov_values(errs, g)])


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
def test_gains_must_be_positive(bad):
    with pytest.raises(ConfigError):
        Gains(c4=bad)


def test_thrust_independent_of_yaw(coeffs):
    rng = np.random.default_rng(2)
    s = rng.uniform(-0.4, 0.4, 12)
    refs = ref_array(rng.uniform(-0.3, 0.3, (4, 3)))
    u_a = control_laws(s, refs, Gains(), coeffs, 9.81)
    s[4] += 1.234
    u_b = control_laws(s, refs, Gains(), coeffs, 9.81)
    assert u_a.u1 == u_b.u1


def test_closed_loop_error_dynamics_exact(coeffs):
    """Plugging the laws into the plant gives de/dt = A e with Vdot = -c e^2 - c e^2."""
    rng = np.random.default_rng(3)
    gains = Gains(1.5, 2.5, 3.0, 1.0, 2.0, 4.0, 0.7, 1.3)
    c = gains.as_array()
    for _ in range(50):
        s = rng.uniform(-0.5, 0.5, 12)
        refs = np.zeros((4, 3))  # constant references
        refs[:, 0] = rng.uniform(-0.3, 0.3, 4)
        u = control_laws(s, refs, gains, coeffs, 9.81)
        ds = state_derivative(s, u, coeffs, 9.81)
        e = compute_errors(s, refs, gains)
        for k in range(4):
            i = 2 * k
            e_dot = -ds[i]
            e_next_dot = ds[i + 1] - c[i] * e_dot
            vdot = e[i] * e_dot + e[i + 1] * e_next_dot
            assert vdot == pytest.approx(-c[i] * e[i] ** 2 - c[i + 1] * e[i + 1] ** 2,
                                         rel=1e-9, abs=1e-12)


def test_equilibrium_fixed_point(coeffs):
    s = np.zeros(12)
    s[[0, 2, 4, 6]] = [0.1, -0.2, 0.3, 2.0]
    u = control_laws(s, hold_refs(s), Gains(), coeffs, 9.81)
    ds = state_derivative(s, u, coeffs, 9.81)
    np.testing.assert_allclose(ds[:8], 0.0, atol=1e-12)
