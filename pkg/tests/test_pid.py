import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadbackstep import (ChannelPid, ChannelReference, ConfigError, PidGains, PidState,
                          ThrustSingularity, pid_step, reset)
from quadbackstep.pid import pid_output

ZERO_REFS = [ChannelReference(0)] * 4


def test_hover_feedforward():
    u, _ = pid_step(np.zeros(12), ZERO_REFS, PidGains(), PidState(), 1e-3)
    assert u == pytest.approx((19.62, 0, 0, 0))


def test_proportional_roll():
    gains = PidGains(phi=ChannelPid(4.0))
    refs = [ChannelReference(0.1)] + ZERO_REFS[1:]
    u, _ = pid_step(np.zeros(12), refs, gains, PidState(), 1e-3)
    assert u.u2 == pytest.approx(0.4)


def test_integral_of_constant_error():
    gains = PidGains(phi=ChannelPid(kp=1e-12, ki=1.0, kd=0.0))
    refs = [ChannelReference(0.1)] + ZERO_REFS[1:]
    st_ = PidState()
    for _ in range(1000):
        _, st_ = pid_step(np.zeros(12), refs, gains, st_, 1e-3)
    u, _ = pid_step(np.zeros(12), refs, gains, st_, 1e-3)
    assert u.u2 == pytest.approx(0.1, abs=1e-3)


def test_reset_clears_and_is_idempotent():
    s = PidState(np.array([1.0, -2, 3, 4]), np.array([0.1, 0.2, 0.3, 0.4]))
    once = reset(s)
    twice = reset(once)
    for r in (once, twice):
        np.testing.assert_array_equal(r.integral, 0)
        np.testing.assert_array_equal(r.prev_error, 0)
    u, _ = pid_step(np.zeros(12), ZERO_REFS, PidGains(), once, 1e-3)
    assert u == pytest.approx((19.62, 0, 0, 0))


def test_stateless_without_integral():
    ch = ChannelPid(5.0, 0.0, 1.0)
    gains = PidGains(ch, ch, ch, ChannelPid(8.0, 0.0, 5.0))
    rng = np.random.default_rng(0)
    s = rng.uniform(-0.3, 0.3, 12)
    refs = rng.uniform(-0.3, 0.3, (4, 3))
    u1, st1 = pid_step(s, refs, gains, PidState(), 1e-2)
    u2, st2 = pid_step(s, refs, gains, st1, 1e-2)
    assert u1 == u2
    np.testing.assert_array_equal(st2.integral, 0)


@given(st.lists(st.floats(-50, 50), min_size=200, max_size=200))
def test_windup_limit(errors):
    gains = PidGains(phi=ChannelPid(1.0, 1.0, 0.0), windup_limit=0.5)
    st_ = PidState()
    for e in errors:
        refs = [ChannelReference(e)] + ZERO_REFS[1:]
        _, st_ = pid_step(np.zeros(12), refs, gains, st_, 0.05)
        assert abs(st_.integral[0]) <= 0.5


def test_linear_in_error():
    gains = PidGains()
    s = np.zeros(12)
    a = np.array([[0.1, 0.2, 0], [-0.05, 0.1, 0], [0.3, 0, 0], [0.4, -0.2, 0]])
    ff = np.array([19.62, 0, 0, 0])
    ua = np.array(pid_output(s, a, gains, PidState(), 2.0, 9.81)) - ff
    u2a = np.array(pid_output(s, 2 * a, gains, PidState(), 2.0, 9.81)) - ff
    np.testing.assert_allclose(u2a, 2 * ua, rtol=1e-12)


def test_singularity_guard():
    s = np.zeros(12)
    s[2] = np.pi / 2
    with pytest.raises(ThrustSingularity):
        pid_step(s, ZERO_REFS, PidGains(), PidState(), 1e-3)


@pytest.mark.parametrize("kw", [dict(kp=0.0), dict(kp=1.0, ki=-1.0), dict(kp=1.0, kd=-0.1)])
def test_bad_gains(kw):
    with pytest.raises(ConfigError):
        ChannelPid(**kw)


def test_dt_must_be_positive():
    with pytest.raises(ValueError):
        pid_step(np.zeros(12), ZERO_REFS, PidGains(), PidState(), 0.0)


def test_round_trip_dict():
    g = PidGains(phi=ChannelPid(1, 2, 3), windup_limit=4.0)
    assert PidGains.from_dict(g.to_dict()) == g
