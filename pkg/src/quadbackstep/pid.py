"""Baseline controller: independent parallel-form PID loops on phi, theta, psi, z.

Outputs are raw moments/forces (gains in N m/rad, N/m, ...). The derivative
term acts on the measured rate (``ref_rate - rate``) and the integral uses
rectangle-rule accumulation, updated once per call of :func:`pid_step`.
The altitude loop adds ``m g`` feedforward and divides by cos(phi)cos(theta).
"""
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .backstepping import CHANNELS, DEFAULT_SINGULARITY_TOL, ref_array
from .dynamics import ControlInput
from .errors import ConfigError, ThrustSingularity


@dataclass(frozen=True)
class ChannelPid:
    kp: float
    ki: float = 0.0
    kd: float = 0.0

    def __post_init__(self):
        if not self.kp > 0 or self.ki < 0 or self.kd < 0:
            raise ConfigError(f"PID gains need kp > 0, ki >= 0, kd >= 0; got {self}")


@dataclass(frozen=True)
class PidGains:
    phi: ChannelPid = ChannelPid(15.0, 1.0, 3.0)
    theta: ChannelPid = ChannelPid(15.0, 1.0, 3.0)
    psi: ChannelPid = ChannelPid(15.0, 1.0, 3.0)
    z: ChannelPid = ChannelPid(8.0, 2.0, 5.0)
    windup_limit: float = 10.0   # error-seconds; inf disables the clamp

    def __post_init__(self):
        if not self.windup_limit > 0:
            raise ConfigError("windup_limit must be positive (use inf to disable)")

    def as_array(self):
        return np.array([[ch.kp, ch.ki, ch.kd] for ch in self.channels()])

    def channels(self):
        return [getattr(self, name) for name in CHANNELS]

    def to_dict(self):
        d = {name: {"kp": ch.kp, "ki": ch.ki, "kd": ch.kd}
             for name, ch in zip(CHANNELS, self.channels())}
        d["windup_limit"] = self.windup_limit
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kwargs = {name: ChannelPid(**d.pop(name)) for name in CHANNELS if name in d}
        if "windup_limit" in d:
            kwargs["windup_limit"] = float(d.pop("windup_limit"))
        if d:
            raise ConfigError(f"unknown PID keys: {sorted(d)}")
        return cls(**kwargs)


@dataclass
class PidState:
    integral: np.ndarray = field(default_factory=lambda: np.zeros(4))
    prev_error: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def copy(self):
        return PidState(self.integral.copy(), self.prev_error.copy())


@njit(cache=True)
def _pid_output(s, ref, pg, integ, m, g, tol, out):
    cc = np.cos(s[0]) * np.cos(s[2])
    if abs(cc) <= tol:
        return False
    for k in range(4):
        i = 2 * k
        e = ref[k, 0] - s[i]
        e_dot = ref[k, 1] - s[i + 1]
        v = pg[k, 0] * e + pg[k, 1] * integ[k] + pg[k, 2] * e_dot
        if k == 3:
            out[0] = (m * g + v) / cc
        else:
            out[k + 1] = v
    return True


@njit(cache=True)
def _pid_accumulate(s, ref, pg, integ, limit, dt):
    for k in range(4):
        if pg[k, 1] > 0.0:
            acc = integ[k] + (ref[k, 0] - s[2 * k]) * dt
            integ[k] = min(max(acc, -limit), limit)


def pid_output(state, refs, gains: PidGains, pid_state: PidState, m, g,
               tol=DEFAULT_SINGULARITY_TOL) -> ControlInput:
    """Controller output for the current integral; does not advance it."""
    s = np.asarray(state, dtype=float)
    out = np.empty(4)
    if not _pid_output(s, ref_array(refs), gains.as_array(), pid_state.integral,
                       float(m), float(g), float(tol), out):
        raise ThrustSingularity("|cos(phi)cos(theta)| below singularity tolerance")
    return ControlInput(*out)


def pid_step(state, refs, gains: PidGains, pid_state: PidState, dt, m=2.0, g=9.81,
             tol=DEFAULT_SINGULARITY_TOL):
    """One controller tick. Returns ``(ControlInput, new PidState)``.

    The output uses the integral accumulated before this tick; the returned
    state includes this tick's ``e * dt`` contribution.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    s = np.asarray(state, dtype=float)
    ref = ref_array(refs)
    u = pid_output(s, ref, gains, pid_state, m, g, tol)
    new = pid_state.copy()
    _pid_accumulate(s, ref, gains.as_array(), new.integral, float(gains.windup_limit), float(dt))
    new.prev_error = ref[:, 0] - s[0:8:2]
    return u, new


def reset(pid_state: PidState = None) -> PidState:
    return PidState()
