"""Reference trajectories and the PD position outer loop.

A trajectory is evaluated into a (4, 5) array: rows x, y, z, psi; columns
value and time derivatives up to fourth order. Only value, rate and accel
feed the inner loops; jerk and snap support the optional attitude
feedforward of :func:`position_outer_loop`.
"""
import csv
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConfigError

HOVER, STEP, SPIRAL, TABLE = 0, 1, 2, 3
KINDS = {"hover": HOVER, "step": STEP, "spiral": SPIRAL, "table": TABLE}
STEP_CHANNELS = ("x", "y", "z", "psi")


@dataclass(frozen=True)
class Trajectory:
    """Desired x, y, z, psi as a function of time.

    hover:  constant ``point`` (x, y, z, psi).
    step:   ``point`` until ``step_time``, then ``step_channel`` shifted by
            ``step_magnitude``.
    spiral: circle of ``radius`` at ``omega`` about ``center`` (x, y) while
            climbing from ``z0`` at ``climb_rate``; yaw held at ``psi``.
    table:  waypoints ``table_t`` / ``table_xyzpsi`` (n, 4), linearly
            interpolated; rates are the segment slopes.
    """
    kind: str = "hover"
    point: tuple = (0.0, 0.0, 1.0, 0.0)
    step_channel: str = "z"
    step_magnitude: float = 0.0
    step_time: float = 0.0
    radius: float = 1.0
    omega: float = 0.5
    climb_rate: float = 0.1
    center: tuple = (0.0, 0.0)
    z0: float = 0.0
    psi: float = 0.0
    table_t: tuple = field(default=(), repr=False)
    table_xyzpsi: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown trajectory kind {self.kind!r}")
        if self.kind == "spiral" and (self.radius <= 0 or self.omega == 0):
            raise ConfigError("spiral needs radius > 0 and omega != 0")
        if self.kind == "step" and self.step_channel not in STEP_CHANNELS:
            raise ConfigError(f"step_channel must be one of {STEP_CHANNELS}")
        if len(self.point) != 4:
            raise ConfigError("point must be (x, y, z, psi)")
        if self.kind == "table":
            tt = np.asarray(self.table_t, dtype=float)
            vv = np.asarray(self.table_xyzpsi, dtype=float)
            if tt.ndim != 1 or len(tt) < 2 or vv.shape != (len(tt), 4):
                raise ConfigError("table needs >= 2 rows of t, x, y, z, psi")
            if np.any(np.diff(tt) <= 0):
                raise ConfigError("table times must be strictly increasing")

    def packed(self):
        """(kind code, params, table times, table values) for the kernel."""
        if self.kind == "hover":
            params = np.array(self.point, dtype=float)
        elif self.kind == "step":
            params = np.array([*self.point, STEP_CHANNELS.index(self.step_channel),
                               self.step_magnitude, self.step_time], dtype=float)
        elif self.kind == "spiral":
            params = np.array([self.center[0], self.center[1], self.z0, self.psi,
                               self.radius, self.omega, self.climb_rate], dtype=float)
        else:
            params = np.zeros(1)
        if self.kind == "table":
            tt = np.asarray(self.table_t, dtype=float)
            vv = np.asarray(self.table_xyzpsi, dtype=float)
        else:
            tt, vv = np.zeros(2), np.zeros((2, 4))
        return KINDS[self.kind], params, tt, np.ascontiguousarray(vv)

    def initial_state(self):
        """12-state at t = 0 matching the trajectory's position and velocity."""
        D = eval_trajectory(self, 0.0)
        s = np.zeros(12)
        s[8], s[9] = D[0, 0], D[0, 1]
        s[10], s[11] = D[1, 0], D[1, 1]
        s[6], s[7] = D[2, 0], D[2, 1]
        s[4] = D[3, 0]
        return s

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind in ("hover", "step"):
            d["point"] = list(self.point)
        if self.kind == "step":
            d.update(step_channel=self.step_channel, step_magnitude=self.step_magnitude,
                     step_time=self.step_time)
        if self.kind == "spiral":
            d.update(radius=self.radius, omega=self.omega, climb_rate=self.climb_rate,
                     center=list(self.center), z0=self.z0, psi=self.psi)
        if self.kind == "table":
            d["table_t"] = list(map(float, self.table_t))
            d["table_xyzpsi"] = [list(map(float, r)) for r in self.table_xyzpsi]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "file" in d:
            t, v = read_waypoint_csv(d.pop("file"))
            d.update(kind="table", table_t=tuple(t), table_xyzpsi=tuple(map(tuple, v)))
        for key in ("point", "center"):
            if key in d:
                d[key] = tuple(float(x) for x in d[key])
        if "table_t" in d:
            d["table_t"] = tuple(float(x) for x in d["table_t"])
            d["table_xyzpsi"] = tuple(tuple(float(x) for x in r) for r in d["table_xyzpsi"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(f"bad trajectory section: {exc}") from None


def read_waypoint_csv(path):
    """Load a waypoint table with header columns t, x, y, z, psi."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        t = np.array([float(r["t"]) for r in rows])
        v = np.array([[float(r[k]) for k in ("x", "y", "z", "psi")] for r in rows])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"waypoint table {path}: {exc}") from None
    return t, v


@njit(cache=True)
def _eval_trajectory(kind, p, tt, vv, t, D):
    D[:, :] = 0.0
    if kind == HOVER:
        for r in range(4):
            D[r, 0] = p[r]
    elif kind == STEP:
        for r in range(4):
            D[r, 0] = p[r]
        if t >= p[6]:
            D[int(p[4]), 0] += p[5]
    elif kind == SPIRAL:
        xc, yc, z0, psi, r, w, vz = p[0], p[1], p[2], p[3], p[4], p[5], p[6]
        c, s = np.cos(w * t), np.sin(w * t)
        D[0, 0] = xc + r * c
        D[0, 1] = -r * w * s
        D[0, 2] = -r * w * w * c
        D[0, 3] = r * w ** 3 * s
        D[0, 4] = r * w ** 4 * c
        D[1, 0] = yc + r * s
        D[1, 1] = r * w * c
        D[1, 2] = -r * w * w * s
        D[1, 3] = -r * w ** 3 * c
        D[1, 4] = r * w ** 4 * s
        D[2, 0] = z0 + vz * t
        D[2, 1] = vz
        D[3, 0] = psi
    else:
        n = tt.shape[0]
        j = np.searchsorted(tt, t, side="right") - 1
        inside = 0 <= j < n - 1
        for r in range(4):
            D[r, 0] = np.interp(t, tt, vv[:, r])
            if inside:
                D[r, 1] = (vv[j + 1, r] - vv[j, r]) / (tt[j + 1] - tt[j])


def eval_trajectory(traj: Trajectory, t: float) -> np.ndarray:
    """Desired (x, y, z, psi) and derivatives at time t, shape (4, 5)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    D = np.empty((4, 5))
    kind, p, tt, vv = traj.packed()
    _eval_trajectory(kind, p, tt, vv, float(t), D)
    return D


@njit(cache=True)
def _outer_loop(s, D, psi, kp, kd, limit, g, feedforward, out):
    """Fill out[0] = (phi_d, rate, accel), out[1] = (theta_d, rate, accel)."""
    ax = D[0, 2] + kd * (D[0, 1] - s[9]) + kp * (D[0, 0] - s[8])
    ay = D[1, 2] + kd * (D[1, 1] - s[11]) + kp * (D[1, 0] - s[10])
    sp, cp = np.sin(psi), np.cos(psi)
    phi_d = (ax * sp - ay * cp) / g
    theta_d = (ax * cp + ay * sp) / g
    out[:, :] = 0.0
    out[0, 0] = min(max(phi_d, -limit), limit)
    out[1, 0] = min(max(theta_d, -limit), limit)
    if feedforward:
        # desired-path terms only; dropped while the command is saturated
        if abs(phi_d) < limit:
            out[0, 1] = (D[0, 3] * sp - D[1, 3] * cp) / g
            out[0, 2] = (D[0, 4] * sp - D[1, 4] * cp) / g
        if abs(theta_d) < limit:
            out[1, 1] = (D[0, 3] * cp + D[1, 3] * sp) / g
            out[1, 2] = (D[0, 4] * cp + D[1, 4] * sp) / g


def position_outer_loop(state, desired, psi, kp_pos=1.0, kd_pos=1.5, limit=0.5, g=9.81,
                        feedforward=False):
    """Small-angle inversion of commanded horizontal acceleration.

    ``desired`` is a (2, 3+) array: rows x, y; columns value, rate, accel
    (optionally jerk, snap). Returns a (2, 3) array of (phi_d, theta_d)
    references with their rates and accelerations.
    """
    D = np.zeros((4, 5))
    des = np.asarray(desired, dtype=float)
    D[:2, :des.shape[1]] = des
    out = np.empty((2, 3))
    _outer_loop(np.asarray(state, dtype=float), D, float(psi), float(kp_pos), float(kd_pos),
                float(limit), float(g), bool(feedforward), out)
    return out
