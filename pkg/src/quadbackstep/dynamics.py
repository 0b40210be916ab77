"""Rigid-body quadrotor plant.

State layout (12 entries, fixed)::

    0 phi    1 phi_dot    2 theta  3 theta_dot  4 psi  5 psi_dot
    6 z      7 z_dot      8 x      9 x_dot     10 y   11 y_dot

Altitude sits at indices 6/7 so that the four controlled channels
(phi, theta, psi, z) occupy consecutive (position, rate) pairs.
"""
from dataclasses import dataclass, asdict
from math import cos, sin, tan
from typing import NamedTuple

import numpy as np
from numba import njit

from .errors import ConfigError, GimbalLock

STATE_NAMES = ("phi", "phi_dot", "theta", "theta_dot", "psi", "psi_dot",
               "z", "z_dot", "x", "x_dot", "y", "y_dot")
PHI, PHI_DOT, THETA, THETA_DOT, PSI, PSI_DOT = range(6)
Z, Z_DOT, X, X_DOT, Y, Y_DOT = range(6, 12)


class EulerAngles(NamedTuple):
    phi: float
    theta: float
    psi: float


class ControlInput(NamedTuple):
    """Total thrust (N) and roll/pitch/yaw moments (N m)."""
    u1: float
    u2: float
    u3: float
    u4: float


@dataclass(frozen=True)
class PlantParams:
    m: float = 2.0
    g: float = 9.81
    l: float = 0.225
    Ixx: float = 0.0035
    Iyy: float = 0.0035
    Izz: float = 0.0050

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"plant parameter {name} must be positive, got {value!r}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DerivedCoeffs:
    a1: float
    a2: float
    a3: float
    b1: float
    b2: float
    b3: float
    b4: float

    def as_array(self):
        return np.array([self.a1, self.a2, self.a3, self.b1, self.b2, self.b3, self.b4])


def derive_coeffs(p: PlantParams) -> DerivedCoeffs:
    """Gyroscopic coupling terms and inverse inertias/mass of the plant."""
    if p.m <= 0 or min(p.Ixx, p.Iyy, p.Izz) <= 0:
        raise ConfigError("mass and inertias must be positive")
    return DerivedCoeffs(
        a1=(p.Iyy - p.Izz) / p.Ixx,
        a2=(p.Izz - p.Ixx) / p.Iyy,
        a3=(p.Ixx - p.Iyy) / p.Izz,
        b1=1.0 / p.Ixx,
        b2=1.0 / p.Iyy,
        b3=1.0 / p.Izz,
        b4=1.0 / p.m,
    )


def rotation_matrix(att) -> np.ndarray:
    """Body-to-inertial rotation, ZYX (yaw-pitch-roll) convention."""
    phi, theta, psi = att
    cf, sf = cos(phi), sin(phi)
    ct, st = cos(theta), sin(theta)
    cp, sp = cos(psi), sin(psi)
    return np.array([
        [ct * cp, sf * st * cp - cf * sp, cf * st * cp + sf * sp],
        [ct * sp, cf * cp + sf * st * sp, cf * st * sp - sf * cp],
        [-st, sf * ct, cf * ct],
    ])


def euler_rate_transform(att, body_rates, tol=1e-6) -> np.ndarray:
    """Map body rates (p, q, r) to Euler-angle rates.

    Raises GimbalLock when |cos(theta)| <= tol.
    """
    phi, theta, _ = att
    p, q, r = body_rates
    ct = cos(theta)
    if abs(ct) <= tol:
        raise GimbalLock(f"|cos(theta)| = {abs(ct):.3g} <= {tol:g}")
    cf, sf, tt = cos(phi), sin(phi), tan(theta)
    return np.array([
        p + r * cf * tt + q * sf * tt,
        q * cf - r * sf,
        r * cf / ct + q * sf / ct,
    ])


@njit(cache=True)
def _state_derivative(s, u, cf, g, fext, out):
    a1, a2, a3, b1, b2, b3, b4 = cf[0], cf[1], cf[2], cf[3], cf[4], cf[5], cf[6]
    cphi, sphi = np.cos(s[0]), np.sin(s[0])
    cth, sth = np.cos(s[2]), np.sin(s[2])
    cpsi, spsi = np.cos(s[4]), np.sin(s[4])
    thrust = b4 * u[0]
    out[0] = s[1]
    out[1] = a1 * s[3] * s[5] + b1 * u[1]
    out[2] = s[3]
    out[3] = a2 * s[1] * s[5] + b2 * u[2]
    out[4] = s[5]
    out[5] = a3 * s[1] * s[3] + b3 * u[3]
    out[6] = s[7]
    out[7] = -g + cphi * cth * thrust + fext[2]
    out[8] = s[9]
    out[9] = (cphi * sth * cpsi + sphi * spsi) * thrust + fext[0]
    out[10] = s[11]
    out[11] = (cphi * sth * spsi - sphi * cpsi) * thrust + fext[1]


def state_derivative(s, u, c: DerivedCoeffs, g: float, f_ext=None) -> np.ndarray:
    """Time derivative of the 12-state model.

    Rotational rows use the rate states directly as body rates in the
    gyroscopic terms (small-angle identification). Translational rows are
    ``R @ [0, 0, u1] / m - [0, 0, g] + f_ext`` with f_ext an inertial
    acceleration (force per unit mass).
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (12,):
        raise ValueError(f"state must have 12 entries, got shape {s.shape}")
    fext = np.zeros(3) if f_ext is None else np.asarray(f_ext, dtype=float)
    out = np.empty(12)
    _state_derivative(s, np.asarray(u, dtype=float), c.as_array(), float(g), fext, out)
    return out


def hover_thrust(p: PlantParams) -> float:
    return p.m * p.g
