"""Lyapunov backstepping laws for the roll, pitch, yaw and altitude subsystems.

Each subsystem is a double integrator ``(x_i, x_{i+1})`` driven by one input.
With tracking error ``e_i = x_ir - x_i`` and virtual-control error
``e_{i+1} = x_{i+1} - xdot_ir - c_i e_i`` the laws below make

    d/dt (e_i^2/2 + e_{i+1}^2/2) = -c_i e_i^2 - c_{i+1} e_{i+1}^2

hold exactly on the undisturbed plant.
"""
from dataclasses import dataclass, astuple, fields
from typing import NamedTuple

import numpy as np
from numba import njit

from .dynamics import ControlInput, DerivedCoeffs
from .errors import ConfigError, ThrustSingularity

CHANNELS = ("phi", "theta", "psi", "z")
DEFAULT_SINGULARITY_TOL = 1e-3


@dataclass(frozen=True)
class Gains:
    # attitude pairs sit under the position loop and need ~5x its bandwidth
    c1: float = 5.0
    c2: float = 5.0
    c3: float = 5.0
    c4: float = 5.0
    c5: float = 5.0
    c6: float = 5.0
    c7: float = 2.0
    c8: float = 2.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not np.isfinite(v) or v <= 0:
                raise ConfigError(f"gain {f.name} must be strictly positive, got {v!r}")

    @classmethod
    def uniform(cls, c):
        return cls(*([c] * 8))

    def as_array(self):
        return np.array(astuple(self), dtype=float)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


class ChannelReference(NamedTuple):
    value: float
    rate: float = 0.0
    accel: float = 0.0


class LyapunovValue(NamedTuple):
    V_first: float   # e_i^2 / 2
    V: float         # augmented: V_first + e_{i+1}^2 / 2
    V_dot: float     # analytical derivative on the closed loop


def ref_array(refs) -> np.ndarray:
    """Coerce four channel references into a (4, 3) float array."""
    arr = np.array([tuple(r) for r in refs], dtype=float) if not isinstance(refs, np.ndarray) \
        else np.asarray(refs, dtype=float)
    if arr.shape != (4, 3):
        raise ValueError(f"expected 4 references of (value, rate, accel), got shape {arr.shape}")
    return arr


@njit(cache=True)
def _errors(s, ref, c, out):
    for k in range(4):
        i = 2 * k
        e = ref[k, 0] - s[i]
        out[i] = e
        out[i + 1] = s[i + 1] - ref[k, 1] - c[i] * e


@njit(cache=True)
def _control_laws(s, ref, c, cf, g, tol, out):
    """Fill ``out`` with (u1, u2, u3, u4); returns False on thrust singularity."""
    cc = np.cos(s[0]) * np.cos(s[2])
    if abs(cc) <= tol:
        return False
    v = np.empty(4)
    for k in range(4):
        i = 2 * k
        e = ref[k, 0] - s[i]
        e_next = s[i + 1] - ref[k, 1] - c[i] * e
        e_dot = ref[k, 1] - s[i + 1]
        v[k] = ref[k, 2] + c[i] * e_dot + e - c[i + 1] * e_next
    a1, a2, a3, b1, b2, b3, b4 = cf[0], cf[1], cf[2], cf[3], cf[4], cf[5], cf[6]
    out[1] = (v[0] - a1 * s[3] * s[5]) / b1
    out[2] = (v[1] - a2 * s[1] * s[5]) / b2
    out[3] = (v[2] - a3 * s[1] * s[3]) / b3
    out[0] = (v[3] + g) / (b4 * cc)
    return True


@njit(cache=True)
def _lyapunov(e, out):
    for k in range(4):
        out[k] = 0.5 * e[2 * k] ** 2 + 0.5 * e[2 * k + 1] ** 2


def compute_errors(s, refs, gains: Gains) -> np.ndarray:
    """Return ``[e1, ..., e8]`` in channel order (phi, theta, psi, z)."""
    out = np.empty(8)
    _errors(np.asarray(s, dtype=float), ref_array(refs), gains.as_array(), out)
    return out


def virtual_control(e_i, ref_rate, c_i):
    """Desired value of the rate state: ``ref_rate + c_i * e_i``."""
    if c_i <= 0:
        raise ConfigError("gain must be positive")
    return ref_rate + c_i * e_i


def control_laws(s, refs, gains: Gains, c: DerivedCoeffs, g: float,
                 tol=DEFAULT_SINGULARITY_TOL) -> ControlInput:
    s = np.asarray(s, dtype=float)
    out = np.empty(4)
    if not _control_laws(s, ref_array(refs), gains.as_array(), c.as_array(), float(g),
                         float(tol), out):
        cc = np.cos(s[0]) * np.cos(s[2])
        raise ThrustSingularity(f"|cos(phi)cos(theta)| = {abs(cc):.3g} <= {tol:g}")
    return ControlInput(*out)


def lyapunov_values(errs, gains: Gains):
    """Per-subsystem Lyapunov value and its analytical closed-loop derivative."""
    e = np.asarray(errs, dtype=float)
    c = gains.as_array()
    values = []
    for k in range(4):
        i = 2 * k
        V1 = 0.5 * e[i] ** 2
        V = V1 + 0.5 * e[i + 1] ** 2
        Vdot = -c[i] * e[i] ** 2 - c[i + 1] * e[i + 1] ** 2
        values.append(LyapunovValue(V1, V, Vdot))
    return values


def analytical_vdot(errors, c) -> np.ndarray:
    """Vectorised ``-c_i e_i^2 - c_{i+1} e_{i+1}^2`` over rows of an (N, 8) error array."""
    e2 = np.asarray(errors, dtype=float) ** 2
    c = np.asarray(c, dtype=float)
    return -(c[0::2] * e2[:, 0::2] + c[1::2] * e2[:, 1::2])
