"""SimTrace container and its CSV serialization.

CSV layout: one ``# meta: {json}`` comment line, a header line, then one
row per step with every float written in ``%.17g`` (exact round trip).
"""
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import STATE_NAMES

REF_NAMES = tuple(f"{ch}_d{suffix}" for ch in ("phi", "theta", "psi", "z", "x", "y")
                  for suffix in ("", "_dot", "_ddot"))
COLUMNS = (("t",) + tuple(f"x{i}" for i in range(1, 13)) + ("u1", "u2", "u3", "u4")
           + REF_NAMES + tuple(f"e{i}" for i in range(1, 9))
           + ("V_phi", "V_theta", "V_psi", "V_z", "fdx", "fdy", "fdz"))

_SLICES = {
    "states": slice(1, 13),
    "inputs": slice(13, 17),
    "refs": slice(17, 35),
    "errors": slice(35, 43),
    "lyapunov": slice(43, 47),
    "force": slice(47, 50),
}


@dataclass
class SimTrace:
    t: np.ndarray
    states: np.ndarray      # (N, 12)
    inputs: np.ndarray      # (N, 4)
    refs: np.ndarray        # (N, 18): phi, theta, psi, z, x, y x (value, rate, accel)
    errors: np.ndarray      # (N, 8), NaN for the PID controller
    lyapunov: np.ndarray    # (N, 4), NaN for the PID controller
    force: np.ndarray       # (N, 3) disturbance force, N
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def controller(self):
        return self.meta.get("controller")

    @property
    def status(self):
        return self.meta.get("status", "ok")

    @property
    def terminated(self):
        return self.status != "ok"

    @property
    def h(self):
        return self.meta["h"]

    def state(self, name):
        return self.states[:, STATE_NAMES.index(name)]

    def ref(self, name):
        return self.refs[:, REF_NAMES.index(name)]

    def as_matrix(self):
        return np.column_stack([self.t, self.states, self.inputs, self.refs, self.errors,
                                self.lyapunov, self.force])

    @classmethod
    def from_matrix(cls, M, meta=None):
        M = np.asarray(M, dtype=float).reshape(-1, len(COLUMNS))
        parts = {k: M[:, s].copy() for k, s in _SLICES.items()}
        return cls(t=M[:, 0].copy(), meta=dict(meta or {}), **parts)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("# meta: " + json.dumps(self.meta, sort_keys=True) + "\n")
            fh.write(",".join(COLUMNS) + "\n")
            np.savetxt(fh, self.as_matrix(), fmt="%.17g", delimiter=",")

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            first = fh.readline()
            header = fh.readline().strip()
            if not first.startswith("# meta: "):
                raise ValueError(f"{path}: missing '# meta:' line")
            if tuple(header.split(",")) != COLUMNS:
                raise ValueError(f"{path}: unexpected CSV header")
            meta = json.loads(first[len("# meta: "):])
            body = fh.read()
        if body.strip():
            M = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
        else:
            M = np.zeros((0, len(COLUMNS)))
        return cls.from_matrix(M, meta)

    def equals(self, other):
        """Bitwise equality of every numeric field (NaN == NaN) and the metadata."""
        a, b = self.as_matrix(), other.as_matrix()
        return (a.shape == b.shape and np.array_equal(a, b, equal_nan=True)
                and self.meta == other.meta)
