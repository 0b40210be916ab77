"""Tracking metrics, Lyapunov verification and controller comparison on SimTraces."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .backstepping import Gains, analytical_vdot
from .errors import EmptyTrace, MismatchedScenario, WrongController
from .trace import SimTrace

POSITION_CHANNELS = ("x", "y", "z")
CONTROLLED_CHANNELS = ("phi", "theta", "psi", "z")
SUBSYSTEMS = CONTROLLED_CHANNELS
BAND_FRACTION = 0.02
BAND_FLOOR = 0.01
PRE_WINDOW = 5.0


def tracking_errors(trace: SimTrace) -> dict:
    """Reference-minus-measured error per channel.

    Besides the six single channels, ``position`` is the Euclidean norm of
    the x/y/z errors and ``controlled`` the norm of the four channels both
    controllers regulate (phi, theta, psi, z).
    """
    errs = {ch: trace.ref(f"{ch}_d") - trace.state(ch)
            for ch in ("x", "y", "z", "phi", "theta", "psi")}
    errs["position"] = np.sqrt(sum(errs[c] ** 2 for c in POSITION_CHANNELS))
    errs["controlled"] = np.sqrt(sum(errs[c] ** 2 for c in CONTROLLED_CHANNELS))
    return errs


def _rms(x):
    return float(np.sqrt(np.mean(np.square(x)))) if len(x) else 0.0


def settling_time(t, e, onset=None, band=None, floor=BAND_FLOOR, pre_window=PRE_WINDOW):
    """Time after ``onset`` from which ``e`` stays inside the settling band.

    The band is centred on the steady value (mean over the final 10 % of the
    record). Unless given explicitly its half-width is the largest of 2 % of
    the peak post-onset excursion, the RMS error over the ``pre_window``
    seconds before onset, and ``floor``. Returns None when the last sample is
    still outside the band.
    """
    t = np.asarray(t, dtype=float)
    e = np.asarray(e, dtype=float)
    t0 = t[0] if onset is None else float(onset)
    after = t >= t0
    if not after.any():
        return None
    tail = t >= t[-1] - 0.1 * (t[-1] - t[0])
    dev = np.abs(e - e[tail].mean())
    if band is None:
        pre = (t < t0) & (t >= t0 - pre_window)
        band = max(BAND_FRACTION * dev[after].max(), _rms(e[pre]), floor)
    idx = np.flatnonzero(after)
    outside = idx[dev[idx] > band]
    if len(outside) == 0:
        return 0.0
    last = outside[-1]
    if last == len(t) - 1:
        return None
    return float(t[last + 1] - t0)


@dataclass
class Metrics:
    onset: float | None
    rmse: dict
    rmse_post: dict
    peak: dict
    settling: dict          # seconds after onset, None = not settled
    steady_state: dict
    effort: dict            # integral of u_i^2 dt

    def rows(self):
        for ch in self.rmse:
            yield ch, {"rmse": self.rmse[ch], "rmse_post": self.rmse_post[ch],
                       "peak": self.peak[ch], "settling": self.settling[ch],
                       "steady_state": self.steady_state[ch]}


def compute_metrics(trace: SimTrace, disturbance_onset="auto") -> Metrics:
    """Per-channel tracking metrics.

    ``disturbance_onset="auto"`` takes the onset from the trace metadata;
    None measures transients from the start of the record.
    """
    if len(trace) == 0:
        raise EmptyTrace("trace has no rows")
    if disturbance_onset == "auto":
        disturbance_onset = trace.meta.get("disturbance_onset")
    t = trace.t
    t0 = t[0] if disturbance_onset is None else float(disturbance_onset)
    after = t >= t0
    tail = t >= t[-1] - 0.1 * (t[-1] - t[0])
    m = Metrics(disturbance_onset, {}, {}, {}, {}, {}, {})
    for ch, e in tracking_errors(trace).items():
        m.rmse[ch] = _rms(e)
        m.rmse_post[ch] = _rms(e[after])
        m.peak[ch] = float(np.abs(e[after]).max()) if after.any() else 0.0
        m.steady_state[ch] = float(np.abs(e[tail]).mean())
        m.settling[ch] = settling_time(t, e, disturbance_onset)
    # the aggregate settles only once every regulated channel has
    parts = [m.settling[c] for c in CONTROLLED_CHANNELS]
    m.settling["controlled"] = None if None in parts else max(parts)
    for i in range(4):
        u = trace.inputs[:, i]
        m.effort[f"u{i + 1}"] = float(np.trapezoid(u * u, t)) if len(t) > 1 else 0.0
    return m


@dataclass
class LyapunovReport:
    rel_tol: float
    abs_tol: float
    mono_tol: float
    max_increase: dict = field(default_factory=dict)       # max V[k+1] - V[k]
    violations: dict = field(default_factory=dict)         # step indices k with V[k+1]-V[k] > tol
    max_rel_mismatch: dict = field(default_factory=dict)
    max_abs_mismatch: dict = field(default_factory=dict)
    singular_spans: list = field(default_factory=list)     # (t_start, t_end)
    n_checked: int = 0

    @property
    def monotone(self):
        return all(len(v) == 0 for v in self.violations.values())

    @property
    def derivative_ok(self):
        return all(r <= self.rel_tol for r in self.max_rel_mismatch.values())

    @property
    def passed(self):
        return self.monotone and self.derivative_ok

    def summary(self):
        lines = []
        for name in SUBSYSTEMS:
            lines.append(f"{name:6s} max dV={self.max_increase[name]:+.3e} "
                         f"violations={len(self.violations[name])} "
                         f"max rel mismatch={self.max_rel_mismatch[name]:.3e}")
        lines.append(f"singularity-margin spans: {self.singular_spans or 'none'}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _gains_from_meta(trace):
    try:
        return Gains(**trace.meta["scenario"]["controller"]["backstepping"])
    except (KeyError, TypeError):
        return Gains()


def verify_lyapunov(trace: SimTrace, gains: Gains = None, rel_tol=1e-3, abs_tol=1e-9,
                    mono_tol=1e-9, singularity_tol=None) -> LyapunovReport:
    """Check monotone decrease of V and dV/dt against the analytical derivative.

    Only steps whose neighbours are free of disturbance force are checked;
    dV/dt is a central difference on interior points. A derivative point
    passes when ``|fd - an| <= max(rel_tol * |an|, abs_tol)``; the reported
    relative mismatch is 0 for points inside the absolute floor.
    """
    if trace.controller == "pid":
        raise WrongController("Lyapunov verification needs a backstepping trace")
    if len(trace) == 0:
        raise EmptyTrace("trace has no rows")
    gains = gains or _gains_from_meta(trace)
    if singularity_tol is None:
        singularity_tol = trace.meta.get("scenario", {}).get("controller", {}) \
            .get("singularity_tol", 1e-3)
    report = LyapunovReport(rel_tol, abs_tol, mono_tol)
    V = trace.lyapunov
    clean = np.all(trace.force == 0.0, axis=1)
    pair_ok = clean[:-1] & clean[1:]
    an = analytical_vdot(trace.errors, gains.as_array())
    interior = np.zeros(len(trace), dtype=bool)
    if len(trace) >= 3:
        interior[1:-1] = clean[:-2] & clean[1:-1] & clean[2:]
    report.n_checked = int(interior.sum())
    for j, name in enumerate(SUBSYSTEMS):
        inc = np.diff(V[:, j])
        inc = np.where(pair_ok, inc, -np.inf)
        report.max_increase[name] = float(inc.max()) if len(inc) else 0.0
        if report.max_increase[name] == -np.inf:
            report.max_increase[name] = 0.0
        report.violations[name] = np.flatnonzero(inc > mono_tol).tolist()
        if interior.any():
            k = np.flatnonzero(interior)
            fd = (V[k + 1, j] - V[k - 1, j]) / (trace.t[k + 1] - trace.t[k - 1])
            err = np.abs(fd - an[k, j])
            rel = np.where(err <= abs_tol, 0.0, err / np.maximum(np.abs(an[k, j]), 1e-300))
            report.max_rel_mismatch[name] = float(rel.max())
            report.max_abs_mismatch[name] = float(err.max())
        else:
            report.max_rel_mismatch[name] = 0.0
            report.max_abs_mismatch[name] = 0.0
    cc = np.abs(np.cos(trace.states[:, 0]) * np.cos(trace.states[:, 2]))
    low = cc < 10 * singularity_tol
    if low.any():
        edges = np.flatnonzero(np.diff(np.r_[0, low.astype(int), 0]))
        for a, b in zip(edges[::2], edges[1::2]):
            report.singular_spans.append((float(trace.t[a]), float(trace.t[b - 1])))
    return report


SHARED_FIELDS = ("plant", "trajectory", "disturbance", "h", "horizon", "position_loop",
                 "initial_state")


@dataclass
class Comparison:
    labels: tuple
    metrics: tuple
    traces: tuple
    rows: list          # (metric, channel, value_a, value_b, verdict)

    def to_text(self):
        a, b = self.labels
        out = [f"{'metric':12s} {'channel':10s} {a:>14s} {b:>14s}  verdict"]
        for metric, ch, va, vb, verdict in self.rows:
            out.append(f"{metric:12s} {ch:10s} {_fmt(va):>14s} {_fmt(vb):>14s}  {verdict}")
        return "\n".join(out)

    def to_csv(self, path):
        import csv
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["metric", "channel", *self.labels, "verdict"])
            for metric, ch, va, vb, verdict in self.rows:
                w.writerow([metric, ch, "" if va is None else repr(va),
                            "" if vb is None else repr(vb), verdict])


def _fmt(v):
    return "not settled" if v is None else f"{v:.6g}"


def _verdict(va, vb, labels):
    # lower is better; None (never settled) is worst
    if va == vb:
        return "tie"
    if va is None:
        return f"{labels[1]} better"
    if vb is None:
        return f"{labels[0]} better"
    return f"{labels[0]} better" if va < vb else f"{labels[1]} better"


def compare(cfg_a, cfg_b, run=None, concurrent=False) -> Comparison:
    """Run two scenarios that differ only in their controller and tabulate metrics."""
    from .simulation import run_scenario
    run = run or run_scenario
    for name in SHARED_FIELDS:
        if getattr(cfg_a, name) != getattr(cfg_b, name):
            raise MismatchedScenario(f"scenarios differ in {name!r}")
    if concurrent:
        with ThreadPoolExecutor(max_workers=2) as pool:
            traces = tuple(pool.map(run, (cfg_a, cfg_b)))
    else:
        traces = (run(cfg_a), run(cfg_b))
    labels = (cfg_a.controller, cfg_b.controller)
    if labels[0] == labels[1]:
        labels = (labels[0] + "_a", labels[1] + "_b")
    metrics = tuple(compute_metrics(tr) for tr in traces)
    rows = []
    ma, mb = metrics
    for metric in ("rmse", "rmse_post", "peak", "settling", "steady_state"):
        da, db = getattr(ma, metric), getattr(mb, metric)
        for ch in da:
            rows.append((metric, ch, da[ch], db[ch], _verdict(da[ch], db[ch], labels)))
    for k in ma.effort:
        rows.append(("effort", k, ma.effort[k], mb.effort[k],
                     _verdict(ma.effort[k], mb.effort[k], labels)))
    return Comparison(labels, metrics, traces, rows)
