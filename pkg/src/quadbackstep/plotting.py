"""Static SVG time plots of one or more traces (deterministic output)."""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

PLOTS = ("positions", "attitude", "inputs", "lyapunov")


def _label(trace, i, traces):
    name = trace.controller or f"trace {i}"
    names = [tr.controller for tr in traces]
    return f"{name} ({i})" if names.count(name) > 1 else name


def _save(fig, path):
    with plt.rc_context({"svg.hashsalt": "quadbackstep", "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def emit_plots(traces, out_dir):
    """Write positions/attitude/inputs/lyapunov SVGs into ``out_dir``; returns the paths."""
    if not isinstance(traces, (list, tuple)):
        traces = [traces]
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create plot directory {out_dir}: {exc}") from exc
    paths = {}

    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 7))
    for i, tr in enumerate(traces):
        lab = _label(tr, i, traces)
        for ax, ch in zip(axes, ("x", "y", "z")):
            line, = ax.plot(tr.t, tr.state(ch), label=lab)
            ax.plot(tr.t, tr.ref(f"{ch}_d"), "--", color=line.get_color(), lw=0.8)
            ax.set_ylabel(f"{ch} [m]")
    axes[0].legend(loc="upper right")
    axes[-1].set_xlabel("t [s]")
    paths["positions"] = os.path.join(out_dir, "positions.svg")
    _save(fig, paths["positions"])

    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 7))
    for i, tr in enumerate(traces):
        lab = _label(tr, i, traces)
        for ax, ch in zip(axes, ("phi", "theta", "psi")):
            line, = ax.plot(tr.t, tr.state(ch), label=lab)
            ax.plot(tr.t, tr.ref(f"{ch}_d"), "--", color=line.get_color(), lw=0.8)
            ax.set_ylabel(f"{ch} [rad]")
    axes[0].legend(loc="upper right")
    axes[-1].set_xlabel("t [s]")
    paths["attitude"] = os.path.join(out_dir, "attitude.svg")
    _save(fig, paths["attitude"])

    fig, axes = plt.subplots(4, 1, sharex=True, figsize=(8, 8))
    units = ("N", "N m", "N m", "N m")
    for i, tr in enumerate(traces):
        lab = _label(tr, i, traces)
        for j, ax in enumerate(axes):
            ax.plot(tr.t, tr.inputs[:, j], label=lab)
            ax.set_ylabel(f"u{j + 1} [{units[j]}]")
    axes[0].legend(loc="upper right")
    axes[-1].set_xlabel("t [s]")
    paths["inputs"] = os.path.join(out_dir, "inputs.svg")
    _save(fig, paths["inputs"])

    fig, axes = plt.subplots(4, 1, sharex=True, figsize=(8, 8))
    plotted = False
    for i, tr in enumerate(traces):
        V = tr.lyapunov
        if not np.isfinite(V).any():
            continue
        plotted = True
        lab = _label(tr, i, traces)
        for j, (ax, ch) in enumerate(zip(axes, ("phi", "theta", "psi", "z"))):
            ax.semilogy(tr.t, np.maximum(V[:, j], 1e-300), label=lab)
            ax.set_ylabel(f"V_{ch}")
    if plotted:
        axes[0].legend(loc="upper right")
    else:
        axes[0].set_title("no Lyapunov data (PID traces only)")
    axes[-1].set_xlabel("t [s]")
    paths["lyapunov"] = os.path.join(out_dir, "lyapunov.svg")
    _save(fig, paths["lyapunov"])
    return paths
