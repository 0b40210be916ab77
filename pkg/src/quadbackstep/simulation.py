"""Fixed-step RK4 closed-loop integration.

At every RK4 stage the chain trajectory -> outer loop -> controller ->
disturbance -> plant is re-evaluated (``hold="stage"``); with
``hold="zoh"`` the control computed at the step start is held over the step.
"""
import json

import numpy as np
from numba import njit

from .backstepping import _control_laws, _errors, _lyapunov
from .dynamics import _state_derivative, derive_coeffs
from .errors import NumericalBlowup, ThrustSingularity
from .guidance import _eval_trajectory, _outer_loop
from .pid import _pid_accumulate, _pid_output
from .scenario import DisturbanceProfile, ScenarioConfig
from .trace import COLUMNS, SimTrace

BLOWUP_LIMIT = 1e6
OK, SINGULAR, BLOWUP = 0, 1, 2
STATUS_NAMES = {OK: "ok", SINGULAR: "thrust_singularity", BLOWUP: "numerical_blowup"}


def wind_force(profile: DisturbanceProfile, t: float) -> np.ndarray:
    """Disturbance force (N): zero before ``t0``, ``cd * wind_speed * direction`` after."""
    if profile is None or t < profile.t0:
        return np.zeros(3)
    return profile.cd * profile.wind_speed * np.asarray(profile.direction)


def rk4_step(s, t, h, rhs):
    """One classical Runge-Kutta step of ``ds/dt = rhs(t, s)``.

    Exceptions raised by ``rhs`` (e.g. ThrustSingularity) propagate with the
    offending stage time stored on ``exc.t`` when the exception supports it.
    """
    s = np.asarray(s, dtype=float)
    stage_t = t
    try:
        k1 = np.asarray(rhs(t, s))
        stage_t = t + 0.5 * h
        k2 = np.asarray(rhs(stage_t, s + 0.5 * h * k1))
        k3 = np.asarray(rhs(stage_t, s + 0.5 * h * k2))
        stage_t = t + h
        k4 = np.asarray(rhs(stage_t, s + h * k3))
    except (ThrustSingularity, NumericalBlowup) as exc:
        exc.t = stage_t
        raise
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True)
def _closed_loop(t, s, hold_u, use_hold, ctrl, cf, g, m, c, pg, integ, tol,
                 clamp, u1_max, tau_max,
                 tkind, tparams, ttab, tvals,
                 loop_on, kp_pos, kd_pos, att_lim, ff,
                 dist_on, t0, fvec,
                 D, ref, xy, u, fext, ds):
    """Evaluate the closed-loop right-hand side; returns False on singularity."""
    _eval_trajectory(tkind, tparams, ttab, tvals, t, D)
    ref[:, :] = 0.0
    if loop_on:
        _outer_loop(s, D, s[4], kp_pos, kd_pos, att_lim, g, ff, xy)
        for j in range(3):
            ref[0, j] = xy[0, j]
            ref[1, j] = xy[1, j]
    for j in range(3):
        ref[2, j] = D[3, j]
        ref[3, j] = D[2, j]
    if use_hold:
        for j in range(4):
            u[j] = hold_u[j]
    else:
        if ctrl == 0:
            ok = _control_laws(s, ref, c, cf, g, tol, u)
        else:
            ok = _pid_output(s, ref, pg, integ, m, g, tol, u)
        if not ok:
            return False
        if clamp:
            u[0] = min(max(u[0], 0.0), u1_max)
            for j in range(1, 4):
                u[j] = min(max(u[j], -tau_max), tau_max)
    if dist_on and t >= t0:
        for j in range(3):
            fext[j] = fvec[j] / m
    else:
        fext[:] = 0.0
    _state_derivative(s, u, cf, g, fext, ds)
    return True


@njit(cache=True)
def _run(x0, h, n, zoh, ctrl, cf, g, m, c, pg, windup, tol, clamp, u1_max, tau_max,
         tkind, tparams, ttab, tvals, loop_on, kp_pos, kd_pos, att_lim, ff,
         dist_on, t0, fvec, out):
    """Integrate and write trace rows into ``out``; returns (rows, status, fail_time)."""
    s = x0.copy()
    integ = np.zeros(4)
    D = np.empty((4, 5))
    ref = np.empty((4, 3))
    xy = np.empty((2, 3))
    u = np.empty(4)
    u0 = np.empty(4)
    fext = np.empty(3)
    e = np.empty(8)
    V = np.empty(4)
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    for k in range(n + 1):
        t = k * h
        if not _closed_loop(t, s, u0, False, ctrl, cf, g, m, c, pg, integ, tol, clamp,
                            u1_max, tau_max, tkind, tparams, ttab, tvals, loop_on, kp_pos,
                            kd_pos, att_lim, ff, dist_on, t0, fvec, D, ref, xy, u, fext, k1):
            return k, 1, t
        u0[:] = u
        row = out[k]
        row[0] = t
        row[1:13] = s
        row[13:17] = u
        for ch in range(4):
            row[17 + 3 * ch:20 + 3 * ch] = ref[ch]
        for j in range(3):
            row[29 + j] = D[0, j]
            row[32 + j] = D[1, j]
        if ctrl == 0:
            _errors(s, ref, c, e)
            _lyapunov(e, V)
            row[35:43] = e
            row[43:47] = V
        else:
            row[35:47] = np.nan
        row[47:50] = fext * m
        if k == n:
            break
        for j in range(12):
            tmp[j] = s[j] + 0.5 * h * k1[j]
        if not _closed_loop(t + 0.5 * h, tmp, u0, zoh, ctrl, cf, g, m, c, pg, integ, tol,
                            clamp, u1_max, tau_max, tkind, tparams, ttab, tvals, loop_on,
                            kp_pos, kd_pos, att_lim, ff, dist_on, t0, fvec, D, ref, xy, u,
                            fext, k2):
            return k + 1, 1, t + 0.5 * h
        for j in range(12):
            tmp[j] = s[j] + 0.5 * h * k2[j]
        if not _closed_loop(t + 0.5 * h, tmp, u0, zoh, ctrl, cf, g, m, c, pg, integ, tol,
                            clamp, u1_max, tau_max, tkind, tparams, ttab, tvals, loop_on,
                            kp_pos, kd_pos, att_lim, ff, dist_on, t0, fvec, D, ref, xy, u,
                            fext, k3):
            return k + 1, 1, t + 0.5 * h
        for j in range(12):
            tmp[j] = s[j] + h * k3[j]
        if not _closed_loop(t + h, tmp, u0, zoh, ctrl, cf, g, m, c, pg, integ, tol,
                            clamp, u1_max, tau_max, tkind, tparams, ttab, tvals, loop_on,
                            kp_pos, kd_pos, att_lim, ff, dist_on, t0, fvec, D, ref, xy, u,
                            fext, k4):
            return k + 1, 1, t + h
        if ctrl == 1:
            # references of the step start, rebuilt after the stage calls
            _closed_loop(t, s, u0, True, ctrl, cf, g, m, c, pg, integ, tol, clamp, u1_max,
                         tau_max, tkind, tparams, ttab, tvals, loop_on, kp_pos, kd_pos,
                         att_lim, ff, dist_on, t0, fvec, D, ref, xy, u, fext, tmp)
            _pid_accumulate(s, ref, pg, integ, windup, h)
        for j in range(12):
            s[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if not np.isfinite(s[j]) or abs(s[j]) > BLOWUP_LIMIT:
                return k + 1, 2, t + h
    return n + 1, 0, np.nan


def run_scenario(cfg: ScenarioConfig) -> SimTrace:
    """Simulate ``cfg`` from t = 0 to its horizon.

    Controller singularities and state blow-up do not raise: the trace is
    truncated at the last complete row and ``meta['status']`` records the
    reason along with ``meta['fail_time']``.
    """
    p = cfg.plant
    cf = derive_coeffs(p).as_array()
    n = cfg.n_steps
    tkind, tparams, ttab, tvals = cfg.trajectory.packed()
    loop = cfg.position_loop
    dist = cfg.disturbance
    fvec = wind_force(dist, np.inf) if dist is not None else np.zeros(3)
    out = np.empty((n + 1, len(COLUMNS)))
    rows, status, fail_time = _run(
        cfg.x0().astype(float), float(cfg.h), n, cfg.hold == "zoh",
        0 if cfg.controller == "backstepping" else 1,
        cf, float(p.g), float(p.m), cfg.gains.as_array(), cfg.pid.as_array(),
        float(cfg.pid.windup_limit), float(cfg.singularity_tol),
        cfg.clamp.enabled, float(cfg.clamp.u1_max), float(cfg.clamp.tau_max),
        tkind, tparams, ttab, tvals,
        loop.enabled, float(loop.kp), float(loop.kd), float(loop.attitude_limit),
        loop.feedforward,
        dist is not None, float(dist.t0) if dist is not None else 0.0, fvec,
        out)
    meta = {
        "controller": cfg.controller,
        "h": cfg.h,
        "horizon": cfg.horizon,
        "scenario_hash": cfg.digest(),
        "scenario": cfg.to_dict(),
        "status": STATUS_NAMES[status],
        "fail_time": None if status == OK else float(fail_time),
        "disturbance_onset": None if dist is None else dist.t0,
        "position_loop": loop.enabled,
    }
    meta = json.loads(json.dumps(meta))
    return SimTrace.from_matrix(out[:rows], meta)


def raise_for_status(trace: SimTrace):
    """Turn a terminated trace back into the matching exception."""
    if trace.status == "thrust_singularity":
        raise ThrustSingularity(f"thrust singularity at t = {trace.meta['fail_time']}",
                                t=trace.meta["fail_time"])
    if trace.status == "numerical_blowup":
        raise NumericalBlowup(f"state exceeded {BLOWUP_LIMIT:g} at t = {trace.meta['fail_time']}",
                              t=trace.meta["fail_time"])
