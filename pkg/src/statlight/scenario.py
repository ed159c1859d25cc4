"""Run orchestration: event loop, engines, measurements, output files.

A run is a sequence of windows separated by events (schedule breakpoints,
storage threshold crossings, snapshot times). Transport windows advance the
banded implicit integrator; storage windows advance the stored coherence
analytically. With engine "both", the longest constant-control window is
replayed spectrally and the two engines are scored against each other.
"""

from __future__ import annotations

import dataclasses
import json
import math
import pathlib

import numpy as np

from .config import RunConfig, config_echo, render_config
from .diagnostics import (channel_energies, compare_to_oracle, linear_fit,
                          moments, relative_phase)
from .errors import (EmptyField, GuardBandOverflow, NonPhysicalParameter,
                     SimulationError)
from .integrator import (MODE_PDE, MODE_STORAGE, build_absorbers, init_state,
                         release, sponge_energy_fraction, step,
                         storage_advance, store)
from .medium import (HYSTERESIS, coefficients, group_velocity, power_crossings,
                     pulse_length, stationarity_residual, tau_of_t,
                     tau_rate_at, validity_report)
from .oracle import decay_exponent, width_b, width_growth_rate
from .perturber import (interaction_rate, perturber_density,
                        phase_rate_stationary, phase_shift_traveling,
                        stationary_rate_measured_scale)
from .spectral import (check_guard_band, fields_from_state, propagate,
                       spectral_state_from_fields)

# energy fraction in the sponges that aborts a run meant to stay confined
SPONGE_ABORT_FRACTION = 1e-4
# |stationarity residual| above this marks a deliberate transit or release,
# where outflow through an edge is the point and not an error
EXIT_RESIDUAL = 0.9
GUARD_WIDTHS = 6.0
FIT_MIN_POINTS = 5
PHASE_MASK_LEVEL = 0.5
# injected runs only: fits start this many pulse durations past the source peak
SOURCE_CLEAR_FACTOR = 3.5

TRAJECTORY_COLUMNS = (
    "t", "tau", "mode", "e_plus", "e_minus", "phi_energy", "phi_area",
    "phi_centroid", "phi_rms", "phi_peak", "a_plus_peak", "a_minus_peak",
    "probe_re", "probe_im", "sponge_fraction")


@dataclasses.dataclass
class Snapshot:
    index: int
    t: float
    tau: float
    mode: str
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    phi: np.ndarray


@dataclasses.dataclass
class EngineRun:
    snapshots: list
    trajectory: list
    storage_windows: list
    sponge_max: float
    tau_end: float
    mode_end: str
    warnings: list


@dataclasses.dataclass
class RunResult:
    config: RunConfig
    snapshots: list
    trajectory: list
    summary: dict
    reference: "EngineRun | None" = None


@dataclasses.dataclass
class _Event:
    t: float
    snap: bool = False
    kind: str | None = None


def _tol(config: RunConfig) -> float:
    span = config.run.t_end - config.schedule.t_start
    return 1e-9 * max(1.0, span)


def _snapshot_times(config: RunConfig) -> list[float]:
    t0 = config.schedule.t_start
    t_end = config.run.t_end
    tol = _tol(config)
    times = [t0]
    k = 1
    while True:
        t = t0 + k * config.run.snapshot_interval
        if t >= t_end - tol:
            break
        times.append(t)
        k += 1
    times.append(t_end)
    return times


def _build_events(config: RunConfig, extra=()) -> list[_Event]:
    sched = config.schedule
    t0, t_end = sched.t_start, config.run.t_end
    tol = _tol(config)
    tagged = [(t, "snap") for t in _snapshot_times(config)]
    tagged += [(float(t), "snap") for t in extra if t0 - tol <= t <= t_end + tol]
    tagged += [(b, "break") for b in sched.breakpoints() if t0 + tol < b < t_end - tol]
    tagged += [(t, kind) for t, kind in power_crossings(config.medium, sched)
               if t0 + tol < t <= t_end - tol]
    tagged.sort(key=lambda p: p[0])
    events: list[_Event] = []
    for t, tag in tagged:
        if events and t - events[-1].t <= tol:
            ev = events[-1]
            if tag == "snap":
                ev.snap = True
            elif tag in ("off", "on"):
                # the threshold crossing is the physically exact event time
                ev.kind = tag
                ev.t = t
        else:
            events.append(_Event(t, snap=(tag == "snap"),
                                 kind=tag if tag in ("off", "on") else None))
    return events


def _split_at_ramps(schedule, a: float, b: float):
    """(lo, hi, ramp_or_None) subwindows of [a, b], cut at ramp zone edges."""
    cuts = {a, b}
    zones = []
    for i, seg in enumerate(schedule.segments):
        if i == 0:
            continue
        lo = seg.t_start
        hi = min(seg.t_start + seg.ramp, seg.t_end)
        if hi > a and lo < b:
            zones.append((max(lo, a), min(hi, b), seg.ramp))
            cuts.add(max(lo, a))
            cuts.add(min(hi, b))
    pts = sorted(cuts)
    out = []
    for lo, hi in zip(pts, pts[1:]):
        if hi <= lo:
            continue
        ramp = next((r for zl, zh, r in zones if zl <= lo and hi <= zh), None)
        out.append((lo, hi, ramp))
    return out


def _pde_advance(state, schedule, a: float, b: float, safety: float,
                 pulse, w_plus, w_minus, perturber) -> None:
    med = state.medium
    for lo, hi, ramp in _split_at_ramps(schedule, a, b):
        ts = np.linspace(lo, hi, 65 if ramp else 2)
        vmax = max(abs(group_velocity(med, *schedule.values(float(s)))) for s in ts)
        rmax = max(tau_rate_at(med, schedule, float(s)) for s in ts)
        cap = 0.5 * med.dz / max(vmax, rmax, 1e-300) * safety
        if ramp is not None:
            cap = min(cap, ramp / 64.0)
        n = max(1, math.ceil((hi - lo) / cap))
        dt = (hi - lo) / n
        for _ in range(n):
            step(state, schedule, dt, pulse, w_plus, w_minus, perturber)
        state.t = hi


def _probe_index(config: RunConfig):
    if config.run.probe_z is None:
        return None
    z = config.medium.grid()
    return int(np.argmin(np.abs(z - config.run.probe_z)))


def _record(config: RunConfig, t: float, tau: float, mode: str,
            psi_plus, psi_minus, spin, sponge: float, probe_idx, index: int):
    med, sched = config.medium, config.schedule
    z = med.grid()
    if mode == MODE_STORAGE:
        phi = np.array(spin, copy=True)
        ep = em = 0.0
        app = apm = 0.0
    else:
        op, om = sched.values(t)
        co = coefficients(med, op, om)
        phi = co.alpha_plus * psi_plus + co.alpha_minus * psi_minus
        ep, em = channel_energies(med, psi_plus, psi_minus, op, om)
        app = float(np.max(np.abs(psi_plus))) * op / math.sqrt(med.gamma)
        apm = float(np.max(np.abs(psi_minus))) * om / (math.sqrt(med.gamma) * med.r_g)
    try:
        m = moments(z, phi, med.dz)
        energy, cen, rms, peak = m.energy, m.centroid, m.rms, m.peak
    except EmptyField:
        energy, peak = 0.0, 0.0
        cen = rms = float("nan")
    row = {"t": t, "tau": tau, "mode": 0.0 if mode == MODE_PDE else 1.0,
           "e_plus": ep, "e_minus": em, "phi_energy": energy,
           "phi_area": float(np.abs(np.sum(phi))) * med.dz,
           "phi_centroid": cen, "phi_rms": rms, "phi_peak": peak,
           "a_plus_peak": app, "a_minus_peak": apm,
           "probe_re": float("nan"), "probe_im": float("nan"),
           "sponge_fraction": sponge}
    if probe_idx is not None and mode == MODE_PDE:
        val = psi_plus[probe_idx]
        row["probe_re"], row["probe_im"] = float(val.real), float(val.imag)
    snap = Snapshot(index, t, tau, mode,
                    np.array(psi_plus, copy=True),
                    np.array(psi_minus, copy=True), phi)
    return snap, row


def _run_direct(config: RunConfig, include_perturber: bool,
                extra_snap_times=()) -> EngineRun:
    med, sched, pulse, run = (config.medium, config.schedule,
                              config.pulse, config.run)
    state = init_state(med, sched, pulse)
    op0, om0 = sched.values(sched.t_start)
    if state.mode == MODE_PDE and op0 ** 2 + om0 ** 2 < med.storage_threshold:
        # injected run opening with the controls off waits in storage
        state.mode = MODE_STORAGE
        state.spin = np.zeros(med.grid_points, dtype=complex)

    w_plus, w_minus = build_absorbers(med)
    pert = None
    if include_perturber and config.perturber is not None:
        density, _ = perturber_density(med, config.perturber)
        pert = (density, interaction_rate(config.perturber))
    probe_idx = _probe_index(config)

    events = _build_events(config, extra_snap_times)
    snapshots: list[Snapshot] = []
    traj: list[dict] = []
    warnings: list[str] = []
    storage_windows: list[list] = []
    storage_open = sched.t_start if state.mode == MODE_STORAGE else None
    sponge_max = 0.0

    def record():
        nonlocal sponge_max
        sponge = (sponge_energy_fraction(state, w_plus, w_minus)
                  if state.mode == MODE_PDE else 0.0)
        sponge_max = max(sponge_max, sponge)
        snap, row = _record(config, state.t, state.tau, state.mode,
                            state.psi_plus, state.psi_minus, state.spin,
                            sponge, probe_idx, len(snapshots))
        snapshots.append(snap)
        traj.append(row)
        if state.mode == MODE_PDE and sponge > SPONGE_ABORT_FRACTION:
            op, om = sched.values(state.t)
            held = op ** 2 + om ** 2 >= HYSTERESIS * med.storage_threshold
            if held and abs(stationarity_residual(med, op, om)) < EXIT_RESIDUAL:
                raise GuardBandOverflow(
                    f"{sponge:.3g} of the pulse energy reached the absorbing "
                    f"edges at t = {state.t:g} while the controls hold the pulse")

    record()
    for ev in events[1:]:
        if state.mode == MODE_PDE:
            _pde_advance(state, sched, state.t, ev.t, run.dt_safety,
                         pulse, w_plus, w_minus, pert)
        else:
            storage_advance(state, ev.t - state.t)
        if ev.kind == "off" and state.mode == MODE_PDE:
            store(state, sched)
            storage_open = ev.t
        elif ev.kind == "on" and state.mode == MODE_STORAGE:
            release(state, sched)
            storage_windows.append([storage_open, ev.t])
            storage_open = None
        if ev.snap:
            record()
    if storage_open is not None:
        storage_windows.append([storage_open, None])
    return EngineRun(snapshots, traj, storage_windows, sponge_max,
                     state.tau, state.mode, warnings)


def _run_spectral(config: RunConfig) -> EngineRun:
    med, sched, pulse = config.medium, config.schedule, config.pulse
    state0 = init_state(med, sched, pulse)
    if state0.mode != MODE_PDE:
        raise NonPhysicalParameter(
            "the spectral engine needs a transport-mode start "
            "(controls above the storage threshold)")
    sstate = spectral_state_from_fields(med, state0.psi_plus,
                                        t=sched.t_start, tau=0.0)
    tau_end = tau_of_t(med, sched, config.run.t_end)
    half = GUARD_WIDTHS * width_b(med, sched, pulse, tau_end) / math.sqrt(2.0)
    probe_idx = _probe_index(config)

    times = _snapshot_times(config)
    snapshots: list[Snapshot] = []
    traj: list[dict] = []

    def record(pp, pm):
        snap, row = _record(config, sstate.t, sstate.tau, MODE_PDE,
                            pp, pm, None, 0.0, probe_idx, len(snapshots))
        snapshots.append(snap)
        traj.append(row)
        if math.isfinite(row["phi_centroid"]):
            check_guard_band(med, pp, pm, row["phi_centroid"], half)

    record(*fields_from_state(sstate))
    for ta, tb in zip(times, times[1:]):
        rate = tau_rate_at(med, sched, 0.5 * (ta + tb))
        propagate(sstate, sched, rate * (tb - ta))
        sstate.t = tb
        record(*fields_from_state(sstate))
    return EngineRun(snapshots, traj, [], 0.0, sstate.tau, MODE_PDE, [])


def _fit_window(config: RunConfig):
    """Last constant-control window usable for measurement fits."""
    med, sched, pulse = config.medium, config.schedule, config.pulse
    theta_on = HYSTERESIS * med.storage_threshold
    best = None
    for lo, hi in sched.constant_windows():
        lo2 = max(lo, sched.t_start)
        hi2 = min(hi, config.run.t_end)
        if not pulse.prepared:
            lo2 = max(lo2, pulse.injection_time + SOURCE_CLEAR_FACTOR * pulse.duration)
        if hi2 <= lo2:
            continue
        op, om = sched.values(0.5 * (lo2 + hi2))
        if op ** 2 + om ** 2 < theta_on:
            continue
        best = (lo2, hi2)
    return best


def _replay_window(config: RunConfig):
    # replay needs a window free of source inflow and storage, same gate
    return _fit_window(config)


def _cross_engine(config: RunConfig, primary: EngineRun):
    window = _replay_window(config)
    if window is None:
        return None, ["cross-engine replay skipped: no suitable constant window"]
    lo, hi = window
    tol = _tol(config)
    snaps = [s for s in primary.snapshots
             if lo - tol <= s.t <= hi + tol and s.mode == MODE_PDE]
    if len(snaps) < 2:
        return None, ["cross-engine replay skipped: too few snapshots in window"]
    med, sched = config.medium, config.schedule
    s0 = snaps[0]
    sstate = spectral_state_from_fields(med, s0.psi_plus, t=s0.t, tau=s0.tau)
    for sa, sb in zip(snaps, snaps[1:]):
        rate = tau_rate_at(med, sched, 0.5 * (sa.t + sb.t))
        propagate(sstate, sched, rate * (sb.t - sa.t))
        sstate.t = sb.t
    pp, pm = fields_from_state(sstate)
    ref = snaps[-1]
    den = (float(np.linalg.norm(ref.psi_plus)) ** 2
           + float(np.linalg.norm(ref.psi_minus)) ** 2)
    if den == 0.0:
        return None, ["cross-engine replay skipped: empty window"]
    num = (float(np.linalg.norm(pp - ref.psi_plus)) ** 2
           + float(np.linalg.norm(pm - ref.psi_minus)) ** 2)
    return {"window": [lo, hi], "steps": len(snaps) - 1,
            "l2": math.sqrt(num / den)}, []


def _longest_true_run(mask) -> slice:
    best_len, best_start, cur = 0, 0, None
    for i, m in enumerate(list(mask) + [False]):
        if m and cur is None:
            cur = i
        elif not m and cur is not None:
            if i - cur > best_len:
                best_len, best_start = i - cur, cur
            cur = None
    return slice(best_start, best_start + best_len)


def _perturber_measurement(config: RunConfig, primary: EngineRun,
                           reference: EngineRun):
    med, sched, spec = config.medium, config.schedule, config.perturber
    if config.run.probe_z is None:
        return None, ["perturber phase needs run.probe_z; measurement skipped"]
    z = med.grid()
    idx = int(np.argmin(np.abs(z - config.run.probe_z)))
    pairs = [(sp, sr) for sp, sr in zip(primary.snapshots, reference.snapshots)
             if sp.mode == MODE_PDE and sr.mode == MODE_PDE]
    if len(pairs) < 2:
        return None, ["perturber phase skipped: too few transport snapshots"]
    tseries = np.array([sp.t for sp, _ in pairs])
    p = np.array([sp.psi_plus[idx] for sp, _ in pairs])
    r = np.array([sr.psi_plus[idx] for _, sr in pairs])
    amp = np.minimum(np.abs(p), np.abs(r))
    top = float(np.max(amp))
    if top <= 0.0:
        return None, ["perturber phase skipped: probe never sees the pulse"]
    sl = _longest_true_run(amp >= PHASE_MASK_LEVEL * top)
    if sl.stop - sl.start < 2:
        return None, ["perturber phase skipped: pulse too brief at the probe"]
    try:
        phi = relative_phase(p[sl], r[sl])
    except SimulationError as exc:
        return None, [f"perturber phase skipped: {exc}"]
    tm = tseries[sl]
    result = {"probe_z": float(z[idx]),
              "window": [float(tm[0]), float(tm[-1])],
              "phase_final": float(phi[-1]),
              "phase_slope": None, "phase_r2": None,
              "pi_crossing_time": None}
    if len(phi) >= FIT_MIN_POINTS:
        slope, _, r2 = linear_fit(tm, phi)
        result["phase_slope"] = slope
        result["phase_r2"] = r2
    for i in range(1, len(phi)):
        if phi[i - 1] < math.pi <= phi[i]:
            frac = (math.pi - phi[i - 1]) / (phi[i] - phi[i - 1])
            result["pi_crossing_time"] = float(tm[i - 1] + frac * (tm[i] - tm[i - 1]))
            break
    chi, t_pi = phase_rate_stationary(med, spec)
    result["predicted_rate"] = chi
    result["predicted_t_pi"] = t_pi
    mid = 0.5 * (tm[0] + tm[-1])
    op, om = sched.values(mid)
    result["rate_scale"] = stationary_rate_measured_scale(med, spec, op, om)
    try:
        result["predicted_shift_traveling"] = phase_shift_traveling(
            med, coefficients(med, op, om), spec)
    except SimulationError:
        result["predicted_shift_traveling"] = None
    return result, []


def _measurements(config: RunConfig, primary: EngineRun,
                  reference: "EngineRun | None"):
    med, sched, pulse = config.medium, config.schedule, config.pulse
    warnings: list[str] = []
    out: dict = {"velocity": None, "width_rate": None, "area_decay": None,
                 "oracle": None, "conversion": None, "perturber": None}
    tol = _tol(config)
    window = _fit_window(config)
    if window is None:
        warnings.append("no constant-control window available for fits")
    else:
        lo, hi = window
        rows = [r for r in primary.trajectory
                if lo - tol <= r["t"] <= hi + tol and r["mode"] == 0.0
                and math.isfinite(r["phi_centroid"])]
        if len(rows) < FIT_MIN_POINTS:
            warnings.append("fit window has too few usable snapshots")
        else:
            ts = [r["t"] for r in rows]
            op, om = sched.values(0.5 * (ts[0] + ts[-1]))

            slope, _, r2 = linear_fit(ts, [r["phi_centroid"] for r in rows])
            pred = group_velocity(med, op, om)
            out["velocity"] = {
                "window": [ts[0], ts[-1]], "measured": slope, "predicted": pred,
                "abs_err": abs(slope - pred),
                "rel_err": abs(slope - pred) / abs(pred) if pred != 0.0 else None,
                "r2": r2}

            slope2, _, r2w = linear_fit(ts, [r["phi_rms"] ** 2 for r in rows])
            predw = width_growth_rate(med, op, om)
            out["width_rate"] = {
                "window": [ts[0], ts[-1]], "measured": slope2, "predicted": predw,
                "abs_err": abs(slope2 - predw),
                "rel_err": abs(slope2 - predw) / abs(predw) if predw != 0.0 else None,
                "r2": r2w}

            a0, a1 = rows[0]["phi_area"], rows[-1]["phi_area"]
            if a0 > 0.0:
                predd = math.exp(-(decay_exponent(med, sched, ts[-1])
                                   - decay_exponent(med, sched, ts[0])))
                out["area_decay"] = {
                    "window": [ts[0], ts[-1]], "measured_ratio": a1 / a0,
                    "predicted_ratio": predd,
                    "rel_err": abs(a1 / a0 - predd) / predd}

            if pulse.prepared:
                snaps = [s for s in primary.snapshots
                         if lo - tol <= s.t <= hi + tol and s.mode == MODE_PDE]
                if len(snaps) >= 2:
                    try:
                        times = [s.t for s in snaps]
                        aps = [s.psi_plus * (sched.values(s.t)[0]
                                             / math.sqrt(med.gamma))
                               for s in snaps]
                        comp = compare_to_oracle(med, sched, pulse, times, aps)
                        out["oracle"] = {
                            "times": list(comp.times),
                            "max_envelope_l2": comp.max_envelope_l2,
                            "max_width_rel": comp.max_width_rel,
                            "max_decay_rel": comp.max_decay_rel}
                    except SimulationError as exc:
                        warnings.append(f"oracle comparison skipped: {exc}")

    pde_rows = [r for r in primary.trajectory
                if r["mode"] == 0.0 and (r["e_plus"] + r["e_minus"]) > 0.0]
    if pde_rows:
        last = pde_rows[-1]
        total = last["e_plus"] + last["e_minus"]
        out["conversion"] = {"time": last["t"],
                             "fraction_minus": last["e_minus"] / total}

    if config.perturber is not None and reference is not None:
        pm, pwarn = _perturber_measurement(config, primary, reference)
        out["perturber"] = pm
        warnings += pwarn
    return out, warnings


def _round_floats(obj):
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def render_summary(summary: dict) -> str:
    return json.dumps(_round_floats(summary), indent=2, sort_keys=True) + "\n"


def _summary(config: RunConfig, primary: EngineRun, measurements: dict,
             warnings: list) -> dict:
    med, sched, pulse = config.medium, config.schedule, config.pulse
    return {
        "config": config_echo(config),
        "derived": {
            "omega_plus0": med.omega_plus0,
            "pulse_length": pulse_length(med, pulse),
            "xi_minus": med.xi_minus,
            "rho": med.rho,
            "dz": med.dz,
            "z_offset": med.z_offset,
            "storage_threshold": med.storage_threshold,
            "tau_end": primary.tau_end,
            "final_mode": primary.mode_end,
        },
        "validity": [c.to_dict() for c in validity_report(med, pulse, sched)],
        "crossings": [[t, kind] for t, kind in power_crossings(med, sched)
                      if t <= config.run.t_end],
        "storage_windows": primary.storage_windows,
        "sponge_max_fraction": primary.sponge_max,
        "measurements": measurements,
        "warnings": list(dict.fromkeys(warnings)),
    }


def run_scenario(config: RunConfig, out_dir=None) -> RunResult:
    warnings: list[str] = []
    reference = None
    if config.engine == "spectral":
        primary = _run_spectral(config)
    else:
        extra = ()
        if config.engine == "both":
            window = _replay_window(config)
            if window is not None:
                extra = window
        primary = _run_direct(config, include_perturber=True,
                              extra_snap_times=extra)
        if config.perturber is not None:
            reference = _run_direct(config, include_perturber=False,
                                    extra_snap_times=extra)
    warnings += primary.warnings

    measurements, mwarn = _measurements(config, primary, reference)
    warnings += mwarn
    cross = None
    if config.engine == "both":
        cross, cwarn = _cross_engine(config, primary)
        warnings += cwarn
    measurements["cross_engine"] = cross

    summary = _summary(config, primary, measurements, warnings)
    result = RunResult(config, primary.snapshots, primary.trajectory,
                       summary, reference)
    if out_dir is not None:
        write_outputs(result, out_dir)
    return result


def _write_snapshot(path: pathlib.Path, config: RunConfig, snap: Snapshot):
    med, sched = config.medium, config.schedule
    op, om = sched.values(snap.t)
    scale_p = op / math.sqrt(med.gamma)
    scale_m = om / (math.sqrt(med.gamma) * med.r_g)
    data = np.column_stack([
        med.grid(),
        snap.psi_plus.real, snap.psi_plus.imag,
        snap.psi_minus.real, snap.psi_minus.imag,
        np.abs(snap.psi_plus) * scale_p,
        np.abs(snap.psi_minus) * scale_m,
        snap.phi.real, snap.phi.imag,
    ])
    header = (f"t = {snap.t:.12g}  tau = {snap.tau:.12g}  mode = {snap.mode}\n"
              "z re_psi_plus im_psi_plus re_psi_minus im_psi_minus "
              "abs_a_plus abs_a_minus re_phi im_phi")
    np.savetxt(path, data, fmt="%.12g", delimiter="\t",
               header=header, comments="# ")


def _write_trajectory(path: pathlib.Path, trajectory: list):
    lines = ["# " + "\t".join(TRAJECTORY_COLUMNS)]
    for row in trajectory:
        lines.append("\t".join(f"{row[c]:.12g}" for c in TRAJECTORY_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def write_outputs(result: RunResult, out_dir) -> None:
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if result.config.output.snapshots:
        for snap in result.snapshots:
            _write_snapshot(out / f"snap_{snap.index:05d}.tsv",
                            result.config, snap)
    _write_trajectory(out / "trajectory.tsv", result.trajectory)
    (out / "summary.json").write_text(render_summary(result.summary))
    (out / "config.txt").write_text(render_config(result.config))
