"""Field measurements: moments, velocity/width fits, phase traces.

All moment integrals weight by intensity |field|^2 on the grid. Fits are
ordinary least squares; a fit over fewer than five snapshots is refused
rather than silently extrapolated.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import EmptyField, PhaseUnwrapAmbiguity, WindowTooShort
from .medium import ControlSchedule, MediumModel, PulseSpec, tau_of_t
from .oracle import decay_factor, drift_beta, gaussian_envelope, width_b

ENERGY_FLOOR = 1e-30
MIN_FIT_POINTS = 5


@dataclasses.dataclass(frozen=True)
class Moments:
    energy: float
    centroid: float
    rms: float
    peak: float
    peak_z: float


def moments(z: np.ndarray, field: np.ndarray, dz: float) -> Moments:
    """Intensity-weighted moments of a complex field sampled on z."""
    w = np.abs(np.asarray(field)) ** 2
    energy = float(np.sum(w) * dz)
    if energy < ENERGY_FLOOR:
        raise EmptyField(f"field energy {energy:g} below {ENERGY_FLOOR:g}")
    centroid = float(np.sum(w * z) * dz / energy)
    var = float(np.sum(w * (z - centroid) ** 2) * dz / energy)
    rms = max(math.sqrt(max(var, 0.0)), dz)
    i = int(np.argmax(np.abs(field)))
    return Moments(energy=energy, centroid=centroid, rms=rms,
                   peak=float(np.abs(field[i])), peak_z=float(z[i]))


def linear_fit(x, y) -> tuple[float, float, float]:
    """(slope, intercept, r_squared) of an ordinary least-squares line."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if len(xa) < MIN_FIT_POINTS:
        raise WindowTooShort(
            f"{len(xa)} samples in fit window, need >= {MIN_FIT_POINTS}")
    slope, intercept = np.polyfit(xa, ya, 1)
    pred = slope * xa + intercept
    ss_res = float(np.sum((ya - pred) ** 2))
    ss_tot = float(np.sum((ya - np.mean(ya)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def measured_group_velocity(times, centroids) -> tuple[float, float]:
    """Least-squares drift velocity of a centroid track; returns
    (velocity, rms fit residual)."""
    slope, intercept, _ = linear_fit(times, centroids)
    ta = np.asarray(times, dtype=float)
    ca = np.asarray(centroids, dtype=float)
    resid = ca - (slope * ta + intercept)
    return slope, float(np.sqrt(np.mean(resid ** 2)))


def relative_phase(perturbed, reference) -> np.ndarray:
    """Unwrapped phase of perturbed relative to reference, snapshot by snapshot.

    Consecutive jumps above pi/2 are refused: the sampling is then too sparse
    to unwrap reliably.
    """
    a = np.asarray(perturbed, dtype=complex)
    b = np.asarray(reference, dtype=complex)
    if len(a) != len(b) or len(a) == 0:
        raise WindowTooShort("phase trace needs equal-length non-empty series")
    if np.any(np.abs(a) < ENERGY_FLOOR) or np.any(np.abs(b) < ENERGY_FLOOR):
        raise EmptyField("phase trace contains samples with no amplitude")
    raw = np.angle(a * np.conj(b))
    out = [float(raw[0])]
    for i in range(1, len(raw)):
        d = raw[i] - raw[i - 1]
        d = (d + np.pi) % (2.0 * np.pi) - np.pi
        if abs(d) > 0.5 * np.pi:
            raise PhaseUnwrapAmbiguity(
                f"phase jump {d:.3g} rad between snapshots {i - 1} and {i}")
        out.append(out[-1] + float(d))
    return np.asarray(out)


@dataclasses.dataclass(frozen=True)
class OracleComparison:
    times: tuple
    envelope_l2: tuple
    width_rel: tuple
    decay_rel: tuple

    @property
    def max_envelope_l2(self) -> float:
        return max(self.envelope_l2)

    @property
    def max_width_rel(self) -> float:
        return max(self.width_rel)

    @property
    def max_decay_rel(self) -> float:
        return max(self.decay_rel)


def compare_to_oracle(medium: MediumModel, schedule: ControlSchedule,
                      pulse: PulseSpec, times, a_plus_list) -> OracleComparison:
    """Relative errors of measured forward envelopes against the closed form.

    The amplitude scale is anchored on the first snapshot, so only evolution
    (drift, spreading, decay) is scored, not the injection normalization.
    """
    z = medium.grid()
    env_err, width_err, decay_err = [], [], []
    scale = None
    peak0 = None
    b0 = None
    df0 = None
    for t, a_plus in zip(times, a_plus_list):
        tau = tau_of_t(medium, schedule, t)
        pred = np.abs(gaussian_envelope(medium, schedule, pulse, "+", tau, z))
        meas = np.abs(np.asarray(a_plus))
        if scale is None:
            pk = float(np.max(meas))
            if pk <= 0.0:
                raise EmptyField("first snapshot has no forward field")
            scale = pk / float(np.max(pred))
            peak0 = pk
            b0 = width_b(medium, schedule, pulse, tau, ordering="reconciled")
            df0 = decay_factor(medium, schedule, t)
        pred = pred * scale
        env_err.append(float(np.linalg.norm(meas - pred) / np.linalg.norm(pred)))

        m = moments(z, a_plus, medium.dz)
        b = width_b(medium, schedule, pulse, tau, ordering="reconciled")
        width_err.append(abs(m.rms - b / math.sqrt(2.0)) / (b / math.sqrt(2.0)))

        predicted_ratio = (decay_factor(medium, schedule, t) / df0) * (b0 / b)
        measured_ratio = float(np.max(meas)) / peak0
        decay_err.append(abs(measured_ratio - predicted_ratio)
                         / max(predicted_ratio, 1e-300))
    return OracleComparison(tuple(times), tuple(env_err),
                            tuple(width_err), tuple(decay_err))


def channel_energies(medium: MediumModel, psi_plus, psi_minus,
                     omega_plus: float, omega_minus: float) -> tuple[float, float]:
    """(E_plus, E_minus) of the physical field envelopes on the grid."""
    g = medium.gamma
    a_p = np.abs(psi_plus) * (omega_plus / math.sqrt(g))
    a_m = np.abs(psi_minus) * (omega_minus / (math.sqrt(g) * medium.r_g))
    dz = medium.dz
    return float(np.sum(a_p ** 2) * dz), float(np.sum(a_m ** 2) * dz)
