"""Medium parameters, control schedules, and instantaneous transport coefficients.

Unit scheme: c = 1 and xi_plus = 1, so lengths are in units of the forward
resonant absorption length and times in units of that length over c. The
collective forward coupling is then pinned (N g+^2 = gamma) and the free
knobs are the coupling ratio r_g = g-/g+, the polarization decay gamma, the
ground-state decoherence gamma2, and the initial group velocity fraction
u_g0 = v_g(0)/c. Control amplitudes carry the same units as sqrt(gamma).
"""

from __future__ import annotations

import bisect
import dataclasses
import math
from typing import NamedTuple

from scipy import integrate, optimize

from .errors import (
    DegenerateCoefficients,
    NonPhysicalParameter,
    OutOfScheduleRange,
    ThresholdChatter,
)

DEFAULT_RAMP = 50.0
QUAD_TOL = 1e-10

# storage-mode hysteresis: PDE mode ends below theta, resumes above 1.2 theta
THRESHOLD_FACTOR = 10.0
HYSTERESIS = 1.2
ZERO_GAMMA2_THRESHOLD = 1e-10


@dataclasses.dataclass(frozen=True)
class MediumModel:
    """Static medium parameters in the fixed unit scheme."""

    r_g: float
    gamma: float
    gamma2: float
    u_g0: float
    domain_length: float
    grid_points: int

    xi_plus: float = 1.0

    @property
    def xi_minus(self) -> float:
        return self.r_g ** 2 * self.xi_plus

    @property
    def rho(self) -> float:
        # (g-/g+)^2, weight of the backward channel in the transport pair
        return self.r_g ** 2

    @property
    def omega_plus0(self) -> float:
        return math.sqrt(self.u_g0 * self.gamma)

    @property
    def xi_sum_inv(self) -> float:
        # 1/xi_Sigma = 1/xi_+ + 1/xi_-
        return 1.0 / self.xi_plus + 1.0 / self.xi_minus

    @property
    def z_offset(self) -> float:
        # stationary displacement of the backward envelope
        return self.xi_sum_inv

    @property
    def dz(self) -> float:
        return self.domain_length / self.grid_points

    def grid(self):
        import numpy as np

        return self.dz * np.arange(self.grid_points)

    @property
    def storage_threshold(self) -> float:
        """Control power below which the field transport is no longer valid."""
        if self.gamma2 > 0.0:
            return THRESHOLD_FACTOR * self.gamma * self.gamma2
        return ZERO_GAMMA2_THRESHOLD * self.omega_plus0 ** 2


def build_medium(r_g, gamma, gamma2, u_g0,
                 domain_length=200.0, grid_points=4096) -> MediumModel:
    if not (r_g > 0.0 and math.isfinite(r_g)):
        raise NonPhysicalParameter(f"coupling ratio r_g must be positive, got {r_g}")
    if not (gamma > 0.0 and math.isfinite(gamma)):
        raise NonPhysicalParameter(f"polarization decay gamma must be positive, got {gamma}")
    if gamma2 < 0.0 or not math.isfinite(gamma2):
        raise NonPhysicalParameter(f"decoherence gamma2 must be >= 0, got {gamma2}")
    if not (0.0 < u_g0 < 1.0):
        raise NonPhysicalParameter(
            f"initial group velocity fraction u_g0 must be in (0, 1), got {u_g0}")
    if not (domain_length > 0.0 and math.isfinite(domain_length)):
        raise NonPhysicalParameter(f"domain_length must be positive, got {domain_length}")
    if int(grid_points) != grid_points or grid_points < 16:
        raise NonPhysicalParameter(f"grid_points must be an integer >= 16, got {grid_points}")
    return MediumModel(float(r_g), float(gamma), float(gamma2), float(u_g0),
                       float(domain_length), int(grid_points))


@dataclasses.dataclass(frozen=True)
class Segment:
    """One control plateau; blends from the previous targets over `ramp`."""

    t_start: float
    t_end: float
    omega_plus: float
    omega_minus: float
    ramp: float = DEFAULT_RAMP


@dataclasses.dataclass(frozen=True)
class ControlSchedule:
    segments: tuple[Segment, ...]
    phi_plus: float = 0.0
    phi_minus: float = 0.0

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    def _locate(self, t: float) -> int:
        slack = 1e-9 * max(1.0, abs(self.t_end))
        if t < self.t_start - slack or t > self.t_end + slack:
            raise OutOfScheduleRange(
                f"t = {t:g} outside schedule span [{self.t_start:g}, {self.t_end:g}]")
        starts = [s.t_start for s in self.segments]
        i = bisect.bisect_right(starts, t) - 1
        return max(0, min(i, len(self.segments) - 1))

    def values(self, t: float) -> tuple[float, float]:
        """Control amplitudes (omega_plus, omega_minus) at time t."""
        i = self._locate(t)
        seg = self.segments[i]
        if i == 0 or t >= seg.t_start + seg.ramp:
            return seg.omega_plus, seg.omega_minus
        prev = self.segments[i - 1]
        s = _smoothstep((t - seg.t_start) / seg.ramp)
        return (prev.omega_plus + (seg.omega_plus - prev.omega_plus) * s,
                prev.omega_minus + (seg.omega_minus - prev.omega_minus) * s)

    def rates(self, t: float) -> tuple[float, float]:
        """Analytic d(omega)/dt pair at time t (zero outside ramps)."""
        i = self._locate(t)
        seg = self.segments[i]
        if i == 0 or t >= seg.t_start + seg.ramp:
            return 0.0, 0.0
        prev = self.segments[i - 1]
        ds = _smoothstep_rate((t - seg.t_start) / seg.ramp) / seg.ramp
        return ((seg.omega_plus - prev.omega_plus) * ds,
                (seg.omega_minus - prev.omega_minus) * ds)

    def breakpoints(self) -> list[float]:
        """Times where the control law changes analytic form."""
        pts = []
        for i, seg in enumerate(self.segments):
            pts.append(seg.t_start)
            if i > 0 and seg.t_start + seg.ramp < seg.t_end:
                pts.append(seg.t_start + seg.ramp)
        pts.append(self.t_end)
        return sorted(set(pts))

    def constant_windows(self) -> list[tuple[float, float]]:
        """Maximal intervals with both controls constant."""
        out = []
        for i, seg in enumerate(self.segments):
            lo = seg.t_start if i == 0 else min(seg.t_start + seg.ramp, seg.t_end)
            if seg.t_end > lo:
                out.append((lo, seg.t_end))
        return out


def _smoothstep(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return x * x * (3.0 - 2.0 * x)


def _smoothstep_rate(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return 6.0 * x * (1.0 - x)


def build_schedule(segments, phi_plus=0.0, phi_minus=0.0) -> ControlSchedule:
    if not segments:
        raise NonPhysicalParameter("schedule needs at least one segment")
    segs = []
    for raw in segments:
        seg = raw if isinstance(raw, Segment) else Segment(*raw)
        if seg.t_end <= seg.t_start:
            raise NonPhysicalParameter(
                f"segment [{seg.t_start:g}, {seg.t_end:g}] has non-positive length")
        if seg.omega_plus < 0.0 or seg.omega_minus < 0.0:
            raise NonPhysicalParameter("control amplitudes must be >= 0")
        if not seg.ramp > 0.0:
            raise NonPhysicalParameter("ramp duration must be positive")
        if seg.ramp > seg.t_end - seg.t_start:
            raise NonPhysicalParameter(
                f"ramp {seg.ramp:g} longer than segment [{seg.t_start:g}, {seg.t_end:g}]")
        segs.append(seg)
    for a, b in zip(segs, segs[1:]):
        if abs(a.t_end - b.t_start) > 1e-9 * max(1.0, abs(a.t_end)):
            raise NonPhysicalParameter(
                f"segments not contiguous at t = {a.t_end:g} vs {b.t_start:g}")
    return ControlSchedule(tuple(segs), float(phi_plus), float(phi_minus))


def control_amplitudes(schedule: ControlSchedule, t: float):
    """(omega_plus, omega_minus, phi_plus, phi_minus) at time t."""
    op, om = schedule.values(t)
    return op, om, schedule.phi_plus, schedule.phi_minus


@dataclasses.dataclass(frozen=True)
class Coefficients:
    """Instantaneous transport coefficients of the two-channel pair."""

    alpha_plus: float
    alpha_minus: float
    eta: float
    alpha_tilde: float
    gamma2_prime: float
    omega_sigma_sq: float
    tau_rate: float

    @property
    def alpha_sum(self) -> float:
        return self.alpha_plus + self.alpha_minus


def coefficients(medium: MediumModel, omega_plus: float, omega_minus: float) -> Coefficients:
    gg2 = medium.gamma * medium.gamma2
    oss = omega_plus ** 2 + omega_minus ** 2
    denom = gg2 + oss
    if denom <= 0.0:
        raise DegenerateCoefficients(
            "both controls off with gamma2 = 0: transport coefficients undefined")
    a_p = omega_plus ** 2 / denom
    a_m = omega_minus ** 2 / denom
    eta = denom / oss if oss > 0.0 else math.inf
    return Coefficients(
        alpha_plus=a_p,
        alpha_minus=a_m,
        eta=eta,
        alpha_tilde=a_p - medium.rho * a_m,
        gamma2_prime=medium.xi_plus * gg2 / denom,
        omega_sigma_sq=oss,
        tau_rate=denom / medium.gamma,
    )


class CoefficientRates(NamedTuple):
    """Lab-time derivatives of the schedule-dependent coefficients."""

    dalpha_plus_dt: float
    dalpha_minus_dt: float
    dalpha_tilde_dt: float
    deta_inv_dt: float
    deta_dt: float


def coefficient_rates(medium: MediumModel, schedule: ControlSchedule, t: float) -> CoefficientRates:
    op, om = schedule.values(t)
    dop, dom = schedule.rates(t)
    gg2 = medium.gamma * medium.gamma2
    oss = op ** 2 + om ** 2
    denom = gg2 + oss
    if oss <= 0.0:
        raise DegenerateCoefficients("coefficient rates need at least one control on")
    d_oss = 2.0 * (op * dop + om * dom)
    d_ap = (2.0 * op * dop * denom - op ** 2 * d_oss) / denom ** 2
    d_am = (2.0 * om * dom * denom - om ** 2 * d_oss) / denom ** 2
    deta_inv = d_oss * gg2 / denom ** 2
    eta = denom / oss
    return CoefficientRates(
        dalpha_plus_dt=d_ap,
        dalpha_minus_dt=d_am,
        dalpha_tilde_dt=d_ap - medium.rho * d_am,
        deta_inv_dt=deta_inv,
        deta_dt=-eta ** 2 * deta_inv,
    )


def tau_rate_at(medium: MediumModel, schedule: ControlSchedule, t: float) -> float:
    op, om = schedule.values(t)
    return (medium.gamma * medium.gamma2 + op ** 2 + om ** 2) / medium.gamma


def tau_of_t(medium: MediumModel, schedule: ControlSchedule, t: float,
             t0: float | None = None) -> float:
    """Stretched time tau accumulated between t0 (schedule start) and t."""
    lo = schedule.t_start if t0 is None else t0
    if t < lo:
        raise OutOfScheduleRange(f"t = {t:g} precedes integration start {lo:g}")
    if t == lo:
        return 0.0
    pts = [p for p in schedule.breakpoints() if lo < p < t]
    val, _ = integrate.quad(lambda s: tau_rate_at(medium, schedule, s), lo, t,
                            points=pts or None, epsabs=QUAD_TOL, epsrel=QUAD_TOL,
                            limit=400)
    return val


def t_of_tau(medium: MediumModel, schedule: ControlSchedule, tau: float,
             t0: float | None = None) -> float:
    """Inverse of tau_of_t on the schedule span."""
    lo = schedule.t_start if t0 is None else t0
    if tau < 0.0:
        raise OutOfScheduleRange(f"tau = {tau:g} is negative")
    if tau == 0.0:
        return lo
    hi = schedule.t_end
    total = tau_of_t(medium, schedule, hi, lo)
    if tau > total * (1.0 + 1e-12):
        raise OutOfScheduleRange(
            f"tau = {tau:g} beyond schedule total {total:g}")
    if tau >= total:
        return hi
    return optimize.brentq(lambda s: tau_of_t(medium, schedule, s, lo) - tau,
                           lo, hi, xtol=1e-12, rtol=1e-14)


def group_velocity(medium: MediumModel, omega_plus: float, omega_minus: float) -> float:
    """Closed-form polariton velocity (units of c) at the given controls."""
    co = coefficients(medium, omega_plus, omega_minus)
    if co.omega_sigma_sq == 0.0:
        return 0.0
    return co.eta ** 2 * (omega_plus ** 2 - omega_minus ** 2 / medium.r_g ** 2) / medium.gamma


def stationarity_residual(medium: MediumModel, omega_plus: float, omega_minus: float) -> float:
    """Signed imbalance of the two channels; zero means a standing pulse."""
    u = omega_plus / 1.0
    w = omega_minus / medium.r_g
    if u + w == 0.0:
        raise DegenerateCoefficients("stationarity residual undefined with both controls off")
    return (u - w) / (u + w)


@dataclasses.dataclass(frozen=True)
class PulseSpec:
    """Probe pulse description.

    Injected pulses enter through the z = 0 boundary with a Gaussian time
    profile of width `duration` centered on `injection_time`. Prepared pulses
    start on the transport branch as a Gaussian of spatial size l_o =
    u_g0 * duration centered at `center`.
    """

    amplitude: float = 1.0
    duration: float = 2e4
    injection_time: float = 0.0
    prepared: bool = False
    center: float = 0.0


def pulse_length(medium: MediumModel, pulse: PulseSpec) -> float:
    """Spatial size l_o implied by the entry group velocity."""
    return medium.u_g0 * pulse.duration


def build_pulse(amplitude=1.0, duration=2e4, injection_time=0.0,
                prepared=False, center=0.0) -> PulseSpec:
    if amplitude <= 0.0 or not math.isfinite(amplitude):
        raise NonPhysicalParameter(f"pulse amplitude must be positive, got {amplitude}")
    if duration <= 0.0 or not math.isfinite(duration):
        raise NonPhysicalParameter(f"pulse duration must be positive, got {duration}")
    return PulseSpec(float(amplitude), float(duration), float(injection_time),
                     bool(prepared), float(center))


def power_crossings(medium: MediumModel, schedule: ControlSchedule):
    """Chronological storage threshold crossings as (time, kind) pairs.

    kind is "off" (total control power dropped below the storage threshold)
    or "on" (power recovered above the hysteresis level). Raises
    ThresholdChatter when a single ramp produces more than one crossing.
    """
    theta_off = medium.storage_threshold
    theta_on = HYSTERESIS * theta_off

    def power(t):
        op, om = schedule.values(t)
        return op ** 2 + om ** 2

    events: list[tuple[float, str]] = []
    active = power(schedule.t_start) >= theta_off
    for i, seg in enumerate(schedule.segments):
        if i == 0:
            continue
        lo = seg.t_start
        hi = min(seg.t_start + seg.ramp, seg.t_end)
        if hi <= lo:
            continue
        n = 256
        ts = [lo + (hi - lo) * j / n for j in range(n + 1)]
        ramp_events = []
        for a, b in zip(ts, ts[1:]):
            thr = theta_off if active else theta_on
            fa = power(a) - thr
            fb = power(b) - thr
            if fa == 0.0:
                continue
            if fa * fb < 0.0 or fb == 0.0:
                tc = optimize.brentq(lambda s: power(s) - thr, a, b,
                                     xtol=1e-12, rtol=1e-14)
                kind = "off" if active else "on"
                ramp_events.append((tc, kind))
                active = not active
        if len(ramp_events) > 1:
            raise ThresholdChatter(
                f"control power crossed the storage threshold {len(ramp_events)} "
                f"times during the ramp at t = {lo:g}")
        events.extend(ramp_events)
    return events


@dataclasses.dataclass(frozen=True)
class ValidityCheck:
    name: str
    passed: bool
    margin: float
    note: str

    def to_dict(self):
        return {"name": self.name, "passed": self.passed,
                "margin": self.margin, "note": self.note}


def validity_report(medium: MediumModel, pulse: PulseSpec,
                    schedule: ControlSchedule) -> list[ValidityCheck]:
    """Regime checks behind the mean-field transport description."""
    checks = []

    l_o = pulse_length(medium, pulse)
    opacity = medium.xi_plus * l_o
    checks.append(ValidityCheck(
        name="opacity",
        passed=opacity >= 10.0,
        margin=opacity / 10.0,
        note=f"xi_plus * l_o = {opacity:g} (need >= 10 for adiabatic transport)"))

    # slowest scale protecting adiabatic following: |d(power)/dt| << gamma * power
    worst = math.inf
    for i, seg in enumerate(schedule.segments):
        if i == 0:
            continue
        lo, hi = seg.t_start, min(seg.t_start + seg.ramp, seg.t_end)
        n = 64
        for j in range(n + 1):
            t = lo + (hi - lo) * j / n
            op, om = schedule.values(t)
            dop, dom = schedule.rates(t)
            dp = abs(2.0 * (op * dop + om * dom))
            p = op ** 2 + om ** 2 + medium.gamma * medium.gamma2
            if dp > 0.0 and p > 0.0:
                worst = min(worst, medium.gamma * p / dp)
    checks.append(ValidityCheck(
        name="adiabaticity",
        passed=worst >= 1.0,
        margin=worst if math.isfinite(worst) else math.inf,
        note="min over ramps of gamma * power / |d(power)/dt|"))

    theta = medium.storage_threshold
    margin = math.inf
    below = []
    for seg in schedule.segments:
        p = seg.omega_plus ** 2 + seg.omega_minus ** 2
        if p <= 0.0:
            continue
        margin = min(margin, p / theta)
        if p < theta:
            below.append(seg.t_start)
    checks.append(ValidityCheck(
        name="transport_regime",
        passed=not below,
        margin=margin if math.isfinite(margin) else math.inf,
        note=("active segments keep total power above the storage threshold"
              if not below else
              f"segments starting at {below} sit below the storage threshold")))

    checks.append(ValidityCheck(
        name="two_photon_resonance",
        passed=True,
        margin=math.inf,
        note="ground-state splitting taken as exactly zero (model assumption)"))

    return checks
