"""Closed-form pulse predictions used as ground truth by the tests.

Everything here is quadrature over the control schedule plus small-k Taylor
data of the transport branch; no fields are evolved. The drift/width pair
(`drift_beta`, `width_b`) describes a Gaussian envelope carried by the
two-channel medium; `gaussian_envelope` assembles the full complex envelope
including the common decay and the channel prefactors.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .errors import ChannelOff, NegativeRadicand, NonPhysicalParameter
from .medium import (
    ControlSchedule,
    Coefficients,
    MediumModel,
    PulseSpec,
    QUAD_TOL,
    coefficient_rates,
    coefficients,
    power_crossings,
    pulse_length,
    t_of_tau,
    tau_rate_at,
)

ORDERINGS = ("reconciled", "as_printed")


def _check_ordering(ordering: str):
    if ordering not in ORDERINGS:
        raise NonPhysicalParameter(f"unknown ordering {ordering!r}, use one of {ORDERINGS}")


def delta_weighted(medium: MediumModel, co: Coefficients, ordering="reconciled") -> float:
    """Absorption-weighted channel imbalance driving the drift.

    The reconciled index ordering reproduces the slow-light limit; the
    as-printed variant is kept as a negative control.
    """
    _check_ordering(ordering)
    if ordering == "reconciled":
        return medium.xi_minus * co.alpha_plus - medium.xi_plus * co.alpha_minus
    return medium.xi_plus * co.alpha_plus - medium.xi_minus * co.alpha_minus


def taylor_c012(medium: MediumModel, co: Coefficients) -> tuple[complex, complex, complex]:
    """Exact small-k expansion omega = c0 + c1 k + c2 k^2 at frozen controls."""
    g2p = co.gamma2_prime
    rho = medium.rho
    xm = medium.xi_minus
    e = xm / co.eta ** 2 + rho * g2p / co.eta
    dprime = delta_weighted(medium, co) - g2p * (1.0 - rho)
    a = dprime + co.eta * g2p * co.alpha_tilde
    c0 = 1j * co.eta * g2p
    c1 = -a / e
    c2 = (1j / e) * (1.0 - a * co.alpha_tilde / e)
    return c0, c1, c2


def width_growth_rate(medium: MediumModel, omega_plus: float, omega_minus: float) -> float:
    """d(rms^2)/dt of the carried pulse (second moment of intensity)."""
    co = coefficients(medium, omega_plus, omega_minus)
    _, _, c2 = taylor_c012(medium, co)
    return c2.imag * co.tau_rate


def _quad(f, lo, hi, pts):
    if hi <= lo:
        return 0.0
    inner = [p for p in pts if lo < p < hi]
    val, _ = integrate.quad(f, lo, hi, points=inner or None,
                            epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)
    return val


def drift_beta(medium: MediumModel, schedule: ControlSchedule, tau: float,
               ordering="reconciled") -> tuple[float, float]:
    """Envelope center drift (beta_plus, beta_minus) at stretched time tau.

    The rate contains an exact time derivative; it is integrated as a
    boundary difference rather than numerically.
    """
    _check_ordering(ordering)
    t0 = schedule.t_start
    t1 = t_of_tau(medium, schedule, tau)
    xm = medium.xi_minus

    def rate(t):
        op, om = schedule.values(t)
        co = coefficients(medium, op, om)
        return co.eta ** 2 * delta_weighted(medium, co, ordering) / xm * co.tau_rate

    main = _quad(rate, t0, t1, schedule.breakpoints())

    def eta_alpha_tilde(t):
        op, om = schedule.values(t)
        co = coefficients(medium, op, om)
        return co.eta * co.alpha_tilde

    beta_plus = main - (eta_alpha_tilde(t1) - eta_alpha_tilde(t0)) / xm
    return beta_plus, beta_plus - medium.z_offset


def m2_rate(medium: MediumModel, schedule: ControlSchedule, t: float,
            ordering="as_printed") -> float:
    """Width-growth integrand of the envelope law at lab time t."""
    _check_ordering(ordering)
    op, om = schedule.values(t)
    co = coefficients(medium, op, om)
    rates = coefficient_rates(medium, schedule, t)
    xm = medium.xi_minus
    if ordering == "as_printed":
        imbalance = xm * co.alpha_minus - medium.xi_plus * co.alpha_plus
    else:
        imbalance = delta_weighted(medium, co)
    dat2_dtau = 2.0 * co.alpha_tilde * rates.dalpha_tilde_dt / co.tau_rate
    return co.eta * (xm - co.eta * co.alpha_tilde * imbalance
                     + co.eta * dat2_dtau) / xm ** 2


def width_b(medium: MediumModel, schedule: ControlSchedule, pulse: PulseSpec,
            tau: float, ordering="as_printed") -> float:
    """Envelope Gaussian width B at stretched time tau (time units, c = 1)."""
    t0 = schedule.t_start
    t1 = t_of_tau(medium, schedule, tau)
    l_o = pulse_length(medium, pulse)
    grow = _quad(lambda t: m2_rate(medium, schedule, t, ordering)
                 * tau_rate_at(medium, schedule, t),
                 t0, t1, schedule.breakpoints())
    radicand = l_o ** 2 + 2.0 * grow
    if radicand <= 0.0:
        raise NegativeRadicand(
            f"squared width {radicand:g} not positive at tau = {tau:g}")
    return math.sqrt(radicand)


def decay_exponent(medium: MediumModel, schedule: ControlSchedule, t: float,
                   include_storage=True) -> float:
    """Integral of the common envelope decay rate from schedule start to t."""
    if medium.gamma2 == 0.0:
        return 0.0
    t0 = schedule.t_start
    theta = medium.storage_threshold

    op0, om0 = schedule.values(t0)
    state = op0 ** 2 + om0 ** 2 >= theta
    bounds = [(t0, state)]
    for tc, kind in power_crossings(medium, schedule):
        if tc < t:
            bounds.append((tc, kind == "on"))
    bounds.append((t, False))
    total = 0.0
    for (lo, active), (hi, _) in zip(bounds, bounds[1:]):
        if hi <= lo:
            continue
        if active:
            def rate(s):
                op, om = schedule.values(s)
                return coefficients(medium, op, om).eta * medium.gamma2
            total += _quad(rate, lo, hi, schedule.breakpoints())
        elif include_storage:
            total += medium.gamma2 * (hi - lo)
    return total


def decay_factor(medium: MediumModel, schedule: ControlSchedule, t: float,
                 include_storage=True) -> float:
    """Predicted amplitude attenuation between schedule start and t."""
    return math.exp(-decay_exponent(medium, schedule, t, include_storage))


def storage_decay(medium: MediumModel, elapsed: float) -> float:
    """Amplitude retention of a stored excitation over `elapsed` lab time."""
    return math.exp(-medium.gamma2 * elapsed)


def gaussian_envelope(medium: MediumModel, schedule: ControlSchedule,
                      pulse: PulseSpec, channel: str, tau: float, z,
                      ordering="reconciled"):
    """Predicted complex field envelope A_channel(tau, z).

    channel is "+" or "-". z may be an array. The width uses the reconciled
    ordering by default so that the prediction tracks real fields (a single
    constant control then gives pure translation).
    """
    if channel not in ("+", "-"):
        raise NonPhysicalParameter(f"channel must be '+' or '-', got {channel!r}")
    t0 = schedule.t_start
    t1 = t_of_tau(medium, schedule, tau)
    op0, _ = schedule.values(t0)
    op1, om1 = schedule.values(t1)
    co0 = coefficients(medium, *schedule.values(t0))
    co1 = coefficients(medium, op1, om1)
    if channel == "+":
        om_here, g_ratio, phi = op1, 1.0, schedule.phi_plus
    else:
        om_here, g_ratio, phi = om1, 1.0 / medium.r_g, schedule.phi_minus
    if om_here == 0.0:
        raise ChannelOff(f"channel {channel} has no control field at tau = {tau:g}")
    if op0 == 0.0:
        raise ChannelOff("envelope normalization needs the forward control on at start")

    b = width_b(medium, schedule, pulse, tau, ordering)
    beta_p, beta_m = drift_beta(medium, schedule, tau)
    beta = beta_p if channel == "+" else beta_m
    # beta is a displacement from the initial forward-channel center, which
    # sits ahead of the polariton center by the slaving offset
    anchor = ((pulse.center if pulse.prepared else 0.0)
              + co0.alpha_minus * medium.z_offset)
    l_o = pulse_length(medium, pulse)
    pref = (l_o / b) * (co1.eta * om_here * g_ratio / (co0.eta * op0)) * pulse.amplitude
    pref *= math.exp(-decay_exponent(medium, schedule, t1, include_storage=False))
    zz = np.asarray(z, dtype=float)
    body = np.exp(-((zz - anchor - beta) ** 2) / (2.0 * b ** 2))
    return pref * body * complex(math.cos(phi), math.sin(phi))


def spreading_velocity(medium: MediumModel, omega_plus: float, omega_minus: float) -> float:
    """Broadening velocity of the carried pulse at the given controls."""
    oss = omega_plus ** 2 + omega_minus ** 2
    if oss == 0.0:
        return 0.0
    return 2.0 * medium.xi_sum_inv * omega_plus ** 2 * omega_minus ** 2 / (medium.gamma * oss)


def conversion_probability(medium: MediumModel, pulse: PulseSpec, t_s: float) -> float:
    """Forward-to-backward conversion efficiency after holding for t_s."""
    if t_s < 0.0:
        raise NonPhysicalParameter(f"hold time must be >= 0, got {t_s}")
    l_o = pulse_length(medium, pulse)
    growth = medium.u_g0 * t_s * medium.xi_sum_inv / l_o ** 2
    return 1.0 / math.sqrt(1.0 + growth)


def z_offset(medium: MediumModel) -> float:
    """Stationary displacement between backward and forward envelopes."""
    return medium.z_offset
