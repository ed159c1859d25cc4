"""Dispersion branch, slaving kernels, and the k-space evolution engine.

Plane-wave modes e^{ikz} of the two-channel transport pair evolve by
e^{+i omega(k) dtau}. The branch root is obtained from the 2x2 transport
determinant, which is linear in omega, so there is no quadratic-branch
ambiguity; the closed-form quadratic-in-k expression is also provided for
cross-checks. The backward field is slaved to the forward one through a
control-independent transfer function f(k).
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import (
    BranchSelectionFailure,
    CFLViolation,
    GuardBandOverflow,
    ModeBlowup,
    NonPhysicalParameter,
)
from .medium import (
    ControlSchedule,
    Coefficients,
    MediumModel,
    coefficients,
    tau_rate_at,
)

BLOWUP_TOL = 1e-9
GUARD_ENERGY_FRACTION = 1e-6


def dispersion_omega(medium: MediumModel, co: Coefficients, k,
                     deta_inv_dtau=0.0, dalpha_tilde_dtau=0.0,
                     ordering="reconciled"):
    """Closed-form branch frequency omega(k), quadratic-in-k form.

    The `as_printed` ordering of the channel imbalance is retained as a
    negative control; it mispredicts the drift velocity off r_g = 1.
    """
    from .oracle import delta_weighted

    karr = np.asarray(k, dtype=complex)
    xm = medium.xi_minus
    delta = delta_weighted(medium, co, ordering)
    num = (karr * (co.eta * delta - 1j * karr)
           - 1j * (xm * deta_inv_dtau - 1j * karr * dalpha_tilde_dtau))
    den = xm / co.eta - 1j * karr * co.alpha_tilde
    out = 1j * co.eta * co.gamma2_prime - num / den
    if not np.all(np.isfinite(out)):
        raise BranchSelectionFailure("closed-form branch evaluation not finite")
    return out if out.shape else complex(out)


def omega_from_determinant(medium: MediumModel, co: Coefficients, k):
    """Branch frequency from the transport determinant (exact, all k)."""
    from .oracle import delta_weighted

    karr = np.asarray(k, dtype=complex)
    xm = medium.xi_minus
    rho = medium.rho
    g2p = co.gamma2_prime
    delta = delta_weighted(medium, co)
    num = (karr ** 2 + 1j * karr * delta - 1j * karr * g2p * (1.0 - rho)
           + g2p * xm / co.eta + rho * g2p ** 2)
    den = 1j * karr * co.alpha_tilde - xm / co.eta ** 2 - rho * g2p / co.eta
    out = -1j * num / den
    if not np.all(np.isfinite(out)):
        raise BranchSelectionFailure("determinant branch evaluation not finite")
    return out if out.shape else complex(out)


def slaving_kernel(medium: MediumModel, k):
    """Transfer function f(k) with psi_minus(k) = f(k) psi_plus(k)."""
    karr = np.asarray(k, dtype=complex)
    out = (1.0 + 1j * karr / medium.xi_plus) / (1.0 - 1j * karr / medium.xi_minus)
    return out if out.shape else complex(out)


def realspace_kernel(medium: MediumModel, channel: str, x):
    """Real-space slaving kernel: (continuous part, delta weight at x = 0).

    channel "-" maps the forward field onto the backward one (support x < 0,
    i.e. the source point lies ahead); channel "+" is the inverse map.
    """
    xp, xm = medium.xi_plus, medium.xi_minus
    xarr = np.asarray(x, dtype=float)
    if channel == "-":
        cont = np.where(xarr < 0.0, (1.0 + xm / xp) * xm * np.exp(xm * np.minimum(xarr, 0.0)), 0.0)
        weight = -xm / xp
    elif channel == "+":
        cont = np.where(xarr > 0.0, (1.0 + xp / xm) * xp * np.exp(-xp * np.maximum(xarr, 0.0)), 0.0)
        weight = -xp / xm
    else:
        raise NonPhysicalParameter(f"channel must be '+' or '-', got {channel!r}")
    return (cont if cont.shape else float(cont)), weight


def k_grid(medium: MediumModel) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(medium.grid_points, d=medium.dz)


def release_projection(medium: MediumModel, co: Coefficients, phi: np.ndarray):
    """Split a polariton profile into on-branch (psi_plus, psi_minus) fields.

    The forward k-component is phi(k)/(alpha_+ + alpha_- f(k)) and the
    backward one follows from slaving, so the weighted sum reconstructs phi
    exactly and a same-controls store/release round trip is lossless.
    """
    k = k_grid(medium)
    f = slaving_kernel(medium, k)
    phi_k = np.fft.fft(np.asarray(phi, dtype=complex))
    denom = co.alpha_plus + co.alpha_minus * f
    psi_p_k = phi_k / denom
    return np.fft.ifft(psi_p_k), np.fft.ifft(f * psi_p_k)


@dataclasses.dataclass
class SpectralState:
    """Forward-field spectrum evolving on the transport branch."""

    medium: MediumModel
    k: np.ndarray
    psi_plus_k: np.ndarray
    t: float
    tau: float


def spectral_state_from_fields(medium: MediumModel, psi_plus: np.ndarray,
                               t: float, tau: float = 0.0) -> SpectralState:
    if len(psi_plus) != medium.grid_points:
        raise NonPhysicalParameter("field length does not match the medium grid")
    return SpectralState(medium, k_grid(medium),
                         np.fft.fft(np.asarray(psi_plus, dtype=complex)),
                         float(t), float(tau))


def fields_from_state(state: SpectralState):
    """(psi_plus, psi_minus) real-space fields of the current spectrum."""
    f = slaving_kernel(state.medium, state.k)
    return np.fft.ifft(state.psi_plus_k), np.fft.ifft(f * state.psi_plus_k)


def reconstruct_minus(state: SpectralState) -> np.ndarray:
    f = slaving_kernel(state.medium, state.k)
    return np.fft.ifft(f * state.psi_plus_k)


def propagate(state: SpectralState, schedule: ControlSchedule, dtau: float) -> None:
    """Advance the spectrum by dtau using the midpoint branch frequency.

    For constant controls the exponent is exact at any step size; during
    ramps the step must resolve both the mode rotation and the ramp
    (enforced here, CFLViolation otherwise).
    """
    if dtau <= 0.0:
        raise NonPhysicalParameter(f"dtau must be positive, got {dtau}")
    med = state.medium

    # invert dtau -> dt via two fixed-point passes on the midpoint rate
    rate = tau_rate_at(med, schedule, state.t)
    dt = dtau / rate
    for _ in range(2):
        rate = tau_rate_at(med, schedule, state.t + 0.5 * dt)
        dt = dtau / rate
    t_mid = state.t + 0.5 * dt

    op, om = schedule.values(t_mid)
    co = coefficients(med, op, om)
    omega = omega_from_determinant(med, co, state.k)

    dop, dom = schedule.rates(t_mid)
    if dop != 0.0 or dom != 0.0:
        seg = schedule.segments[schedule._locate(t_mid)]
        ramp_tau = seg.ramp * rate
        cap = min(0.1 / max(np.max(np.abs(omega.real)), 1e-300), ramp_tau / 32.0)
        if dtau > cap * (1.0 + 1e-9):
            raise CFLViolation(
                f"dtau = {dtau:g} too large for the ramp at t = {t_mid:g} "
                f"(cap {cap:g})")

    factor = np.exp(1j * omega * dtau)
    worst = float(np.max(np.abs(factor)))
    if worst > 1.0 + BLOWUP_TOL:
        raise ModeBlowup(f"mode growth factor {worst:.12g} exceeds roundoff tolerance")
    state.psi_plus_k *= factor
    state.t += dt
    state.tau += dtau


def guard_band_fraction(medium: MediumModel, psi_plus: np.ndarray,
                        psi_minus: np.ndarray, centroid: float,
                        half_width: float) -> float:
    """Energy fraction sitting farther than half_width from the centroid.

    The periodic domain recycles anything that drifts off one edge; energy
    found outside the half_width ball is either genuine tail escape or
    wrapped-around contamination, and both invalidate the run.
    """
    z = medium.grid()
    w = np.abs(psi_plus) ** 2 + np.abs(psi_minus) ** 2
    total = float(np.sum(w))
    if total <= 0.0:
        return 0.0
    outside = np.abs(z - centroid) > half_width
    return float(np.sum(w[outside])) / total


def check_guard_band(medium: MediumModel, psi_plus, psi_minus,
                     centroid: float, half_width: float):
    if centroid - half_width < 0.0 or centroid + half_width > medium.domain_length:
        raise GuardBandOverflow(
            f"guard band of {half_width:g} around z = {centroid:g} does not fit "
            f"in a domain of length {medium.domain_length:g}")
    frac = guard_band_fraction(medium, psi_plus, psi_minus, centroid, half_width)
    if frac > GUARD_ENERGY_FRACTION:
        raise GuardBandOverflow(
            f"{frac:.3g} of the pulse energy sits outside the guard band "
            f"(limit {GUARD_ENERGY_FRACTION:g})")
    return frac
