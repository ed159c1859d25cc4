"""Bundled demonstration configurations.

Each preset is a complete config text; `statlight run --preset NAME` executes
it as-is and `statlight presets` lists this table. Control amplitudes are in
units where the polarization decay rate is 1.
"""

from __future__ import annotations

from .errors import ValidationError

# sqrt(1e-3): forward control giving an entry group velocity of 1e-3 c
_OM0 = "0.0316227766016838"
# sqrt(5e-4): balanced pair at the same total power
_OMH = "0.0223606797749979"
# sqrt(1.5e-3) and sqrt(5e-4): tilted pair at the same total power
_OMA = "0.0387298334620742"

PRESETS: dict[str, tuple[str, str]] = {}


def _register(name: str, description: str, text: str):
    PRESETS[name] = (description, text)


_register(
    "slow_light",
    "single-control pulse injection and transit at v = 1e-3 c",
    f"""
medium.r_g = 1
medium.gamma = 1
medium.gamma2 = 0
medium.u_g0 = 1e-3
medium.domain_length = 100
medium.grid_points = 2048
pulse.amplitude = 1
pulse.duration = 1e4
pulse.injection_time = 3.5e4
schedule.segment = 0 8e4 {_OM0} 0 50
engine = direct
run.t_end = 7.5e4
run.snapshot_interval = 1000
""")

_register(
    "stationary",
    "balanced two-color hold: standing pulse, weak residual decay",
    f"""
medium.r_g = 1
medium.gamma = 1
medium.gamma2 = 1e-4
medium.u_g0 = 1e-3
medium.domain_length = 200
medium.grid_points = 4096
pulse.prepared = true
pulse.duration = 2e4
pulse.center = 100
schedule.segment = 0 1e4 {_OM0} {_OM0} 50
engine = both
run.t_end = 1e4
run.snapshot_interval = 500
""")

_register(
    "stop_and_store",
    "slow light, full stop with both controls off, backward retrieval",
    f"""
medium.r_g = 1
medium.gamma = 1
medium.gamma2 = 1e-5
medium.u_g0 = 1e-3
medium.domain_length = 120
medium.grid_points = 2048
pulse.prepared = true
pulse.duration = 1e4
pulse.center = 70
schedule.segment = 0 500 {_OM0} 0 50
schedule.segment = 500 2.1e4 0 0 50
schedule.segment = 2.1e4 2.6e4 0 {_OM0} 50
engine = direct
run.t_end = 2.6e4
run.snapshot_interval = 1000
""")

_register(
    "push_pull",
    "standing pulse pushed forward, then pulled back, at constant power",
    f"""
medium.r_g = 1
medium.gamma = 1
medium.gamma2 = 0
medium.u_g0 = 1e-3
medium.domain_length = 200
medium.grid_points = 4096
pulse.prepared = true
pulse.duration = 2e4
pulse.center = 100
schedule.segment = 0 1000 {_OMH} {_OMH} 50
schedule.segment = 1000 3000 {_OMA} {_OMH} 50
schedule.segment = 3000 5000 {_OMH} {_OMA} 50
engine = direct
run.t_end = 5000
run.snapshot_interval = 250
""")

_register(
    "conversion",
    "forward pulse held two-color, partially converted, released forward",
    f"""
medium.r_g = 1
medium.gamma = 1
medium.gamma2 = 1e-5
medium.u_g0 = 1e-3
medium.domain_length = 200
medium.grid_points = 4096
pulse.prepared = true
pulse.duration = 2e4
pulse.center = 100
schedule.segment = 0 500 {_OM0} 0 50
schedule.segment = 500 1.05e4 {_OM0} {_OM0} 50
schedule.segment = 1.05e4 1.2e4 {_OM0} 0 50
engine = direct
run.t_end = 1.2e4
run.snapshot_interval = 250
""")

_register(
    "phase_gate",
    "held pulse accumulating a pi phase from an off-resonant impurity cloud",
    f"""
medium.r_g = 1
medium.gamma = 1
medium.gamma2 = 0
medium.u_g0 = 1e-3
medium.domain_length = 520
medium.grid_points = 5120
pulse.prepared = true
pulse.duration = 2e4
pulse.center = 260
schedule.segment = 0 1.1e4 {_OM0} {_OM0} 50
engine = direct
run.t_end = 1e4
run.snapshot_interval = 250
run.probe_z = 260
# cloud much wider than the pulse: the imprint stays spatially uniform
# over the polariton, and the local rate is weak against slaving
perturber.m_atoms = 1122.8
perturber.z_center = 260
perturber.length = 160
perturber.sigma_over_s = 1
perturber.gamma_a = 0.5
perturber.detuning = 10
""")


def list_presets() -> list[tuple[str, str]]:
    """(name, description) pairs in a stable order."""
    return [(name, desc) for name, (desc, _) in PRESETS.items()]


def get_preset(name: str) -> str:
    try:
        return PRESETS[name][1].strip() + "\n"
    except KeyError:
        known = ", ".join(PRESETS)
        raise ValidationError(f"unknown preset {name!r}; available: {known}") from None
