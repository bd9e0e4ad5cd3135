"""Transition rates of two-level atoms in a rectangular waveguide."""

__version__ = "0.1.0"

from .modes import (  # noqa: E402
    ModeStatus,
    PropagatingMode,
    ResonanceReport,
    WaveguideGeometry,
    classify_modes,
    enumerate_modes,
    resonance_loci,
)
from .emission import (  # noqa: E402
    DipoleOrientation,
    DivergentSumError,
    TransitionSpec,
    eta_directional,
    eta_mean,
    eta_mean_monte_carlo,
    free_space_rate,
    in_guide_rate,
    sin2_theta,
)
from .fields import (  # noqa: E402
    FieldAmplitudes,
    MediumSpec,
    absorption_rate_at,
    complete_amplitudes,
    energy_density,
    field_at,
    lorentzian,
    mean_absorption_rate,
    mean_energy_density,
    stimulated_rate,
)
from .laser import (  # noqa: E402
    EtaSchedule,
    LaserParams,
    cw_power_exact,
    cw_power_free,
    cw_power_guided,
    simulate_pulse,
)
