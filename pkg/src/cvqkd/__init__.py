"""Quadrature-ledger simulator for continuous-variable quantum key distribution.

Three layers:

* :mod:`cvqkd.modes` — exact linearized Gaussian optics: fields as linear
  combinations of independent noise-source quadratures, with beamsplitters,
  loss, phase dither, and homodyne spectra computed symbolically.
* :mod:`cvqkd.signaling` — scalar signal theory: simultaneous-measurement
  penalty, the binary-modulation error law, and decibel conversions.
* :mod:`cvqkd.protocol` / :mod:`cvqkd.montecarlo` — the key-distribution
  protocol with three eavesdropper strategies, evaluated both in closed form
  and by deterministic sample-level simulation.

The :mod:`cvqkd.cli` module exposes all of it as a batch command line.
"""

from .modes import (
    FieldState,
    ModulationStream,
    NoiseSource,
    Quadrature,
    SourceKind,
    SourceRegistry,
    SpectrumDecomposition,
    add_modulation,
    apply_loss,
    apply_phase_dither,
    beamsplit,
    correct_dither,
    homodyne_spectrum,
    joint_spectrum,
    make_field,
    phase_shift,
    quadrature_variance,
    uncertainty_product,
)
from .montecarlo import SlotSample, run_montecarlo, simulate_slot
from .protocol import (
    BerReport,
    ConfigError,
    Intervention,
    Scenario,
    alice_encode,
    bob_choose_bases,
    calibrate_signal_power,
    detect,
    eve_intervene,
    make_test_schedule,
    run_analytic,
    scenario_from_json,
    scenario_to_json,
    sift,
)
from .signaling import (
    SnrValue,
    ber_to_snr,
    db_to_linear,
    erfc,
    linear_to_db,
    simultaneous_snr,
    snr_to_ber,
)

__version__ = "0.1.0"

__all__ = [
    "FieldState",
    "ModulationStream",
    "NoiseSource",
    "Quadrature",
    "SourceKind",
    "SourceRegistry",
    "SpectrumDecomposition",
    "add_modulation",
    "apply_loss",
    "apply_phase_dither",
    "beamsplit",
    "correct_dither",
    "homodyne_spectrum",
    "joint_spectrum",
    "make_field",
    "phase_shift",
    "quadrature_variance",
    "uncertainty_product",
    "SlotSample",
    "run_montecarlo",
    "simulate_slot",
    "BerReport",
    "ConfigError",
    "Intervention",
    "Scenario",
    "alice_encode",
    "bob_choose_bases",
    "calibrate_signal_power",
    "detect",
    "eve_intervene",
    "make_test_schedule",
    "run_analytic",
    "scenario_from_json",
    "scenario_to_json",
    "sift",
    "SnrValue",
    "ber_to_snr",
    "db_to_linear",
    "erfc",
    "linear_to_db",
    "simultaneous_snr",
    "snr_to_ber",
    "__version__",
]
