"""The cryptographic layer: encoding, basis choice, sifting, eavesdroppers, verdicts.

A :class:`Scenario` describes one experiment; :func:`run_analytic` turns it
into a deterministic :class:`BerReport` using the closed-form channel
algebra, and the Monte Carlo engine reproduces the same numbers by sampling.

The sender calibrates her modulation power so that, absent an eavesdropper,
the receiver decodes at the target error rate through the stated channel
loss.  An eavesdropper taps in right next to the sender, before the loss, so
higher calibrated power works in her favor.

Intercept-resend strategies (``guess`` and ``simultaneous``) re-encode on a
fresh beam at the calibrated power, and the re-sent data reaches the
receiver as sent: the receiver's copy is limited only by what the
interceptor put on the beam.  Under ``guess`` the re-sent stream on the
guessed quadrature reproduces the original modulation (the interceptor
regenerates the digital signal), so the test-channel errors come entirely
from wrong guesses and sit at exactly 25%; the interceptor's own key record
still carries her measurement errors.  Under ``simultaneous`` both re-sent
streams carry her split-measurement errors.  Under ``tap`` the receiver
keeps the genuine, attenuated beam with vacuum backfill.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict, replace

import numpy as np

from .signaling import ber_to_snr, db_to_linear, snr_to_ber

__all__ = [
    "SOURCE_KINDS",
    "EVE_STRATEGIES",
    "ConfigError",
    "Scenario",
    "BerReport",
    "Intervention",
    "calibrate_signal_power",
    "eve_intervene",
    "run_analytic",
    "alice_encode",
    "bob_choose_bases",
    "make_test_schedule",
    "sift",
    "detect",
    "scenario_from_json",
    "scenario_to_json",
]

SOURCE_KINDS = ("coherent", "epr_squeezed")
EVE_STRATEGIES = ("none", "guess", "simultaneous", "tap")
DEFAULT_DETECTION_MARGIN = 0.03


class ConfigError(ValueError):
    """A scenario field failed validation; ``field`` names the offender."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"field {field!r}: {message}")
        self.field = field


@dataclass(frozen=True)
class Scenario:
    """One full experiment description.

    ``squeezing_db`` is the noise suppression of the squeezed sources
    (amplitude-quadrature variance ``10**(-squeezing_db/10)``); a coherent
    source must have zero squeezing.  ``tap_fraction`` is required exactly
    when ``eve == "tap"``.  The eavesdropper always sits next to the sender,
    upstream of the channel loss.
    """

    source: str = "coherent"
    squeezing_db: float = 0.0
    loss: float = 0.0
    eve: str = "none"
    tap_fraction: float | None = None
    eve_position: str = "near_alice"
    target_bob_ber: float = 0.0128
    n_bits: int = 1_000_000
    seed: int = 1

    def validate(self) -> "Scenario":
        if self.source not in SOURCE_KINDS:
            raise ConfigError("source", f"must be one of {SOURCE_KINDS}, got {self.source!r}")
        if not isinstance(self.squeezing_db, (int, float)) or self.squeezing_db < 0:
            raise ConfigError("squeezing_db", f"must be a number >= 0, got {self.squeezing_db!r}")
        if self.source == "coherent" and self.squeezing_db != 0:
            raise ConfigError("squeezing_db", "a coherent source cannot be squeezed")
        if not isinstance(self.loss, (int, float)) or not (0.0 <= self.loss < 1.0):
            raise ConfigError("loss", f"must lie in [0, 1), got {self.loss!r}")
        if self.eve not in EVE_STRATEGIES:
            raise ConfigError("eve", f"must be one of {EVE_STRATEGIES}, got {self.eve!r}")
        if self.eve == "tap":
            if not isinstance(self.tap_fraction, (int, float)) or not (0.0 < self.tap_fraction < 1.0):
                raise ConfigError("tap_fraction", f"must lie in (0, 1), got {self.tap_fraction!r}")
        elif self.tap_fraction is not None:
            raise ConfigError("tap_fraction", "only meaningful when eve == 'tap'")
        if self.eve_position != "near_alice":
            raise ConfigError("eve_position", f"only 'near_alice' is modeled, got {self.eve_position!r}")
        if not isinstance(self.target_bob_ber, (int, float)) or not (0.0 < self.target_bob_ber < 0.5):
            raise ConfigError("target_bob_ber", f"must lie in (0, 0.5), got {self.target_bob_ber!r}")
        if not isinstance(self.n_bits, int) or self.n_bits < 1:
            raise ConfigError("n_bits", f"must be a positive integer, got {self.n_bits!r}")
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2**64):
            raise ConfigError("seed", f"must be a 64-bit unsigned integer, got {self.seed!r}")
        return self

    @property
    def noise_floor(self) -> float:
        """Quadrature noise variance of the carrier beams (QNL units)."""
        return db_to_linear(-self.squeezing_db)

    @property
    def transmission(self) -> float:
        return 1.0 - self.loss

    def with_updates(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.eve != "tap":
            d.pop("tap_fraction")
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ConfigError("<document>", "scenario must be a mapping of field names")
        known = set(cls.__dataclass_fields__)
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown field")
        scenario = cls(**data)
        scenario.validate()
        return scenario


def scenario_to_json(scenario: Scenario) -> str:
    return json.dumps(scenario.to_dict(), indent=2, sort_keys=True) + "\n"


def scenario_from_json(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", f"not valid JSON: {exc}") from exc
    return Scenario.from_dict(data)


@dataclass(frozen=True)
class BerReport:
    """Error rates of one run plus the security verdict.

    ``bob_test_ber`` is the publicly compared test-channel error rate,
    ``eve_key_ber`` the error rate of the eavesdropper's copy of the key,
    and ``bob_baseline_ber`` the no-eavesdropper prediction the verdict is
    measured against.  Empirical reports may carry ``None`` where a category
    received no slots.
    """

    signal_power: float
    bob_test_ber: float | None
    eve_key_ber: float | None
    bob_baseline_ber: float
    verdict: str
    mode: str

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class Intervention:
    """What an eavesdropping strategy does to both parties.

    ``eve_signal_power`` and ``eve_noise_variance`` describe the
    interceptor's per-quadrature measurement; ``eve_snr`` is their ratio.
    When ``bob_resend`` is true the receiver gets the interceptor's
    re-encoded bits; otherwise he detects a Gaussian channel with the given
    signal power and noise variance.
    """

    strategy: str
    eve_signal_power: float
    eve_noise_variance: float
    eve_snr: float
    bob_resend: bool
    bob_signal_power: float | None
    bob_noise_variance: float | None


def required_snr(scenario: Scenario) -> float:
    """Receiver signal-to-noise ratio that meets the target error rate."""
    return ber_to_snr(scenario.target_bob_ber).linear


def calibrate_signal_power(scenario: Scenario) -> float:
    """Modulation power the sender needs through the stated loss.

    The receiver's noise floor is ``(1-loss)*Vn + loss`` and his signal
    transmission is ``(1-loss)``, so loss forces the power up even though a
    lossless squeezed channel would need very little.
    """
    scenario.validate()
    v_n = scenario.noise_floor
    t = scenario.transmission
    return required_snr(scenario) * (t * v_n + scenario.loss) / t


def bob_nominal_channel(scenario: Scenario) -> tuple[float, float]:
    """Receiver's (signal power, noise variance) with no eavesdropper."""
    v_s = calibrate_signal_power(scenario)
    t = scenario.transmission
    return t * v_s, t * scenario.noise_floor + scenario.loss


def eve_intervene(scenario: Scenario, strategy: str | None = None) -> Intervention:
    """Per-quadrature view the eavesdropper gets, and the channel she leaves.

    ``guess``: she measures one randomly guessed quadrature of the full beam
    (both beams, for the entangled scheme) at the sender's intrinsic
    signal-to-noise, then re-sends a clean beam reproducing the original
    modulation on that quadrature and fresh random bits on the other.

    ``simultaneous``: she splits 50:50, measures both quadratures with the
    vacuum partition penalty, and re-sends both measured streams.

    ``tap``: she diverts ``tap_fraction`` of the light (of both beams, for
    the entangled scheme), performs her own 50:50 simultaneous measurement
    on the diverted share, and lets the rest continue with vacuum backfill.
    """
    scenario.validate()
    if strategy is None:
        strategy = scenario.eve
    if strategy == "none":
        raise ValueError("no intervention to describe for eve == 'none'")
    v_s = calibrate_signal_power(scenario)
    v_n = scenario.noise_floor

    if strategy == "guess":
        return Intervention(
            strategy="guess",
            eve_signal_power=v_s,
            eve_noise_variance=v_n,
            eve_snr=v_s / v_n,
            bob_resend=True,
            bob_signal_power=None,
            bob_noise_variance=None,
        )
    if strategy == "simultaneous":
        signal = 0.5 * v_s
        noise = 0.5 * (v_n + 1.0)
        return Intervention(
            strategy="simultaneous",
            eve_signal_power=signal,
            eve_noise_variance=noise,
            eve_snr=signal / noise,
            bob_resend=True,
            bob_signal_power=None,
            bob_noise_variance=None,
        )
    if strategy == "tap":
        eps = scenario.tap_fraction
        if eps is None or not (0.0 < eps < 1.0):
            raise ConfigError("tap_fraction", f"must lie in (0, 1), got {eps!r}")
        # Tapped share, then her own 50:50 split against vacuum.
        signal = 0.5 * eps * v_s
        noise = 0.5 * (eps * v_n + (1.0 - eps) + 1.0)
        t = scenario.transmission
        bob_signal = t * (1.0 - eps) * v_s
        bob_noise = t * ((1.0 - eps) * v_n + eps) + scenario.loss
        return Intervention(
            strategy="tap",
            eve_signal_power=signal,
            eve_noise_variance=noise,
            eve_snr=signal / noise,
            bob_resend=False,
            bob_signal_power=bob_signal,
            bob_noise_variance=bob_noise,
        )
    raise ValueError(f"unknown strategy {strategy!r}")


def detect(test_ber: float, baseline_ber: float, threshold_margin: float = DEFAULT_DETECTION_MARGIN) -> str:
    """Security verdict: compromised iff the test channel exceeds baseline + margin."""
    if not (0.0 <= test_ber <= 0.5 + 1e-9):
        raise ValueError(f"test error rate must lie in [0, 0.5], got {test_ber}")
    if not (0.0 <= baseline_ber <= 0.5 + 1e-9):
        raise ValueError(f"baseline error rate must lie in [0, 0.5], got {baseline_ber}")
    return "compromised" if test_ber > baseline_ber + threshold_margin else "secure"


def run_analytic(scenario: Scenario) -> BerReport:
    """Deterministic error-rate report for a scenario."""
    scenario.validate()
    v_s = calibrate_signal_power(scenario)
    baseline = scenario.target_bob_ber

    if scenario.eve == "none":
        bob_signal, bob_noise = bob_nominal_channel(scenario)
        bob_test = snr_to_ber(bob_signal / bob_noise)
        eve_key = 0.5
    else:
        action = eve_intervene(scenario)
        eve_measure_ber = snr_to_ber(action.eve_snr)
        if scenario.eve == "guess":
            # Wrong guesses hand the receiver unrelated random bits; right
            # guesses reproduce the modulation, so the test channel sees
            # exactly one error in four.  Her own key copy knows the guessed
            # quadrature only as well as she measured it.
            bob_test = 0.25
            eve_key = 0.5 * eve_measure_ber + 0.25
        elif scenario.eve == "simultaneous":
            bob_test = eve_measure_ber
            eve_key = eve_measure_ber
        else:  # tap
            bob_test = snr_to_ber(action.bob_signal_power / action.bob_noise_variance)
            eve_key = eve_measure_ber

    return BerReport(
        signal_power=v_s,
        bob_test_ber=bob_test,
        eve_key_ber=eve_key,
        bob_baseline_ber=baseline,
        verdict=detect(bob_test, baseline),
        mode="analytic",
    )


def alice_encode(n_bits: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Two independent uniform bit strings, one per quadrature."""
    if n_bits <= 0:
        raise ValueError(f"n_bits must be positive, got {n_bits}")
    bits = rng.integers(0, 2, size=(2, n_bits), dtype=np.uint8)
    return bits[0], bits[1]


def bob_choose_bases(n_bits: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform independent quadrature choices (0 = amplitude, 1 = phase)."""
    if n_bits <= 0:
        raise ValueError(f"n_bits must be positive, got {n_bits}")
    return rng.integers(0, 2, size=n_bits, dtype=np.uint8)


def make_test_schedule(n_bits: int, rng: np.random.Generator) -> np.ndarray:
    """Publicly agreed per-slot choice of which quadrature is the test."""
    if n_bits <= 0:
        raise ValueError(f"n_bits must be positive, got {n_bits}")
    return rng.integers(0, 2, size=n_bits, dtype=np.uint8)


def sift(
    alice_bits: tuple[np.ndarray, np.ndarray],
    bob_results: np.ndarray,
    bases: np.ndarray,
    test_quadrature_schedule: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Partition the receiver's decoded bits into key material and a test rate.

    Slots where the receiver happened to measure the scheduled test
    quadrature are compared publicly against the sender's bits; the rest
    become key bits.  Swapping the test role pseudo-randomly slot by slot
    means excess errors on either quadrature surface immediately.
    """
    alice_plus, alice_minus = alice_bits
    n = len(bob_results)
    for name, arr in (
        ("alice_bits[0]", alice_plus),
        ("alice_bits[1]", alice_minus),
        ("bases", bases),
        ("test_quadrature_schedule", test_quadrature_schedule),
    ):
        if len(arr) != n:
            raise ValueError(f"{name} has length {len(arr)}, expected {n}")
    bob_results = np.asarray(bob_results, dtype=np.uint8)
    alice_on_basis = np.where(np.asarray(bases) == 0, alice_plus, alice_minus)
    test_mask = np.asarray(bases) == np.asarray(test_quadrature_schedule)
    n_test = int(test_mask.sum())
    if n_test == 0:
        raise ValueError("no test comparisons: schedule never matched a measured basis")
    test_ber = float(np.mean(bob_results[test_mask] != alice_on_basis[test_mask]))
    key_bits = bob_results[~test_mask]
    return key_bits, test_ber
