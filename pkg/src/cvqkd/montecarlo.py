"""Sample-level protocol runs that must agree with the analytic engine.

Every randomness consumer has its own counter-based stream keyed by
``(seed, role)``, with slot ``i`` reading word ``i`` of its stream, so a run
is reproducible bit for bit regardless of evaluation order and slots could
be partitioned across workers without changing any draw.  Gaussian samples
come from the inverse normal CDF applied to counter-indexed uniforms, which
keeps the one-word-per-slot mapping exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .modes import Quadrature
from .protocol import (
    BerReport,
    Scenario,
    bob_nominal_channel,
    calibrate_signal_power,
    detect,
    eve_intervene,
    sift,
)

__all__ = [
    "SlotSample",
    "simulate_slot",
    "stream_words",
    "stream_bits",
    "stream_normals",
    "run_montecarlo",
]

# Fixed role numbering; changing it would silently re-key every stream.
_ROLE_IDS = {
    "alice_plus": 0,
    "alice_minus": 1,
    "bob_basis": 2,
    "test_schedule": 3,
    "bob_noise": 4,
    "eve_guess": 5,
    "eve_noise_plus": 6,
    "eve_noise_minus": 7,
    "eve_random_plus": 8,
    "eve_random_minus": 9,
    "eve_fill": 10,
    "eve_blind": 11,
}


def stream_words(seed: int, role: str, n: int) -> np.ndarray:
    """Words 0..n-1 of the counter-based stream for ``(seed, role)``."""
    key = np.random.SeedSequence(entropy=seed, spawn_key=(_ROLE_IDS[role],))
    gen = np.random.Generator(np.random.Philox(key))
    return gen.integers(0, 2**64 - 1, size=n, dtype=np.uint64, endpoint=True)


def stream_bits(seed: int, role: str, n: int) -> np.ndarray:
    return (stream_words(seed, role, n) & 1).astype(np.uint8)


def stream_normals(seed: int, role: str, n: int) -> np.ndarray:
    words = stream_words(seed, role, n)
    # (k + 1/2) / 2^53 on the top 53 bits: uniform on (0, 1), never hitting
    # an endpoint, one word per slot.
    u = ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)


@dataclass(frozen=True)
class SlotSample:
    """One homodyne outcome for one bit slot, in QNL-normalized amplitude units."""

    quadrature: Quadrature
    value: float


def simulate_slot(
    bit: int,
    signal_amplitude: float,
    noise_variance: float,
    rng: np.random.Generator,
    quadrature: Quadrature = Quadrature.PLUS,
) -> SlotSample:
    """Draw the homodyne outcome for a single bit slot."""
    if noise_variance < 0.0:
        raise ValueError(f"noise variance must be >= 0, got {noise_variance}")
    value = bit * signal_amplitude + rng.normal(0.0, math.sqrt(noise_variance))
    return SlotSample(quadrature, float(value))


def _threshold(samples: np.ndarray, amplitude: float) -> np.ndarray:
    return (samples > 0.5 * amplitude).astype(np.uint8)


def _gaussian_bits(
    bits: np.ndarray,
    signal_power: float,
    noise_variance: float,
    normals: np.ndarray,
) -> np.ndarray:
    amplitude = math.sqrt(signal_power)
    samples = bits * amplitude + math.sqrt(noise_variance) * normals
    return _threshold(samples, amplitude)


def _rate(errors: np.ndarray, mask: np.ndarray) -> float | None:
    n = int(mask.sum())
    if n == 0:
        return None
    return float(np.count_nonzero(errors & mask)) / n


def run_montecarlo(
    scenario: Scenario,
    n_bits: int | None = None,
    seed: int | None = None,
) -> BerReport:
    """Full sampled protocol run; deterministic for a fixed seed.

    Encodes both quadratures, applies the eavesdropper strategy at sample
    level (her own Gaussian measurement noise included), thresholds the
    receiver's outcomes midway, and sifts into test and key slots.  At least
    ten thousand bits are recommended for the quoted statistical tolerances.
    """
    scenario.validate()
    n = scenario.n_bits if n_bits is None else n_bits
    seed = scenario.seed if seed is None else seed
    if n < 1:
        raise ValueError(f"n_bits must be positive, got {n}")

    v_s = calibrate_signal_power(scenario)
    alice_plus = stream_bits(seed, "alice_plus", n)
    alice_minus = stream_bits(seed, "alice_minus", n)
    bases = stream_bits(seed, "bob_basis", n)
    schedule = stream_bits(seed, "test_schedule", n)
    alice_on_basis = np.where(bases == 0, alice_plus, alice_minus)

    if scenario.eve == "none":
        bob_signal, bob_noise = bob_nominal_channel(scenario)
        bob_bits = _gaussian_bits(
            alice_on_basis, bob_signal, bob_noise, stream_normals(seed, "bob_noise", n)
        )
        eve_copy = stream_bits(seed, "eve_blind", n)
    elif scenario.eve == "guess":
        action = eve_intervene(scenario)
        guesses = stream_bits(seed, "eve_guess", n)
        alice_on_guess = np.where(guesses == 0, alice_plus, alice_minus)
        eve_measured = _gaussian_bits(
            alice_on_guess,
            action.eve_signal_power,
            action.eve_noise_variance,
            stream_normals(seed, "eve_noise_plus", n),
        )
        fresh_plus = stream_bits(seed, "eve_random_plus", n)
        fresh_minus = stream_bits(seed, "eve_random_minus", n)
        fresh_on_basis = np.where(bases == 0, fresh_plus, fresh_minus)
        # Right guess: the re-sent stream reproduces the original modulation;
        # wrong guess: the receiver decodes her fresh random string.
        bob_bits = np.where(guesses == bases, alice_on_basis, fresh_on_basis)
        eve_copy = np.where(guesses == bases, eve_measured, stream_bits(seed, "eve_fill", n))
    elif scenario.eve == "simultaneous":
        action = eve_intervene(scenario)
        eve_plus = _gaussian_bits(
            alice_plus,
            action.eve_signal_power,
            action.eve_noise_variance,
            stream_normals(seed, "eve_noise_plus", n),
        )
        eve_minus = _gaussian_bits(
            alice_minus,
            action.eve_signal_power,
            action.eve_noise_variance,
            stream_normals(seed, "eve_noise_minus", n),
        )
        eve_copy = np.where(bases == 0, eve_plus, eve_minus)
        bob_bits = eve_copy
    else:  # tap
        action = eve_intervene(scenario)
        eve_plus = _gaussian_bits(
            alice_plus,
            action.eve_signal_power,
            action.eve_noise_variance,
            stream_normals(seed, "eve_noise_plus", n),
        )
        eve_minus = _gaussian_bits(
            alice_minus,
            action.eve_signal_power,
            action.eve_noise_variance,
            stream_normals(seed, "eve_noise_minus", n),
        )
        eve_copy = np.where(bases == 0, eve_plus, eve_minus)
        bob_bits = _gaussian_bits(
            alice_on_basis,
            action.bob_signal_power,
            action.bob_noise_variance,
            stream_normals(seed, "bob_noise", n),
        )

    test_mask = bases == schedule
    try:
        _, bob_test_ber = sift((alice_plus, alice_minus), bob_bits, bases, schedule)
    except ValueError:
        bob_test_ber = None
    eve_key_ber = _rate(eve_copy != alice_on_basis, ~test_mask)

    baseline = scenario.target_bob_ber
    verdict = "secure" if bob_test_ber is None else detect(bob_test_ber, baseline)
    return BerReport(
        signal_power=v_s,
        bob_test_ber=bob_test_ber,
        eve_key_ber=eve_key_ber,
        bob_baseline_ber=baseline,
        verdict=verdict,
        mode="empirical",
    )
