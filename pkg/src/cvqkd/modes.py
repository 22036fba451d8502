"""Linearized Gaussian optics on a ledger of independent noise sources.

Every optical field is a mean carrier plus a linear combination of
fluctuation components drawn from registered noise sources, so variances and
homodyne spectra follow from exact coefficient algebra instead of sampling.
All powers are normalized to the quantum noise limit: a coherent beam has
unit variance in both quadratures.

Conventions
-----------
Quadratures live in a fixed global frame.  Each noise-source component and
each modulation stream carries a coefficient pair ``(c_plus, c_minus)``
giving its weight in a field's amplitude and phase quadratures.  Multiplying
a field by ``exp(i*theta)`` rotates every coefficient pair by ``theta`` and
the complex carrier with it.  A beamsplitter of transmission ``eta`` and
relative phase ``phi`` forms

    out1 = sqrt(eta) * f1 + sqrt(1 - eta) * e^{i phi} * f2
    out2 = sqrt(1 - eta) * f1 - sqrt(eta) * e^{i phi} * f2

which is unitary for every ``eta`` and reduces at ``eta = 1/2``,
``phi = pi/2`` to the entangling combination ``(f1 +/- i f2)/sqrt(2)``.
The reflected port of a fully transmissive splitter therefore carries
``-f2``; a global sign is unobservable in every spectrum.

Phase dither enters as a fluctuation at right angles to the carrier phasor:
a field with complex carrier ``z`` multiplied by ``(1 + i*phi(t))`` gains
``i*phi*z``, i.e. coefficient ``-2*Im(z)`` on its amplitude row and
``+2*Re(z)`` on its phase row.  For a real-carrier beam only the phase row
moves, and recombining a dithered entangled beam with its partner lands the
penalty ``carrier**2 * V_phi`` in the bright port's amplitude spectrum.

Balanced homodyne detection is taken as ideal (local-oscillator noise
cancels), so a spectrum is fully determined by the field's coefficients.
All values are immutable; operations return new fields.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dataclass_field
from enum import Enum, IntEnum

__all__ = [
    "Quadrature",
    "SourceKind",
    "NoiseSource",
    "SourceRegistry",
    "ModulationStream",
    "FieldState",
    "SpectrumDecomposition",
    "make_field",
    "add_modulation",
    "beamsplit",
    "apply_loss",
    "phase_shift",
    "apply_phase_dither",
    "homodyne_spectrum",
    "joint_spectrum",
    "correct_dither",
    "quadrature_variance",
    "uncertainty_product",
]

_SQRT_HALF = math.sqrt(0.5)


class Quadrature(IntEnum):
    """Amplitude (PLUS) or phase (MINUS) quadrature of a light mode."""

    PLUS = 0
    MINUS = 1


class SourceKind(str, Enum):
    VACUUM = "vacuum"
    SQUEEZED = "squeezed"
    PHASE_DITHER = "phase_dither"


@dataclass(frozen=True)
class NoiseSource:
    """An independent Gaussian fluctuation source.

    ``v_plus`` and ``v_minus`` are the QNL-normalized variances of the two
    quadrature components.  A phase dither is a scalar process: its variance
    is stored in ``v_plus`` and ``v_minus`` is unused.
    """

    id: int
    kind: SourceKind
    v_plus: float
    v_minus: float
    registry: "SourceRegistry" = dataclass_field(repr=False, compare=False)


# Component tags: vacuum/squeezed sources expose one component per
# quadrature; a dither source exposes a single scalar component.
_COMP_PLUS = "+"
_COMP_MINUS = "-"
_COMP_DITHER = "d"


class SourceRegistry:
    """Allocates the noise sources of one simulation with unique ids.

    Fields built over the same registry may interfere; mixing fields from
    different registries is rejected.  Source allocation is the only
    sequenced operation in this module.
    """

    def __init__(self) -> None:
        self._sources: dict[int, NoiseSource] = {}
        self._bound: set[int] = set()
        self._next_id = 0

    def _register(self, kind: SourceKind, v_plus: float, v_minus: float) -> NoiseSource:
        source = NoiseSource(self._next_id, kind, v_plus, v_minus, self)
        self._sources[source.id] = source
        self._next_id += 1
        return source

    def vacuum(self) -> NoiseSource:
        """A fresh vacuum source (unit variance in both quadratures)."""
        return self._register(SourceKind.VACUUM, 1.0, 1.0)

    def squeezed(self, v_plus: float, v_minus: float | None = None) -> NoiseSource:
        """A squeezed source with amplitude variance ``v_plus``.

        By default the phase variance is ``1/v_plus`` (a pure
        minimum-uncertainty source); an explicit ``v_minus`` may be larger
        but the uncertainty product may not fall below one.
        """
        if v_plus <= 0.0:
            raise ValueError(f"quadrature variance must be > 0, got {v_plus}")
        if v_minus is None:
            v_minus = 1.0 / v_plus
        if v_minus <= 0.0:
            raise ValueError(f"quadrature variance must be > 0, got {v_minus}")
        if v_plus * v_minus < 1.0 - 1e-12:
            raise ValueError(
                f"uncertainty product {v_plus * v_minus} below the quantum limit"
            )
        return self._register(SourceKind.SQUEEZED, v_plus, v_minus)

    def phase_dither(self, variance: float) -> NoiseSource:
        """A scalar phase-dither process with power spectrum ``variance``."""
        if variance < 0.0:
            raise ValueError(f"dither variance must be >= 0, got {variance}")
        return self._register(SourceKind.PHASE_DITHER, variance, variance)

    def source(self, source_id: int) -> NoiseSource:
        return self._sources[source_id]

    def component_variance(self, key: tuple[int, str]) -> float:
        source_id, tag = key
        source = self._sources[source_id]
        if tag == _COMP_MINUS:
            return source.v_minus
        return source.v_plus

    def _bind(self, source: NoiseSource) -> None:
        # A vacuum or squeezed source feeds exactly one beam; reuse would
        # fabricate correlations that no optical layout produces.
        if source.id in self._bound:
            raise ValueError(f"source {source.id} already feeds a field")
        self._bound.add(source.id)


@dataclass(frozen=True)
class ModulationStream:
    """A binary data stream impressed on one quadrature with power ``power``."""

    stream_id: str
    quadrature: Quadrature
    power: float

    def __post_init__(self) -> None:
        if self.power < 0.0:
            raise ValueError(f"signal power must be >= 0, got {self.power}")


Vec = tuple[float, float]


def _rotate(vec: Vec, cos_t: float, sin_t: float) -> Vec:
    p, m = vec
    return (p * cos_t - m * sin_t, p * sin_t + m * cos_t)


def _rotate_rows(rows: dict, cos_t: float, sin_t: float) -> dict:
    return {key: _rotate(vec, cos_t, sin_t) for key, vec in rows.items()}


def _combine_rows(a: float, rows1: dict, b: float, rows2: dict) -> dict:
    out: dict = {}
    for key in rows1.keys() | rows2.keys():
        p1, m1 = rows1.get(key, (0.0, 0.0))
        p2, m2 = rows2.get(key, (0.0, 0.0))
        out[key] = (a * p1 + b * p2, a * m1 + b * m2)
    return out


@dataclass(frozen=True)
class FieldState:
    """One optical beam: a carrier plus linear fluctuation coefficients.

    ``noise_rows`` maps ``(source id, component tag)`` to the coefficient
    pair with which that component enters the field's two quadratures;
    ``signal_rows`` does the same per modulation stream, with amplitude
    ``sqrt(power)`` at injection.  The carrier is complex so that phase
    shifts and beamsplitter phases act on it exactly; its magnitude squared
    is proportional to the beam intensity.
    """

    registry: SourceRegistry = dataclass_field(repr=False, compare=False)
    carrier: complex = 0.0 + 0.0j
    noise_rows: dict = dataclass_field(default_factory=dict)
    signal_rows: dict = dataclass_field(default_factory=dict)

    @property
    def carrier_amplitude(self) -> float:
        return abs(self.carrier)

    def variance(self, quadrature: Quadrature) -> float:
        return quadrature_variance(self, quadrature)


def quadrature_variance(field: FieldState, quadrature: Quadrature) -> float:
    """Noise variance of one quadrature (signals excluded)."""
    idx = int(quadrature)
    total = 0.0
    for key, vec in field.noise_rows.items():
        total += vec[idx] ** 2 * field.registry.component_variance(key)
    return total


def uncertainty_product(field: FieldState) -> float:
    return quadrature_variance(field, Quadrature.PLUS) * quadrature_variance(
        field, Quadrature.MINUS
    )


def make_field(carrier: float, source: NoiseSource) -> FieldState:
    """A beam fed by one vacuum or squeezed source, with no data on it."""
    if carrier < 0.0:
        raise ValueError(f"carrier amplitude must be >= 0, got {carrier}")
    if source.kind is SourceKind.PHASE_DITHER:
        raise ValueError("phase dither attaches via apply_phase_dither, not make_field")
    source.registry._bind(source)
    rows = {
        (source.id, _COMP_PLUS): (1.0, 0.0),
        (source.id, _COMP_MINUS): (0.0, 1.0),
    }
    return FieldState(source.registry, complex(carrier), rows, {})


def add_modulation(field: FieldState, stream: ModulationStream) -> FieldState:
    """Impress a data stream on the field; noise rows are untouched."""
    if stream.stream_id in field.signal_rows:
        raise ValueError(f"stream {stream.stream_id!r} already rides this field")
    amplitude = math.sqrt(stream.power)
    vec = (amplitude, 0.0) if stream.quadrature is Quadrature.PLUS else (0.0, amplitude)
    signals = dict(field.signal_rows)
    signals[stream.stream_id] = vec
    return FieldState(field.registry, field.carrier, dict(field.noise_rows), signals)


def phase_shift(field: FieldState, theta: float) -> FieldState:
    """Rotate the field by ``theta``: carrier phasor and all coefficient pairs."""
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return FieldState(
        field.registry,
        field.carrier * cmath.exp(1j * theta),
        _rotate_rows(field.noise_rows, cos_t, sin_t),
        _rotate_rows(field.signal_rows, cos_t, sin_t),
    )


def beamsplit(
    f1: FieldState,
    f2: FieldState,
    eta: float,
    rel_phase: float = 0.0,
) -> tuple[FieldState, FieldState]:
    """Mix two beams on a splitter of transmission ``eta``.

    The second input is first advanced by ``rel_phase``; the outputs are the
    unitary combinations given in the module docstring, so total carrier
    energy is conserved exactly.
    """
    if f1.registry is not f2.registry:
        raise ValueError("beams from different source registries cannot interfere")
    if not (0.0 <= eta <= 1.0):
        raise ValueError(f"transmission must lie in [0, 1], got {eta}")
    g = phase_shift(f2, rel_phase) if rel_phase != 0.0 else f2
    t = math.sqrt(eta)
    r = math.sqrt(1.0 - eta)
    out1 = FieldState(
        f1.registry,
        t * f1.carrier + r * g.carrier,
        _combine_rows(t, f1.noise_rows, r, g.noise_rows),
        _combine_rows(t, f1.signal_rows, r, g.signal_rows),
    )
    out2 = FieldState(
        f1.registry,
        r * f1.carrier - t * g.carrier,
        _combine_rows(r, f1.noise_rows, -t, g.noise_rows),
        _combine_rows(r, f1.signal_rows, -t, g.signal_rows),
    )
    return out1, out2


def apply_loss(field: FieldState, loss: float) -> FieldState:
    """Attenuate the beam by mixing a fresh vacuum into the lost fraction."""
    if not (0.0 <= loss <= 1.0):
        raise ValueError(f"loss must lie in [0, 1], got {loss}")
    if loss == 0.0:
        return field
    port = make_field(0.0, field.registry.vacuum())
    kept, _ = beamsplit(field, port, 1.0 - loss, 0.0)
    return kept


def apply_phase_dither(field: FieldState, dither: NoiseSource) -> FieldState:
    """Impose a random phase fluctuation scaled by the field's carrier.

    The fluctuation is the carrier phasor turned a quarter cycle, so a beam
    whose carrier is real gains dither on its phase row only; the amplitude
    row is untouched (small-angle linearization).  The same dither source may
    be applied to several beams: the pickup is then correlated, which is what
    lets a co-propagating reference cancel it later.
    """
    if dither.kind is not SourceKind.PHASE_DITHER:
        raise ValueError(f"expected a phase_dither source, got {dither.kind.value}")
    if dither.registry is not field.registry:
        raise ValueError("dither source belongs to a different registry")
    z = field.carrier
    key = (dither.id, _COMP_DITHER)
    rows = dict(field.noise_rows)
    p, m = rows.get(key, (0.0, 0.0))
    rows[key] = (p - 2.0 * z.imag, m + 2.0 * z.real)
    return FieldState(field.registry, field.carrier, rows, dict(field.signal_rows))


@dataclass(frozen=True)
class SpectrumDecomposition:
    """A homodyne output split into signal powers and per-source noise.

    ``signal_powers`` maps stream id to the power it contributes to the
    measured current; ``noise_terms`` maps source id to its total noise
    contribution; ``total_noise`` is their sum.
    """

    signal_powers: dict
    noise_terms: dict
    total_noise: float
    registry: SourceRegistry = dataclass_field(repr=False, compare=False)

    def snr(self, stream_id: str) -> float:
        """Signal-to-noise power ratio of one stream in this spectrum."""
        return self.signal_powers[stream_id] / self.total_noise


def _decompose(registry: SourceRegistry, signal_coeffs: dict, noise_coeffs: dict) -> SpectrumDecomposition:
    signal_powers = {sid: c * c for sid, c in signal_coeffs.items()}
    noise_terms: dict = {}
    for key, c in noise_coeffs.items():
        source_id = key[0]
        term = c * c * registry.component_variance(key)
        noise_terms[source_id] = noise_terms.get(source_id, 0.0) + term
    return SpectrumDecomposition(
        signal_powers, noise_terms, sum(noise_terms.values()), registry
    )


def homodyne_spectrum(field: FieldState, quadrature: Quadrature) -> SpectrumDecomposition:
    """Power spectrum of one quadrature under ideal balanced detection."""
    idx = int(quadrature)
    return _decompose(
        field.registry,
        {sid: vec[idx] for sid, vec in field.signal_rows.items()},
        {key: vec[idx] for key, vec in field.noise_rows.items()},
    )


def joint_spectrum(
    f_a: FieldState,
    f_b: FieldState,
    quad_a: Quadrature,
    quad_b: Quadrature,
    sign: int | str = +1,
) -> SpectrumDecomposition:
    """Spectrum of the balanced sum or difference of two homodyne currents.

    Coefficients of correlated sources add coherently before squaring.  The
    combined current is scaled by 1/sqrt(2) so that two uncorrelated
    coherent beams sit exactly at the quantum noise limit; entangled pairs
    then show their joint noise floor directly.
    """
    if f_a.registry is not f_b.registry:
        raise ValueError("beams from different source registries cannot be combined")
    s = {"+": 1.0, "-": -1.0, 1: 1.0, -1: -1.0}.get(sign)
    if s is None:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    ia, ib = int(quad_a), int(quad_b)
    signal_coeffs: dict = {}
    for sid in f_a.signal_rows.keys() | f_b.signal_rows.keys():
        ca = f_a.signal_rows.get(sid, (0.0, 0.0))[ia]
        cb = f_b.signal_rows.get(sid, (0.0, 0.0))[ib]
        signal_coeffs[sid] = (ca + s * cb) * _SQRT_HALF
    noise_coeffs: dict = {}
    for key in f_a.noise_rows.keys() | f_b.noise_rows.keys():
        ca = f_a.noise_rows.get(key, (0.0, 0.0))[ia]
        cb = f_b.noise_rows.get(key, (0.0, 0.0))[ib]
        noise_coeffs[key] = (ca + s * cb) * _SQRT_HALF
    return _decompose(f_a.registry, signal_coeffs, noise_coeffs)


def _dither_ids(spectrum: SpectrumDecomposition) -> set:
    return {
        sid
        for sid in spectrum.noise_terms
        if spectrum.registry.source(sid).kind is SourceKind.PHASE_DITHER
    }


def correct_dither(
    target: SpectrumDecomposition,
    reference: SpectrumDecomposition,
    gain: float | str = "auto",
) -> SpectrumDecomposition:
    """Subtract a gain-scaled reference current from the target current.

    Sources shared by both spectra (the dither pickup) subtract coherently;
    everything else is independent, so the reference's own quantum noise is
    added scaled by the power gain.  With ``gain="auto"`` the shared dither
    term is nulled exactly and the added noise is the dither-power ratio
    times the reference's quantum floor: with equal carrier and reference
    intensities the penalty is exactly the quantum limit, and a much brighter
    reference makes it negligible.
    """
    if target.registry is not reference.registry:
        raise ValueError("spectra from different source registries")
    shared_dither = _dither_ids(target) & _dither_ids(reference)
    if not shared_dither:
        raise ValueError("reference lacks a dither term shared with the target")
    if len(shared_dither) > 1:
        raise ValueError("more than one shared dither source; correction is ambiguous")
    (dither_id,) = shared_dither
    d_target = target.noise_terms[dither_id]
    d_reference = reference.noise_terms[dither_id]
    if d_reference <= 0.0:
        raise ValueError("reference carries no dither power to lock onto")
    if gain == "auto":
        g = math.sqrt(d_target / d_reference)
    else:
        g = float(gain)

    noise_terms: dict = {}
    for sid in target.noise_terms.keys() | reference.noise_terms.keys():
        t = target.noise_terms.get(sid, 0.0)
        r = reference.noise_terms.get(sid, 0.0)
        if r > 0.0 and t > 0.0:
            # Shared source: the two currents carry the same underlying
            # process, aligned by construction, so amplitudes subtract.
            noise_terms[sid] = (math.sqrt(t) - g * math.sqrt(r)) ** 2
        else:
            noise_terms[sid] = t + g * g * r
    signal_powers: dict = {}
    for sid in target.signal_powers.keys() | reference.signal_powers.keys():
        t = target.signal_powers.get(sid, 0.0)
        r = reference.signal_powers.get(sid, 0.0)
        if r > 0.0 and t > 0.0:
            signal_powers[sid] = (math.sqrt(t) - g * math.sqrt(r)) ** 2
        else:
            signal_powers[sid] = t + g * g * r
    return SpectrumDecomposition(
        signal_powers, noise_terms, sum(noise_terms.values()), target.registry
    )
