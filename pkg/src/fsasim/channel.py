"""Line-of-sight link synthesis: path loss, noise, per-subcarrier power.

The synthesized per-subcarrier received power plays the role of a CSI
magnitude trace.  All randomness is drawn from substreams keyed by
(seed, link identity) so results never depend on evaluation order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .antenna import SPEED_OF_LIGHT
from .errors import ShapeMismatchError

NOISE_DENSITY_DBM_PER_HZ = -174.0

_FSPL_CONST_DB = 20.0 * math.log10(4.0 * math.pi / SPEED_OF_LIGHT)

_FADING_KINDS = ("los", "rician")
_FSPL_REFERENCES = ("per_subcarrier", "center")


def fspl_db(distance_m, f_hz):
    """Free-space path loss: 20*log10(d) + 20*log10(f) + 20*log10(4*pi/c)."""
    d = np.asarray(distance_m, dtype=float)
    f = np.asarray(f_hz, dtype=float)
    if np.any(d <= 0) or np.any(f <= 0):
        raise ValueError("distance and frequency must be > 0")
    loss = 20.0 * np.log10(d) + 20.0 * np.log10(f) + _FSPL_CONST_DB
    if np.isscalar(distance_m) and np.isscalar(f_hz):
        return float(loss)
    return loss


def noise_floor_dbm(bandwidth_hz: float, noise_figure_db: float = 0.0) -> float:
    """Thermal noise power over a bandwidth, plus receiver noise figure."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth_hz must be > 0")
    return NOISE_DENSITY_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def snr_db(p_rx_dbm, noise_dbm):
    return p_rx_dbm - noise_dbm


def substream(seed: int, *labels) -> np.random.Generator:
    """Generator for an independent stream keyed by (seed, labels).

    String labels are hashed with sha256 so the derivation is stable across
    runs and platforms; integer labels enter the seed sequence directly.
    """
    entropy = [int(seed) & (2**64 - 1)]
    for label in labels:
        if isinstance(label, (int, np.integer)):
            entropy.append(int(label) & (2**64 - 1))
        else:
            digest = hashlib.sha256(str(label).encode("utf-8")).digest()
            entropy.append(int.from_bytes(digest[:8], "little"))
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class SubcarrierGrid:
    """Uniform subcarrier layout of one channel."""

    center_frequency_hz: float
    bandwidth_hz: float
    subcarrier_spacing_hz: float = 78_125.0

    def __post_init__(self):
        if self.bandwidth_hz <= 0 or self.subcarrier_spacing_hz <= 0:
            raise ValueError("bandwidth and spacing must be > 0")
        ratio = self.bandwidth_hz / self.subcarrier_spacing_hz
        if abs(ratio - round(ratio)) > 1e-6 or round(ratio) < 1:
            raise ValueError("subcarrier spacing must divide the bandwidth")

    @property
    def count(self) -> int:
        return int(round(self.bandwidth_hz / self.subcarrier_spacing_hz))

    @property
    def frequencies(self) -> np.ndarray:
        """Subcarrier k sits at center - bandwidth/2 + (k + 0.5) * spacing."""
        k = np.arange(self.count)
        return (self.center_frequency_hz - self.bandwidth_hz / 2.0
                + (k + 0.5) * self.subcarrier_spacing_hz)


@dataclass(frozen=True)
class LinkGeometry:
    """One link: distance plus the peer direction seen from each end."""

    distance_m: float
    azimuth_at_a_deg: float = 0.0  # direction of B in A's antenna frame
    azimuth_at_b_deg: float = 0.0  # direction of A in B's antenna frame

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ValueError("distance_m must be > 0")
        for az in (self.azimuth_at_a_deg, self.azimuth_at_b_deg):
            if not -180.0 <= az < 180.0:
                raise ValueError("azimuths must lie in [-180, 180)")


@dataclass(frozen=True)
class RadioParams:
    tx_power_dbm: float = 15.0
    noise_figure_db: float = 7.0

    def __post_init__(self):
        if not math.isfinite(self.tx_power_dbm):
            raise ValueError("tx_power_dbm must be finite")
        if self.noise_figure_db < 0:
            raise ValueError("noise_figure_db must be >= 0")


@dataclass(frozen=True, eq=False)
class CsiVector:
    """Per-subcarrier received power (dBm) over one grid."""

    grid: SubcarrierGrid
    power_dbm: np.ndarray

    def __post_init__(self):
        power = np.asarray(self.power_dbm, dtype=float)
        if power.shape != (self.grid.count,):
            raise ShapeMismatchError(
                f"expected {self.grid.count} samples, got {power.shape}"
            )
        if not np.all(np.isfinite(power)):
            raise ValueError("power_dbm must be finite")
        power = power.copy()
        power.flags.writeable = False
        object.__setattr__(self, "power_dbm", power)


@dataclass(frozen=True)
class FadingModel:
    """Per-subcarrier small-scale fading.

    kind "los" adds nothing; kind "rician" draws one complex gain per
    subcarrier with unit mean linear power, reproducibly keyed by
    (seed, link identity, subcarrier index).
    """

    kind: str = "los"
    k_factor_db: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _FADING_KINDS:
            raise ValueError(f"kind must be one of {_FADING_KINDS}")

    def sample_db(self, count: int, link_id: str = "") -> np.ndarray:
        if self.kind == "los":
            return np.zeros(count)
        rng = substream(self.seed, "fading", link_id)
        k_lin = 10.0 ** (self.k_factor_db / 10.0)
        scatter = (rng.standard_normal(count) + 1j * rng.standard_normal(count))
        h = math.sqrt(k_lin / (k_lin + 1.0)) + scatter * math.sqrt(
            0.5 / (k_lin + 1.0)
        )
        return 10.0 * np.log10(np.maximum(np.abs(h) ** 2, 1e-12))


def synthesize_csi(
    geometry: LinkGeometry,
    pattern_a,
    pattern_b,
    grid: SubcarrierGrid,
    radio: RadioParams,
    fading: FadingModel = FadingModel(),
    link_id: str = "",
    fspl_reference: str = "per_subcarrier",
) -> CsiVector:
    """Received power per subcarrier for one link.

    pattern_a sits at endpoint A (evaluated at azimuth_at_a_deg), pattern_b
    at endpoint B.  Both antenna gains enter as a sum, so the same vector
    describes either transmission direction.  fspl_reference "center"
    evaluates path loss at the channel center for every subcarrier
    (narrowband approximation) instead of per subcarrier.
    """
    if fspl_reference not in _FSPL_REFERENCES:
        raise ValueError(f"fspl_reference must be one of {_FSPL_REFERENCES}")
    freqs = grid.frequencies
    g_a = pattern_a.gain(freqs, geometry.azimuth_at_a_deg)
    g_b = pattern_b.gain(freqs, geometry.azimuth_at_b_deg)
    if fspl_reference == "center":
        loss = fspl_db(geometry.distance_m, grid.center_frequency_hz)
    else:
        loss = fspl_db(geometry.distance_m, freqs)
    power = (radio.tx_power_dbm + g_a + g_b - loss
             + fading.sample_db(grid.count, link_id))
    return CsiVector(grid, power)


def add_measurement_noise(
    csi: CsiVector, per_subcarrier_snr_db: float, seed: int, link_id: str = ""
) -> CsiVector:
    """Perturb a power trace as if each subcarrier were measured at the
    given SNR: the unit-amplitude signal picks up complex Gaussian noise of
    relative power 10**(-snr/10) before the power is re-estimated."""
    rng = substream(seed, "csi-noise", link_id)
    count = csi.grid.count
    sigma = 10.0 ** (-per_subcarrier_snr_db / 20.0)
    noise = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) * (
        sigma / math.sqrt(2.0)
    )
    factor = np.maximum(np.abs(1.0 + noise) ** 2, 1e-12)
    return CsiVector(csi.grid, csi.power_dbm + 10.0 * np.log10(factor))
