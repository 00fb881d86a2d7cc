"""Antenna models with frequency-dependent beam steering.

The steered array points its main lobe at an azimuth that is an affine
function of the signal frequency.  Angles are degrees in the antenna's own
frame (0 = broadside), gains are dBi.  Gain functions accept scalars or
numpy arrays and broadcast frequency against angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BandRangeError, CoverageError

SPEED_OF_LIGHT = 299_792_458.0

# Floor for the normalized array factor so deep pattern nulls stay finite in dB.
_AF_FLOOR = 1e-12


@dataclass(frozen=True)
class BeamCalibration:
    """Affine map between signal frequency and main-lobe direction.

    The defaults anchor the map at 5.620 GHz <-> 23.6 degrees with a total
    sweep of 50 degrees across the 5.500-5.825 GHz band.  Measured curves
    can replace the defaults via the scenario configuration.
    """

    f_ref_hz: float = 5.620e9
    theta_ref_deg: float = 23.6
    slope_deg_per_hz: float = 50.0 / 325e6
    f_min_hz: float = 5.500e9
    f_max_hz: float = 5.825e9

    def __post_init__(self):
        if not self.f_min_hz < self.f_max_hz:
            raise ValueError("band is empty: f_min_hz must be < f_max_hz")
        if self.slope_deg_per_hz == 0 or not math.isfinite(self.slope_deg_per_hz):
            raise ValueError("slope_deg_per_hz must be finite and nonzero")
        if not self.f_min_hz <= self.f_ref_hz <= self.f_max_hz:
            raise ValueError("f_ref_hz must lie inside the band")

    @property
    def steerable_range_deg(self) -> tuple[float, float]:
        """Sorted (low, high) beam angles reachable across the band."""
        a = beam_angle(self, self.f_min_hz)
        b = beam_angle(self, self.f_max_hz)
        return (a, b) if a <= b else (b, a)


def _check_band(calibration: BeamCalibration, f_hz) -> np.ndarray:
    f = np.asarray(f_hz, dtype=float)
    if np.any(f < calibration.f_min_hz) or np.any(f > calibration.f_max_hz):
        raise BandRangeError(
            f"frequency outside band [{calibration.f_min_hz:.6g}, "
            f"{calibration.f_max_hz:.6g}] Hz"
        )
    return f


def beam_angle(calibration: BeamCalibration, f_hz):
    """Main-lobe azimuth (degrees) for an in-band frequency."""
    f = _check_band(calibration, f_hz)
    theta = calibration.theta_ref_deg + calibration.slope_deg_per_hz * (
        f - calibration.f_ref_hz
    )
    return float(theta) if np.isscalar(f_hz) else theta


def frequency_for_angle(calibration: BeamCalibration, theta_deg):
    """Inverse of :func:`beam_angle`; raises CoverageError outside the sweep."""
    lo, hi = calibration.steerable_range_deg
    theta = np.asarray(theta_deg, dtype=float)
    if np.any(theta < lo) or np.any(theta > hi):
        raise CoverageError(
            f"angle outside steerable range [{lo:.4g}, {hi:.4g}] degrees"
        )
    f = calibration.f_ref_hz + (theta - calibration.theta_ref_deg) / (
        calibration.slope_deg_per_hz
    )
    return float(f) if np.isscalar(theta_deg) else f


@dataclass(frozen=True)
class FsaModel:
    """Uniform linear array whose per-element phase tracks the calibration.

    The inter-element phase progression at frequency f is chosen so the
    array-factor peak lands on beam_angle(f).  Stage losses model the
    passive feed network as one insertion loss per element-to-element hop.
    """

    element_count: int = 8
    element_gain_dbi: float = 7.5
    per_stage_loss_db: float = 0.5
    calibration: BeamCalibration = field(default_factory=BeamCalibration)
    element_spacing_m: float | None = None  # default: half wavelength at band center

    def __post_init__(self):
        if self.element_count < 1:
            raise ValueError("element_count must be >= 1")
        if self.per_stage_loss_db < 0:
            raise ValueError("per_stage_loss_db must be >= 0")
        if self.element_spacing_m is None:
            f_center = 0.5 * (self.calibration.f_min_hz + self.calibration.f_max_hz)
            object.__setattr__(
                self, "element_spacing_m", SPEED_OF_LIGHT / (2.0 * f_center)
            )
        if self.element_spacing_m <= 0:
            raise ValueError("element_spacing_m must be > 0")

    @property
    def band_hz(self) -> tuple[float, float]:
        return (self.calibration.f_min_hz, self.calibration.f_max_hz)

    @property
    def steerable_range_deg(self) -> tuple[float, float]:
        return self.calibration.steerable_range_deg

    @property
    def total_stage_loss_db(self) -> float:
        return (self.element_count - 1) * self.per_stage_loss_db

    def gain(self, f_hz, theta_deg):
        return fsa_gain(self, f_hz, theta_deg)


def fsa_gain(model: FsaModel, f_hz, theta_deg):
    """Array gain (dBi) at frequency f and azimuth theta.

    gain = element gain + 10*log10(AF) - stage losses, with the array factor
    normalized so the peak adds exactly 10*log10(N) dB.  The peak over theta
    sits at beam_angle(f) by construction.
    """
    f = _check_band(model.calibration, f_hz)
    theta = np.asarray(theta_deg, dtype=float)
    if np.any(np.abs(theta) > 90.0):
        raise ValueError("theta_deg must lie in [-90, +90]")

    n = model.element_count
    steer = np.sin(np.radians(beam_angle(model.calibration, f)))
    k = 2.0 * np.pi * f / SPEED_OF_LIGHT
    # half of the per-element phase mismatch between direction theta and the
    # steered direction; AF = (sin(N x)/(N sin x))^2 * N
    x = 0.5 * k * model.element_spacing_m * (np.sin(np.radians(theta)) - steer)
    num = np.sin(n * x)
    den = n * np.sin(x)
    ratio = np.where(np.abs(den) < 1e-15, 1.0, num / np.where(den == 0.0, 1.0, den))
    af = np.maximum(n * ratio**2, _AF_FLOOR)

    g = model.element_gain_dbi + 10.0 * np.log10(af) - model.total_stage_loss_db
    if np.isscalar(f_hz) and np.isscalar(theta_deg):
        return float(g)
    return g


@dataclass(frozen=True)
class OmniModel:
    """Constant-gain antenna, flat over angle and frequency."""

    gain_dbi: float = 3.0

    def __post_init__(self):
        if not math.isfinite(self.gain_dbi):
            raise ValueError("gain_dbi must be finite")

    @property
    def band_hz(self) -> None:
        return None

    @property
    def steerable_range_deg(self) -> None:
        return None

    def gain(self, f_hz, theta_deg):
        return omni_gain(self, f_hz, theta_deg)


def omni_gain(model: OmniModel, f_hz, theta_deg):
    """Constant gain regardless of frequency and angle."""
    if np.isscalar(f_hz) and np.isscalar(theta_deg):
        return float(model.gain_dbi)
    shape = np.broadcast_shapes(np.shape(f_hz), np.shape(theta_deg))
    return np.full(shape, float(model.gain_dbi))


@dataclass(frozen=True)
class SectorBeamModel:
    """Idealized bank of discrete beams, one per equal frequency block.

    Block j of the band maps to angular sector j of the span; the gain is
    beam_gain_dbi when the angle falls in the sector matched to the
    frequency's block and side_gain_dbi otherwise.  Used for idealized
    multi-beam studies where the array-factor shape is irrelevant.
    """

    beam_count: int = 8
    beam_gain_dbi: float = 15.0
    side_gain_dbi: float = -20.0
    f_min_hz: float = 5.500e9
    f_max_hz: float = 5.660e9
    theta_min_deg: float = 0.0
    theta_max_deg: float = 60.0

    def __post_init__(self):
        if self.beam_count < 1:
            raise ValueError("beam_count must be >= 1")
        if not self.f_min_hz < self.f_max_hz:
            raise ValueError("band is empty")
        if not self.theta_min_deg < self.theta_max_deg:
            raise ValueError("angle span is empty")

    @property
    def band_hz(self) -> tuple[float, float]:
        return (self.f_min_hz, self.f_max_hz)

    @property
    def steerable_range_deg(self) -> tuple[float, float]:
        return (self.theta_min_deg, self.theta_max_deg)

    def _block_index(self, f: np.ndarray) -> np.ndarray:
        width = (self.f_max_hz - self.f_min_hz) / self.beam_count
        return np.clip(
            ((f - self.f_min_hz) / width).astype(int), 0, self.beam_count - 1
        )

    def _sector_index(self, theta: np.ndarray) -> np.ndarray:
        width = (self.theta_max_deg - self.theta_min_deg) / self.beam_count
        idx = np.floor((theta - self.theta_min_deg) / width).astype(int)
        idx = np.where(
            (theta < self.theta_min_deg) | (theta > self.theta_max_deg), -1,
            np.clip(idx, 0, self.beam_count - 1),
        )
        return idx

    def gain(self, f_hz, theta_deg):
        f = np.asarray(f_hz, dtype=float)
        if np.any(f < self.f_min_hz) or np.any(f > self.f_max_hz):
            raise BandRangeError(
                f"frequency outside band [{self.f_min_hz:.6g}, {self.f_max_hz:.6g}] Hz"
            )
        theta = np.asarray(theta_deg, dtype=float)
        block = self._block_index(f)
        sector = self._sector_index(theta)
        g = np.where((sector >= 0) & (block == sector),
                     self.beam_gain_dbi, self.side_gain_dbi)
        if np.isscalar(f_hz) and np.isscalar(theta_deg):
            return float(g)
        return g


def channel_centers_hz(calibration: BeamCalibration,
                       channel_width_hz: float = 20e6,
                       edge_margin_hz: float = 2.5e6) -> np.ndarray:
    """Center frequencies of the scan channels that fit inside the band.

    With the default band this yields 17 centers spaced 20 MHz apart.
    """
    first = calibration.f_min_hz + edge_margin_hz
    count = int((calibration.f_max_hz - first) // channel_width_hz) + 1
    return first + channel_width_hz * np.arange(count)
