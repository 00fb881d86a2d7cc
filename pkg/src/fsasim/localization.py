"""Single-chain localization: angle from a frequency-domain power peak,
distance from round-trip timing, and polar-to-Cartesian fusion.

The angle pipeline is: restrict samples to the calibration band, remove the
known free-space frequency slope, interpolate onto a dense grid with a
natural cubic spline, smooth with a Savitzky-Golay filter, refine the
maximum with a three-point quadratic fit, and map the peak frequency to an
angle.  Without the de-tilt step the ~0.25 dB free-space slope across the
band drags the broad lobe's maximum several dense-grid steps low.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .antenna import BeamCalibration, SPEED_OF_LIGHT, beam_angle
from .channel import (
    CsiVector,
    FadingModel,
    LinkGeometry,
    RadioParams,
    SubcarrierGrid,
    synthesize_csi,
)
from .errors import AmbiguousPeakError, ConfigError, RangingError

DEFAULT_SIFS_NS = 16_000.0
#: One tick of an 88 MHz sampling clock, in ns.
DEFAULT_CLOCK_RESOLUTION_NS = 1e9 / 88e6
DEFAULT_RTT_JITTER_SIGMA_NS = 6.0
DEFAULT_RTT_GROUP_SIZE = 100

_MIN_CSI_SPAN_HZ = 40e6


@dataclass(frozen=True)
class SmoothingConfig:
    """Dense-grid density and Savitzky-Golay parameters for peak finding."""

    points_per_mhz: float = 10.0
    savgol_window: int = 31
    savgol_order: int = 2

    def __post_init__(self):
        if self.points_per_mhz <= 0:
            raise ConfigError("points_per_mhz must be > 0")
        if self.savgol_window % 2 == 0 or self.savgol_window < 3:
            raise ConfigError("savgol_window must be an odd integer >= 3")
        if not 1 <= self.savgol_order < self.savgol_window:
            raise ConfigError("need savgol_window > savgol_order >= 1")


@dataclass(frozen=True, eq=False)
class RssiScan:
    """Per-channel RSSI from sniffing one transmitter across the band."""

    channel_freqs_hz: np.ndarray
    rssi_dbm: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.channel_freqs_hz, dtype=float)
        rssi = np.asarray(self.rssi_dbm, dtype=float)
        if freqs.ndim != 1 or freqs.shape != rssi.shape:
            raise ValueError("channel frequencies and RSSI must match 1-D shapes")
        if freqs.size >= 2:
            steps = np.diff(freqs)
            if np.any(steps <= 0):
                raise ValueError("channel frequencies must be strictly increasing")
            if np.any(np.abs(steps - 20e6) > 1.0):
                raise ValueError("channels must be spaced 20 MHz apart")
        for arr in (freqs, rssi):
            arr.flags.writeable = False
        object.__setattr__(self, "channel_freqs_hz", freqs)
        object.__setattr__(self, "rssi_dbm", rssi)


@dataclass(frozen=True, eq=False)
class RttSampleGroup:
    """Measured data-to-acknowledgment intervals (ns) for one target."""

    intervals_ns: np.ndarray
    sifs_ns: float = DEFAULT_SIFS_NS

    def __post_init__(self):
        intervals = np.asarray(self.intervals_ns, dtype=float)
        if intervals.size == 0:
            raise ValueError("sample group is empty")
        if self.sifs_ns <= 0:
            raise ValueError("sifs_ns must be > 0")
        intervals = intervals.copy()
        intervals.flags.writeable = False
        object.__setattr__(self, "intervals_ns", intervals)


@dataclass(frozen=True)
class AoaEstimate:
    """Angle estimate plus the peak it came from.  in_coverage is False when
    the peak sat on the analysis boundary, meaning the true direction is at
    or beyond the edge of the steerable sector."""

    angle_deg: float
    peak_frequency_hz: float
    in_coverage: bool


@dataclass(frozen=True)
class PositionEstimate:
    """Polar fix and its Cartesian equivalent (x = d sin, y = d cos)."""

    aoa_deg: float
    distance_m: float
    x_m: float
    y_m: float


def cubic_spline_interpolate(xs, ys, query) -> np.ndarray:
    """Natural cubic spline through (xs, ys), evaluated at query points."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ValueError("xs and ys must be matching 1-D arrays")
    if xs.size < 4:
        raise ValueError("need at least 4 knots")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing")
    spline = CubicSpline(xs, ys, bc_type="natural")
    return np.asarray(spline(np.asarray(query, dtype=float)))


def _savgol_kernel(window: int, order: int) -> np.ndarray:
    # weights that evaluate the windowed least-squares polynomial at its center
    half = window // 2
    design = np.vander(np.arange(-half, half + 1, dtype=float),
                       order + 1, increasing=True)
    return np.linalg.pinv(design)[0]


def savitzky_golay(values, window: int, order: int) -> np.ndarray:
    """Least-squares polynomial smoothing.

    Interior points use the usual fixed kernel; each edge point is the
    center-evaluated fit over its window truncated at the array boundary,
    keeping the polynomial order unchanged.
    """
    y = np.asarray(values, dtype=float)
    if y.ndim != 1:
        raise ConfigError("values must be 1-D")
    if window % 2 == 0 or not 0 <= order < window:
        raise ConfigError("window must be odd and greater than order")
    if window > y.size:
        raise ConfigError("window longer than the data")
    half = window // 2
    kernel = _savgol_kernel(window, order)
    out = np.convolve(y, kernel[::-1], mode="same")
    for i in range(min(half, y.size)):
        out[i] = _truncated_fit(y, i, half, order)
        out[y.size - 1 - i] = _truncated_fit(y, y.size - 1 - i, half, order)
    return out


def _truncated_fit(y: np.ndarray, i: int, half: int, order: int) -> float:
    lo = max(0, i - half)
    hi = min(y.size, i + half + 1)
    t = np.arange(lo, hi, dtype=float) - i
    design = np.vander(t, order + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(design, y[lo:hi], rcond=None)
    return float(coeffs[0])


def estimate_peak_frequency(freqs, powers) -> float:
    """Argmax refined by a quadratic vertex through its two neighbors.

    Returns the boundary frequency when the maximum sits on the boundary;
    raises AmbiguousPeakError for an all-flat profile.
    """
    f = np.asarray(freqs, dtype=float)
    p = np.asarray(powers, dtype=float)
    if f.size < 3 or f.shape != p.shape:
        raise ValueError("need at least 3 matching samples")
    if np.ptp(p) == 0.0:
        raise AmbiguousPeakError("power profile is flat")
    i = int(np.argmax(p))
    if i == 0 or i == f.size - 1:
        return float(f[i])
    t = f[i - 1:i + 2] - f[i]
    a, b, _ = np.polyfit(t, p[i - 1:i + 2], 2)
    if not np.isfinite(a) or a >= 0:
        return float(f[i])
    return float(f[i] - b / (2.0 * a))


def _detilt(freqs: np.ndarray, powers: np.ndarray,
            calibration: BeamCalibration) -> np.ndarray:
    # cancel the distance-independent 20*log10(f) free-space slope
    return powers + 20.0 * np.log10(freqs / calibration.f_ref_hz)


def _peak_to_estimate(dense: np.ndarray, smoothed: np.ndarray,
                      calibration: BeamCalibration) -> AoaEstimate:
    peak = estimate_peak_frequency(dense, smoothed)
    at_edge = peak <= dense[0] or peak >= dense[-1]
    return AoaEstimate(
        angle_deg=beam_angle(calibration, peak),
        peak_frequency_hz=peak,
        in_coverage=not at_edge,
    )


def _dense_pipeline(xs: np.ndarray, ys: np.ndarray,
                    calibration: BeamCalibration,
                    config: SmoothingConfig) -> AoaEstimate:
    ys = _detilt(xs, ys, calibration)
    if xs.size < 4:
        return _peak_to_estimate(xs, ys, calibration)
    span_mhz = (xs[-1] - xs[0]) / 1e6
    n_dense = int(round(span_mhz * config.points_per_mhz)) + 1
    dense = np.linspace(xs[0], xs[-1], max(n_dense, xs.size))
    interpolated = cubic_spline_interpolate(xs, ys, dense)
    smoothed = savitzky_golay(interpolated, config.savgol_window,
                              config.savgol_order)
    return _peak_to_estimate(dense, smoothed, calibration)


def aoa_from_samples(freqs_hz, powers_dbm, calibration: BeamCalibration,
                     config: SmoothingConfig = SmoothingConfig()) -> AoaEstimate:
    """Angle of arrival from an arbitrary frequency/power trace.

    Samples outside the calibration band are dropped; the surviving span
    must cover at least 40 MHz.
    """
    freqs = np.asarray(freqs_hz, dtype=float)
    powers = np.asarray(powers_dbm, dtype=float)
    mask = (freqs >= calibration.f_min_hz) & (freqs <= calibration.f_max_hz)
    xs, ys = freqs[mask], powers[mask]
    if xs.size < 4 or xs[-1] - xs[0] < _MIN_CSI_SPAN_HZ:
        raise ValueError(
            "trace must span at least 40 MHz inside the calibration band"
        )
    return _dense_pipeline(xs, ys, calibration, config)


def aoa_from_csi(csi: CsiVector, calibration: BeamCalibration,
                 config: SmoothingConfig = SmoothingConfig()) -> AoaEstimate:
    """Angle of arrival from a synthesized or recorded CSI power trace."""
    return aoa_from_samples(csi.grid.frequencies, csi.power_dbm,
                            calibration, config)


def aoa_from_probe_scan(scan: RssiScan, calibration: BeamCalibration,
                        config: SmoothingConfig = SmoothingConfig()) -> AoaEstimate:
    """Angle of arrival from per-channel probe-request RSSI.

    The channel-center samples run through the same dense pipeline; with
    only three in-band channels the quadratic refinement runs directly on
    the raw samples.
    """
    freqs = scan.channel_freqs_hz
    mask = (freqs >= calibration.f_min_hz) & (freqs <= calibration.f_max_hz)
    xs, ys = freqs[mask], scan.rssi_dbm[mask]
    if xs.size < 3:
        raise ValueError("need at least 3 in-band channels")
    if np.ptp(ys) == 0.0:
        raise AmbiguousPeakError("scan is flat across channels")
    return _dense_pipeline(xs, ys, calibration, config)


def synthesize_probe_scan(
    geometry: LinkGeometry,
    pattern_a,
    pattern_b,
    channels_hz: np.ndarray,
    radio: RadioParams,
    fading: FadingModel = FadingModel(),
    link_id: str = "",
) -> RssiScan:
    """RSSI a sniffer would log per scan channel, evaluated at channel
    centers through the same link equation as the CSI synthesizer."""
    channels = np.asarray(channels_hz, dtype=float)
    spacing = channels[1] - channels[0]
    grid = SubcarrierGrid(
        center_frequency_hz=float(channels.mean()),
        bandwidth_hz=float(spacing * channels.size),
        subcarrier_spacing_hz=float(spacing),
    )
    csi = synthesize_csi(geometry, pattern_a, pattern_b, grid, radio,
                         fading=fading, link_id=link_id)
    return RssiScan(csi.grid.frequencies, csi.power_dbm)


def rtt_distance(group: RttSampleGroup) -> float:
    """Distance from the median interval: c * (median - SIFS) / 2."""
    median_ns = float(np.median(group.intervals_ns))
    if median_ns < group.sifs_ns:
        raise RangingError(
            f"median interval {median_ns:.1f} ns is below SIFS {group.sifs_ns:.1f} ns"
        )
    return SPEED_OF_LIGHT * (median_ns - group.sifs_ns) * 1e-9 / 2.0


def simulate_rtt_exchange(
    distance_m: float,
    jitter_sigma_ns: float = DEFAULT_RTT_JITTER_SIGMA_NS,
    clock_resolution_ns: float = DEFAULT_CLOCK_RESOLUTION_NS,
    group_size: int = DEFAULT_RTT_GROUP_SIZE,
    seed: int = 0,
    sifs_ns: float = DEFAULT_SIFS_NS,
) -> RttSampleGroup:
    """Timing model of repeated forced data/ack exchanges.

    Each interval is SIFS + round-trip flight time plus Gaussian timestamp
    jitter, then snapped to the receiver clock resolution.  Deterministic
    per seed.
    """
    if distance_m <= 0:
        raise ValueError("distance_m must be > 0")
    rng = np.random.default_rng(seed)
    flight_ns = 2.0 * distance_m / SPEED_OF_LIGHT * 1e9
    intervals = sifs_ns + flight_ns + rng.normal(0.0, jitter_sigma_ns, group_size)
    if clock_resolution_ns > 0:
        intervals = np.round(intervals / clock_resolution_ns) * clock_resolution_ns
    return RttSampleGroup(intervals, sifs_ns=sifs_ns)


def fuse(aoa_deg: float, distance_m: float) -> PositionEstimate:
    """Polar fix to a position in the localizer frame."""
    if distance_m <= 0:
        raise ValueError("distance_m must be > 0")
    theta = math.radians(aoa_deg)
    return PositionEstimate(
        aoa_deg=aoa_deg,
        distance_m=distance_m,
        x_m=distance_m * math.sin(theta),
        y_m=distance_m * math.cos(theta),
    )


def load_csi_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a `subcarrier_freq_hz,power_dbm` trace."""
    return _load_columns(path, ["subcarrier_freq_hz", "power_dbm"])


def load_rssi_csv(path: str | Path) -> RssiScan:
    """Read a `channel_freq_hz,rssi_dbm` scan."""
    freqs, rssi = _load_columns(path, ["channel_freq_hz", "rssi_dbm"])
    order = np.argsort(freqs)
    return RssiScan(freqs[order], rssi[order])


def load_rtt_csv(path: str | Path, sifs_ns: float = DEFAULT_SIFS_NS) -> RttSampleGroup:
    """Read an `interval_ns` sample group."""
    (intervals,) = _load_columns(path, ["interval_ns"])
    return RttSampleGroup(intervals, sifs_ns=sifs_ns)


def _load_columns(path, names):
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        missing = [n for n in names if reader.fieldnames is None
                   or n not in reader.fieldnames]
        if missing:
            raise ValueError(f"{path}: missing column(s) {missing}")
        rows = [[float(row[n]) for n in names] for row in reader]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    columns = np.asarray(rows, dtype=float).T
    return tuple(columns)
