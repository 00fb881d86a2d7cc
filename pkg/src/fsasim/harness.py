"""Scenario definition, experiment execution, statistics, and report files.

A scenario is a strict JSON document (unknown keys rejected) describing the
access point, the devices, the channel grid, and what to evaluate.  Runs
are deterministic: every random draw comes from a substream keyed by
(master seed, device id, trial index), so the worker count and completion
order never change a result.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .antenna import BeamCalibration, FsaModel, OmniModel, SectorBeamModel
from .channel import (
    CsiVector,
    FadingModel,
    LinkGeometry,
    RadioParams,
    SubcarrierGrid,
    add_measurement_noise,
    noise_floor_dbm,
    substream,
    synthesize_csi,
)
from .errors import NoLinkError, ScenarioError
from .localization import (
    DEFAULT_CLOCK_RESOLUTION_NS,
    DEFAULT_RTT_GROUP_SIZE,
    DEFAULT_RTT_JITTER_SIGMA_NS,
    DEFAULT_SIFS_NS,
    SmoothingConfig,
    aoa_from_csi,
    aoa_from_probe_scan,
    rtt_distance,
    simulate_rtt_exchange,
    synthesize_probe_scan,
)
from .localization import channel_centers_for
from .ofdma import delta_snr, measure_ru_power, partition_rus
from .rate import McsTable, range_improvement_pct, rate_improvement, select_mcs

EVALUATION_KINDS = ("comm", "localization", "both")


# ---------------------------------------------------------------------------
# scenario model


@dataclass(frozen=True)
class DeviceSpec:
    id: str
    position_m: tuple[float, float]
    antenna: str = "fsa"  # "fsa" or "omni"
    orientation_deg: float = 0.0


@dataclass(frozen=True)
class ApSpec:
    position_m: tuple[float, float] = (0.0, 0.0)
    orientation_deg: float = 0.0
    antenna_gain_dbi: float = 3.0
    radio: RadioParams = field(default_factory=RadioParams)


@dataclass(frozen=True)
class RttConfig:
    jitter_sigma_ns: float = DEFAULT_RTT_JITTER_SIGMA_NS
    clock_resolution_ns: float = DEFAULT_CLOCK_RESOLUTION_NS
    group_size: int = DEFAULT_RTT_GROUP_SIZE
    sifs_ns: float = DEFAULT_SIFS_NS


@dataclass(frozen=True)
class LocalizationConfig:
    csi_snr_db: float | None = 20.0  # None disables measurement noise
    aoa_source: str = "csi"  # "csi" or "probe"
    rtt: RttConfig = field(default_factory=RttConfig)
    smoothing: SmoothingConfig = field(default_factory=SmoothingConfig)


@dataclass(frozen=True)
class Scenario:
    devices: tuple[DeviceSpec, ...]
    evaluation: str = "comm"
    trials: int = 1
    master_seed: int = 0
    ru_widths_hz: tuple[float, ...] = (20e6,)
    grid: SubcarrierGrid = field(
        default_factory=lambda: SubcarrierGrid(5.580e9, 160e6)
    )
    fading_kind: str = "los"
    fading_k_factor_db: float = 10.0
    fspl_reference: str = "per_subcarrier"
    ap: ApSpec = field(default_factory=ApSpec)
    fsa: FsaModel | SectorBeamModel = field(default_factory=FsaModel)
    omni_gain_dbi: float = 3.0
    localization: LocalizationConfig = field(default_factory=LocalizationConfig)

    def __post_init__(self):
        if self.evaluation not in EVALUATION_KINDS:
            raise ScenarioError(f"evaluation must be one of {EVALUATION_KINDS}")
        if self.trials < 1:
            raise ScenarioError("trials must be >= 1")
        if not self.devices:
            raise ScenarioError("scenario needs at least one device")
        ids = [d.id for d in self.devices]
        if len(set(ids)) != len(ids):
            raise ScenarioError("device ids must be unique")
        for dev in self.devices:
            if dev.antenna not in ("fsa", "omni"):
                raise ScenarioError(
                    f"device {dev.id!r}: antenna must be 'fsa' or 'omni'"
                )
            if tuple(dev.position_m) == tuple(self.ap.position_m):
                raise ScenarioError(
                    f"device {dev.id!r} sits on top of the access point"
                )

    def fading(self) -> FadingModel:
        return FadingModel(kind=self.fading_kind,
                           k_factor_db=self.fading_k_factor_db,
                           seed=self.master_seed)


def wrap_angle_deg(angle: float) -> float:
    """Wrap to [-180, 180)."""
    return (angle + 180.0) % 360.0 - 180.0


def bearing_deg(origin: tuple[float, float], target: tuple[float, float]) -> float:
    """World bearing of target from origin (0 along +y, positive toward +x)."""
    dx = target[0] - origin[0]
    dy = target[1] - origin[1]
    return math.degrees(math.atan2(dx, dy))


def link_geometry(scenario: Scenario, device: DeviceSpec) -> LinkGeometry:
    """AP-to-device geometry; endpoint A is the access point."""
    ap = scenario.ap
    distance = math.hypot(device.position_m[0] - ap.position_m[0],
                          device.position_m[1] - ap.position_m[1])
    az_ap = wrap_angle_deg(bearing_deg(ap.position_m, device.position_m)
                           - ap.orientation_deg)
    az_dev = wrap_angle_deg(bearing_deg(device.position_m, ap.position_m)
                            - device.orientation_deg)
    return LinkGeometry(distance_m=distance,
                        azimuth_at_a_deg=az_ap,
                        azimuth_at_b_deg=az_dev)


# ---------------------------------------------------------------------------
# scenario file parsing (strict)


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario file; unknown keys are errors."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{path}: parse error at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    return scenario_from_dict(raw)


class _Strict:
    """Dict reader that tracks its path and rejects unknown keys."""

    def __init__(self, data: dict, path: str):
        if not isinstance(data, dict):
            raise ScenarioError(f"{path}: expected an object")
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def get(self, key, kind, default=_sentinel := object(), required=False):
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ScenarioError(f"{self.path}.{key}: missing required key")
            return default
        value = self.data[key]
        if kind is float and isinstance(value, (int, float)) \
                and not isinstance(value, bool):
            return float(value)
        if kind is int and isinstance(value, int) and not isinstance(value, bool):
            return value
        if kind in (str, bool, list, dict) and isinstance(value, kind):
            return value
        raise ScenarioError(
            f"{self.path}.{key}: expected {kind.__name__}, got "
            f"{type(value).__name__}"
        )

    def child(self, key) -> "_Strict | None":
        value = self.get(key, dict, default=None)
        if value is None:
            return None
        return _Strict(value, f"{self.path}.{key}")

    def finish(self):
        unknown = sorted(set(self.data) - self.seen)
        if unknown:
            raise ScenarioError(f"{self.path}: unknown key(s) {unknown}")


def _parse_position(value, path) -> tuple[float, float]:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                       for v in value)):
        raise ScenarioError(f"{path}: expected [x, y] in meters")
    return (float(value[0]), float(value[1]))


def calibration_from_dict(data: dict, path: str = "calibration") -> BeamCalibration:
    node = _Strict(data, path)
    kwargs = {}
    for key in ("f_ref_hz", "theta_ref_deg", "slope_deg_per_hz",
                "f_min_hz", "f_max_hz"):
        value = node.get(key, float, default=None)
        if value is not None:
            kwargs[key] = value
    node.finish()
    try:
        return BeamCalibration(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _parse_fsa(node: _Strict | None):
    if node is None:
        return FsaModel()
    kind = node.get("kind", str, default="array")
    try:
        if kind == "array":
            calibration = BeamCalibration()
            sub = node.child("calibration")
            if sub is not None:
                calibration = calibration_from_dict(sub.data,
                                                    f"{node.path}.calibration")
            model = FsaModel(
                element_count=node.get("element_count", int, default=8),
                element_gain_dbi=node.get("element_gain_dbi", float, default=7.5),
                per_stage_loss_db=node.get("per_stage_loss_db", float, default=0.5),
                element_spacing_m=node.get("element_spacing_m", float, default=None),
                calibration=calibration,
            )
        elif kind == "sector_beams":
            model = SectorBeamModel(
                beam_count=node.get("beam_count", int, default=8),
                beam_gain_dbi=node.get("beam_gain_dbi", float, default=15.0),
                side_gain_dbi=node.get("side_gain_dbi", float, default=-20.0),
                f_min_hz=node.get("f_min_hz", float, default=5.500e9),
                f_max_hz=node.get("f_max_hz", float, default=5.660e9),
                theta_min_deg=node.get("theta_min_deg", float, default=0.0),
                theta_max_deg=node.get("theta_max_deg", float, default=60.0),
            )
        else:
            raise ScenarioError(
                f"{node.path}.kind: must be 'array' or 'sector_beams'"
            )
    except ValueError as exc:
        raise ScenarioError(f"{node.path}: {exc}") from exc
    node.finish()
    return model


def scenario_from_dict(raw: dict) -> Scenario:
    root = _Strict(raw, "scenario")

    evaluation = root.get("evaluation", str, default="comm")
    trials = root.get("trials", int, default=1)
    master_seed = root.get("master_seed", int, default=0)

    widths = root.get("ru_widths_mhz", list, default=[20])
    try:
        ru_widths_hz = tuple(float(w) * 1e6 for w in widths)
    except (TypeError, ValueError):
        raise ScenarioError("scenario.ru_widths_mhz: expected a list of numbers")

    grid_node = root.child("channel")
    if grid_node is None:
        grid = SubcarrierGrid(5.580e9, 160e6)
    else:
        try:
            grid = SubcarrierGrid(
                center_frequency_hz=grid_node.get("center_frequency_hz", float,
                                                  required=True),
                bandwidth_hz=grid_node.get("bandwidth_hz", float, required=True),
                subcarrier_spacing_hz=grid_node.get(
                    "subcarrier_spacing_hz", float, default=78_125.0),
            )
        except ValueError as exc:
            raise ScenarioError(f"{grid_node.path}: {exc}") from exc
        grid_node.finish()

    fading_node = root.child("fading")
    fading_kind, k_factor = "los", 10.0
    if fading_node is not None:
        fading_kind = fading_node.get("kind", str, default="los")
        k_factor = fading_node.get("k_factor_db", float, default=10.0)
        fading_node.finish()
        if fading_kind not in ("los", "rician"):
            raise ScenarioError("scenario.fading.kind: must be 'los' or 'rician'")

    fspl_reference = root.get("fspl_reference", str, default="per_subcarrier")
    if fspl_reference not in ("per_subcarrier", "center"):
        raise ScenarioError(
            "scenario.fspl_reference: must be 'per_subcarrier' or 'center'"
        )

    ap_node = root.child("ap")
    if ap_node is None:
        ap = ApSpec()
    else:
        radio_node = ap_node.child("radio")
        if radio_node is None:
            radio = RadioParams()
        else:
            try:
                radio = RadioParams(
                    tx_power_dbm=radio_node.get("tx_power_dbm", float,
                                                default=15.0),
                    noise_figure_db=radio_node.get("noise_figure_db", float,
                                                   default=7.0),
                )
            except ValueError as exc:
                raise ScenarioError(f"{radio_node.path}: {exc}") from exc
            radio_node.finish()
        position = ap_node.get("position", list, default=[0.0, 0.0])
        ap = ApSpec(
            position_m=_parse_position(position, f"{ap_node.path}.position"),
            orientation_deg=ap_node.get("orientation_deg", float, default=0.0),
            antenna_gain_dbi=ap_node.get("antenna_gain_dbi", float, default=3.0),
            radio=radio,
        )
        ap_node.finish()

    fsa = _parse_fsa(root.child("fsa"))
    omni_gain = root.get("omni_gain_dbi", float, default=3.0)

    devices_raw = root.get("devices", list, required=True)
    if not devices_raw:
        raise ScenarioError("scenario.devices: must not be empty")
    devices = []
    for i, item in enumerate(devices_raw):
        node = _Strict(item, f"scenario.devices[{i}]")
        devices.append(DeviceSpec(
            id=node.get("id", str, required=True),
            position_m=_parse_position(node.get("position", list, required=True),
                                       f"{node.path}.position"),
            antenna=node.get("antenna", str, default="fsa"),
            orientation_deg=node.get("orientation_deg", float, default=0.0),
        ))
        node.finish()

    loc_node = root.child("localization")
    if loc_node is None:
        localization = LocalizationConfig()
    else:
        rtt_node = loc_node.child("rtt")
        if rtt_node is None:
            rtt = RttConfig()
        else:
            rtt = RttConfig(
                jitter_sigma_ns=rtt_node.get("jitter_sigma_ns", float,
                                             default=DEFAULT_RTT_JITTER_SIGMA_NS),
                clock_resolution_ns=rtt_node.get(
                    "clock_resolution_ns", float,
                    default=DEFAULT_CLOCK_RESOLUTION_NS),
                group_size=rtt_node.get("group_size", int,
                                        default=DEFAULT_RTT_GROUP_SIZE),
                sifs_ns=rtt_node.get("sifs_ns", float, default=DEFAULT_SIFS_NS),
            )
            rtt_node.finish()
        smoothing_node = loc_node.child("smoothing")
        if smoothing_node is None:
            smoothing = SmoothingConfig()
        else:
            try:
                smoothing = SmoothingConfig(
                    points_per_mhz=smoothing_node.get("points_per_mhz", float,
                                                      default=10.0),
                    savgol_window=smoothing_node.get("savgol_window", int,
                                                     default=31),
                    savgol_order=smoothing_node.get("savgol_order", int,
                                                    default=2),
                )
            except Exception as exc:
                raise ScenarioError(f"{smoothing_node.path}: {exc}") from exc
            smoothing_node.finish()
        snr = loc_node.get("csi_snr_db", float, default=20.0)
        if "csi_snr_db" in loc_node.data and loc_node.data["csi_snr_db"] is None:
            snr = None
        source = loc_node.get("aoa_source", str, default="csi")
        if source not in ("csi", "probe"):
            raise ScenarioError(
                f"{loc_node.path}.aoa_source: must be 'csi' or 'probe'"
            )
        localization = LocalizationConfig(csi_snr_db=snr, aoa_source=source,
                                          rtt=rtt, smoothing=smoothing)
        loc_node.finish()

    root.finish()
    try:
        return Scenario(
            devices=tuple(devices),
            evaluation=evaluation,
            trials=trials,
            master_seed=master_seed,
            ru_widths_hz=ru_widths_hz,
            grid=grid,
            fading_kind=fading_kind,
            fading_k_factor_db=k_factor,
            fspl_reference=fspl_reference,
            ap=ap,
            fsa=fsa,
            omni_gain_dbi=omni_gain,
            localization=localization,
        )
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


# ---------------------------------------------------------------------------
# summary statistics


def percentile(samples, q: float) -> float:
    """Linear interpolation between closest ranks."""
    data = np.asarray(samples, dtype=float)
    if data.size == 0:
        raise ValueError("samples must be nonempty")
    if not 0.0 <= q <= 100.0:
        raise ValueError("q must lie in [0, 100]")
    return float(np.percentile(data, q, method="linear"))


@dataclass
class SummaryStats:
    """Per-metric sample vectors plus outcome counters."""

    samples: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)

    def add(self, metric: str, value: float):
        self.samples.setdefault(metric, []).append(float(value))

    def count(self, name: str, n: int = 1):
        self.counters[name] = self.counters.get(name, 0) + n

    def merge(self, other: "SummaryStats"):
        for metric, values in other.samples.items():
            self.samples.setdefault(metric, []).extend(values)
        for name, n in other.counters.items():
            self.count(name, n)

    def summary_rows(self) -> list[tuple]:
        """(metric, n, mean, p10, p50, p90) per metric, sorted by name."""
        rows = []
        for metric in sorted(self.samples):
            values = self.samples[metric]
            if not values:
                rows.append((metric, 0, None, None, None, None))
                continue
            rows.append((
                metric,
                len(values),
                float(np.mean(values)),
                percentile(values, 10),
                percentile(values, 50),
                percentile(values, 90),
            ))
        return rows


# ---------------------------------------------------------------------------
# evaluation runs


def _device_pattern(scenario: Scenario, device: DeviceSpec):
    if device.antenna == "fsa":
        return scenario.fsa
    return OmniModel(scenario.omni_gain_dbi)


def _run_tasks(tasks, worker, max_workers):
    if max_workers is None or max_workers <= 1:
        return [worker(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(worker, tasks))


def _in_range(angle: float, bounds) -> bool:
    return bounds is None or bounds[0] <= angle <= bounds[1]


def _comm_task(scenario: Scenario, table: McsTable, plans, device: DeviceSpec,
               trial: int) -> SummaryStats:
    stats = SummaryStats()
    geometry = link_geometry(scenario, device)
    pattern = _device_pattern(scenario, device)
    baseline = OmniModel(scenario.omni_gain_dbi)
    ap_pattern = OmniModel(scenario.ap.antenna_gain_dbi)
    coverage = getattr(pattern, "steerable_range_deg", None)

    if not _in_range(geometry.azimuth_at_b_deg, coverage):
        stats.count("coverage_limited", len(plans))
        return stats

    fading = scenario.fading()
    link_id = f"{device.id}|t{trial}"
    kwargs = dict(grid=scenario.grid, radio=scenario.ap.radio, fading=fading,
                  link_id=link_id, fspl_reference=scenario.fspl_reference)
    csi = synthesize_csi(geometry, ap_pattern, pattern, **kwargs)
    csi_base = synthesize_csi(geometry, ap_pattern, baseline, **kwargs)

    for ru_width_hz, plan in plans.items():
        tag = f"ru{ru_width_hz / 1e6:g}mhz"
        report = measure_ru_power(csi, plan, device.id, device.antenna)
        report_base = measure_ru_power(csi_base, plan, device.id, "omni")
        delta = delta_snr(report, report_base)
        stats.add(f"delta_snr_db/{tag}", delta)
        stats.add(f"range_improvement_pct/{tag}", range_improvement_pct(delta))

        noise = noise_floor_dbm(ru_width_hz, scenario.ap.radio.noise_figure_db)
        snr = float(np.max(report.power_dbm)) - noise
        snr_base = float(np.max(report_base.power_dbm)) - noise
        if select_mcs(table, snr_base) is None:
            stats.count("new_link" if select_mcs(table, snr) is not None
                        else "no_link")
            continue
        try:
            stats.add(f"rate_improvement_pct/{tag}",
                      rate_improvement(table, snr, snr_base, ru_width_hz))
        except NoLinkError:
            stats.count("no_link")
    return stats


def run_comm_eval(scenario: Scenario, table: McsTable | None = None,
                  max_workers: int | None = None) -> SummaryStats:
    """Best-RU SNR, rate, and range comparison of each device's antenna
    against the omnidirectional baseline at identical geometry and seed."""
    if scenario.evaluation not in ("comm", "both"):
        raise ScenarioError("scenario does not request a comm evaluation")
    if table is None:
        table = McsTable.load()
    plans = {w: partition_rus(scenario.grid.bandwidth_hz, w, scenario.grid)
             for w in scenario.ru_widths_hz}

    tasks = [(device, trial) for device in scenario.devices
             for trial in range(scenario.trials)]
    results = _run_tasks(
        tasks, lambda t: _comm_task(scenario, table, plans, *t), max_workers
    )
    stats = SummaryStats()
    for result in results:  # tasks are ordered (device, trial)
        stats.merge(result)
    return stats


def _localization_task(scenario: Scenario, device: DeviceSpec,
                       trial: int) -> SummaryStats:
    stats = SummaryStats()
    loc = scenario.localization
    geometry = link_geometry(scenario, device)
    truth_angle = geometry.azimuth_at_a_deg  # device seen from the localizer
    truth_distance = geometry.distance_m
    localizer = scenario.fsa
    target = _device_pattern(scenario, device)
    fading = scenario.fading()
    link_id = f"{device.id}|t{trial}"

    # ranging is direction-independent
    rtt_seed = int(substream(scenario.master_seed, "rtt", link_id)
                   .integers(0, 2**63))
    group = simulate_rtt_exchange(
        truth_distance,
        jitter_sigma_ns=loc.rtt.jitter_sigma_ns,
        clock_resolution_ns=loc.rtt.clock_resolution_ns,
        group_size=loc.rtt.group_size,
        seed=rtt_seed,
        sifs_ns=loc.rtt.sifs_ns,
    )
    stats.add("distance_error_m", abs(rtt_distance(group) - truth_distance))

    coverage = getattr(localizer, "steerable_range_deg", None)
    if not _in_range(truth_angle, coverage) or abs(truth_angle) > 90.0:
        stats.count("aoa_out_of_coverage")
        return stats

    calibration = getattr(localizer, "calibration", None)
    if calibration is None:
        lo, hi = localizer.band_hz
        span = getattr(localizer, "steerable_range_deg")
        calibration = BeamCalibration(
            f_ref_hz=lo, theta_ref_deg=span[0],
            slope_deg_per_hz=(span[1] - span[0]) / (hi - lo),
            f_min_hz=lo, f_max_hz=hi,
        )

    if loc.aoa_source == "probe":
        channels = channel_centers_for(calibration)
        scan = synthesize_probe_scan(geometry, target, localizer, channels,
                                     scenario.ap.radio, fading=f14ding
                                     if False else fading, link_id=link_id)
        estimate = aoa_from_probe_scan(scan, calibration, loc.smoothing)
    else:
        csi = synthesize_csi(geometry, target, localizer, scenario.grid,
                             scenario.ap.radio, fading=fading, link_id=link_id,
                             fspl_reference=scenario.fspl_reference)
        if loc.csi_snr_db is not None:
            csi = add_measurement_noise(csi, loc.csi_snr_db,
                                        scenario.master_seed, link_id)
        estimate = aoa_from_csi(csi, calibration, loc.smoothing)

    if not estimate.in_coverage:
        stats.count("aoa_out_of_coverage")
    else:
        stats.add("aoa_error_deg", abs(estimate.angle_deg - truth_angle))
    return stats


def run_localization_eval(scenario: Scenario,
                          max_workers: int | None = None) -> SummaryStats:
    """Angle and distance estimation errors against ground-truth geometry.

    The localizer sits at the access-point position, looks with the
    scenario's steered antenna, and treats every device as a target.
    """
    if scenario.evaluation not in ("localization", "both"):
        raise ScenarioError("scenario does not request a localization evaluation")
    tasks = [(device, trial) for device in scenario.devices
             for trial in range(scenario.trials)]
    results = _run_tasks(
        tasks, lambda t: _localization_task(scenario, *t), max_workers
    )
    stats = SummaryStats()
    for result in results:
        stats.merge(result)
    return stats


def run_scenario(scenario: Scenario, table: McsTable | None = None,
                 max_workers: int | None = None) -> SummaryStats:
    """Run whatever the scenario's evaluation kind requests."""
    stats = SummaryStats()
    if scenario.evaluation in ("comm", "both"):
        stats.merge(run_comm_eval(scenario, table=table, max_workers=max_workers))
    if scenario.evaluation in ("localization", "both"):
        stats.merge(run_localization_eval(scenario, max_workers=max_workers))
    return stats


# ---------------------------------------------------------------------------
# report files


def _format(value: float) -> str:
    return f"{value:.12g}"


def _sanitize(metric: str) -> str:
    return metric.replace("/", "_")


def emit_report(stats: SummaryStats, out_dir: str | Path) -> list[Path]:
    """Write raw per-sample CSVs, a summary CSV, and a text summary.

    Output bytes are a pure function of the stats contents.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create report directory {out}: {exc}") from exc

    written = []
    for metric in sorted(stats.samples):
        path = out / f"raw_{_sanitize(metric)}.csv"
        lines = [metric] + [_format(v) for v in stats.samples[metric]]
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

    rows = stats.summary_rows()
    summary_csv = out / "summary.csv"
    lines = ["metric,n,mean,p10,p50,p90"]
    for metric, n, mean, p10, p50, p90 in rows:
        if n == 0:
            lines.append(f"{metric},0,,,,")
        else:
            lines.append(",".join([metric, str(n), _format(mean),
                                   _format(p10), _format(p50), _format(p90)]))
    summary_csv.write_text("\n".join(lines) + "\n")
    written.append(summary_csv)

    summary_txt = out / "summary.txt"
    text_lines = ["metric                                      n"
                  "       mean        p10        p50        p90"]
    for metric, n, mean, p10, p50, p90 in rows:
        if n == 0:
            text_lines.append(f"{metric:<40} {0:>5}  (n=0: no samples)")
        else:
            text_lines.append(
                f"{metric:<40} {n:>5} {mean:>10.4f} {p10:>10.4f} "
                f"{p50:>10.4f} {p90:>10.4f}"
            )
    if stats.counters:
        text_lines.append("")
        text_lines.append("counters:")
        for name in sorted(stats.counters):
            text_lines.append(f"  {name}: {stats.counters[name]}")
    summary_txt.write_text("\n".join(text_lines) + "\n")
    written.append(summary_txt)
    return written


def load_raw_dir(raw_dir: str | Path) -> SummaryStats:
    """Rebuild stats from the raw per-metric CSVs in a report directory."""
    stats = SummaryStats()
    paths = sorted(Path(raw_dir).glob("raw_*.csv"))
    if not paths:
        raise ValueError(f"no raw_*.csv files in {raw_dir}")
    for path in paths:
        lines = path.read_text().splitlines()
        metric = lines[0]
        stats.samples[metric] = [float(v) for v in lines[1:] if v]
    return stats
