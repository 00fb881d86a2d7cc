"""Resource-unit partitioning, channel feedback, and allocation.

Resource units (RUs) are contiguous, equal-width blocks of subcarriers,
indexed from 0.  Feedback reports carry one power value per RU; the
allocator hands each device its strongest remaining RU.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .channel import CsiVector, RadioParams, SubcarrierGrid, noise_floor_dbm
from .errors import (
    AllocationError,
    CapacityError,
    PartitionError,
    ShapeMismatchError,
)


@dataclass(frozen=True)
class RuPlan:
    """Partition of one channel into ru_count equal contiguous RUs."""

    grid: SubcarrierGrid
    ru_width_hz: float
    ru_count: int

    @property
    def subcarriers_per_ru(self) -> int:
        return self.grid.count // self.ru_count

    def ru_slice(self, index: int) -> slice:
        per = self.subcarriers_per_ru
        return slice(index * per, (index + 1) * per)

    def ru_band_hz(self, index: int) -> tuple[float, float]:
        """Frequency extent [low, high) of one RU."""
        low = self.grid.center_frequency_hz - self.grid.bandwidth_hz / 2.0
        return (low + index * self.ru_width_hz, low + (index + 1) * self.ru_width_hz)

    def ru_containing(self, f_hz: float) -> int:
        low = self.grid.center_frequency_hz - self.grid.bandwidth_hz / 2.0
        idx = int((f_hz - low) // self.ru_width_hz)
        if idx < 0 or idx >= self.ru_count:
            raise PartitionError(f"{f_hz:.6g} Hz lies outside the channel")
        return idx


def partition_rus(bandwidth_hz: float, ru_width_hz: float,
                  grid: SubcarrierGrid) -> RuPlan:
    """Divide the channel uniformly into bandwidth/ru_width RUs."""
    if grid.bandwidth_hz != bandwidth_hz:
        raise PartitionError("grid bandwidth does not match the channel bandwidth")
    if ru_width_hz <= 0:
        raise PartitionError("ru_width_hz must be > 0")
    m = bandwidth_hz / ru_width_hz
    if abs(m - round(m)) > 1e-9 or round(m) < 1:
        raise PartitionError(
            f"ru width {ru_width_hz:.6g} Hz does not divide {bandwidth_hz:.6g} Hz"
        )
    m = int(round(m))
    if grid.count % m != 0:
        raise PartitionError(
            f"{grid.count} subcarriers cannot split into {m} equal RUs"
        )
    return RuPlan(grid=grid, ru_width_hz=ru_width_hz, ru_count=m)


@dataclass(frozen=True, eq=False)
class RuReport:
    """Per-RU received power feedback from one device."""

    device_id: str
    antenna: str  # "fsa" or "omni"
    power_dbm: np.ndarray

    def __post_init__(self):
        power = np.asarray(self.power_dbm, dtype=float)
        power = power.copy()
        power.flags.writeable = False
        object.__setattr__(self, "power_dbm", power)

    @property
    def ru_count(self) -> int:
        return self.power_dbm.shape[0]


def measure_ru_power(csi: CsiVector, plan: RuPlan,
                     device_id: str = "", antenna: str = "") -> RuReport:
    """Mean linear power per RU, reported in dBm."""
    if csi.grid != plan.grid:
        raise ShapeMismatchError("CSI grid does not match the RU plan")
    linear = 10.0 ** (csi.power_dbm / 10.0)
    per_ru = linear.reshape(plan.ru_count, plan.subcarriers_per_ru).mean(axis=1)
    return RuReport(device_id, antenna, 10.0 * np.log10(per_ru))


@dataclass(frozen=True)
class Allocation:
    """Injective device -> RU index assignment."""

    assignments: dict

    def __post_init__(self):
        rus = list(self.assignments.values())
        if len(set(rus)) != len(rus):
            raise AllocationError("an RU is assigned to more than one device")

    def ru_for(self, device_id: str) -> int:
        if device_id not in self.assignments:
            raise AllocationError(f"device {device_id!r} has no RU")
        return self.assignments[device_id]


def allocate(reports: list[RuReport], plan: RuPlan) -> Allocation:
    """Greedy assignment by best remaining RU.

    Repeatedly hands the strongest remaining (device, RU) pair its RU; ties
    break toward the lower RU index, then the lower device id.
    """
    if not reports:
        return Allocation({})
    if len(reports) > plan.ru_count:
        raise CapacityError(
            f"{len(reports)} devices but only {plan.ru_count} RUs"
        )
    for rep in reports:
        if rep.ru_count != plan.ru_count:
            raise ShapeMismatchError("report length does not match the RU plan")

    pending = sorted(reports, key=lambda r: r.device_id)
    free = np.ones(plan.ru_count, dtype=bool)
    assignments: dict[str, int] = {}
    while pending:
        best = None  # (power, report, ru)
        for rep in pending:
            masked = np.where(free, rep.power_dbm, -np.inf)
            ru = int(np.argmax(masked))  # argmax takes the lowest tied index
            if best is None or masked[ru] > best[0]:
                best = (masked[ru], rep, ru)
        _, rep, ru = best
        assignments[rep.device_id] = ru
        free[ru] = False
        pending.remove(rep)
    return Allocation(assignments)


def best_total_allocation(reports: list[RuReport],
                          plan: RuPlan) -> tuple[Allocation, float]:
    """Exhaustive max-total-power assignment, for gauging the greedy gap.

    Only intended for small problems (RU count <= 8, <= 8 devices).
    """
    if len(reports) > 8 or plan.ru_count > 8:
        raise CapacityError("exhaustive search limited to 8 devices and 8 RUs")
    if len(reports) > plan.ru_count:
        raise CapacityError("more devices than RUs")
    reports = sorted(reports, key=lambda r: r.device_id)
    best_total = -np.inf
    best_combo = None
    for combo in permutations(range(plan.ru_count), len(reports)):
        total = sum(rep.power_dbm[ru] for rep, ru in zip(reports, combo))
        if total > best_total:
            best_total = total
            best_combo = combo
    alloc = Allocation({rep.device_id: ru for rep, ru in zip(reports, best_combo)})
    return alloc, float(best_total)


def delta_snr(report_fsa: RuReport, report_omni: RuReport) -> float:
    """Best-RU power difference (dB) between the two antenna reports."""
    if report_fsa.ru_count != report_omni.ru_count:
        raise ShapeMismatchError("reports cover different RU counts")
    return float(np.max(report_fsa.power_dbm) - np.max(report_omni.power_dbm))


def evaluate_link(allocation: Allocation, csi_by_device: dict,
                  plan: RuPlan, radio: RadioParams) -> dict:
    """SNR (dB) each device sees in its allocated RU.

    Identical for downlink and uplink on the same geometry because the
    synthesized power already sums both antenna gains.
    """
    noise = noise_floor_dbm(plan.ru_width_hz, radio.noise_figure_db)
    out = {}
    for device_id, csi in csi_by_device.items():
        ru = allocation.ru_for(device_id)
        report = measure_ru_power(csi, plan, device_id=device_id)
        out[device_id] = float(report.power_dbm[ru] - noise)
    return out


def preamble_decodable(csi: CsiVector, radio: RadioParams,
                       min_snr_db: float) -> bool:
    """Whether a full-channel preamble heard at the antenna's average gain
    clears the given SNR threshold."""
    mean_power = 10.0 * np.log10(np.mean(10.0 ** (csi.power_dbm / 10.0)))
    noise = noise_floor_dbm(csi.grid.bandwidth_hz, radio.noise_figure_db)
    return bool(mean_power - noise >= min_snr_db)
