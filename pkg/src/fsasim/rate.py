"""SNR to MCS/data-rate mapping and free-space range extrapolation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

from .errors import NoLinkError

#: RU width (Hz) -> column name in the table file.
RU_RATE_COLUMNS = {
    5_000_000: "rate_mbps_5mhz",
    10_000_000: "rate_mbps_10mhz",
    20_000_000: "rate_mbps_20mhz",
}


@dataclass(frozen=True)
class McsEntry:
    index: int
    modulation: str
    coding: str
    min_snr_db: float
    rates_mbps: dict  # RU width (Hz) -> Mbps


@dataclass(frozen=True)
class McsTable:
    entries: tuple

    def __post_init__(self):
        if not self.entries:
            raise ValueError("table is empty")
        for i, entry in enumerate(self.entries):
            if entry.index != i:
                raise ValueError("entries must be indexed 0..n-1 in order")
        thresholds = [e.min_snr_db for e in self.entries]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("SNR thresholds must be strictly increasing")
        for width in self.entries[0].rates_mbps:
            rates = [e.rates_mbps[width] for e in self.entries]
            if any(b <= a for a, b in zip(rates, rates[1:])):
                raise ValueError(f"rates for {width} Hz must be strictly increasing")

    @classmethod
    def load(cls, path: str | Path | None = None) -> "McsTable":
        """Read a table file; with no path, the packaged defaults.

        Lines starting with '#' are provenance comments and are skipped.
        """
        if path is None:
            text = files("fsasim.data").joinpath("mcs_80211ax.csv").read_text()
        else:
            text = Path(path).read_text()
        rows = [line for line in text.splitlines()
                if line.strip() and not line.lstrip().startswith("#")]
        reader = csv.DictReader(rows)
        entries = []
        for row in reader:
            rates = {}
            for width, column in RU_RATE_COLUMNS.items():
                if column in row and row[column] not in (None, ""):
                    rates[width] = float(row[column])
            entries.append(McsEntry(
                index=int(row["index"]),
                modulation=row["modulation"],
                coding=row["coding"],
                min_snr_db=float(row["min_snr_db"]),
                rates_mbps=rates,
            ))
        return cls(tuple(entries))

    def threshold_db(self, index: int) -> float:
        return self.entries[index].min_snr_db

    def rate_mbps(self, index: int, ru_width_hz: float) -> float:
        rates = self.entries[index].rates_mbps
        key = int(round(ru_width_hz))
        if key not in rates:
            raise ValueError(f"no rate column for RU width {ru_width_hz:.6g} Hz")
        return rates[key]


def select_mcs(table: McsTable, snr_db: float):
    """Highest index whose threshold the SNR clears; None below MCS 0."""
    chosen = None
    for entry in table.entries:
        if snr_db >= entry.min_snr_db:
            chosen = entry.index
        else:
            break
    return chosen


def rate_improvement(table: McsTable, snr_fsa_db: float, snr_omni_db: float,
                     ru_width_hz: float) -> float:
    """Relative data-rate gain (percent) of the steered antenna link.

    Raises NoLinkError when either SNR sits below the MCS 0 threshold; an
    omni side with no link is a new-link outcome, not a percentage.
    """
    mcs_omni = select_mcs(table, snr_omni_db)
    mcs_fsa = select_mcs(table, snr_fsa_db)
    if mcs_omni is None:
        raise NoLinkError("baseline below the lowest MCS threshold")
    if mcs_fsa is None:
        raise NoLinkError("steered link below the lowest MCS threshold")
    base = table.rate_mbps(mcs_omni, ru_width_hz)
    return 100.0 * (table.rate_mbps(mcs_fsa, ru_width_hz) - base) / base


def range_at_mcs0(snr_at_d0_db: float, d0_m: float, table: McsTable) -> float:
    """Farthest distance that still clears the MCS 0 threshold, extrapolating
    the SNR measured at d0 with free-space 20*log10(d) decay."""
    if d0_m <= 0:
        raise ValueError("d0_m must be > 0")
    margin = snr_at_d0_db - table.threshold_db(0)
    if margin < 0:
        raise NoLinkError("below the lowest MCS threshold at the reference distance")
    return d0_m * 10.0 ** (margin / 20.0)


def range_improvement_pct(delta_snr_db: float) -> float:
    """Range gain (percent) implied by an SNR difference under free-space
    decay: 100 * (10**(delta/20) - 1)."""
    return 100.0 * (10.0 ** (delta_snr_db / 20.0) - 1.0)
