"""Charging-session front end: energy, expected duration and stress levels.

Stress is the additional time a session takes beyond its expected
duration. The number of stress levels ``m`` is that additional time
measured in ``granularity_h`` units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import DivisionDomainError, RangeError

DEFAULT_EFFICIENCY = 0.90
DEFAULT_GRANULARITY_H = 1.0

# guards ceil() against float noise such as 5.000000000000001
_LEVEL_SNAP = 1e-9


@dataclass(frozen=True)
class ChargingSession:
    battery_capacity_kwh: float
    initial_soc_pct: float
    desired_soc_pct: float
    charging_power_kw: float
    charging_efficiency: float = DEFAULT_EFFICIENCY
    actual_duration_h: float = 0.0

    def __post_init__(self):
        if not self.battery_capacity_kwh > 0:
            raise RangeError("must be positive", field="battery_capacity_kwh")
        for name in ("initial_soc_pct", "desired_soc_pct"):
            value = getattr(self, name)
            if not 0 <= value <= 100:
                raise RangeError(f"must lie in [0, 100], got {value}", field=name)
        if self.desired_soc_pct < self.initial_soc_pct:
            raise RangeError("desired SOC is below initial SOC", field="desired_soc_pct")
        if not self.charging_power_kw > 0:
            raise RangeError("must be positive", field="charging_power_kw")
        if not 0 < self.charging_efficiency <= 1:
            raise RangeError("must lie in (0, 1]", field="charging_efficiency")
        if self.actual_duration_h < 0:
            raise RangeError("must be non-negative", field="actual_duration_h")


def energy_needed(session: ChargingSession) -> float:
    """Energy in kWh to move the battery from initial to desired SOC."""
    return session.battery_capacity_kwh / 100.0 * (session.desired_soc_pct - session.initial_soc_pct)


def expected_charging_time(energy_kwh: float, power_kw: float, efficiency: float = DEFAULT_EFFICIENCY) -> float:
    """Hours needed to deliver ``energy_kwh`` at ``power_kw`` and ``efficiency``."""
    effective = power_kw * efficiency
    if effective == 0:
        raise DivisionDomainError("charging power times efficiency is zero")
    return energy_kwh / effective


def round_to_granularity(hours: float, granularity_h: float = DEFAULT_GRANULARITY_H) -> float:
    return round(hours / granularity_h) * granularity_h


def derive_stress_levels(actual_h: float, expected_h: float, granularity_h: float = DEFAULT_GRANULARITY_H) -> int:
    """Number of stress levels implied by a session's extra duration.

    The expected time is first rounded to the nearest granularity unit, so an
    expected 2.997 h against an observed 8 h gives 5 levels, not 6. No extra
    time at all yields a single baseline level.
    """
    if not granularity_h > 0:
        raise RangeError("must be positive", field="granularity_h")
    extra = (actual_h - round_to_granularity(expected_h, granularity_h)) / granularity_h
    return max(1, math.ceil(extra - _LEVEL_SNAP))


def session_summary(session: ChargingSession, granularity_h: float = DEFAULT_GRANULARITY_H) -> dict:
    """Energy, expected hours and level count for one session."""
    en = energy_needed(session)
    hours = expected_charging_time(en, session.charging_power_kw, session.charging_efficiency)
    return {
        "energy_kwh": en,
        "expected_hours": hours,
        "stress_levels": derive_stress_levels(session.actual_duration_h, hours, granularity_h),
    }
