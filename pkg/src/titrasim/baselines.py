"""Comparator titration policies: two weekly standard-of-care rules and a
daily extremum-seeking tuner.

The weekly rules adjust the dose every seventh day from fasting fingerstick
readings; gaps between the tabulated reading bands are closed by extending
each band upward, which always picks the smaller adjustment.
"""

from dataclasses import dataclass
import math

import numpy as np

from .engine import CostBreakdown, DayDecision, ExponentialEstimator, softmin


def rule_202_change(smbg: float) -> float:
    """Weekly +2/0/-2 units from the last fasting reading."""
    if not math.isfinite(smbg) or smbg < 0.0:
        raise ValueError(f"invalid fasting reading {smbg}")
    if smbg > 6.0:
        return 2.0
    if smbg >= 3.9:
        return 0.0
    return -2.0


def stepwise_change(mean_smbg_3d: float) -> float:
    """Weekly adjustment from the mean of the last three fasting readings."""
    if not math.isfinite(mean_smbg_3d) or mean_smbg_3d < 0.0:
        raise ValueError(f"invalid fasting mean {mean_smbg_3d}")
    if mean_smbg_3d > 9.0:
        return 8.0
    if mean_smbg_3d >= 8.0:
        return 6.0
    if mean_smbg_3d >= 7.0:
        return 4.0
    if mean_smbg_3d >= 5.0:
        return 2.0
    if mean_smbg_3d >= 3.9:
        return 0.0
    if mean_smbg_3d >= 3.1:
        return -2.0
    return -4.0


def _decision(day: int, dose: float, du: float, cost: CostBreakdown) -> DayDecision:
    return DayDecision(day=day, dose=dose, dose_change=du, cost=cost,
                       k_p_hat=0.0, k_s_hat=0.0, k_p_applied=0.0, k_s_applied=0.0)


def _glucose_cost(y_g: float, reference: float) -> CostBreakdown:
    e_g = y_g - reference
    c_g = (e_g / reference) ** 2
    c_h = softmin(e_g, 0.0) ** 2
    return CostBreakdown(c_g=c_g, c_h=c_h, c_s=0.0, c_theta=0.0,
                         total=c_g + 10.0 * c_h)


class Rule202Titrator:
    """Hold the dose for a week, then move by {+2, 0, -2} from the day's reading."""

    def __init__(self, initial_dose: float = 0.0, reference: float = 5.5,
                 cadence_days: int = 7):
        self.dose = float(initial_dose)
        self.reference = reference
        self.cadence = cadence_days
        self.day = 1

    def step_day(self, y_g: float, y_s: float) -> DayDecision:
        du = 0.0
        if self.day % self.cadence == 0:
            du = rule_202_change(y_g)
            self.dose = max(self.dose + du, 0.0)
        decision = _decision(self.day, self.dose, du, _glucose_cost(y_g, self.reference))
        self.day += 1
        return decision


class StepwiseTitrator:
    """Weekly stepped adjustments from the three-day fasting mean."""

    def __init__(self, initial_dose: float = 0.0, reference: float = 5.5,
                 cadence_days: int = 7):
        self.dose = float(initial_dose)
        self.reference = reference
        self.cadence = cadence_days
        self.history: list[float] = []
        self.day = 1

    def step_day(self, y_g: float, y_s: float) -> DayDecision:
        self.history.append(float(y_g))
        du = 0.0
        if self.day % self.cadence == 0 and len(self.history) >= 3:
            du = stepwise_change(float(np.mean(self.history[-3:])))
            self.dose = max(self.dose + du, 0.0)
        decision = _decision(self.day, self.dose, du, _glucose_cost(y_g, self.reference))
        self.day += 1
        return decision


class ExtremumSeekingTitrator:
    """Daily dose tuner that regresses the glucose cost on the applied dose.

    The fit uses exponential forgetting on the regressor [u, 1]; a square-wave
    dither keeps the dose excited, and the nominal dose descends the fitted
    slope under a box clamp.  Without the directional split the covariance
    blows up whenever the dither is removed.
    """

    def __init__(self, initial_dose: float = 5.0, reference: float = 5.0,
                 gain: float = 0.05, dither_u: float = 0.5, dose_max: float = 300.0,
                 lam: float = 0.9):
        self.reference = reference
        self.gain = gain
        self.dither_u = dither_u
        self.dose_max = dose_max
        self.estimator = ExponentialEstimator(2, lam=lam)
        self.u_nominal = float(initial_dose)
        self.u_applied = float(initial_dose)
        self.day = 1

    def step_day(self, y_g: float, y_s: float) -> DayDecision:
        cost = _glucose_cost(y_g, self.reference)
        phi = np.array([self.u_applied, 1.0])
        slope = float(self.estimator.update(phi, cost.total)[0])
        self.u_nominal = float(np.clip(self.u_nominal - self.gain * slope, 0.0, self.dose_max))
        wave = self.dither_u if math.sin(10.0 * self.day) >= 0.0 else -self.dither_u
        prev = self.u_applied
        self.u_applied = max(self.u_nominal + wave, 0.0)
        decision = _decision(self.day, self.u_applied, self.u_applied - prev, cost)
        self.day += 1
        return decision
