"""Comparator policy tests: weekly rule tables, cadence, dose floors, ESC."""

import math

import numpy as np
import pytest

from titrasim.baselines import (
    ExtremumSeekingTitrator,
    Rule202Titrator,
    StepwiseTitrator,
    rule_202_change,
    stepwise_change,
)

# (reading, adjustment) rows, boundaries probed from both sides
RULE_202_ROWS = [
    (100.0, 2.0), (6.0001, 2.0),
    (6.0, 0.0), (5.0, 0.0), (4.0, 0.0), (3.9, 0.0),
    (3.8999, -2.0), (1.0, -2.0), (0.0, -2.0),
]

STEPWISE_ROWS = [
    (20.0, 8.0), (9.5, 8.0), (9.0001, 8.0),
    (9.0, 6.0), (8.9, 6.0), (8.5, 6.0), (8.0, 6.0),
    (7.9999, 4.0), (7.5, 4.0), (7.0, 4.0),
    (6.9999, 2.0), (6.0, 2.0), (5.0, 2.0),
    (4.9999, 0.0), (4.5, 0.0), (3.9, 0.0),
    (3.8999, -2.0), (3.5, -2.0), (3.1, -2.0),
    (3.0999, -4.0), (2.0, -4.0), (0.0, -4.0),
]


def test_rule_202_table():
    for reading, du in RULE_202_ROWS:
        assert rule_202_change(reading) == du, reading


def test_stepwise_table():
    for reading, du in STEPWISE_ROWS:
        assert stepwise_change(reading) == du, reading


def test_invalid_readings_rejected():
    for fn in (rule_202_change, stepwise_change):
        for bad in (math.nan, math.inf, -0.5):
            with pytest.raises(ValueError):
                fn(bad)


def test_rule_202_weekly_cadence():
    t = Rule202Titrator(initial_dose=10.0)
    doses = [t.step_day(y_g=12.0, y_s=5.0).dose for _ in range(21)]
    # held for six days, bumped on every seventh
    assert doses[:6] == [10.0] * 6
    assert doses[6:13] == [12.0] * 7
    assert doses[13:20] == [14.0] * 7
    assert doses[20] == 16.0


def test_rule_202_uses_adjustment_day_reading():
    t = Rule202Titrator(initial_dose=10.0)
    for _ in range(6):
        t.step_day(y_g=12.0, y_s=5.0)
    d = t.step_day(y_g=5.0, y_s=5.0)   # in range on day 7: hold
    assert d.dose == 10.0 and d.dose_change == 0.0


def test_rule_202_dose_floor():
    t = Rule202Titrator(initial_dose=1.0)
    last = None
    for _ in range(7):
        last = t.step_day(y_g=3.0, y_s=5.0)
    assert last.dose == 0.0 and last.dose_change == -2.0
    for _ in range(7):
        last = t.step_day(y_g=3.0, y_s=5.0)
    assert last.dose == 0.0


def test_stepwise_three_day_mean():
    t = StepwiseTitrator(initial_dose=0.0)
    readings = [12.0, 12.0, 12.0, 12.0, 9.5, 8.5, 9.0]
    for y in readings[:-1]:
        assert t.step_day(y_g=y, y_s=5.0).dose_change == 0.0
    d = t.step_day(y_g=readings[-1], y_s=5.0)
    # mean(9.5, 8.5, 9.0) = 9.0 sits in the +6 band
    assert d.dose_change == 6.0 and d.dose == 6.0


def test_stepwise_waits_for_three_readings():
    t = StepwiseTitrator(initial_dose=4.0, cadence_days=2)
    assert t.step_day(y_g=12.0, y_s=5.0).dose_change == 0.0
    assert t.step_day(y_g=12.0, y_s=5.0).dose_change == 0.0   # day 2: history too short
    t.step_day(y_g=12.0, y_s=5.0)
    assert t.step_day(y_g=12.0, y_s=5.0).dose_change == 8.0   # day 4: mean 12


def test_stepwise_dose_floor():
    t = StepwiseTitrator(initial_dose=2.0)
    last = None
    for _ in range(7):
        last = t.step_day(y_g=2.0, y_s=5.0)
    assert last.dose == 0.0 and last.dose_change == -4.0


def test_weekly_decisions_carry_no_gain_state():
    t = Rule202Titrator()
    d = t.step_day(y_g=7.0, y_s=5.0)
    assert d.k_p_hat == 0.0 and d.k_s_hat == 0.0
    assert d.cost.c_s == 0.0


def test_esc_square_wave_dither():
    t = ExtremumSeekingTitrator()
    for day in range(1, 40):
        d = t.step_day(y_g=6.0, y_s=5.0)
        expected = t.dither_u if math.sin(10.0 * day) >= 0.0 else -t.dither_u
        assert abs(d.dose - max(t.u_nominal + expected, 0.0)) < 1e-12


def test_esc_defaults():
    t = ExtremumSeekingTitrator()
    assert t.u_applied == 5.0 and t.reference == 5.0 and t.dose_max == 300.0


def test_esc_descends_increasing_cost():
    # glucose pinned above reference proportionally to the applied dose, so
    # the fitted slope is positive and the nominal dose must come down
    t = ExtremumSeekingTitrator(initial_dose=40.0, gain=0.5)
    for _ in range(60):
        t.step_day(y_g=5.0 + 0.2 * t.u_applied, y_s=5.0)
    assert t.u_nominal < 40.0


def test_esc_clips_to_dose_box():
    t = ExtremumSeekingTitrator(initial_dose=1.0, gain=1e6)
    for _ in range(100):
        d = t.step_day(y_g=9.0, y_s=5.0)
        assert 0.0 <= t.u_nominal <= t.dose_max
        assert d.dose >= 0.0


def test_esc_dose_never_negative():
    t = ExtremumSeekingTitrator(initial_dose=0.0, dither_u=0.5)
    rng = np.random.default_rng(3)
    for _ in range(200):
        d = t.step_day(y_g=float(rng.uniform(3.0, 12.0)), y_s=5.0)
        assert d.dose >= 0.0
