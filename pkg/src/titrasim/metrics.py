"""Glycemic outcome metrics and cohort aggregation.

Range shares follow the consensus cut points (mmol/L): below 3, [3, 3.9),
in range [3.9, 10), above range [10, 13.9) and [13.9, inf).  The five shares
partition every sample exactly once.
"""

from dataclasses import dataclass, fields
import math

import numpy as np

MMOL_TO_MGDL = 18.016


@dataclass(frozen=True)
class RunMetrics:
    tir_pct: float
    tar1_pct: float
    tar2_pct: float
    tbr1_pct: float
    tbr2_pct: float
    ag_mmol_l: float
    gv_pct: float
    gmi_pct: float
    mean_dose_u: float
    phg_gt08_pct: float
    phg_lt05_pct: float
    phg_lt02_pct: float


METRIC_FIELDS = [f.name for f in fields(RunMetrics)]


def gmi_pct(ag_mmol_l: float) -> float:
    """Glucose management indicator, % units, from average glucose."""
    return 3.31 + 0.02392 * (ag_mmol_l * MMOL_TO_MGDL)


def range_shares(bg: np.ndarray) -> dict[str, float]:
    """Percent of samples in each consensus band; sums to 100 by construction."""
    bg = np.asarray(bg, dtype=float)
    if bg.size == 0:
        raise ValueError("empty glucose trace")
    n = bg.size
    return {
        "tbr2_pct": 100.0 * float((bg < 3.0).sum()) / n,
        "tbr1_pct": 100.0 * float(((bg >= 3.0) & (bg < 3.9)).sum()) / n,
        "tir_pct": 100.0 * float(((bg >= 3.9) & (bg < 10.0)).sum()) / n,
        "tar1_pct": 100.0 * float(((bg >= 10.0) & (bg < 13.9)).sum()) / n,
        "tar2_pct": 100.0 * float((bg >= 13.9).sum()) / n,
    }


def compute_metrics(bg_trace: np.ndarray, xs_trace: np.ndarray, dose_trace: np.ndarray,
                    score_max: float = 10.0) -> RunMetrics:
    """Outcome summary of one subject's run.

    bg_trace is the minute-grid true glucose, xs_trace the daily noise-free
    score, dose_trace the daily dose.  GV uses the population std.
    """
    bg = np.asarray(bg_trace, dtype=float)
    xs = np.asarray(xs_trace, dtype=float)
    doses = np.asarray(dose_trace, dtype=float)
    shares = range_shares(bg)
    ag = float(bg.mean())
    gv = 100.0 * float(bg.std()) / ag
    frac = xs / score_max
    return RunMetrics(
        ag_mmol_l=ag,
        gv_pct=gv,
        gmi_pct=gmi_pct(ag),
        mean_dose_u=float(doses.mean()),
        phg_gt08_pct=100.0 * float((frac > 0.8).mean()),
        phg_lt05_pct=100.0 * float((frac < 0.5).mean()),
        phg_lt02_pct=100.0 * float((frac < 0.2).mean()),
        **shares,
    )


class RangeAccumulator:
    """Streaming per-subject range counts and moments for long runs.

    Produces the same numbers as compute_metrics on the concatenated trace
    without holding the minute grid in memory.
    """

    def __init__(self, n_subjects: int):
        self.counts = np.zeros((5, n_subjects), dtype=np.int64)
        self.total = np.zeros(n_subjects)
        self.total_sq = np.zeros(n_subjects)
        self.n = 0

    def add_day(self, trace: np.ndarray):
        t = np.asarray(trace, dtype=float)
        self.counts[0] += (t < 3.0).sum(axis=1)
        self.counts[1] += ((t >= 3.0) & (t < 3.9)).sum(axis=1)
        self.counts[2] += ((t >= 3.9) & (t < 10.0)).sum(axis=1)
        self.counts[3] += ((t >= 10.0) & (t < 13.9)).sum(axis=1)
        self.counts[4] += (t >= 13.9).sum(axis=1)
        self.total += t.sum(axis=1)
        self.total_sq += (t * t).sum(axis=1)
        self.n += t.shape[1]

    def finalize(self, subject: int, xs_trace: np.ndarray, dose_trace: np.ndarray,
                 score_max: float = 10.0) -> RunMetrics:
        n = self.n
        ag = self.total[subject] / n
        var = self.total_sq[subject] / n - ag * ag
        gv = 100.0 * math.sqrt(max(var, 0.0)) / ag
        frac = np.asarray(xs_trace, dtype=float) / score_max
        pct = 100.0 / n
        return RunMetrics(
            tbr2_pct=self.counts[0, subject] * pct,
            tbr1_pct=self.counts[1, subject] * pct,
            tir_pct=self.counts[2, subject] * pct,
            tar1_pct=self.counts[3, subject] * pct,
            tar2_pct=self.counts[4, subject] * pct,
            ag_mmol_l=float(ag),
            gv_pct=float(gv),
            gmi_pct=gmi_pct(float(ag)),
            mean_dose_u=float(np.asarray(dose_trace, dtype=float).mean()),
            phg_gt08_pct=100.0 * float((frac > 0.8).mean()),
            phg_lt05_pct=100.0 * float((frac < 0.5).mean()),
            phg_lt02_pct=100.0 * float((frac < 0.2).mean()),
        )


def cohort_aggregate(per_subject: list[RunMetrics]) -> dict[str, dict[str, float]]:
    """Mean and interquartile range of every metric across subjects.

    Quartiles use linear interpolation, so e.g. {1,2,3,4} has IQR 1.5.
    """
    if not per_subject:
        raise ValueError("no subjects to aggregate")
    out = {}
    for name in METRIC_FIELDS:
        vals = np.array([getattr(m, name) for m in per_subject], dtype=float)
        q1, q3 = np.percentile(vals, [25.0, 75.0])
        out[name] = {"mean": float(vals.mean()), "iqr": float(q3 - q1)}
    return out


def fbg_range_shares(fbg_daily: np.ndarray) -> dict[str, float]:
    """Fasting-sample shares used for daily-model comparisons: [4, 6], < 4, < 3."""
    f = np.asarray(fbg_daily, dtype=float)
    if f.size == 0:
        raise ValueError("empty fasting trace")
    return {
        "fbg_in_4_6_pct": 100.0 * float(((f >= 4.0) & (f <= 6.0)).mean()),
        "fbg_lt_4_pct": 100.0 * float((f < 4.0).mean()),
        "fbg_lt_3_pct": 100.0 * float((f < 3.0).mean()),
    }
