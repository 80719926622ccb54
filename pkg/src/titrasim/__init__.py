"""Closed-loop insulin titration trials on virtual type-2-diabetes cohorts.

The package ties together a daily dose-titration engine (recursive gradient
estimation with directional forgetting feeding a projected adaptive-moment
step), three virtual subject families, a wellbeing-score channel with its
sensing noise, standard-of-care and extremum-seeking baselines, and glucose
outcome metrics, all under one reproducible trial runner.
"""

from .engine import (BeliefStepper, ControllerParams, CostBreakdown, DayDecision,
                     EngineConfig, Errors, ExponentialEstimator, RecursiveEstimator,
                     TitrationEngine, apply_dose, control_law, dither,
                     measurement_cost, project, smoothing_cost_gradient, softmin)
from .sensors import (ScoreReporter, ScoreTraits, SmbgNoise, decrease_ratio,
                      latent_score, noisy_score, sample_score_traits,
                      wellbeing_sigmoid)
from .cohort import (DailySubjectBatch, ModelConstants, PhysioState, SubjectBatch,
                     SubjectParams, calibrate_stationary, dose_for_target,
                     draw_random_meals, draw_scheduled_meals, m1_advance,
                     p_egp_sweep, sample_subject, steady_state_fbg,
                     step_physiology)
from .baselines import (ExtremumSeekingTitrator, Rule202Titrator, StepwiseTitrator,
                        rule_202_change, stepwise_change)
from .metrics import (METRIC_FIELDS, RangeAccumulator, RunMetrics, cohort_aggregate,
                      compute_metrics, fbg_range_shares, gmi_pct, range_shares)
from .runner import (DropRatioTracker, PRESETS, RunResult, ScenarioConfig, emit_run,
                     load_scenario, make_strategy, run_scenario, write_comparison)

__version__ = "0.1.0"

__all__ = [
    "BeliefStepper", "ControllerParams", "CostBreakdown", "DayDecision",
    "EngineConfig", "Errors", "ExponentialEstimator", "RecursiveEstimator",
    "TitrationEngine", "apply_dose", "control_law", "dither", "measurement_cost",
    "project", "smoothing_cost_gradient", "softmin",
    "ScoreReporter", "ScoreTraits", "SmbgNoise", "decrease_ratio", "latent_score",
    "noisy_score", "sample_score_traits", "wellbeing_sigmoid",
    "DailySubjectBatch", "ModelConstants", "PhysioState", "SubjectBatch",
    "SubjectParams", "calibrate_stationary", "dose_for_target", "draw_random_meals",
    "draw_scheduled_meals", "m1_advance", "p_egp_sweep", "sample_subject",
    "steady_state_fbg", "step_physiology",
    "ExtremumSeekingTitrator", "Rule202Titrator", "StepwiseTitrator",
    "rule_202_change", "stepwise_change",
    "METRIC_FIELDS", "RangeAccumulator", "RunMetrics", "cohort_aggregate",
    "compute_metrics", "fbg_range_shares", "gmi_pct", "range_shares",
    "DropRatioTracker", "PRESETS", "RunResult", "ScenarioConfig", "emit_run",
    "load_scenario", "make_strategy", "run_scenario", "write_comparison",
    "__version__",
]
