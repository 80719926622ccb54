"""Measurement models: fingerstick glucose noise and the daily wellbeing score.

The score model turns the recent drop of blood glucose relative to its own
running average into a latent score x_s = H * sig(x_r), then corrupts it with
Beta noise whose mean is the latent value.  Subjects differ in steepness rho,
midpoint d, history length h and noise concentration eta.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import expit


@dataclass(frozen=True)
class SmbgNoise:
    """Additive fingerstick error with glucose-dependent spread.

    sigma(x) = sigma2 / kappa * softplus(kappa * (x - x_knee)) + sigma1
    """

    sigma1: float = 0.415
    sigma2: float = 0.1
    kappa: float = 5.0
    x_knee: float = 4.2

    def sigma(self, x_g):
        x_g = np.asarray(x_g, dtype=float)
        sp = np.logaddexp(0.0, self.kappa * (x_g - self.x_knee))
        return self.sigma2 / self.kappa * sp + self.sigma1

    def measure(self, x_g, rng: np.random.Generator):
        """Noisy reading, clamped at zero."""
        x_g = np.asarray(x_g, dtype=float)
        draw = x_g + self.sigma(x_g) * rng.standard_normal(x_g.shape)
        return np.maximum(draw, 0.0)


@dataclass(frozen=True)
class ScoreTraits:
    """Per-subject wellbeing response; sig_{rho,d}(d) = 0.5 by construction."""

    rho: float      # sigmoid steepness
    d: float        # drop ratio at which the score halves, in (0, 1)
    h: int          # history window, whole days
    eta: float      # Beta concentration; larger = tighter noise
    p_f: float = 0.0  # per-day probability the score is not reported

    def __post_init__(self):
        if not (0.0 < self.d < 1.0):
            raise ValueError("d must be inside (0, 1)")
        if self.rho <= 0.0 or self.eta <= 0.0:
            raise ValueError("rho and eta must be positive")
        if self.h < 1:
            raise ValueError("h must be at least one day")
        if not (0.0 <= self.p_f < 1.0):
            raise ValueError("p_f must be in [0, 1)")


def decrease_ratio(bg_history: np.ndarray, h_days: int, sample_minutes: int) -> float:
    """Current glucose over its trailing mean, clipped to [0, 1].

    The trailing window covers h_days of samples (plus the current one) at the
    given sampling period; shorter histories use every sample available, and
    an empty history returns 1 (no drop observed yet).
    """
    hist = np.asarray(bg_history, dtype=float)
    if hist.size == 0:
        return 1.0
    window = (24 * 60 // sample_minutes) * h_days + 1
    tail = hist[-min(window, hist.size):]
    mu = float(tail.mean())
    if mu <= 0.0:
        return 1.0
    return float(np.clip(hist[-1] / mu, 0.0, 1.0))


def wellbeing_sigmoid(x, rho, d):
    """Monotone map from drop ratio to [0, 1] with value 0.5 exactly at x = d.

    Built from the log-odds of u = x^(log 2 / log(1/d)); evaluated in log
    space so steep rho never overflows.  Accepts arrays in any argument.
    """
    x = np.asarray(x, dtype=float)
    rho = np.asarray(rho, dtype=float)
    d = np.asarray(d, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)):
        raise ValueError("drop ratio must lie in [0, 1]")
    g = math.log(2.0) / np.log(1.0 / d)
    with np.errstate(divide="ignore"):
        log_u = g * np.log(x)
    u = np.exp(log_u)
    # log-odds of u; u -> 1 gives +inf, u -> 0 gives -inf, both saturate cleanly
    with np.errstate(divide="ignore", invalid="ignore"):
        log_odds = log_u - np.log1p(-u)
    out = expit(rho * log_odds)
    # the midpoint and the endpoints are pinned, not left to rounding
    out = np.where(x == d, 0.5, out)
    out = np.where(x <= 0.0, 0.0, out)
    out = np.where(x >= 1.0, 1.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def latent_score(x_r, traits: ScoreTraits, score_max: float) -> float:
    """Noise-free score x_s = H * sig(x_r)."""
    return float(score_max * wellbeing_sigmoid(x_r, traits.rho, traits.d))


def noisy_score(x_s: float, traits: ScoreTraits, score_max: float,
                rng: np.random.Generator, discrete: bool = False) -> float:
    """Beta-distributed reported score with mean x_s.

    zeta ~ Beta(f * eta, (1 - f) * eta) with f = x_s / H, so E[H zeta] = x_s and
    Var[H zeta] = x_s (H - x_s) / (1 + eta).  The endpoints are deterministic.
    """
    if not (0.0 <= x_s <= score_max):
        raise ValueError(f"x_s={x_s} outside [0, {score_max}]")
    f = x_s / score_max
    if f <= 0.0:
        y = 0.0
    elif f >= 1.0:
        y = score_max
    else:
        y = score_max * float(rng.beta(f * traits.eta, (1.0 - f) * traits.eta))
    if discrete:
        y = float(np.rint(y))
    return y


class ScoreReporter:
    """Daily score pipeline carrying the previous report for missing days.

    Evaluation order each day: latent score from the drop ratio, Beta noise,
    the true-hypoglycemia override (a real low is not a score event, report
    the top of the scale), then the missing-report carryover.  The missing
    draw is consumed every day, even when p_f = 0, so one configuration's
    stream never shifts another's.
    """

    def __init__(self, traits: ScoreTraits, score_max: float, rng: np.random.Generator,
                 discrete: bool = False, hypo_override_mmol: float = 3.9):
        self.traits = traits
        self.score_max = score_max
        self.rng = rng
        self.discrete = discrete
        self.hypo_override_mmol = hypo_override_mmol
        self.prev_score = score_max

    def report(self, x_r: float, true_bg: float) -> tuple[float, float]:
        """Returns (latent x_s, reported y_s) for one day."""
        x_s = latent_score(x_r, self.traits, self.score_max)
        y_s = noisy_score(x_s, self.traits, self.score_max, self.rng, self.discrete)
        missing = float(self.rng.random()) < self.traits.p_f
        if true_bg < self.hypo_override_mmol:
            y_s = self.score_max
        if missing:
            y_s = self.prev_score
        self.prev_score = y_s
        return x_s, y_s


def sample_score_traits(rng: np.random.Generator) -> ScoreTraits:
    """Population draw of the wellbeing response."""
    return ScoreTraits(
        rho=float(rng.uniform(2.0, 20.0)),
        d=float(rng.uniform(0.35, 0.85)),
        h=int(rng.integers(14, 31)),
        eta=float(rng.uniform(5.0, 20.0)),
        p_f=float(rng.uniform(0.1, 0.4)),
    )
