"""Daily dose-titration engine.

The controller adjusts a once-daily dose from two feedback signals: a fasting
glucose measurement y_g and a self-reported wellbeing score y_s in [0, H].

    du(k) = k_p / (1 + k_s * e_s(k)) * e_g(k)
    e_g   = y_g - r          (tracking error, mmol/L)
    e_s   = (H - y_s) / H    (score deficit, dimensionless in [0, 1])
    u(k)  = max(u(k-1) + du(k), 0)

The gains theta = (k_p, k_s) are tuned online: each day the realized cost
z(k) is regressed on the previously applied gains through a local linear
model z ~ [theta, 1] @ [g_z; b], the recursive estimator uses directional
forgetting so that unexcited directions keep their information, and the
gradient estimate feeds a projected adaptive-moment step confined to
Theta = [0, 2]^2.  A small square-wave dither keeps the gains persistently
exciting.
"""

from dataclasses import dataclass, field
import math

import numpy as np

THETA_LO = 0.0
THETA_HI = 2.0


@dataclass(frozen=True)
class ControllerParams:
    """Feedback gains; both coordinates live in [0, 2]."""

    k_p: float
    k_s: float

    def __post_init__(self):
        for name, v in (("k_p", self.k_p), ("k_s", self.k_s)):
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            if not (THETA_LO <= v <= THETA_HI):
                raise ValueError(f"{name}={v} outside [{THETA_LO}, {THETA_HI}]")


@dataclass(frozen=True)
class Errors:
    """Daily feedback errors; e_s is only meaningful in [0, 1]."""

    e_g: float
    e_s: float

    def __post_init__(self):
        if not (math.isfinite(self.e_g) and math.isfinite(self.e_s)):
            raise ValueError("errors must be finite")
        if not (0.0 <= self.e_s <= 1.0):
            raise ValueError(f"e_s={self.e_s} outside [0, 1]")


def control_law(params: ControllerParams, errors: Errors) -> float:
    """Dose change du = k_p / (1 + k_s * e_s) * e_g.

    A positive tracking error (measured glucose above reference) raises the
    dose; a low wellbeing score attenuates the step without changing its sign.
    """
    return params.k_p / (1.0 + params.k_s * errors.e_s) * errors.e_g


def apply_dose(previous_dose: float, dose_change: float) -> float:
    """Next dose, clamped at zero units."""
    if not (math.isfinite(previous_dose) and previous_dose >= 0.0):
        raise ValueError(f"previous_dose must be finite and >= 0, got {previous_dose}")
    if not math.isfinite(dose_change):
        raise ValueError("dose_change must be finite")
    return max(previous_dose + dose_change, 0.0)


def softmin(x1: float, x2: float, sharpness: float = 50.0) -> float:
    """Smooth minimum -log(exp(-a*x1) + exp(-a*x2)) / a.

    Evaluated through logaddexp so large |a*x| never overflows.  Always lies
    at or below min(x1, x2), approaching it as the sharpness grows.
    """
    if sharpness <= 0.0:
        raise ValueError("sharpness must be positive")
    return float(-np.logaddexp(-sharpness * x1, -sharpness * x2) / sharpness)


@dataclass(frozen=True)
class CostBreakdown:
    c_g: float
    c_h: float
    c_s: float
    c_theta: float
    total: float


def measurement_cost(y_g: float, y_s: float, reference: float, score_max: float) -> CostBreakdown:
    """Daily cost of a (glucose, score) pair.

    c_g penalizes relative tracking error, c_h penalizes only the hypo side
    through a softmin hinge, c_s penalizes score deficit.  The hinge and the
    score terms carry a 10x weight:

        z = (e_g / r)^2 + 10 * softmin(e_g, 0)^2 + 10 * e_s^2
    """
    if reference <= 0.0 or score_max <= 0.0:
        raise ValueError("reference and score_max must be positive")
    if not (0.0 <= y_s <= score_max):
        raise ValueError(f"y_s={y_s} outside [0, {score_max}]")
    if not math.isfinite(y_g):
        raise ValueError("y_g must be finite")
    e_g = y_g - reference
    e_s = (score_max - y_s) / score_max
    c_g = (e_g / reference) ** 2
    c_h = softmin(e_g, 0.0) ** 2
    c_s = e_s**2
    total = c_g + 10.0 * c_h + 10.0 * c_s
    return CostBreakdown(c_g=c_g, c_h=c_h, c_s=c_s, c_theta=0.0, total=total)


def smoothing_cost_gradient(theta: np.ndarray, theta_prev2: np.ndarray) -> np.ndarray:
    """Gradient of the parameter-smoothing cost 0.5 * ||theta - theta_prev2||^2."""
    return np.asarray(theta, dtype=float) - np.asarray(theta_prev2, dtype=float)


def project(x: np.ndarray, weight: np.ndarray, lo: float = THETA_LO, hi: float = THETA_HI) -> np.ndarray:
    """Weighted projection onto the box [lo, hi]^n.

    weight holds the diagonal of a positive-definite metric; because the box
    is axis-aligned the weighted argmin separates per coordinate and reduces
    to a clamp, independent of the weights.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(weight, dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w <= 0.0):
        raise ValueError("weight diagonal must be finite and positive")
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot project a non-finite point")
    return np.clip(x, lo, hi)


def dither(day: int, amplitude: float = 0.01, dim: int = 2) -> np.ndarray:
    """Square-wave probing signal amplitude * sign(sin(10 * day)), same on every coordinate."""
    if day < 1:
        raise ValueError("day index starts at 1")
    # sign(0) := +1 so the wave never vanishes
    s = amplitude if math.sin(10.0 * day) >= 0.0 else -amplitude
    return np.full(dim, s, dtype=float)


class RecursiveEstimator:
    """Least squares with directional forgetting.

    Discounts only the subspace currently excited by the regressor, so the
    information matrix R stays bounded away from singular under constant
    regressors while still tracking drift.  P and R are maintained as exact
    mutual inverses through rank-one updates.
    """

    def __init__(self, dim: int, lam: float = 0.9, eps_phi: float = 1e-3,
                 p0_scale: float = 1.0, check_consistency: bool = False):
        if not (0.0 < lam <= 1.0):
            raise ValueError("forgetting factor must be in (0, 1]")
        self.dim = dim
        self.lam = lam
        self.eps_phi = eps_phi
        self.check_consistency = check_consistency
        self.psi_hat = np.zeros(dim)
        self.P = np.eye(dim) * p0_scale
        self.R = np.eye(dim) / p0_scale
        self.max_cond = 1.0

    def update(self, phi: np.ndarray, z: float) -> np.ndarray:
        """One regression step on the pair (phi, z); returns the gradient block of psi_hat.

        psi_hat stacks [g; b] where b is the intercept absorbing the level of z,
        so the returned slice drops the last entry.
        """
        phi = np.asarray(phi, dtype=float)
        if phi.shape != (self.dim,):
            raise ValueError(f"regressor must have shape ({self.dim},)")
        if not (np.all(np.isfinite(phi)) and math.isfinite(z)):
            raise ValueError("non-finite regression input")
        lam = self.lam
        if np.linalg.norm(phi) >= self.eps_phi:
            r_phi = self.R @ phi
            denom = float(phi @ r_phi)
            p_bar = self.P + ((1.0 - lam) / lam) / denom * np.outer(phi, phi)
            # M @ R is symmetric because R is: (1-lam)/denom * outer(R phi, R phi)
            mr = ((1.0 - lam) / denom) * np.outer(r_phi, r_phi)
        else:
            p_bar = self.P
            mr = 0.0
        p_phi = p_bar @ phi
        s = 1.0 + float(phi @ p_phi)
        gain = p_phi / s
        self.psi_hat = self.psi_hat + gain * (z - float(phi @ self.psi_hat))
        p_new = p_bar - np.outer(p_phi, p_phi) / s
        self.P = 0.5 * (p_new + p_new.T)  # keep symmetric against FP drift
        r_new = self.R - mr + np.outer(phi, phi)
        self.R = 0.5 * (r_new + r_new.T)
        if not np.all(np.isfinite(self.P)) or np.any(np.diag(self.P) <= 0.0):
            raise FloatingPointError("covariance lost positive definiteness")
        self.max_cond = max(self.max_cond, float(np.linalg.cond(self.P)))
        if self.check_consistency:
            self._verify()
        return self.psi_hat[:-1]

    def _verify(self):
        np.linalg.cholesky(self.P)
        resid = np.linalg.norm(self.P @ self.R - np.eye(self.dim))
        if resid >= 1e-6:
            raise FloatingPointError(f"P, R diverged from mutual inverses: {resid:.3e}")


class ExponentialEstimator:
    """Plain exponential-forgetting least squares (no directional split).

    Under a constant regressor the covariance grows without bound in the
    unexcited directions; kept as the contrast condition and as the update
    inside the extremum-seeking baseline.
    """

    def __init__(self, dim: int, lam: float = 0.9, p0_scale: float = 1.0):
        if not (0.0 < lam <= 1.0):
            raise ValueError("forgetting factor must be in (0, 1]")
        self.dim = dim
        self.lam = lam
        self.psi_hat = np.zeros(dim)
        self.P = np.eye(dim) * p0_scale
        self.max_cond = 1.0

    def update(self, phi: np.ndarray, z: float) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        denom = self.lam + float(phi @ self.P @ phi)
        gain = (self.P @ phi) / denom
        self.psi_hat = self.psi_hat + gain * (z - float(phi @ self.psi_hat))
        p_new = (self.P - np.outer(gain, phi @ self.P)) / self.lam
        self.P = 0.5 * (p_new + p_new.T)
        self.max_cond = max(self.max_cond, float(np.linalg.cond(self.P)))
        return self.psi_hat[:-1]


class BeliefStepper:
    """Projected adaptive-moment update driven by gradient-prediction error.

    The second moment tracks (m - g)^2 rather than g^2, so steps grow when
    successive gradients agree and shrink when they disagree:

        m <- b1 m + (1 - b1) g
        s <- b2 s + (1 - b2) (m - g)^2 + eps
        theta <- Proj[ theta - alpha * mhat / (sqrt(shat) + eps) ]

    with the usual bias corrections mhat = m / (1 - b1^k), shat = s / (1 - b2^k).
    """

    def __init__(self, dim: int, alpha: float = 1e-3, beta1: float = 0.99,
                 beta2: float = 0.999, eps: float = 1e-8,
                 lo: float = THETA_LO, hi: float = THETA_HI):
        self.alpha = alpha
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.lo = lo
        self.hi = hi
        self.m = np.zeros(dim)
        self.s = np.zeros(dim)
        self.k = 0

    def step(self, g_hat: np.ndarray, theta_prev: np.ndarray) -> np.ndarray:
        g_hat = np.asarray(g_hat, dtype=float)
        if not np.all(np.isfinite(g_hat)):
            raise ValueError("non-finite gradient estimate")
        self.k += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * g_hat
        self.s = self.beta2 * self.s + (1.0 - self.beta2) * (self.m - g_hat) ** 2 + self.eps
        m_hat = self.m / (1.0 - self.beta1**self.k)
        s_hat = self.s / (1.0 - self.beta2**self.k)
        candidate = np.asarray(theta_prev, dtype=float) - self.alpha * m_hat / (np.sqrt(s_hat) + self.eps)
        return project(candidate, s_hat, self.lo, self.hi)


@dataclass
class EngineConfig:
    """Defaults for the full titration loop; every constant is overridable."""

    reference: float = 5.5         # fasting glucose target, mmol/L
    score_max: float = 10.0        # top of the wellbeing scale H
    kp0: float = 0.3
    ks0: float = 1.0
    freeze_ks: bool = False        # drop the score gain entirely (1-dim theta)
    use_score: bool = True         # False substitutes y_s = H (no score feedback)
    lam: float = 0.9
    eps_phi: float = 1e-3
    dither_amp: float = 0.01
    alpha: float = 1e-3
    beta1: float = 0.99
    beta2: float = 0.999
    eps_opt: float = 1e-8
    check_consistency: bool = False


@dataclass(frozen=True)
class DayDecision:
    day: int
    dose: float
    dose_change: float
    cost: CostBreakdown
    k_p_hat: float
    k_s_hat: float
    k_p_applied: float
    k_s_applied: float


class TitrationEngine:
    """Stateful daily loop tying the estimator, the stepper and the control law together.

    Day k, in order: evaluate the cost of today's measurements (produced under
    the gains applied on day k-1), regress it on those applied gains, add the
    smoothing-cost gradient, take one projected belief step, dither and
    project the new gains, then emit the dose change.
    """

    def __init__(self, config: EngineConfig, initial_dose: float = 0.0):
        self.config = config
        dim = 1 if config.freeze_ks else 2
        self.dim = dim
        theta0 = np.array([config.kp0] if config.freeze_ks else [config.kp0, config.ks0])
        self.theta_hat_prev = theta0.copy()    # thetahat(k-1)
        self.theta_hat_prev2 = theta0.copy()   # thetahat(k-2); seeded equal at start
        self.theta_applied_prev = theta0.copy()
        self.estimator = RecursiveEstimator(dim + 1, lam=config.lam, eps_phi=config.eps_phi,
                                            check_consistency=config.check_consistency)
        self.stepper = BeliefStepper(dim, alpha=config.alpha, beta1=config.beta1,
                                     beta2=config.beta2, eps=config.eps_opt)
        self.dose = float(initial_dose)
        self.day = 1

    def _params(self, theta: np.ndarray) -> ControllerParams:
        if self.config.freeze_ks:
            return ControllerParams(k_p=float(theta[0]), k_s=0.0)
        return ControllerParams(k_p=float(theta[0]), k_s=float(theta[1]))

    def step_day(self, y_g: float, y_s: float) -> DayDecision:
        cfg = self.config
        if not cfg.use_score:
            y_s = cfg.score_max
        cost = measurement_cost(y_g, y_s, cfg.reference, cfg.score_max)

        phi = np.append(self.theta_applied_prev, 1.0)
        g_z = self.estimator.update(phi, cost.total)
        g_hat = g_z + smoothing_cost_gradient(self.theta_hat_prev, self.theta_hat_prev2)
        theta_hat = self.stepper.step(g_hat, self.theta_hat_prev)
        probe = dither(self.day, cfg.dither_amp, self.dim)
        theta_applied = project(theta_hat + probe, np.ones(self.dim))

        errors = Errors(e_g=y_g - cfg.reference, e_s=(cfg.score_max - y_s) / cfg.score_max)
        du = control_law(self._params(theta_applied), errors)
        self.dose = apply_dose(self.dose, du)

        self.theta_hat_prev2 = self.theta_hat_prev
        self.theta_hat_prev = theta_hat
        self.theta_applied_prev = theta_applied
        decision = DayDecision(
            day=self.day,
            dose=self.dose,
            dose_change=du,
            cost=cost,
            k_p_hat=float(theta_hat[0]),
            k_s_hat=0.0 if cfg.freeze_ks else float(theta_hat[1]),
            k_p_applied=float(theta_applied[0]),
            k_s_applied=0.0 if cfg.freeze_ks else float(theta_applied[1]),
        )
        self.day += 1
        return decision
